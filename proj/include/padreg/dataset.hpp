#pragma once

// On-disk dataset layout:
//
//   <root>/frames/<id>.pgm      P5 frames, id zero-padded to 6 digits
//   <root>/masks/<id>.pgm       optional label masks (0/1/2)
//   <root>/forces.csv           frame_id,force_newton
//   <root>/pairs.csv            moving_id,target_id
//   <root>/truth/pair_<k>_field.flo, pair_<k>_stiffness.flo   optional ground truth
//   <root>/manifest.json        written by the phantom generator

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "padreg/force.hpp"
#include "padreg/phantom.hpp"

namespace padreg {

struct FramePair {
    int moving_id = 0;
    int target_id = 0;
};

struct Dataset {
    std::filesystem::path root;
    std::map<int, double> forces;
    std::vector<FramePair> pairs;

    std::filesystem::path frame_path(int id) const;
    std::filesystem::path mask_path(int id) const;
    std::filesystem::path truth_field_path(std::size_t pair_index) const;
    std::filesystem::path truth_stiffness_path(std::size_t pair_index) const;
    ForcePair forces_of(const FramePair& p) const;
};

std::string frame_name(int id);

/// Parses forces.csv and pairs.csv and checks that every referenced frame
/// exists with a non-negative force. Throws IoError.
Dataset load_dataset(const std::filesystem::path& root);

/// Settings for generating a phantom dataset. Force pairs are drawn
/// uniformly from [force_min, force_max] and redrawn until
/// |F_target - F_moving| > min_differential.
struct PhantomDatasetConfig {
    PhantomConfig scene;
    double force_min = 1.0;
    double force_max = 10.0;
    double min_differential = 2.0;
    DeltaForceVariant df_variant = DeltaForceVariant::Normalized;
    double jitter_px = 0.0;  // uniform jitter applied to inclusion centers per pair

    void validate() const;
};

PhantomDatasetConfig phantom_dataset_config_from_json(const nlohmann::json& j);

struct GeneratedPair {
    ForcePair forces;
    PhantomScene scene;
    PhantomPair pair;
    std::uint64_t scene_seed = 0;
};

/// Deterministic in (cfg, seed, index): pair `index` of a dataset generated with `seed`.
std::vector<GeneratedPair> generate_phantom_pairs(const PhantomDatasetConfig& cfg, int n_pairs, std::uint64_t seed);

/// Writes the layout above, including ground truth and manifest.json.
void write_phantom_dataset(const std::filesystem::path& root, const PhantomDatasetConfig& cfg, int n_pairs,
                           std::uint64_t seed);

}  // namespace padreg
