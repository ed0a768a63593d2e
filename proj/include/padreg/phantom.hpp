#pragma once

// Synthetic force-paired scenes with exact ground truth. The forward model
// is the engine's own proportional model, so the true field is reachable by
// the solver.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "padreg/field.hpp"
#include "padreg/force.hpp"
#include "padreg/physics.hpp"

namespace padreg {

/// Circular vessel cross-section. stiffness_factor multiplies the
/// background kx: above 1 is softer tissue (veins), below 1 stiffer (arteries).
struct Inclusion {
    double center_row = 0.0;
    double center_col = 0.0;
    double radius = 1.0;
    double stiffness_factor = 1.0;
    int label = 1;
};

struct SpeckleModel {
    enum class Kind { None, Multiplicative };
    Kind kind = Kind::None;
    double sigma = 0.0;  // log-domain standard deviation
    double grain = 0.0;  // Gaussian correlation length of the log-noise in pixels; 0 is white
};

struct PhantomConfig {
    int height = 64;
    int width = 64;
    std::vector<Inclusion> inclusions;
    double base_kx = 4.0;      // px per unit force differential at the surface
    double depth_decay = 0.5;  // fraction of base_kx left at the bottom row
    double ky_scale = 0.1;
    SpeckleModel speckle;
    double blur_sigma = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

PhantomConfig phantom_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhantomConfig& cfg);

struct PhantomScene {
    StiffnessMap k_true;
    ScalarField rest_image;
    LabelMask masks;
};

struct PhantomPair {
    ScalarField moving;
    ScalarField target;
    LabelMask masks_moving;
    LabelMask masks_target;
    VectorField d_true;
    double df_true = 0.0;
};

inline constexpr double kBackgroundIntensity = 0.5;
inline constexpr double kArteryIntensity = 0.15;
inline constexpr double kVeinIntensity = 0.1;

PhantomScene make_scene(const PhantomConfig& cfg);

/// moving is the rest image, target is moving backward-warped by the true
/// proportional field for the given forces.
PhantomPair render_pair(const PhantomScene& scene, const ForcePair& forces, DeltaForceVariant variant);

/// Separable Gaussian blur with replicated edges; sigma == 0 returns the input.
ScalarField gaussian_blur(const ScalarField& f, double sigma);

}  // namespace padreg
