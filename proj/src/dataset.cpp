#include "padreg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "padreg/io.hpp"

namespace padreg {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!l.empty() && l.back() == ',') cells.emplace_back();
        return cells;
    };
    auto strip = [](std::string& l) {
        while (!l.empty() && (l.back() == '\r' || l.back() == ' ')) l.pop_back();
    };
    if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");
    strip(line);
    if (split(line) != header) throw IoError(path.string() + ": unexpected header '" + line + "'");
    std::vector<std::vector<std::string>> rows;
    for (int n = 2; std::getline(in, line); ++n) {
        strip(line);
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != header.size())
            throw IoError(path.string() + ":" + std::to_string(n) + ": expected " + std::to_string(header.size()) +
                          " columns");
        rows.push_back(std::move(cells));
    }
    return rows;
}

template <typename T>
T parse_number(const std::string& s, const fs::path& where) {
    try {
        std::size_t used = 0;
        T v;
        if constexpr (std::is_same_v<T, int>)
            v = std::stoi(s, &used);
        else
            v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(where.string() + ": cannot parse '" + s + "' as a number");
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string pair_stem(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pair_%06zu", k);
    return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string frame_name(int id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06d.pgm", id);
    return buf;
}

fs::path Dataset::frame_path(int id) const { return root / "frames" / frame_name(id); }
fs::path Dataset::mask_path(int id) const { return root / "masks" / frame_name(id); }
fs::path Dataset::truth_field_path(std::size_t k) const { return root / "truth" / (pair_stem(k) + "_field.flo"); }
fs::path Dataset::truth_stiffness_path(std::size_t k) const {
    return root / "truth" / (pair_stem(k) + "_stiffness.flo");
}

ForcePair Dataset::forces_of(const FramePair& p) const { return {forces.at(p.moving_id), forces.at(p.target_id)}; }

Dataset load_dataset(const fs::path& root) {
    Dataset ds;
    ds.root = root;
    const fs::path forces_csv = root / "forces.csv", pairs_csv = root / "pairs.csv";
    for (const auto& row : read_csv(forces_csv, {"frame_id", "force_newton"})) {
        const int id = parse_number<int>(row[0], forces_csv);
        const double f = parse_number<double>(row[1], forces_csv);
        if (!(f >= 0.0) || !std::isfinite(f)) throw IoError(forces_csv.string() + ": negative or non-finite force");
        if (!ds.forces.emplace(id, f).second)
            throw IoError(forces_csv.string() + ": duplicate frame " + std::to_string(id));
    }
    for (const auto& row : read_csv(pairs_csv, {"moving_id", "target_id"})) {
        const FramePair p{parse_number<int>(row[0], pairs_csv), parse_number<int>(row[1], pairs_csv)};
        for (int id : {p.moving_id, p.target_id}) {
            if (!ds.forces.count(id)) throw IoError(pairs_csv.string() + ": frame " + std::to_string(id) + " has no force");
            if (!fs::exists(ds.frame_path(id)))
                throw IoError(pairs_csv.string() + ": missing frame file " + ds.frame_path(id).string());
        }
        ds.pairs.push_back(p);
    }
    return ds;
}

void PhantomDatasetConfig::validate() const {
    scene.validate();
    if (!(force_min >= 0.0) || !(force_max >= force_min) || !std::isfinite(force_max))
        throw ConfigError("dataset config: need 0 <= force_min <= force_max");
    if (!(min_differential >= 0.0) || min_differential >= force_max - force_min)
        throw ConfigError("dataset config: min_differential must be smaller than force_max - force_min");
    if (!(jitter_px >= 0.0)) throw ConfigError("dataset config: jitter_px must be non-negative");
}

PhantomDatasetConfig phantom_dataset_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("dataset config: expected a JSON object");
    static const std::set<std::string> keys = {"scene", "force_min", "force_max", "min_differential",
                                               "df_variant", "jitter_px"};
    for (const auto& [key, _] : j.items())
        if (!keys.count(key)) throw ConfigError("dataset config: unknown key '" + key + "'");
    PhantomDatasetConfig c;
    try {
        if (j.contains("scene")) c.scene = phantom_config_from_json(j.at("scene"));
        c.force_min = j.value("force_min", c.force_min);
        c.force_max = j.value("force_max", c.force_max);
        c.min_differential = j.value("min_differential", c.min_differential);
        if (j.contains("df_variant")) c.df_variant = parse_delta_force_variant(j.at("df_variant").get<std::string>());
        c.jitter_px = j.value("jitter_px", c.jitter_px);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("dataset config: ") + e.what());
    }
    c.validate();
    return c;
}

std::vector<GeneratedPair> generate_phantom_pairs(const PhantomDatasetConfig& cfg, int n_pairs, std::uint64_t seed) {
    cfg.validate();
    if (n_pairs < 0) throw ConfigError("n_pairs must be non-negative");
    std::vector<GeneratedPair> out;
    out.reserve(static_cast<std::size_t>(n_pairs));
    for (int k = 0; k < n_pairs; ++k) {
        GeneratedPair g;
        g.scene_seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k)));
        std::mt19937_64 rng(g.scene_seed);
        std::uniform_real_distribution<double> force(cfg.force_min, cfg.force_max);
        do {
            g.forces.f_moving = force(rng);
            g.forces.f_target = force(rng);
        } while (!(std::abs(g.forces.f_target - g.forces.f_moving) > cfg.min_differential));

        PhantomConfig sc = cfg.scene;
        sc.seed = g.scene_seed;
        if (cfg.jitter_px > 0.0) {
            std::uniform_real_distribution<double> jitter(-cfg.jitter_px, cfg.jitter_px);
            for (auto& inc : sc.inclusions) {
                inc.center_row = std::clamp(inc.center_row + jitter(rng), 0.0, double(sc.height - 1));
                inc.center_col = std::clamp(inc.center_col + jitter(rng), 0.0, double(sc.width - 1));
            }
        }
        g.scene = make_scene(sc);
        g.pair = render_pair(g.scene, g.forces, cfg.df_variant);
        out.push_back(std::move(g));
    }
    return out;
}

void write_phantom_dataset(const fs::path& root, const PhantomDatasetConfig& cfg, int n_pairs, std::uint64_t seed) {
    const auto pairs = generate_phantom_pairs(cfg, n_pairs, seed);
    std::error_code ec;
    for (const char* sub : {"frames", "masks", "truth"}) {
        fs::create_directories(root / sub, ec);
        if (ec) throw IoError("cannot create " + (root / sub).string() + ": " + ec.message());
    }
    Dataset ds;
    ds.root = root;

    std::string forces_csv = "frame_id,force_newton\n";
    std::string pairs_csv = "moving_id,target_id\n";
    nlohmann::json manifest_pairs = nlohmann::json::array();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& g = pairs[k];
        const int mid = static_cast<int>(2 * k), tid = static_cast<int>(2 * k + 1);
        write_pgm_image(ds.frame_path(mid), g.pair.moving);
        write_pgm_image(ds.frame_path(tid), g.pair.target);
        write_pgm_mask(ds.mask_path(mid), g.pair.masks_moving);
        write_pgm_mask(ds.mask_path(tid), g.pair.masks_target);
        write_flo(ds.truth_field_path(k), g.pair.d_true);
        write_stiffness_flo(ds.truth_stiffness_path(k), g.scene.k_true);
        forces_csv += std::to_string(mid) + "," + format_double(g.forces.f_moving) + "\n";
        forces_csv += std::to_string(tid) + "," + format_double(g.forces.f_target) + "\n";
        pairs_csv += std::to_string(mid) + "," + std::to_string(tid) + "\n";
        manifest_pairs.push_back({{"pair_id", k},
                                  {"moving_id", mid},
                                  {"target_id", tid},
                                  {"f_moving", g.forces.f_moving},
                                  {"f_target", g.forces.f_target},
                                  {"df_true", g.pair.df_true},
                                  {"scene_seed", g.scene_seed},
                                  {"truth_field", "truth/" + pair_stem(k) + "_field.flo"},
                                  {"truth_stiffness", "truth/" + pair_stem(k) + "_stiffness.flo"}});
    }

    auto write_text = [](const fs::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + p.string());
        out << text;
        if (!out) throw IoError("write failed for " + p.string());
    };
    write_text(root / "forces.csv", forces_csv);
    write_text(root / "pairs.csv", pairs_csv);

    nlohmann::json manifest = {
        {"format", "padreg-phantom-dataset/1"},
        {"conventions",
         "Rows grow with depth. Field component dx is vertical, positive toward the probe (content moves to "
         "smaller row indices); dy is horizontal, positive toward larger columns. target(r,c) = "
         "moving(r+dx, c+dy) with bilinear sampling clamped to the grid. .flo files store (horizontal, "
         "vertical) = (dy, dx) without sign change; stiffness .flo files store (ky, kx). Frames are 16-bit "
         "P5 PGM scaled to [0,1]; masks are P5 with labels 0 background, 1 artery, 2 vein."},
        {"seed", seed},
        {"n_pairs", n_pairs},
        {"df_variant", std::string(to_string(cfg.df_variant))},
        {"force_min", cfg.force_min},
        {"force_max", cfg.force_max},
        {"min_differential", cfg.min_differential},
        {"jitter_px", cfg.jitter_px},
        {"scene", to_json(cfg.scene)},
        {"pairs", manifest_pairs}};
    write_text(root / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace padreg
