#include "padreg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "padreg/warp.hpp"

namespace padreg {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-double(i) * i / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

double intensity_of(int label) {
    switch (label) {
        case 1: return kArteryIntensity;
        case 2: return kVeinIntensity;
        default: return kBackgroundIntensity;
    }
}

}  // namespace

ScalarField gaussian_blur(const ScalarField& f, double sigma) {
    if (sigma <= 0.0) return f;
    const auto k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const Eigen::Index h = f.rows(), w = f.cols();
    ScalarField tmp(h, w), out(h, w);
    for (Eigen::Index r = 0; r < h; ++r)
        for (Eigen::Index c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * f(r, std::clamp<Eigen::Index>(c + i, 0, w - 1));
            tmp(r, c) = acc;
        }
    for (Eigen::Index r = 0; r < h; ++r)
        for (Eigen::Index c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * tmp(std::clamp<Eigen::Index>(r + i, 0, h - 1), c);
            out(r, c) = acc;
        }
    return out;
}

void PhantomConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("phantom config: " + what); };
    if (height < 2 || width < 2) fail("height and width must be >= 2");
    if (!(base_kx > 0.0) || !std::isfinite(base_kx)) fail("base_kx must be positive");
    if (!(depth_decay >= 0.0 && depth_decay <= 1.0)) fail("depth_decay must lie in [0, 1]");
    if (!(ky_scale >= 0.0) || !std::isfinite(ky_scale)) fail("ky_scale must be non-negative");
    if (!(blur_sigma >= 0.0) || !std::isfinite(blur_sigma)) fail("blur_sigma must be non-negative");
    if (speckle.kind == SpeckleModel::Kind::Multiplicative && !(speckle.sigma > 0.0))
        fail("multiplicative speckle needs sigma > 0");
    if (!(speckle.grain >= 0.0) || !std::isfinite(speckle.grain)) fail("speckle grain must be non-negative");
    for (const auto& inc : inclusions) {
        if (!(inc.center_row >= 0.0 && inc.center_row <= height - 1 && inc.center_col >= 0.0 &&
              inc.center_col <= width - 1))
            fail("inclusion center lies outside the grid");
        if (!(inc.radius > 0.0)) fail("inclusion radius must be positive");
        if (!(inc.stiffness_factor > 0.0) || !std::isfinite(inc.stiffness_factor))
            fail("inclusion stiffness_factor must be positive");
        if (inc.label != 1 && inc.label != 2) fail("inclusion label must be 1 (artery) or 2 (vein)");
    }
}

PhantomScene make_scene(const PhantomConfig& cfg) {
    cfg.validate();
    const Eigen::Index h = cfg.height, w = cfg.width;

    PhantomScene scene;
    scene.masks = LabelMask::Zero(h, w);
    ScalarField factor = ScalarField::Ones(h, w);
    for (const auto& inc : cfg.inclusions)
        for (Eigen::Index r = 0; r < h; ++r)
            for (Eigen::Index c = 0; c < w; ++c) {
                const double dr = double(r) - inc.center_row, dc = double(c) - inc.center_col;
                if (dr * dr + dc * dc <= inc.radius * inc.radius) {
                    scene.masks(r, c) = static_cast<std::uint8_t>(inc.label);
                    factor(r, c) = inc.stiffness_factor;
                }
            }

    ScalarField kx(h, w), ky(h, w);
    const double center = 0.5 * double(w - 1);
    for (Eigen::Index r = 0; r < h; ++r) {
        const double depth = double(r) / double(h - 1);
        const double profile = cfg.base_kx * (1.0 - (1.0 - cfg.depth_decay) * depth);
        for (Eigen::Index c = 0; c < w; ++c) {
            kx(r, c) = profile * factor(r, c);
            const double side = double(c) < center ? -1.0 : (double(c) > center ? 1.0 : 0.0);
            ky(r, c) = cfg.ky_scale * kx(r, c) * side;
        }
    }
    scene.k_true = StiffnessMap(std::move(kx), std::move(ky));

    ScalarField image(h, w);
    for (Eigen::Index i = 0; i < image.size(); ++i) image.data()[i] = intensity_of(scene.masks.data()[i]);
    image = gaussian_blur(image, cfg.blur_sigma);

    if (cfg.speckle.kind == SpeckleModel::Kind::Multiplicative) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        ScalarField z(h, w);
        for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
        if (cfg.speckle.grain > 0.0) {
            z = gaussian_blur(z, cfg.speckle.grain);
            const double sd = std::sqrt((z - z.mean()).square().mean());
            if (sd > 0.0) z /= sd;
        }
        const double s = cfg.speckle.sigma;
        image *= (s * z - 0.5 * s * s).exp();
    }
    scene.rest_image = image.cwiseMax(0.0).cwiseMin(1.0);
    return scene;
}

PhantomPair render_pair(const PhantomScene& scene, const ForcePair& forces, DeltaForceVariant variant) {
    PhantomPair p;
    p.df_true = delta_force(forces, variant);
    p.d_true = deformation_from_stiffness(scene.k_true, p.df_true, DeformationModel::of(DeformationKind::Proportional));
    p.moving = scene.rest_image;
    p.target = warp_bilinear(p.moving, p.d_true);
    p.masks_moving = scene.masks;
    p.masks_target = warp_nearest(scene.masks, p.d_true);
    return p;
}

namespace {

template <typename T>
T get(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("phantom config: bad value for '") + key + "': " + e.what());
    }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& keys, const char* where) {
    for (const auto& [key, _] : j.items())
        if (!keys.count(key)) throw ConfigError(std::string("phantom config: unknown key '") + key + "' in " + where);
}

}  // namespace

PhantomConfig phantom_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("phantom config: expected a JSON object");
    reject_unknown(j,
                   {"height", "width", "inclusions", "base_kx", "depth_decay", "ky_scale", "speckle", "blur_sigma",
                    "seed"},
                   "scene");
    PhantomConfig c;
    c.height = get(j, "height", c.height);
    c.width = get(j, "width", c.width);
    c.base_kx = get(j, "base_kx", c.base_kx);
    c.depth_decay = get(j, "depth_decay", c.depth_decay);
    c.ky_scale = get(j, "ky_scale", c.ky_scale);
    c.blur_sigma = get(j, "blur_sigma", c.blur_sigma);
    c.seed = get(j, "seed", c.seed);
    if (j.contains("inclusions")) {
        for (const auto& ij : j.at("inclusions")) {
            reject_unknown(ij, {"center_row", "center_col", "radius", "stiffness_factor", "label"}, "inclusion");
            Inclusion inc;
            inc.center_row = get(ij, "center_row", inc.center_row);
            inc.center_col = get(ij, "center_col", inc.center_col);
            inc.radius = get(ij, "radius", inc.radius);
            inc.stiffness_factor = get(ij, "stiffness_factor", inc.stiffness_factor);
            inc.label = get(ij, "label", inc.label);
            c.inclusions.push_back(inc);
        }
    }
    if (j.contains("speckle")) {
        const auto& sj = j.at("speckle");
        reject_unknown(sj, {"kind", "sigma", "grain"}, "speckle");
        const auto kind = get<std::string>(sj, "kind", "none");
        if (kind == "none")
            c.speckle.kind = SpeckleModel::Kind::None;
        else if (kind == "multiplicative")
            c.speckle.kind = SpeckleModel::Kind::Multiplicative;
        else
            throw ConfigError("phantom config: unknown speckle kind '" + kind + "'");
        c.speckle.sigma = get(sj, "sigma", 0.0);
        c.speckle.grain = get(sj, "grain", 0.0);
    }
    c.validate();
    return c;
}

nlohmann::json to_json(const PhantomConfig& c) {
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& i : c.inclusions)
        inc.push_back({{"center_row", i.center_row},
                       {"center_col", i.center_col},
                       {"radius", i.radius},
                       {"stiffness_factor", i.stiffness_factor},
                       {"label", i.label}});
    return {{"height", c.height},
            {"width", c.width},
            {"inclusions", inc},
            {"base_kx", c.base_kx},
            {"depth_decay", c.depth_decay},
            {"ky_scale", c.ky_scale},
            {"speckle",
             {{"kind", c.speckle.kind == SpeckleModel::Kind::None ? "none" : "multiplicative"},
              {"sigma", c.speckle.sigma},
              {"grain", c.speckle.grain}}},
            {"blur_sigma", c.blur_sigma},
            {"seed", c.seed}};
}

}  // namespace padreg
