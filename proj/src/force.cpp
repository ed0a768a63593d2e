#include "padreg/force.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

namespace padreg {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

void ForcePair::validate() const {
    if (!std::isfinite(f_moving) || !std::isfinite(f_target) || f_moving < 0.0 || f_target < 0.0)
        throw ConfigError("contact forces must be finite and non-negative (got " + std::to_string(f_moving) +
                          ", " + std::to_string(f_target) + ")");
}

std::string_view to_string(DeltaForceVariant v) {
    switch (v) {
        case DeltaForceVariant::Normalized: return "normalized";
        case DeltaForceVariant::Raw: return "raw";
        case DeltaForceVariant::Ratio: return "ratio";
        case DeltaForceVariant::SignedSqrt: return "signed_sqrt";
    }
    return "unknown";
}

DeltaForceVariant parse_delta_force_variant(std::string_view name) {
    const std::string n = lower(name);
    if (n == "normalized") return DeltaForceVariant::Normalized;
    if (n == "raw") return DeltaForceVariant::Raw;
    if (n == "ratio") return DeltaForceVariant::Ratio;
    if (n == "signed_sqrt") return DeltaForceVariant::SignedSqrt;
    throw ConfigError("unknown force-difference variant '" + std::string(name) + "'");
}

double delta_force(const ForcePair& pair, DeltaForceVariant variant) {
    pair.validate();
    const double d = pair.f_target - pair.f_moving;
    const double total = pair.f_target + pair.f_moving;
    switch (variant) {
        case DeltaForceVariant::Raw:
            return d;
        case DeltaForceVariant::SignedSqrt:
            return sign(d) * std::sqrt(std::abs(d));
        case DeltaForceVariant::Normalized:
        case DeltaForceVariant::Ratio:
            if (!(total > 0.0))
                throw DegenerateForceError("force pair (0, 0) has no relative difference");
            // |d| <= total, so the ratio is clamped only against rounding.
            if (variant == DeltaForceVariant::Ratio) return std::clamp(d / total, -1.0, 1.0);
            return sign(d) * std::sqrt(std::min(std::abs(d) / total, 1.0));
    }
    throw ConfigError("invalid force-difference variant");
}

ForceEmbedding force_embed(double force, int d_model) {
    if (d_model < 2 || d_model % 2 != 0)
        throw DimensionError("force_embed: d_model must be a positive even integer, got " +
                             std::to_string(d_model));
    const int half = d_model / 2;
    ForceEmbedding emb{d_model, Eigen::VectorXd(d_model)};
    for (int j = 0; j < half; ++j) {
        const double arg = force / std::pow(1000.0, 2.0 * j / d_model);
        emb.values[j] = std::sin(arg);
        emb.values[half + j] = std::cos(arg);
    }
    return emb;
}

ForceEmbedding force_pair_embed(const ForcePair& pair, int d_model) {
    pair.validate();
    const auto a = force_embed(pair.f_moving, d_model);
    const auto b = force_embed(pair.f_target, d_model);
    ForceEmbedding out{d_model, Eigen::VectorXd(2 * d_model)};
    out.values << a.values, b.values;
    return out;
}

Eigen::VectorXd project_embedding(const ForceEmbedding& emb, int out_dim, std::uint64_t seed) {
    if (out_dim < 1) throw DimensionError("project_embedding: out_dim must be >= 1");
    const Eigen::Index in_dim = emb.values.size();
    const Eigen::Index n = std::max<Eigen::Index>(in_dim, out_dim);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();

    const Eigen::MatrixXd w = q.topLeftCorner(out_dim, in_dim);
    return w * emb.values;
}

std::vector<ScalarField> fuse_pointwise(std::span<const ScalarField> features, const Eigen::VectorXd& emb) {
    if (static_cast<Eigen::Index>(features.size()) != emb.size())
        throw DimensionError("fuse_pointwise: " + std::to_string(features.size()) + " channels but embedding of " +
                             std::to_string(emb.size()));
    std::vector<ScalarField> out;
    out.reserve(features.size());
    for (std::size_t k = 0; k < features.size(); ++k) {
        if (k > 0) require_same_shape(features[k], features[0], "fuse_pointwise");
        out.push_back(features[k] * emb[static_cast<Eigen::Index>(k)]);
    }
    return out;
}

}  // namespace padreg
