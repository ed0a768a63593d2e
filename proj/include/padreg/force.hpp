#pragma once

// Contact-force handling: the force differential used to scale the
// stiffness map, the sinusoidal force embedding, and point-wise fusion of
// that embedding into feature channels.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "padreg/field.hpp"

namespace padreg {

/// Probe-normal contact forces in newtons for the moving and target frames.
struct ForcePair {
    double f_moving = 0.0;
    double f_target = 0.0;

    /// Throws ConfigError unless both forces are finite and non-negative.
    void validate() const;

    ForcePair scaled(double c) const { return {c * f_moving, c * f_target}; }
};

enum class DeltaForceVariant {
    Normalized,  // sign(d) * sqrt(|d| / (Ft + Fm))
    Raw,         // d
    Ratio,       // d / (Ft + Fm)
    SignedSqrt,  // sign(d) * sqrt(|d|)
};

std::string_view to_string(DeltaForceVariant v);
/// Accepts "normalized", "raw", "ratio", "signed_sqrt" (case-insensitive).
DeltaForceVariant parse_delta_force_variant(std::string_view name);

/// Signed force differential between the target and moving frames, d = Ft - Fm.
/// Throws DegenerateForceError for Normalized/Ratio when Ft + Fm == 0.
double delta_force(const ForcePair& pair, DeltaForceVariant variant);

struct ForceEmbedding {
    int d_model = 0;            // width per force
    Eigen::VectorXd values;     // d_model for one force, 2*d_model for a pair
};

/// Sinusoidal embedding of a single force: the first d_model/2 entries are
/// sin(f / 1000^(2j/d_model)), the rest the matching cosines.
ForceEmbedding force_embed(double force, int d_model);

/// force_embed(f_moving) followed by force_embed(f_target).
ForceEmbedding force_pair_embed(const ForcePair& pair, int d_model);

/// Seeded linear map to `out_dim` channels standing in for the learned
/// projection layers. The map has orthonormal columns (or rows, when
/// out_dim is smaller than the embedding) drawn from a QR factorization of
/// a Gaussian matrix.
Eigen::VectorXd project_embedding(const ForceEmbedding& emb, int out_dim, std::uint64_t seed);

/// Scales channel k of `features` by emb[k] at every pixel.
std::vector<ScalarField> fuse_pointwise(std::span<const ScalarField> features, const Eigen::VectorXd& emb);

}  // namespace padreg
