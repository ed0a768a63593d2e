#pragma once

// Per-pair registration: the stiffness map (and, for the Linear/Quadratic
// models, their scalar coefficients) is optimized directly so that warping
// the moving image by the force-scaled field matches the target.
//
//   total = mse(warp(moving, D(K, df)), target) + lambda * mean |grad D|^2
//
// Optimization runs coarse-to-fine over an image pyramid with Adam.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "padreg/field.hpp"
#include "padreg/force.hpp"
#include "padreg/physics.hpp"

namespace padreg {

struct SolverConfig {
    int levels = 3;
    int iters_per_level = 300;
    double step_size = 0.05;
    double moment1 = 0.9;
    double moment2 = 0.999;
    double eps = 1e-8;
    double lambda_reg = 0.03;
    DeltaForceVariant df_variant = DeltaForceVariant::Normalized;
    DeformationModel model;
    double stop_rel_tol = 1e-6;
    std::uint64_t seed = 0;

    /// Throws ConfigError for out-of-range values.
    void validate() const;
};

/// Reads a config object. Every key is optional, unknown keys are rejected.
/// "model" is either a kind name or {"kind", "alpha_x", "alpha_y",
/// "beta_x", "beta_y", "gamma_x", "gamma_y"}.
SolverConfig solver_config_from_json(const nlohmann::json& j);
SolverConfig load_solver_config(const std::filesystem::path& path);
nlohmann::json to_json(const SolverConfig& cfg);

struct LossTerms {
    double sim = 0.0;
    double reg = 0.0;
    double total = 0.0;
};

struct LossRecord {
    int level = 0;      // 0 is full resolution
    int iteration = 0;  // within the level
    LossTerms loss;
};

struct RegistrationResult {
    StiffnessMap stiffness;
    DeformationModel model;  // with fitted coefficients
    VectorField field;
    ScalarField warped;
    std::vector<LossRecord> loss_trace;
    double df_value = 0.0;
    LossTerms initial;  // identity field at full resolution
    LossTerms final;
};

double loss_similarity(const ScalarField& warped, const ScalarField& target);

/// Mean over pixels of the squared norm of the stacked forward differences
/// of both field components.
double loss_smoothness(const VectorField& field);

/// Gradient of loss_smoothness with respect to the field.
VectorField loss_smoothness_gradient(const VectorField& field);

struct ObjectiveValue {
    LossTerms loss;
    DeformationGradient grad;
    VectorField field;
    ScalarField warped;
};

/// Objective and its gradient with respect to the stiffness map and model coefficients.
ObjectiveValue evaluate_objective(const ScalarField& moving, const ScalarField& target, const StiffnessMap& k,
                                  double df, const DeformationModel& model, double lambda_reg);

RegistrationResult register_pair(const ScalarField& moving, const ScalarField& target, const ForcePair& forces,
                                 const SolverConfig& cfg);

/// As register_pair with an already computed force differential.
RegistrationResult register_pair_with_df(const ScalarField& moving, const ScalarField& target, double df,
                                         const SolverConfig& cfg);

}  // namespace padreg
