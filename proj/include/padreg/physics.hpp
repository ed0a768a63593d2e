#pragma once

// Deformation from a stiffness map and a force differential. Following
// Hooke's law with contact force standing in for stress, displacement is
// taken proportional to the force differential, scaled per pixel by a
// stiffness map that plays the role of the inverse local Young's modulus.

#include <string_view>

#include "padreg/field.hpp"

namespace padreg {

/// Per-pixel displacement per unit force differential, in pixels.
/// Not sign-constrained.
struct StiffnessMap {
    ScalarField kx;
    ScalarField ky;

    StiffnessMap() = default;
    StiffnessMap(ScalarField kx_, ScalarField ky_);

    static StiffnessMap zero(Eigen::Index rows, Eigen::Index cols) {
        return {ScalarField::Zero(rows, cols), ScalarField::Zero(rows, cols)};
    }
    Eigen::Index rows() const { return kx.rows(); }
    Eigen::Index cols() const { return kx.cols(); }
};

enum class DeformationKind {
    Proportional,  // D = K * df
    Linear,        // D = (beta K + alpha) * df
    Quadratic,     // D = (gamma K^2 + beta K + alpha) * df
    Direct,        // D = K, df ignored
};

std::string_view to_string(DeformationKind k);
/// Accepts "proportional" (alias "physics"), "linear", "quadratic", "direct".
DeformationKind parse_deformation_kind(std::string_view name);

/// Scalar coefficients shared by all pixels along one axis.
struct AxisCoefficients {
    double alpha = 0.0;
    double beta = 1.0;
    double gamma = 0.0;
};

struct DeformationModel {
    DeformationKind kind = DeformationKind::Proportional;
    AxisCoefficients x;
    AxisCoefficients y;

    static DeformationModel of(DeformationKind kind) { return {kind, {}, {}}; }
};

VectorField deformation_from_stiffness(const StiffnessMap& k, double df, const DeformationModel& model);

struct DeformationGradient {
    StiffnessMap dk;
    AxisCoefficients dx_coeffs{0.0, 0.0, 0.0};
    AxisCoefficients dy_coeffs{0.0, 0.0, 0.0};
};

/// Pulls a gradient with respect to the deformation field back onto the
/// stiffness map and, for Linear/Quadratic, onto the scalar coefficients.
DeformationGradient deformation_backward(const StiffnessMap& k, double df, const DeformationModel& model,
                                         const VectorField& grad_field);

}  // namespace padreg
