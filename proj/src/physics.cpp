#include "padreg/physics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace padreg {

StiffnessMap::StiffnessMap(ScalarField kx_, ScalarField ky_) : kx(std::move(kx_)), ky(std::move(ky_)) {
    require_same_shape(kx, ky, "StiffnessMap");
}

std::string_view to_string(DeformationKind k) {
    switch (k) {
        case DeformationKind::Proportional: return "proportional";
        case DeformationKind::Linear: return "linear";
        case DeformationKind::Quadratic: return "quadratic";
        case DeformationKind::Direct: return "direct";
    }
    return "unknown";
}

DeformationKind parse_deformation_kind(std::string_view name) {
    std::string n(name);
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == "proportional" || n == "physics") return DeformationKind::Proportional;
    if (n == "linear") return DeformationKind::Linear;
    if (n == "quadratic") return DeformationKind::Quadratic;
    if (n == "direct") return DeformationKind::Direct;
    throw ConfigError("unknown deformation model '" + std::string(name) + "'");
}

namespace {

ScalarField apply_axis(const ScalarField& k, double df, DeformationKind kind, const AxisCoefficients& p) {
    switch (kind) {
        case DeformationKind::Proportional: return k * df;
        case DeformationKind::Linear: return (p.beta * k + p.alpha) * df;
        case DeformationKind::Quadratic: return (p.gamma * k.square() + p.beta * k + p.alpha) * df;
        case DeformationKind::Direct: return k;
    }
    return k;
}

// d/dK and d/d(alpha, beta, gamma) for one axis given upstream g = dL/dD.
ScalarField backward_axis(const ScalarField& k, double df, DeformationKind kind, const AxisCoefficients& p,
                          const ScalarField& g, AxisCoefficients& dp) {
    switch (kind) {
        case DeformationKind::Proportional:
            return g * df;
        case DeformationKind::Linear:
            dp.alpha = g.sum() * df;
            dp.beta = (g * k).sum() * df;
            return g * (p.beta * df);
        case DeformationKind::Quadratic:
            dp.alpha = g.sum() * df;
            dp.beta = (g * k).sum() * df;
            dp.gamma = (g * k.square()).sum() * df;
            return g * ((2.0 * p.gamma) * k + p.beta) * df;
        case DeformationKind::Direct:
            return g;
    }
    return g;
}

}  // namespace

VectorField deformation_from_stiffness(const StiffnessMap& k, double df, const DeformationModel& model) {
    if (!std::isfinite(df)) throw ConfigError("force differential must be finite");
    return {apply_axis(k.kx, df, model.kind, model.x), apply_axis(k.ky, df, model.kind, model.y)};
}

DeformationGradient deformation_backward(const StiffnessMap& k, double df, const DeformationModel& model,
                                         const VectorField& grad_field) {
    require_same_shape(k.kx, grad_field.dx, "deformation_backward");
    DeformationGradient out;
    out.dk.kx = backward_axis(k.kx, df, model.kind, model.x, grad_field.dx, out.dx_coeffs);
    out.dk.ky = backward_axis(k.ky, df, model.kind, model.y, grad_field.dy, out.dy_coeffs);
    return out;
}

}  // namespace padreg
