#include "padreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "padreg/metrics.hpp"
#include "padreg/warp.hpp"

namespace padreg {

namespace {

constexpr Eigen::Index kMinLevelSize = 8;
constexpr int kStopWindow = 10;
constexpr double kCoefficientStepScale = 0.1;

ScalarField smoothness_gradient_component(const ScalarField& f) {
    const auto [dr, dc] = forward_diff(f);
    const Eigen::Index h = f.rows(), w = f.cols();
    const double scale = 2.0 / double(f.size());
    ScalarField g = ScalarField::Zero(h, w);
    g.bottomRows(h - 1) += dr.topRows(h - 1);
    g.topRows(h - 1) -= dr.topRows(h - 1);
    g.rightCols(w - 1) += dc.leftCols(w - 1);
    g.leftCols(w - 1) -= dc.leftCols(w - 1);
    return g * scale;
}

bool uses_coefficients(DeformationKind k) {
    return k == DeformationKind::Linear || k == DeformationKind::Quadratic;
}

// Adam with bias correction. With moment2 == 0 the update is plain
// (optionally momentum) gradient descent.
class Adam {
public:
    Adam(const SolverConfig& cfg, double lr) : b1_(cfg.moment1), b2_(cfg.moment2), eps_(cfg.eps), lr_(lr) {}

    void step(ScalarField& p, const ScalarField& g, ScalarField& m, ScalarField& v) const {
        m = b1_ * m + (1.0 - b1_) * g;
        const ScalarField m_hat = m / (1.0 - std::pow(b1_, t_));
        if (b2_ == 0.0) {
            p -= lr_ * m_hat;
            return;
        }
        v = b2_ * v + (1.0 - b2_) * g.square();
        const ScalarField v_hat = v / (1.0 - std::pow(b2_, t_));
        p -= lr_ * m_hat / (v_hat.sqrt() + eps_);
    }

    void step(double& p, double g, double& m, double& v) const {
        m = b1_ * m + (1.0 - b1_) * g;
        const double m_hat = m / (1.0 - std::pow(b1_, t_));
        if (b2_ == 0.0) {
            p -= lr_ * m_hat;
            return;
        }
        v = b2_ * v + (1.0 - b2_) * g * g;
        const double v_hat = v / (1.0 - std::pow(b2_, t_));
        p -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }

    void tick() { ++t_; }

private:
    double b1_, b2_, eps_, lr_;
    int t_ = 0;
};

struct CoefficientState {
    double m = 0.0, v = 0.0;
};

void step_coefficients(const Adam& adam, AxisCoefficients& p, const AxisCoefficients& g, DeformationKind kind,
                       CoefficientState (&s)[3]) {
    adam.step(p.alpha, g.alpha, s[0].m, s[0].v);
    adam.step(p.beta, g.beta, s[1].m, s[1].v);
    if (kind == DeformationKind::Quadratic) adam.step(p.gamma, g.gamma, s[2].m, s[2].v);
}

std::string trace_tail(const std::vector<LossRecord>& trace) {
    std::ostringstream os;
    const std::size_t from = trace.size() > 5 ? trace.size() - 5 : 0;
    for (std::size_t i = from; i < trace.size(); ++i)
        os << "\n  level " << trace[i].level << " iter " << trace[i].iteration << ": L_sim=" << trace[i].loss.sim
           << " L_reg=" << trace[i].loss.reg << " total=" << trace[i].loss.total;
    return os.str();
}

}  // namespace

double loss_similarity(const ScalarField& warped, const ScalarField& target) { return mse(warped, target); }

double loss_smoothness(const VectorField& field) {
    require_min_shape(field.dx, 2, 2, "loss_smoothness");
    const auto [rx, cx] = forward_diff(field.dx);
    const auto [ry, cy] = forward_diff(field.dy);
    return (rx.square() + cx.square() + ry.square() + cy.square()).sum() / double(field.dx.size());
}

VectorField loss_smoothness_gradient(const VectorField& field) {
    return {smoothness_gradient_component(field.dx), smoothness_gradient_component(field.dy)};
}

ObjectiveValue evaluate_objective(const ScalarField& moving, const ScalarField& target, const StiffnessMap& k,
                                  double df, const DeformationModel& model, double lambda_reg) {
    require_same_shape(moving, target, "evaluate_objective");
    require_same_shape(moving, k.kx, "evaluate_objective");
    ObjectiveValue out;
    out.field = deformation_from_stiffness(k, df, model);
    out.warped = warp_bilinear(moving, out.field);
    out.loss.sim = loss_similarity(out.warped, target);
    out.loss.reg = loss_smoothness(out.field);
    out.loss.total = out.loss.sim + lambda_reg * out.loss.reg;

    const ScalarField upstream = (out.warped - target) * (2.0 / double(target.size()));
    VectorField grad_field = warp_adjoint(moving, out.field, upstream);
    if (lambda_reg != 0.0) {
        const VectorField gr = loss_smoothness_gradient(out.field);
        grad_field.dx += lambda_reg * gr.dx;
        grad_field.dy += lambda_reg * gr.dy;
    }
    out.grad = deformation_backward(k, df, model, grad_field);
    return out;
}

RegistrationResult register_pair(const ScalarField& moving, const ScalarField& target, const ForcePair& forces,
                                 const SolverConfig& cfg) {
    forces.validate();
    return register_pair_with_df(moving, target, delta_force(forces, cfg.df_variant), cfg);
}

RegistrationResult register_pair_with_df(const ScalarField& moving, const ScalarField& target, double df,
                                         const SolverConfig& cfg) {
    cfg.validate();
    require_same_shape(moving, target, "register_pair");
    if (!std::isfinite(df)) throw ConfigError("register_pair: force differential is not finite");
    if (!all_finite(moving) || !all_finite(target) || moving.minCoeff() < 0.0 || moving.maxCoeff() > 1.0 ||
        target.minCoeff() < 0.0 || target.maxCoeff() > 1.0)
        throw ConfigError("register_pair: image intensities must lie in [0, 1]");

    std::vector<ScalarField> moving_pyr{moving}, target_pyr{target};
    for (int l = 1; l < cfg.levels; ++l) {
        if (moving_pyr.back().rows() < 2 || moving_pyr.back().cols() < 2) break;
        moving_pyr.push_back(downsample2(moving_pyr.back()));
        target_pyr.push_back(downsample2(target_pyr.back()));
    }
    if (static_cast<int>(moving_pyr.size()) != cfg.levels || moving_pyr.back().rows() < kMinLevelSize ||
        moving_pyr.back().cols() < kMinLevelSize)
        throw ConfigError("register_pair: " + std::to_string(cfg.levels) + " pyramid levels on a " +
                          std::to_string(moving.rows()) + "x" + std::to_string(moving.cols()) +
                          " image leave the coarsest level smaller than 8x8");

    RegistrationResult res;
    res.df_value = df;
    const DeformationModel identity_model = DeformationModel::of(cfg.model.kind);
    DeformationModel model = cfg.model;
    if (!uses_coefficients(model.kind)) model = identity_model;

    res.initial = evaluate_objective(moving, target, StiffnessMap::zero(moving.rows(), moving.cols()), df,
                                     identity_model, cfg.lambda_reg)
                      .loss;

    const int coarsest = cfg.levels - 1;
    StiffnessMap k = StiffnessMap::zero(moving_pyr[coarsest].rows(), moving_pyr[coarsest].cols());

    StiffnessMap best_k = StiffnessMap::zero(moving.rows(), moving.cols());
    DeformationModel best_model = identity_model;
    LossTerms best_loss = res.initial;

    for (int level = coarsest; level >= 0; --level) {
        const ScalarField& mov = moving_pyr[level];
        const ScalarField& tgt = target_pyr[level];
        if (level != coarsest) {
            // Displacements are in pixels, so they double with resolution.
            k.kx = upsample2(k.kx, mov.rows(), mov.cols()) * 2.0;
            k.ky = upsample2(k.ky, mov.rows(), mov.cols()) * 2.0;
            for (AxisCoefficients* p : {&model.x, &model.y}) {
                p->alpha *= 2.0;
                p->gamma /= 2.0;
            }
        }

        Adam adam(cfg, cfg.step_size);
        Adam coeff_adam(cfg, cfg.step_size * kCoefficientStepScale);
        ScalarField mx = ScalarField::Zero(mov.rows(), mov.cols()), vx = mx, my = mx, vy = mx;
        CoefficientState sx[3], sy[3];
        std::vector<double> totals;
        totals.reserve(cfg.iters_per_level + 1);

        for (int it = 0; it <= cfg.iters_per_level; ++it) {
            const ObjectiveValue obj = evaluate_objective(mov, tgt, k, df, model, cfg.lambda_reg);
            res.loss_trace.push_back({level, it, obj.loss});
            if (!std::isfinite(obj.loss.total) || !all_finite(obj.grad.dk.kx) || !all_finite(obj.grad.dk.ky))
                throw SolverError("register_pair: non-finite objective at level " + std::to_string(level) +
                                  ", iteration " + std::to_string(it) + trace_tail(res.loss_trace));
            totals.push_back(obj.loss.total);

            if (level == 0 && obj.loss.total < best_loss.total) {
                best_loss = obj.loss;
                best_k = k;
                best_model = model;
            }
            if (it == cfg.iters_per_level) break;
            if (it >= kStopWindow) {
                const double before = totals[it - kStopWindow];
                if (before - obj.loss.total < cfg.stop_rel_tol * std::abs(before)) break;
            }

            adam.tick();
            coeff_adam.tick();
            adam.step(k.kx, obj.grad.dk.kx, mx, vx);
            adam.step(k.ky, obj.grad.dk.ky, my, vy);
            if (uses_coefficients(model.kind)) {
                step_coefficients(coeff_adam, model.x, obj.grad.dx_coeffs, model.kind, sx);
                step_coefficients(coeff_adam, model.y, obj.grad.dy_coeffs, model.kind, sy);
            }
        }
    }

    res.stiffness = std::move(best_k);
    res.model = best_model;
    res.field = deformation_from_stiffness(res.stiffness, df, res.model);
    res.warped = warp_bilinear(moving, res.field);
    res.final = best_loss;
    return res;
}

}  // namespace padreg
