#include "padreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace padreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional squared distance transform of a sampled function
// (lower envelope of parabolas).
void distance_transform_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                           std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (!std::isfinite(f[q])) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        auto intersect = [&](int p) { return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p)); };
        double s = intersect(v[k]);
        while (s <= z[k]) s = intersect(v[--k]);  // z[0] == -inf stops the walk
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < double(q)) ++j;
        const double dq = double(q - v[j]);
        d[q] = dq * dq + f[v[j]];
    }
}

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> g(size);
    const int half = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double x = double(i - half);
        g[i] = std::exp(-x * x / (2.0 * sigma * sigma));
        sum += g[i];
    }
    for (auto& v : g) v /= sum;
    return g;
}

// Separable 'valid' correlation with a symmetric kernel.
ScalarField filter_valid(const ScalarField& src, const std::vector<double>& k) {
    const Eigen::Index n = static_cast<Eigen::Index>(k.size());
    const Eigen::Index h = src.rows(), w = src.cols();
    ScalarField tmp(h, w - n + 1);
    for (Eigen::Index r = 0; r < h; ++r)
        for (Eigen::Index c = 0; c < w - n + 1; ++c) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) acc += k[i] * src(r, c + i);
            tmp(r, c) = acc;
        }
    ScalarField out(h - n + 1, w - n + 1);
    for (Eigen::Index r = 0; r < h - n + 1; ++r)
        for (Eigen::Index c = 0; c < w - n + 1; ++c) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) acc += k[i] * tmp(r + i, c);
            out(r, c) = acc;
        }
    return out;
}

int bin_of(double v, int bins) {
    const int b = static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * bins));
    return std::min(b, bins - 1);
}

double percentile_linear(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * double(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double t = pos - double(lo);
    return values[lo] + t * (values[hi] - values[lo]);
}

}  // namespace

double dice(const LabelMask& a, const LabelMask& b, int label) {
    require_same_shape(a, b, "dice");
    const auto in_a = (a.cast<int>() == label);
    const auto in_b = (b.cast<int>() == label);
    const double na = double(in_a.count()), nb = double(in_b.count());
    if (na + nb == 0.0) return 1.0;
    return 2.0 * double((in_a && in_b).count()) / (na + nb);
}

Field<bool> boundary_pixels(const LabelMask& mask, int label) {
    const Eigen::Index h = mask.rows(), w = mask.cols();
    Field<bool> out = Field<bool>::Constant(h, w, false);
    for (Eigen::Index r = 0; r < h; ++r)
        for (Eigen::Index c = 0; c < w; ++c) {
            if (mask(r, c) != label) continue;
            if (r == 0 || c == 0 || r == h - 1 || c == w - 1 || mask(r - 1, c) != label ||
                mask(r + 1, c) != label || mask(r, c - 1) != label || mask(r, c + 1) != label)
                out(r, c) = true;
        }
    return out;
}

ScalarField squared_distance_transform(const Field<bool>& sites) {
    const Eigen::Index h = sites.rows(), w = sites.cols();
    ScalarField d(h, w);
    const Eigen::Index n = std::max(h, w);
    std::vector<double> f(n), out(n), z(n + 1);
    std::vector<int> v(n);

    for (Eigen::Index c = 0; c < w; ++c) {
        f.resize(h);
        out.resize(h);
        for (Eigen::Index r = 0; r < h; ++r) f[r] = sites(r, c) ? 0.0 : kInf;
        distance_transform_1d(f, out, v, z);
        for (Eigen::Index r = 0; r < h; ++r) d(r, c) = out[r];
    }
    for (Eigen::Index r = 0; r < h; ++r) {
        f.resize(w);
        out.resize(w);
        for (Eigen::Index c = 0; c < w; ++c) f[c] = d(r, c);
        distance_transform_1d(f, out, v, z);
        for (Eigen::Index c = 0; c < w; ++c) d(r, c) = out[c];
    }
    return d;
}

double hd95(const LabelMask& a, const LabelMask& b, int label) {
    require_same_shape(a, b, "hd95");
    const Field<bool> ba = boundary_pixels(a, label);
    const Field<bool> bb = boundary_pixels(b, label);
    const bool empty_a = !ba.any(), empty_b = !bb.any();
    if (empty_a && empty_b) return 0.0;
    if (empty_a || empty_b) return kInf;

    const ScalarField to_a = squared_distance_transform(ba);
    const ScalarField to_b = squared_distance_transform(bb);
    std::vector<double> distances;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (ba(r, c)) distances.push_back(std::sqrt(to_b(r, c)));
            if (bb(r, c)) distances.push_back(std::sqrt(to_a(r, c)));
        }
    return percentile_linear(std::move(distances), 0.95);
}

double ssim(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "ssim");
    require_min_shape(a, 11, 11, "ssim");
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    const auto g = gaussian_window(11, 1.5);

    const ScalarField mu_a = filter_valid(a, g);
    const ScalarField mu_b = filter_valid(b, g);
    const ScalarField var_a = filter_valid(a.square(), g) - mu_a.square();
    const ScalarField var_b = filter_valid(b.square(), g) - mu_b.square();
    const ScalarField cov = filter_valid(a * b, g) - mu_a * mu_b;

    const ScalarField num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
    const ScalarField den = (mu_a.square() + mu_b.square() + c1) * (var_a + var_b + c2);
    return (num / den).mean();
}

double mutual_information(const ScalarField& a, const ScalarField& b, int bins) {
    require_same_shape(a, b, "mutual_information");
    if (bins < 2) throw ConfigError("mutual_information: bins must be >= 2");
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(bins, bins);
    for (Eigen::Index i = 0; i < a.size(); ++i) joint(bin_of(a.data()[i], bins), bin_of(b.data()[i], bins)) += 1.0;
    joint /= double(a.size());
    const Eigen::VectorXd pa = joint.rowwise().sum();
    const Eigen::RowVectorXd pb = joint.colwise().sum();
    double mi = 0.0;
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            const double p = joint(i, j);
            if (p > 0.0) mi += p * std::log2(p / (pa[i] * pb[j]));
        }
    return std::max(mi, 0.0);
}

double entropy(const ScalarField& a, int bins) {
    if (bins < 2) throw ConfigError("entropy: bins must be >= 2");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(bins);
    for (Eigen::Index i = 0; i < a.size(); ++i) p[bin_of(a.data()[i], bins)] += 1.0;
    p /= double(a.size());
    double h = 0.0;
    for (int i = 0; i < bins; ++i)
        if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
    return h;
}

double mse(const ScalarField& a, const ScalarField& b) {
    require_same_shape(a, b, "mse");
    return (a - b).square().mean();
}

double discrepancy_rate(const ScalarField& dx, double df) {
    if (df == 0.0 || dx.size() == 0) return 0.0;
    return double(((dx * df) < 0.0).count()) / double(dx.size());
}

double endpoint_error(const VectorField& d, const VectorField& d_true) {
    require_same_shape(d.dx, d_true.dx, "endpoint_error");
    return ((d.dx - d_true.dx).square() + (d.dy - d_true.dy).square()).sqrt().mean();
}

MetricReport evaluate(const EvaluationInputs& in) {
    MetricReport rep;
    if (in.warped && in.target) {
        rep.ssim = ssim(*in.warped, *in.target);
        rep.mi = mutual_information(*in.warped, *in.target);
        rep.mse = mse(*in.warped, *in.target);
    }
    if (in.field) rep.dr = discrepancy_rate(in.field->dx, in.df);
    if (in.field && in.truth) rep.epe = endpoint_error(*in.field, *in.truth);
    if (in.mask_warped && in.mask_target) {
        rep.dsc_artery = dice(*in.mask_warped, *in.mask_target, kArteryLabel);
        rep.dsc_vein = dice(*in.mask_warped, *in.mask_target, kVeinLabel);
        rep.hd95_artery = hd95(*in.mask_warped, *in.mask_target, kArteryLabel);
        rep.hd95_vein = hd95(*in.mask_warped, *in.mask_target, kVeinLabel);
    }
    return rep;
}

nlohmann::json to_json(const MetricReport& r) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
        return v;
    };
    nlohmann::json j = nlohmann::json::object();
    if (r.dsc_artery) j["dsc_artery"] = num(*r.dsc_artery);
    if (r.dsc_vein) j["dsc_vein"] = num(*r.dsc_vein);
    if (r.hd95_artery) j["hd95_artery"] = num(*r.hd95_artery);
    if (r.hd95_vein) j["hd95_vein"] = num(*r.hd95_vein);
    j["ssim"] = num(r.ssim);
    j["mi"] = num(r.mi);
    j["mse"] = num(r.mse);
    j["dr"] = num(r.dr);
    if (r.epe) j["epe"] = num(*r.epe);
    return j;
}

}  // namespace padreg
