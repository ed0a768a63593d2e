#pragma once

// Backward warping: out(r, c) samples the image at (r + dx(r, c), c + dy(r, c)).
// Sample coordinates are clamped to the grid; interpolation uses the cell
// whose top-left corner is floor() of the coordinate.

#include <algorithm>
#include <cmath>

#include "padreg/field.hpp"

namespace padreg {

enum class BoundaryMode { Clamp };

struct WarpConfig {
    BoundaryMode boundary = BoundaryMode::Clamp;
};

namespace detail {

struct AxisSample {
    Eigen::Index i0;
    Eigen::Index i1;
    double t;       // weight of i1
    bool clamped;   // coordinate fell outside [0, n-1]
};

inline AxisSample axis_sample(double x, Eigen::Index n) {
    const double hi = double(n - 1);
    AxisSample s{0, 0, 0.0, false};
    if (!(x >= 0.0)) {
        s.clamped = true;
        x = 0.0;
    } else if (x > hi) {
        s.clamped = true;
        x = hi;
    }
    s.i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(x)), n - 1);
    s.i1 = std::min<Eigen::Index>(s.i0 + 1, n - 1);
    s.t = x - double(s.i0);
    return s;
}

}  // namespace detail

template <typename Derived, typename Scalar>
Field<Scalar> warp_bilinear(const Eigen::ArrayBase<Derived>& image_expr, const VectorFieldT<Scalar>& field,
                            const WarpConfig& = {}) {
    const auto& image = image_expr.derived().eval();
    require_same_shape(image, field.dx, "warp_bilinear");
    const Eigen::Index h = image.rows(), w = image.cols();
    Field<Scalar> out(h, w);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) {
            const auto sr = detail::axis_sample(double(r) + double(field.dx(r, c)), h);
            const auto sc = detail::axis_sample(double(c) + double(field.dy(r, c)), w);
            const Scalar tr = Scalar(sr.t), tc = Scalar(sc.t);
            const Scalar top = (Scalar(1) - tc) * image(sr.i0, sc.i0) + tc * image(sr.i0, sc.i1);
            const Scalar bot = (Scalar(1) - tc) * image(sr.i1, sc.i0) + tc * image(sr.i1, sc.i1);
            out(r, c) = (Scalar(1) - tr) * top + tr * bot;
        }
    }
    return out;
}

/// Gradient of <upstream, warp_bilinear(image, field)> with respect to the
/// field. Along an axis whose coordinate was clamped the derivative is zero.
template <typename ImageDerived, typename Scalar, typename UpstreamDerived>
VectorFieldT<Scalar> warp_adjoint(const Eigen::ArrayBase<ImageDerived>& image_expr, const VectorFieldT<Scalar>& field,
                                  const Eigen::ArrayBase<UpstreamDerived>& upstream_expr, const WarpConfig& = {}) {
    const auto& image = image_expr.derived().eval();
    const auto& upstream = upstream_expr.derived().eval();
    require_same_shape(image, field.dx, "warp_adjoint");
    require_same_shape(image, upstream, "warp_adjoint");
    const Eigen::Index h = image.rows(), w = image.cols();
    auto grad = VectorFieldT<Scalar>::zero(h, w);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) {
            const Scalar u = upstream(r, c);
            if (u == Scalar(0)) continue;
            const auto sr = detail::axis_sample(double(r) + double(field.dx(r, c)), h);
            const auto sc = detail::axis_sample(double(c) + double(field.dy(r, c)), w);
            const Scalar tr = Scalar(sr.t), tc = Scalar(sc.t);
            const Scalar i00 = image(sr.i0, sc.i0), i01 = image(sr.i0, sc.i1);
            const Scalar i10 = image(sr.i1, sc.i0), i11 = image(sr.i1, sc.i1);
            if (!sr.clamped) grad.dx(r, c) = u * ((Scalar(1) - tc) * (i10 - i00) + tc * (i11 - i01));
            if (!sc.clamped) grad.dy(r, c) = u * ((Scalar(1) - tr) * (i01 - i00) + tr * (i11 - i10));
        }
    }
    return grad;
}

/// Nearest-neighbour backward warp for label images.
template <typename Label, typename Scalar>
Field<Label> warp_nearest(const Field<Label>& labels, const VectorFieldT<Scalar>& field) {
    require_same_shape(labels, field.dx, "warp_nearest");
    const Eigen::Index h = labels.rows(), w = labels.cols();
    Field<Label> out(h, w);
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) {
            const double y = std::clamp(double(r) + double(field.dx(r, c)), 0.0, double(h - 1));
            const double x = std::clamp(double(c) + double(field.dy(r, c)), 0.0, double(w - 1));
            out(r, c) = labels(static_cast<Eigen::Index>(std::lround(y)), static_cast<Eigen::Index>(std::lround(x)));
        }
    }
    return out;
}

}  // namespace padreg
