#pragma once

// Dense 2-D fields. Rows grow with imaging depth (away from the probe);
// columns grow to the right. All data is row-major.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "padreg/error.hpp"

namespace padreg {

template <typename Scalar>
using Field = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ScalarField = Field<double>;

/// Per-pixel labels: 0 background, 1 artery, 2 vein.
using LabelMask = Field<std::uint8_t>;

/// Dense displacement in pixels. `dx` is the vertical component, positive
/// toward the probe (content moves to smaller row indices); `dy` is the
/// horizontal component, positive toward larger column indices.
template <typename Scalar>
struct VectorFieldT {
    Field<Scalar> dx;
    Field<Scalar> dy;

    VectorFieldT() = default;
    VectorFieldT(Field<Scalar> dx_, Field<Scalar> dy_) : dx(std::move(dx_)), dy(std::move(dy_)) {
        if (dx.rows() != dy.rows() || dx.cols() != dy.cols())
            throw DimensionError("vector field components differ in shape");
    }

    static VectorFieldT zero(Eigen::Index rows, Eigen::Index cols) {
        return {Field<Scalar>::Zero(rows, cols), Field<Scalar>::Zero(rows, cols)};
    }

    Eigen::Index rows() const { return dx.rows(); }
    Eigen::Index cols() const { return dx.cols(); }
};

using VectorField = VectorFieldT<double>;

struct GridPoint {
    double row = 0.0;
    double col = 0.0;
};

template <typename A, typename B>
bool same_shape(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
    return a.rows() == b.rows() && a.cols() == b.cols();
}

template <typename A, typename B>
void require_same_shape(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b, const char* what) {
    if (!same_shape(a, b))
        throw DimensionError(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " does not match " + std::to_string(b.rows()) +
                             "x" + std::to_string(b.cols()));
}

template <typename Derived>
void require_min_shape(const Eigen::DenseBase<Derived>& a, Eigen::Index min_rows, Eigen::Index min_cols,
                       const char* what) {
    if (a.rows() < min_rows || a.cols() < min_cols)
        throw DimensionError(std::string(what) + ": field " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " is smaller than " + std::to_string(min_rows) +
                             "x" + std::to_string(min_cols));
}

/// Halves each dimension (rounding up). Each output pixel is the mean of its
/// 2x2 source block, truncated at the bottom/right edges for odd sizes.
template <typename Derived>
Field<typename Derived::Scalar> downsample2(const Eigen::DenseBase<Derived>& src) {
    using Scalar = typename Derived::Scalar;
    require_min_shape(src, 2, 2, "downsample2");
    const Eigen::Index h = src.rows(), w = src.cols();
    const Eigen::Index oh = (h + 1) / 2, ow = (w + 1) / 2;
    Field<Scalar> out(oh, ow);
    for (Eigen::Index r = 0; r < oh; ++r) {
        const Eigen::Index r0 = 2 * r, nr = std::min<Eigen::Index>(2, h - r0);
        for (Eigen::Index c = 0; c < ow; ++c) {
            const Eigen::Index c0 = 2 * c, nc = std::min<Eigen::Index>(2, w - c0);
            out(r, c) = src.derived().block(r0, c0, nr, nc).sum() / Scalar(nr * nc);
        }
    }
    return out;
}

namespace detail {

// Corner-aligned source coordinate for output index i of n, source length m.
inline void corner_aligned(Eigen::Index i, Eigen::Index n, Eigen::Index m, Eigen::Index& i0, Eigen::Index& i1,
                           double& t) {
    if (n == 1 || m == 1) {
        i0 = i1 = 0;
        t = 0.0;
        return;
    }
    const double s = double(i) * double(m - 1) / double(n - 1);
    i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(s)), m - 1);
    i1 = std::min<Eigen::Index>(i0 + 1, m - 1);
    t = s - double(i0);
}

}  // namespace detail

/// Bilinear upsampling onto a grid of roughly twice the size, with the four
/// corners of source and target aligned. Target dims must lie in [2n-1, 2n].
template <typename Derived>
Field<typename Derived::Scalar> upsample2(const Eigen::DenseBase<Derived>& src, Eigen::Index target_h,
                                          Eigen::Index target_w) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index h = src.rows(), w = src.cols();
    if (h < 1 || w < 1 || target_h < 2 * h - 1 || target_h > 2 * h || target_w < 2 * w - 1 || target_w > 2 * w)
        throw DimensionError("upsample2: target " + std::to_string(target_h) + "x" + std::to_string(target_w) +
                             " is not a 2x enlargement of " + std::to_string(h) + "x" + std::to_string(w));
    Field<Scalar> out(target_h, target_w);
    for (Eigen::Index r = 0; r < target_h; ++r) {
        Eigen::Index r0, r1;
        double tr;
        detail::corner_aligned(r, target_h, h, r0, r1, tr);
        for (Eigen::Index c = 0; c < target_w; ++c) {
            Eigen::Index c0, c1;
            double tc;
            detail::corner_aligned(c, target_w, w, c0, c1, tc);
            const auto& s = src.derived();
            const double top = (1.0 - tc) * double(s(r0, c0)) + tc * double(s(r0, c1));
            const double bot = (1.0 - tc) * double(s(r1, c0)) + tc * double(s(r1, c1));
            out(r, c) = Scalar((1.0 - tr) * top + tr * bot);
        }
    }
    return out;
}

/// Forward differences along rows and columns. The difference at the last
/// row (resp. column) is zero, so no out-of-grid sample is referenced.
template <typename Derived>
std::pair<Field<typename Derived::Scalar>, Field<typename Derived::Scalar>> forward_diff(
    const Eigen::DenseBase<Derived>& f) {
    using Scalar = typename Derived::Scalar;
    require_min_shape(f, 2, 2, "forward_diff");
    const Eigen::Index h = f.rows(), w = f.cols();
    Field<Scalar> dr = Field<Scalar>::Zero(h, w);
    Field<Scalar> dc = Field<Scalar>::Zero(h, w);
    dr.topRows(h - 1) = f.derived().bottomRows(h - 1) - f.derived().topRows(h - 1);
    dc.leftCols(w - 1) = f.derived().rightCols(w - 1) - f.derived().leftCols(w - 1);
    return {std::move(dr), std::move(dc)};
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& f) {
    return f.derived().isFinite().all();
}

}  // namespace padreg
