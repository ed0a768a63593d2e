#include <doctest.h>

#include <cmath>
#include <random>

#include "padreg/warp.hpp"
#include "test_helpers.hpp"

using namespace padreg;

namespace {

double inner(const ScalarField& a, const ScalarField& b) { return (a * b).sum(); }

// Central finite difference of <upstream, warp(image, field)> at one field entry.
double fd_derivative(const ScalarField& image, VectorField field, const ScalarField& upstream, bool vertical,
                     Eigen::Index r, Eigen::Index c, double h) {
    ScalarField& comp = vertical ? field.dx : field.dy;
    const double x0 = comp(r, c);
    comp(r, c) = x0 + h;
    const double plus = inner(upstream, warp_bilinear(image, field));
    comp(r, c) = x0 - h;
    const double minus = inner(upstream, warp_bilinear(image, field));
    return (plus - minus) / (2 * h);
}

// True when the sample coordinate is at least `margin` away from the grid
// border and from integer lattice lines (where bilinear is not differentiable).
bool well_inside(double y, double x, Eigen::Index h, Eigen::Index w, double margin) {
    auto frac_ok = [&](double v) {
        const double f = v - std::floor(v);
        return f > margin && f < 1.0 - margin;
    };
    return y > margin && y < h - 1 - margin && x > margin && x < w - 1 - margin && frac_ok(y) && frac_ok(x);
}

}  // namespace

TEST_CASE("zero field is an exact identity") {
    std::mt19937_64 rng(1);
    const ScalarField img = test::random_field(9, 13, rng);
    const ScalarField out = warp_bilinear(img, VectorField::zero(9, 13));
    CHECK((out == img).all());
}

TEST_CASE("vertical unit shift with clamping") {
    ScalarField img(8, 8);
    for (int r = 0; r < 8; ++r) img.row(r).setConstant(r);
    VectorField f{ScalarField::Ones(8, 8), ScalarField::Zero(8, 8)};
    const ScalarField out = warp_bilinear(img, f);
    for (int r = 0; r < 8; ++r) CHECK((out.row(r) == std::min(r + 1, 7)).all());
}

TEST_CASE("constant images stay constant") {
    std::mt19937_64 rng(2);
    const ScalarField img = ScalarField::Constant(10, 10, 0.37);
    VectorField f{test::random_field(10, 10, rng, -4, 4), test::random_field(10, 10, rng, -4, 4)};
    CHECK((warp_bilinear(img, f) - 0.37).abs().maxCoeff() < 1e-15);
    const auto g = warp_adjoint(img, f, test::random_field(10, 10, rng));
    CHECK((g.dx == 0.0).all());
    CHECK((g.dy == 0.0).all());
}

TEST_CASE("warped values stay within the image range") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField img = test::random_field(12, 7, rng, -2, 5);
        VectorField f{test::random_field(12, 7, rng, -6, 6), test::random_field(12, 7, rng, -6, 6)};
        const ScalarField out = warp_bilinear(img, f);
        CHECK(out.minCoeff() >= img.minCoeff());
        CHECK(out.maxCoeff() <= img.maxCoeff());
    }
}

TEST_CASE("output depends only on the 2x2 neighbourhood of the sample") {
    std::mt19937_64 rng(4);
    ScalarField img = test::random_field(10, 10, rng);
    VectorField f = VectorField::zero(10, 10);
    f.dx(3, 3) = 1.4;  // samples (4.4, 3.7)
    f.dy(3, 3) = 0.7;
    const double before = warp_bilinear(img, f)(3, 3);
    for (Eigen::Index r = 0; r < 10; ++r)
        for (Eigen::Index c = 0; c < 10; ++c)
            if (!((r == 4 || r == 5) && (c == 3 || c == 4))) img(r, c) += 10.0;
    CHECK(warp_bilinear(img, f)(3, 3) == before);
}

TEST_CASE("adjoint of zero upstream is zero") {
    std::mt19937_64 rng(5);
    const ScalarField img = test::random_field(6, 6, rng);
    VectorField f{test::random_field(6, 6, rng, -1, 1), test::random_field(6, 6, rng, -1, 1)};
    const auto g = warp_adjoint(img, f, ScalarField::Zero(6, 6));
    CHECK((g.dx == 0.0).all());
    CHECK((g.dy == 0.0).all());
}

TEST_CASE("adjoint matches central finite differences") {
    std::mt19937_64 rng(6);
    constexpr double h = 1e-4;
    int checked = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const Eigen::Index n = 6;
        const ScalarField img = test::smooth_image(n, n, rng);
        VectorField f{test::random_field(n, n, rng, -0.8, 0.8), test::random_field(n, n, rng, -0.8, 0.8)};
        const ScalarField up = test::random_field(n, n, rng, -1, 1);
        const auto g = warp_adjoint(img, f, up);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) {
                if (!well_inside(r + f.dx(r, c), c + f.dy(r, c), n, n, 2e-3)) continue;
                for (bool vertical : {true, false}) {
                    const double fd = fd_derivative(img, f, up, vertical, r, c, h);
                    const double an = vertical ? g.dx(r, c) : g.dy(r, c);
                    CHECK(std::abs(an - fd) <= 1e-4 * std::max(std::abs(fd), 1e-3));
                    ++checked;
                }
            }
    }
    CHECK(checked > 1000);
}

TEST_CASE("derivative along a clamped axis is zero") {
    std::mt19937_64 rng(8);
    const ScalarField img = test::random_field(5, 5, rng);
    VectorField f = VectorField::zero(5, 5);
    f.dx(0, 2) = -3.0;  // row coordinate clamps to 0
    f.dy(0, 2) = 0.5;
    const auto g = warp_adjoint(img, f, ScalarField::Ones(5, 5));
    CHECK(g.dx(0, 2) == 0.0);
    CHECK(g.dy(0, 2) != 0.0);
}

TEST_CASE("warp rejects mismatched shapes") {
    CHECK_THROWS_AS(warp_bilinear(ScalarField::Zero(4, 4), VectorField::zero(4, 5)), DimensionError);
    CHECK_THROWS_AS(warp_adjoint(ScalarField::Zero(4, 4), VectorField::zero(4, 4), ScalarField::Zero(3, 4)),
                    DimensionError);
}

TEST_CASE("nearest warp for labels") {
    LabelMask m = LabelMask::Zero(6, 6);
    m(4, 2) = 2;
    VectorField f = VectorField::zero(6, 6);
    f.dx(2, 2) = 1.6;  // rounds to row 4
    const LabelMask out = warp_nearest(m, f);
    CHECK(out(2, 2) == 2);
    CHECK(out(4, 2) == 2);
    CHECK(out.cast<int>().sum() == 4);
    CHECK((warp_nearest(m, VectorField::zero(6, 6)) == m).all());
}
