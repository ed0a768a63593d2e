#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "padreg/flowviz.hpp"
#include "test_helpers.hpp"

using namespace padreg;

TEST_CASE("zero field renders white") {
    const auto img = flow_to_color(VectorField::zero(4, 5));
    CHECK(img.height == 4);
    CHECK(img.width == 5);
    CHECK(img.pixels.size() == 60u);
    for (auto v : img.pixels) CHECK(v == 255);
}

TEST_CASE("constant field renders a single colour") {
    const VectorField d{ScalarField::Constant(3, 3, 0.7), ScalarField::Constant(3, 3, -0.2)};
    const auto img = flow_to_color(d);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(img.at(r, c) == img.at(0, 0));
    CHECK(img.at(0, 0) != std::array<std::uint8_t, 3>{255, 255, 255});
}

TEST_CASE("hue assignment") {
    CHECK(flow_hsv(1, 0, 1).hue_deg == doctest::Approx(0.0));
    CHECK(flow_hsv(0, 1, 1).hue_deg == doctest::Approx(90.0));
    CHECK(flow_hsv(-1, 0, 1).hue_deg == doctest::Approx(180.0));
    CHECK(flow_hsv(0, -1, 1).hue_deg == doctest::Approx(270.0));
    CHECK(flow_hsv(0.5, 0, 1).saturation == doctest::Approx(0.5));
    CHECK(flow_hsv(3, 4, 2).saturation == 1.0);
    CHECK(flow_hsv(0, 0, 1).saturation == 0.0);

    CHECK(hsv_to_rgb(0, 1) == std::array<std::uint8_t, 3>{255, 0, 0});
    CHECK(hsv_to_rgb(120, 1) == std::array<std::uint8_t, 3>{0, 255, 0});
    CHECK(hsv_to_rgb(240, 1) == std::array<std::uint8_t, 3>{0, 0, 255});
    CHECK(hsv_to_rgb(77, 0) == std::array<std::uint8_t, 3>{255, 255, 255});
}

TEST_CASE("rotating every vector by pi shifts hue by 180 degrees") {
    const VectorField d{test::make_field(2, 2, {0.3, -1.0, 0.0, 0.8}), test::make_field(2, 2, {0.4, 0.2, -0.6, -0.8})};
    for (Eigen::Index i = 0; i < 4; ++i) {
        const auto a = flow_hsv(d.dx.data()[i], d.dy.data()[i], 1.5);
        const auto b = flow_hsv(-d.dx.data()[i], -d.dy.data()[i], 1.5);
        CHECK(std::fmod(b.hue_deg - a.hue_deg + 360.0, 360.0) == doctest::Approx(180.0));
        CHECK(a.saturation == b.saturation);
    }
}

TEST_CASE("scaling the field and max_mag together leaves the image unchanged") {
    std::mt19937_64 rng(30);
    const VectorField d{test::random_field(12, 9, rng, -2, 2), test::random_field(12, 9, rng, -2, 2)};
    const auto base = flow_to_color(d, 1.7);
    for (double c : {0.25, 2.0, 8.0, 3.0, 0.1}) {
        CAPTURE(c);
        const VectorField s{c * d.dx, c * d.dy};
        CHECK(flow_to_color(s, 1.7 * c) == base);
    }
    CHECK(flow_to_color(d) == flow_to_color(VectorField{4.0 * d.dx, 4.0 * d.dy}));
}

TEST_CASE("saturation grows with magnitude up to max_mag") {
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double m = 0.03 * i;
        const auto hsv = flow_hsv(m * std::cos(0.4), m * std::sin(0.4), 2.0);
        CHECK(hsv.saturation >= prev);
        prev = hsv.saturation;
    }
    CHECK(prev == 1.0);
}
