#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "metric_oracles.hpp"
#include "padreg/metrics.hpp"
#include "test_helpers.hpp"

using namespace padreg;
using padreg::test::make_field;

namespace {

LabelMask mask_from_bits(unsigned bits, int side, int label = 1) {
    LabelMask m(side, side);
    for (int i = 0; i < side * side; ++i) m.data()[i] = (bits >> i) & 1u ? std::uint8_t(label) : std::uint8_t(0);
    return m;
}

LabelMask random_mask(std::mt19937_64& rng, int side, double density) {
    std::bernoulli_distribution on(density);
    LabelMask m(side, side);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = on(rng) ? 1 : 0;
    return m;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("dice examples") {
    LabelMask a = LabelMask::Zero(4, 4), b = LabelMask::Zero(4, 4);
    a.block(0, 0, 2, 2).setConstant(1);
    CHECK(dice(a, a, 1) == 1.0);
    b.block(2, 2, 2, 2).setConstant(1);
    CHECK(dice(a, b, 1) == 0.0);
    b = LabelMask::Zero(4, 4);
    b.block(1, 0, 2, 2).setConstant(1);
    CHECK(dice(a, b, 1) == 0.5);
    CHECK(dice(a, b, 2) == 1.0);
    CHECK_THROWS_AS(dice(a, LabelMask::Zero(4, 5), 1), DimensionError);
}

TEST_CASE("dice and discrepancy rate match set arithmetic on every 3x3 mask pair") {
    long mismatches = 0;
    for (unsigned x = 0; x < 512; ++x) {
        const LabelMask a = mask_from_bits(x, 3);
        const ScalarField fa = a.cast<double>();
        for (unsigned y = 0; y < 512; ++y) {
            const LabelMask b = mask_from_bits(y, 3);
            if (dice(a, b, 1) != oracle::dice(a, b, 1)) ++mismatches;
            if (dice(a, b, 1) != dice(b, a, 1)) ++mismatches;
            const ScalarField dx = fa - b.cast<double>();
            for (double df : {1.0, -0.5, 0.0})
                if (discrepancy_rate(dx, df) != oracle::discrepancy_rate(dx, df)) ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("discrepancy rate examples") {
    CHECK(discrepancy_rate(ScalarField::Constant(3, 3, 0.2), 1.0) == 0.0);
    CHECK(discrepancy_rate(ScalarField::Constant(3, 3, -0.2), 1.0) == 1.0);
    CHECK(discrepancy_rate(make_field(2, 2, {1, -1, 0, 2}), 1.0) == 0.25);
    CHECK(discrepancy_rate(make_field(2, 2, {1, -1, 0, 2}), 0.0) == 0.0);
}

TEST_CASE("boundary pixels") {
    LabelMask m = LabelMask::Zero(5, 5);
    m.block(1, 1, 3, 3).setConstant(1);
    const auto b = boundary_pixels(m, 1);
    CHECK(b.count() == 8);
    CHECK_FALSE(b(2, 2));
    const auto full = boundary_pixels(LabelMask::Ones(5, 5), 1);
    CHECK(full.count() == 16);
}

TEST_CASE("hd95 examples") {
    LabelMask a = LabelMask::Zero(12, 12), b = LabelMask::Zero(12, 12);
    a(3, 2) = 1;
    CHECK(hd95(a, a, 1) == 0.0);
    b(3, 7) = 1;
    CHECK(hd95(a, b, 1) == doctest::Approx(5.0));
    CHECK(hd95(a, LabelMask::Zero(12, 12), 1) == kInf);
    CHECK(hd95(LabelMask::Zero(12, 12), a, 1) == kInf);
    CHECK(hd95(LabelMask::Zero(12, 12), LabelMask::Zero(12, 12), 1) == 0.0);
    CHECK_THROWS_AS(hd95(a, LabelMask::Zero(12, 11), 1), DimensionError);
}

TEST_CASE("hd95 matches an all-pairs distance oracle") {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> density(0.05, 0.9);
    for (int k = 0; k < 200; ++k) {
        const LabelMask a = random_mask(rng, 5, density(rng));
        const LabelMask b = random_mask(rng, 5, density(rng));
        CAPTURE(k);
        const double got = hd95(a, b, 1), want = oracle::hd95(a, b, 1);
        if (std::isinf(want))
            CHECK(got == want);
        else
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got == hd95(b, a, 1));
    }
    for (int k = 0; k < 30; ++k) {
        const LabelMask a = random_mask(rng, 23, 0.3), b = random_mask(rng, 23, 0.05);
        CHECK(hd95(a, b, 1) == doctest::Approx(oracle::hd95(a, b, 1)).epsilon(1e-12));
    }
}

TEST_CASE("distance transform matches brute force") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 20; ++k) {
        std::bernoulli_distribution on(0.04);
        Field<bool> sites(17, 13);
        for (Eigen::Index i = 0; i < sites.size(); ++i) sites.data()[i] = on(rng);
        sites(0, 0) = true;
        const ScalarField dt = squared_distance_transform(sites);
        for (Eigen::Index r = 0; r < 17; ++r)
            for (Eigen::Index c = 0; c < 13; ++c) {
                double best = kInf;
                for (Eigen::Index rr = 0; rr < 17; ++rr)
                    for (Eigen::Index cc = 0; cc < 13; ++cc)
                        if (sites(rr, cc)) best = std::min(best, double((r - rr) * (r - rr) + (c - cc) * (c - cc)));
                CHECK(dt(r, c) == best);
            }
    }
    CHECK(std::isinf(squared_distance_transform(Field<bool>::Zero(3, 3))(1, 1)));
}

TEST_CASE("ssim") {
    std::mt19937_64 rng(22);
    const ScalarField a = test::random_field(16, 16, rng);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ssim(ScalarField::Constant(12, 12, 0.3), ScalarField::Constant(12, 12, 0.3)) == doctest::Approx(1.0));

    const ScalarField neg = 1.0 - a;
    const double s = ssim(a, neg);
    CHECK(s < 1.0);
    CHECK(s < 0.0);
    CHECK(s == doctest::Approx(oracle::ssim(a, neg)).epsilon(1e-12));

    for (int k = 0; k < 5; ++k) {
        const ScalarField x = test::smooth_image(20, 17, rng), y = test::random_field(20, 17, rng);
        const double v = ssim(x, y);
        CHECK(v == doctest::Approx(oracle::ssim(x, y)).epsilon(1e-12));
        CHECK(std::abs(v) <= 1.0);
    }
    CHECK_THROWS_AS(ssim(ScalarField::Zero(10, 20), ScalarField::Zero(10, 20)), DimensionError);
}

TEST_CASE("mutual information") {
    std::mt19937_64 rng(23);
    const ScalarField a = test::random_field(64, 64, rng);
    CHECK(entropy(a) > 4.9);
    CHECK(mutual_information(a, a) == doctest::Approx(entropy(a)).epsilon(1e-12));
    CHECK(mutual_information(ScalarField::Constant(64, 64, 0.4), a) == 0.0);
    CHECK(entropy(ScalarField::Constant(8, 8, 0.4)) == 0.0);

    // Two equiprobable levels carry exactly one bit.
    ScalarField half = ScalarField::Zero(8, 8);
    half.topRows(4).setConstant(1.0);
    CHECK(entropy(half) == doctest::Approx(1.0));
    CHECK(mutual_information(half, 1.0 - half) == doctest::Approx(1.0));

    // Independent images: the plug-in estimate sits near its known positive
    // bias (B-1)^2 / (2 N ln 2) and far below the marginal entropy.
    const double bias = 31.0 * 31.0 / (2.0 * 4096.0 * std::log(2.0));
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 g(1000 + seed);
        const ScalarField x = test::random_field(64, 64, g), y = test::random_field(64, 64, g);
        const double mi = mutual_information(x, y);
        CHECK(mi >= 0.0);
        CHECK(mi < 1.5 * bias);
        CHECK(mutual_information(y, x) == doctest::Approx(mi).epsilon(1e-12));
    }
    CHECK_THROWS_AS(mutual_information(a, a, 1), ConfigError);
}

TEST_CASE("mse and endpoint error") {
    CHECK(mse(ScalarField::Zero(2, 2), ScalarField::Ones(2, 2)) == 1.0);
    CHECK(mse(make_field(1, 2, {0, 0.5}), make_field(1, 2, {0.5, 1})) == 0.25);

    std::mt19937_64 rng(24);
    const VectorField d{test::random_field(6, 6, rng, -2, 2), test::random_field(6, 6, rng, -2, 2)};
    CHECK(endpoint_error(d, d) == 0.0);
    const VectorField shifted{d.dx + 1.0, d.dy};
    CHECK(endpoint_error(shifted, d) == doctest::Approx(1.0));
    const VectorField truth{ScalarField::Constant(3, 3, 3.0), ScalarField::Constant(3, 3, 4.0)};
    CHECK(endpoint_error(VectorField::zero(3, 3), truth) == doctest::Approx(5.0));
    CHECK_THROWS_AS(endpoint_error(VectorField::zero(3, 3), VectorField::zero(3, 4)), DimensionError);
}

TEST_CASE("report assembly and JSON") {
    std::mt19937_64 rng(25);
    const ScalarField img = test::smooth_image(16, 16, rng);
    const VectorField field = VectorField::zero(16, 16);
    LabelMask m = LabelMask::Zero(16, 16);
    m.block(2, 2, 4, 4).setConstant(kArteryLabel);

    EvaluationInputs in;
    in.field = &field;
    in.warped = &img;
    in.target = &img;
    in.df = 1.0;
    auto rep = evaluate(in);
    CHECK(rep.ssim == doctest::Approx(1.0));
    CHECK(rep.mse == 0.0);
    CHECK_FALSE(rep.epe.has_value());
    CHECK_FALSE(rep.dsc_artery.has_value());
    auto j = to_json(rep);
    CHECK_FALSE(j.contains("epe"));
    CHECK_FALSE(j.contains("dsc_artery"));

    in.truth = &field;
    in.mask_warped = &m;
    in.mask_target = &m;
    rep = evaluate(in);
    CHECK(*rep.epe == 0.0);
    CHECK(*rep.dsc_artery == 1.0);
    CHECK(*rep.hd95_artery == 0.0);
    CHECK(*rep.dsc_vein == 1.0);

    const LabelMask empty = LabelMask::Zero(16, 16);
    in.mask_target = &empty;
    rep = evaluate(in);
    CHECK(std::isinf(*rep.hd95_artery));
    j = to_json(rep);
    CHECK(j.at("hd95_artery") == "Infinity");
    CHECK(j.at("epe") == 0.0);
}
