#include <doctest.h>

#include <cmath>

#include "balaw/common.hpp"
#include "balaw/kinetic_geometry.hpp"
#include "balaw/reference_solutions.hpp"
#include "support/oracles.hpp"

using namespace balaw;

TEST_SUITE_BEGIN("kinetic_geometry");

TEST_CASE("kinetic indicator") {
    auto sol = oracles::sample_profile_1d([](double) { return 0.7; }, 64);
    int cell[1] = {10};
    CHECK(chi(sol, 0, cell, 0.5) == 1);
    CHECK(chi(sol, 0, cell, 0.7) == 1);   // inclusive upper bound
    CHECK(chi(sol, 0, cell, 0.9) == 0);
    CHECK(chi(sol, 0, cell, 0.0) == 0);   // strict lower bound
    CHECK(chi(sol, 0, cell, -0.3) == 0);
    int bad[1] = {64};
    CHECK_THROWS_AS((void)chi(sol, 0, bad, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)chi(sol, 3, cell, 0.5), std::invalid_argument);
}

TEST_CASE("superlevel measure on closed-form profiles") {
    // Constant field: the whole window counts whenever v < c.
    auto c_sol = oracles::sample_profile_1d([](double) { return 0.6; }, 1 << 10);
    double y[1] = {0.5};
    CHECK(superlevel_measure(c_sol, 0, y, 0.2, 0.3, Geometry::ball) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(superlevel_measure(c_sol, 0, y, 0.2, 0.9, Geometry::ball) == 0.0);
    // u <= 1 everywhere: level 1 has empty superlevel set.
    CHECK(superlevel_measure(c_sol, 0, y, 0.2, 1.0, Geometry::ball) == 0.0);

    // Ramp profile: {z in (0.25, 0.75) : z > 0.5} has length 1/4.
    auto ramp = oracles::sample_profile_1d([](double x) { return std::clamp(x, 0.0, 1.0); },
                                           1 << 12);
    double got = superlevel_measure(ramp, 0, y, 0.25, 0.5, Geometry::ball);
    CHECK(std::abs(got - 0.25) <= 1e-6);
    double want = oracles::count_superlevel_1d(
        [](double z) { return std::clamp(z, 0.0, 1.0); }, 0.5, 0.25, 0.5);
    CHECK(std::abs(got - want) <= 1e-5);

    CHECK_THROWS_AS((void)superlevel_measure(ramp, 0, y, 1e-6, 0.5, Geometry::ball),
                    std::invalid_argument);
}

TEST_CASE("superlevel measure is nonincreasing in the level") {
    auto sol = oracles::sample_profile_1d(
        [](double x) { return 0.5 + 0.4 * std::sin(2 * M_PI * x); }, 1 << 10);
    double y[1] = {0.3};
    double prev = 1e300;
    for (double v = 0.05; v < 1.0; v += 0.05) {
        double m = superlevel_measure(sol, 0, y, 0.2, v, Geometry::ball);
        CHECK(m <= prev + 1e-12);
        prev = m;
    }
}

TEST_CASE("superlevel measure in two dimensions") {
    // u(x, y) = x on a 2D grid (away from the wrap): the cube window splits
    // along the first axis only.
    GridSolution sol;
    sol.d = 2;
    sol.shape = {128, 128, 1};
    sol.extent = {1.0, 1.0, 1.0};
    sol.dx = 1.0 / 128;
    sol.times = {0.0};
    std::vector<double> s(128 * 128);
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) s[i * 128 + j] = sol.cell_center(0, i);
    sol.slices.push_back(std::move(s));

    double y[2] = {0.5, 0.5};
    // {z in Q_0.2(y) : z_0 > 0.5}: half the square, area 0.4 * 0.2.
    double got = superlevel_measure(sol, 0, y, 0.2, 0.5, Geometry::cube);
    CHECK(std::abs(got - 0.08) <= 1e-3);
    // Ball geometry: half the disc of radius 0.2.
    double gotb = superlevel_measure(sol, 0, y, 0.2, 0.5, Geometry::ball);
    CHECK(std::abs(gotb - 0.5 * M_PI * 0.04) <= 2e-3);
}

TEST_CASE("hypograph measure") {
    auto flat = oracles::sample_profile_1d([](double) { return 0.5; }, 1 << 10);
    KineticBox box;
    box.center = {0.5, 0, 0};
    box.r = 0.25;
    box.v0 = 0.3;
    box.omega = 0.4;
    // min(omega, max(0, u - v0)) = 0.2 over the window of length 0.5.
    CHECK(hypograph_measure(flat, 0, box) == doctest::Approx(0.1).epsilon(1e-10));

    auto zero = oracles::sample_profile_1d([](double) { return 0.0; }, 1 << 10);
    box.v0 = 0.1;
    CHECK(hypograph_measure(zero, 0, box) == 0.0);

    // u(x) = x over the full box with kinetic interval [0, 1]: integral 1/2.
    auto ramp = oracles::sample_profile_1d([](double x) { return x; }, 1 << 12);
    KineticBox full;
    full.center = {0.5, 0, 0};
    full.r = 0.4999;
    full.v0 = 0.0;
    full.omega = 1.0;
    double got = hypograph_measure(ramp, 0, full);
    CHECK(std::abs(got - 0.5) <= 2e-3);
    double want = oracles::simpson([](double x) { return x; }, 0.0001, 0.9999) ;
    CHECK(std::abs(got - want) <= 2e-3);

    // Nesting: 0 <= measure <= omega * |window| for arbitrary boxes.
    Rng rng(59);
    auto wav = oracles::sample_profile_1d(
        [](double x) { return 0.5 + 0.45 * std::sin(6 * M_PI * x); }, 1 << 10);
    for (int k = 0; k < 10; ++k) {
        KineticBox b;
        b.center = {rng.uniform(0.0, 1.0), 0, 0};
        b.r = rng.uniform(0.05, 0.2);
        b.v0 = rng.uniform(0.0, 0.7);
        b.omega = rng.uniform(0.05, 0.3);
        double m = hypograph_measure(wav, 0, b);
        CHECK(m >= 0.0);
        CHECK(m <= b.omega * 2.0 * b.r * (1 + 1e-9));
    }
}

TEST_CASE("box rasterization and free transport") {
    KineticBox box;
    box.center = {0.4, 0, 0};
    box.r = 0.15;
    box.v0 = 0.3;
    box.omega = 0.25;
    int shape[1] = {1 << 10};
    double extent[1] = {1.0};
    auto ind = rasterize_box(box, 1, shape, extent, 1.0 / (1 << 10), 128, 0.0, 1.0 / 128);
    CHECK(ind.measure() == doctest::Approx(2 * 0.15 * 0.25).epsilon(1e-12));

    auto flux = FluxModel::burgers(1);

    // Zero shift is the identity.
    auto id = free_transport(ind, 0.0, flux);
    CHECK(!id.resolution_warning);
    for (std::size_t i = 0; i < ind.values.size(); ++i)
        CHECK(id.indicator.values[i] == ind.values[i]);

    // Shear preserves the measure slice by slice.
    auto moved = free_transport(ind, 0.8, flux);
    CHECK(moved.indicator.measure() == doctest::Approx(ind.measure()).epsilon(1e-12));

    // Round trip returns close to the original in L1.
    auto back = free_transport(moved.indicator, -0.8, flux);
    double l1 = 0.0;
    for (std::size_t i = 0; i < ind.values.size(); ++i)
        l1 += std::abs(back.indicator.values[i] - ind.values[i]) * ind.dx * ind.dv;
    CHECK(l1 <= 2.0 * ind.dx);

    // A deliberately coarse kinetic grid trips the resolution warning but
    // still computes.
    auto coarse = rasterize_box(box, 1, shape, extent, 1.0 / (1 << 10), 4, 0.0, 0.25);
    auto warned = free_transport(coarse, 0.8, flux);
    CHECK(warned.resolution_warning);
    CHECK(warned.indicator.measure() == doctest::Approx(coarse.measure()).epsilon(1e-12));
}

TEST_CASE("free transport shears two-dimensional indicators") {
    KineticBox box;
    box.center = {0.5, 0.4, 0};
    box.r = 0.12;
    box.v0 = 0.25;
    box.omega = 0.3;
    int shape[2] = {96, 96};
    double extent[2] = {1.0, 1.0};
    auto ind = rasterize_box(box, 2, shape, extent, 1.0 / 96, 128, 0.0, 1.0 / 128);
    CHECK(ind.measure() == doctest::Approx(0.24 * 0.24 * 0.3).epsilon(1e-12));

    auto flux = FluxModel::burgers(2);
    auto fwd = free_transport(ind, 0.45, flux);
    CHECK(fwd.indicator.measure() == doctest::Approx(ind.measure()).epsilon(1e-12));
    auto back = free_transport(fwd.indicator, -0.45, flux);
    double l1 = 0.0;
    double cellvol = ind.dx * ind.dx * ind.dv;
    for (std::size_t i = 0; i < ind.values.size(); ++i)
        l1 += std::abs(back.indicator.values[i] - ind.values[i]) * cellvol;
    // Two fractional shifts per axis smear each boundary facet by one cell.
    CHECK(l1 <= 4.0 * ind.dx);
}

TEST_CASE("indicator-hypograph intersection agrees with the direct measure") {
    auto ramp = oracles::sample_profile_1d([](double x) { return x; }, 1 << 10);
    KineticBox box;
    box.center = {0.5, 0, 0};
    box.r = 0.2;
    box.v0 = 0.2;
    box.omega = 0.5;
    int shape[1] = {1 << 10};
    double extent[1] = {1.0};
    auto ind = rasterize_box(box, 1, shape, extent, ramp.dx, 512, 0.0, 1.0 / 512);
    double via_indicator = indicator_hypograph_measure(ind, ramp, 0);
    double direct = hypograph_measure(ramp, 0, box);
    CHECK(std::abs(via_indicator - direct) <= 3e-3);
}

TEST_CASE("mean value level scan") {
    // Equal centers can never satisfy the strict inequality.
    auto sol = oracles::sample_profile_1d(
        [](double x) { return 0.5 + 0.3 * std::sin(2 * M_PI * x); }, 1 << 10);
    double y[1] = {0.5};
    CHECK(!mean_value_level(sol, 0, y, y, 0.1, 0.3, Geometry::ball).has_value());

    // Constant field: absence for any h > 0.
    auto flat = oracles::sample_profile_1d([](double) { return 0.4; }, 1 << 10);
    double y1[1] = {0.6}, y2[1] = {0.4};
    CHECK(!mean_value_level(flat, 0, y1, y2, 0.1, 0.2, Geometry::ball).has_value());

    // Smoothed step: centers on either side separate the superlevel sets.
    double w = 1.0 / 512;  // smoothing width well below r
    auto step = oracles::sample_profile_1d(
        [w](double x) {
            double t = std::clamp((x - 0.5) / w * 0.5 + 0.5, 0.0, 1.0);
            return t * t * (3 - 2 * t);
        },
        1 << 12);
    double r = 0.05;
    double ya[1] = {0.5 + r}, yb[1] = {0.5 - r};
    auto found = mean_value_level(step, 0, ya, yb, r, 0.4, Geometry::ball);
    REQUIRE(found.has_value());
    CHECK(*found > 0.0);
    CHECK(*found < 0.6);
    // Re-substitute: the defining inequality holds at the returned level.
    double m1 = superlevel_measure(step, 0, ya, r, *found + 0.4, Geometry::ball);
    double m2 = superlevel_measure(step, 0, yb, r, *found, Geometry::ball);
    CHECK(m1 - m2 > 0.4 * 2 * r);

    CHECK_THROWS_AS((void)mean_value_level(sol, 0, y1, y2, 0.1, 0.0, Geometry::ball),
                    std::invalid_argument);
}

TEST_CASE("transport estimate on exact solutions") {
    auto flux = FluxModel::burgers(1);

    // Zero source: the change is pure grid error, absorbed by the slack.
    CharacteristicSolution exact(
        flux, [](std::span<const double> x) { return 0.5 + 0.2 * std::sin(2 * M_PI * x[0]); });
    auto sol = exact.sample({1 << 12, 1, 1}, {0.0, 0.3});
    Rng rng(67);
    for (int k = 0; k < 5; ++k) {
        KineticBox box;
        box.center = {rng.uniform(0.0, 1.0), 0, 0};
        box.r = rng.uniform(0.03, 0.08);
        box.v0 = rng.uniform(0.2, 0.5);
        box.omega = rng.uniform(0.05, 0.2);
        auto chk = verify_transport_estimate(sol, flux, 0.0, box, 0.3, 0.0);
        CHECK(chk.rhs == 0.0);
        CHECK(chk.pass);           // lhs is within the grid slack
        CHECK(chk.lhs <= chk.slack);
    }

    // T = 0 compares a slice against itself.
    KineticBox box;
    box.center = {0.5, 0, 0};
    box.r = 0.1;
    box.v0 = 0.3;
    box.omega = 0.2;
    auto t0 = verify_transport_estimate(sol, flux, 0.0, box, 0.0, 0.0);
    CHECK(t0.lhs == 0.0);
    CHECK(t0.pass);

    // Constant source: the swept-volume bound holds with the grid factor.
    BurgersCharacteristic1D sourced(
        [](double x) { return 0.4 + 0.2 * std::sin(2 * M_PI * x); }, 0.1);
    auto ssol = sourced.sample(1 << 12, {0.0, 0.25});
    for (int k = 0; k < 5; ++k) {
        KineticBox b;
        b.center = {rng.uniform(0.0, 1.0), 0, 0};
        b.r = rng.uniform(0.03, 0.08);
        b.v0 = rng.uniform(0.15, 0.5);
        b.omega = rng.uniform(0.05, 0.2);
        auto chk = verify_transport_estimate(ssol, flux, 0.0, b, 0.25, 0.1);
        CHECK(chk.pass);
        CHECK(chk.rhs > 0.0);
    }

    // Missing time slice.
    CHECK_THROWS_AS((void)verify_transport_estimate(ssol, flux, 0.0, box, 0.7, 0.1),
                    numeric_error);
}

TEST_CASE("transport estimate in two dimensions") {
    auto flux = FluxModel::burgers(2);
    CharacteristicSolution exact(flux, [](std::span<const double> x) {
        return 0.5 + 0.2 * std::sin(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[1]);
    });
    auto sol = exact.sample({128, 128, 1}, {0.0, 0.1});
    Rng rng(71);
    for (int k = 0; k < 3; ++k) {
        KineticBox box;
        box.center = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), 0};
        box.r = rng.uniform(0.06, 0.12);
        box.v0 = rng.uniform(0.3, 0.5);
        box.omega = rng.uniform(0.1, 0.2);
        auto chk = verify_transport_estimate(sol, flux, 0.0, box, 0.1, 0.0);
        CHECK(chk.rhs == 0.0);
        CHECK(chk.lhs <= chk.slack);
        CHECK(chk.pass);
    }
}

TEST_SUITE_END();
