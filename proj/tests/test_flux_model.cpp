#include <doctest.h>

#include <cmath>

#include "balaw/common.hpp"
#include "balaw/flux_model.hpp"
#include "support/oracles.hpp"

using namespace balaw;

TEST_SUITE_BEGIN("flux_model");

TEST_CASE("power-law family derivatives") {
    auto f2 = FluxModel::burgers(2);
    auto d1 = f2.deriv(0.5, 1);
    CHECK(d1[0] == 0.5);    // f'(u) = (u, u^2)
    CHECK(d1[1] == 0.25);

    auto d3 = f2.deriv(0.37, 3);
    CHECK(d3[0] == 0.0);    // f''' = (0, 2) independent of u
    CHECK(d3[1] == 2.0);

    auto f3 = FluxModel::burgers(3);
    auto d4 = f3.deriv(0.0, 4);
    CHECK(d4[0] == 0.0);
    CHECK(d4[1] == 0.0);
    CHECK(d4[2] == 6.0);    // f'''' = (0, 0, 6)

    CHECK_THROWS_AS((void)f2.deriv(0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)f2.deriv(0.5, 5), std::invalid_argument);  // d+2 = 4 is the limit
    CHECK_THROWS_AS((void)f2.deriv(-0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)f2.deriv(1.1, 1), std::invalid_argument);
}

TEST_CASE("polynomial kind derivatives are exact coefficient arithmetic") {
    // f1 = 1 + 2u + 3u^2, f2 = u^4
    auto f = FluxModel::polynomial({{1, 2, 3}, {0, 0, 0, 0, 1}});
    auto d1 = f.deriv(0.5, 1);
    CHECK(d1[0] == doctest::Approx(2 + 6 * 0.5).epsilon(1e-15));
    CHECK(d1[1] == doctest::Approx(4 * 0.125).epsilon(1e-15));
    auto d2 = f.deriv(0.5, 2);
    CHECK(d2[0] == 6.0);
    CHECK(d2[1] == doctest::Approx(12 * 0.25).epsilon(1e-15));
    CHECK(f.component(1, 0.5) == doctest::Approx(1 + 1 + 0.75).epsilon(1e-15));
}

TEST_CASE("tabulated kind differentiates smooth tables") {
    // Table of f(u) = u^3/3 at step 1e-3; derivatives up to third order.
    std::vector<double> table(1001);
    for (int i = 0; i <= 1000; ++i) {
        double u = i / 1000.0;
        table[i] = u * u * u / 3.0;
    }
    auto f = FluxModel::tabulated({table});
    for (double v : {0.1, 0.33, 0.5, 0.77, 0.95}) {
        CHECK(f.deriv(v, 1)[0] == doctest::Approx(v * v).epsilon(1e-9));
        CHECK(f.deriv(v, 2)[0] == doctest::Approx(2 * v).epsilon(1e-6));
        CHECK(f.deriv(v, 3)[0] == doctest::Approx(2.0).epsilon(1e-3));
    }
    // Near the boundary the one-sided window still works.
    CHECK(std::abs(f.deriv(0.001, 1)[0] - 1e-6) <= 1e-6);
}

TEST_CASE("sub-level measures match closed sets and the grid oracle") {
    auto f1 = FluxModel::burgers(1);
    double xi1[1] = {1.0};
    // {v in [0,1] : |v| < 0.1} = [0, 0.1)
    CHECK(nonlinearity_measure(f1, 0.0, xi1, 0.1) == doctest::Approx(0.1).epsilon(1e-10));

    // Whole interval once delta clears 1 + max|f'|.
    CHECK(nonlinearity_measure(f1, 0.0, xi1, 2.5) == doctest::Approx(1.0));

    auto f2 = FluxModel::burgers(2);
    double xi2[2] = {0.0, 1.0};
    // {v : v^2 < 0.01} = [0, 0.1)
    CHECK(nonlinearity_measure(f2, 0.0, xi2, 0.01) == doctest::Approx(0.1).epsilon(1e-9));

    // Root-isolation path against the counting oracle on random directions.
    Rng rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        auto dir = rng.unit_vector(3);
        std::span<const double> xi(dir.data() + 1, 2);
        for (double delta : {0.003, 0.05, 0.4}) {
            double got = nonlinearity_measure(f2, dir[0], xi, delta);
            double want = oracles::grid_sublevel_measure(f2, dir[0], xi, delta, 400000);
            CHECK(std::abs(got - want) <= 1e-4);
        }
    }

    double bad[2] = {0.5, 0.5};
    CHECK_THROWS_AS((void)nonlinearity_measure(f2, 0.5, bad, 0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)nonlinearity_measure(f2, 0.0, xi2, 0.0), std::invalid_argument);
}

TEST_CASE("measure is nondecreasing in delta and symmetric under sign flip") {
    auto flux = FluxModel::burgers(3);
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        auto dir = rng.unit_vector(4);
        std::span<const double> xi(dir.data() + 1, 3);
        std::vector<double> neg{-dir[1], -dir[2], -dir[3]};
        double prev = -1.0;
        for (double delta = 1e-4; delta < 2.0; delta *= 3.7) {
            double m = nonlinearity_measure(flux, dir[0], xi, delta);
            CHECK(m >= prev - 1e-13);
            CHECK(m >= 0.0);
            CHECK(m <= 1.0);
            prev = m;
            CHECK(nonlinearity_measure(flux, -dir[0], neg, delta) ==
                  doctest::Approx(m).epsilon(1e-12));
        }
    }
}

TEST_CASE("fitted exponents for the power-law family") {
    std::vector<double> deltas;
    for (int i = 0; i < 25; ++i) deltas.push_back(1e-4 * std::pow(1e3, i / 24.0));
    for (int d : {1, 2, 3}) {
        auto rep = fit_alpha(FluxModel::burgers(d), 8 * d, deltas, 7);
        REQUIRE(rep.conclusive);
        CHECK(std::abs(rep.alpha - 1.0 / d) <= 0.05);
        CHECK(rep.alpha > 0.0);
        CHECK(rep.alpha <= 1.0);
        CHECK(rep.constant > 0.0);
        for (const auto& row : rep.measures)
            for (double m : row) {
                CHECK(m >= 0.0);
                CHECK(m <= 1.0);
            }
    }
}

TEST_CASE("tabulated fluxes fit through the counting path") {
    std::vector<double> table(1001);
    for (int i = 0; i <= 1000; ++i) {
        double u = i / 1000.0;
        table[i] = 0.5 * u * u;  // quadratic flux as a smooth table
    }
    auto flux = FluxModel::tabulated({table});
    std::vector<double> deltas;
    for (int i = 0; i < 13; ++i) deltas.push_back(1e-3 * std::pow(300.0, i / 12.0));
    auto rep = fit_alpha(flux, 8, deltas, 7, 4);
    REQUIRE(rep.conclusive);
    CHECK(std::abs(rep.alpha - 1.0) <= 0.05);
}

TEST_CASE("degenerate fits are flagged inconclusive") {
    // f' identically 1: every direction measures 0 or 1 on the whole grid.
    auto lin = FluxModel::polynomial({{0.0, 1.0}});
    std::vector<double> deltas;
    for (int i = 0; i < 12; ++i) deltas.push_back(1e-4 * std::pow(1e3, i / 11.0));
    auto rep = fit_alpha(lin, 8, deltas, 3);
    CHECK(!rep.conclusive);

    CHECK_THROWS_AS((void)fit_alpha(lin, 4, deltas, 3), std::invalid_argument);
    std::vector<double> narrow{0.01, 0.02, 0.04, 0.08};
    CHECK_THROWS_AS((void)fit_alpha(lin, 8, narrow, 3), std::invalid_argument);
}

TEST_CASE("derivative matrix layout and values") {
    auto w = wronskian(FluxModel::burgers(2), 0.3);
    CHECK(w(0, 0) == 1.0);              // row 1: f''(v) = (1, 2v)
    CHECK(w(0, 1) == doctest::Approx(0.6));
    CHECK(w(1, 0) == 0.0);              // row 2: f'''(v)/2 = (0, 1)
    CHECK(w(1, 1) == 1.0);

    auto w3 = wronskian(FluxModel::burgers(3), 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(w3(i, j) == (i == j ? 1.0 : 0.0));

    // A vanishing derivative row forces singularity: f = (u^2/2, u^2).
    auto degenerate = FluxModel::polynomial({{0.0, 0.0, 0.5}, {0.0, 0.0, 1.0}});
    auto wd = wronskian(degenerate, 0.4);
    CHECK(wd(1, 0) == 0.0);
    CHECK(wd(1, 1) == 0.0);
    CHECK(min_singular_value(wd) <= 1e-12);
}

TEST_CASE("spanning checks in both formulations") {
    auto chk = spanning_check(FluxModel::burgers(2), 0.0, 1e-8);
    CHECK(chk.spans);
    CHECK(chk.min_singular == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chk.min_singular_lifted > 1e-8);

    auto degenerate = FluxModel::polynomial({{0.0, 0.0, 0.5}, {0.0, 0.0, 1.0}});
    auto bad = spanning_check(degenerate, 0.4, 1e-8);
    CHECK(!bad.spans);
    CHECK(bad.min_singular <= 1e-12);
    CHECK(bad.min_singular_lifted <= 1e-8);

    // The power-law flux spans everywhere on a fine grid of base points.
    for (int k = 0; k <= 100; ++k)
        CHECK(spanning_check(FluxModel::burgers(4), k / 100.0, 1e-10).spans);

    CHECK_THROWS_AS((void)spanning_check(FluxModel::burgers(2), 0.5, 0.0),
                    std::invalid_argument);
}

TEST_SUITE_END();
