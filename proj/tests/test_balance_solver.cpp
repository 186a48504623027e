#include <doctest.h>

#include <cmath>

#include "balaw/balance_solver.hpp"
#include "balaw/common.hpp"
#include "balaw/reference_solutions.hpp"

using namespace balaw;

TEST_SUITE_BEGIN("balance_solver");

namespace {

SolverConfig base_config_1d(int cells) {
    SolverConfig cfg;
    cfg.flux = FluxModel::burgers(1);
    cfg.d = 1;
    cfg.cells = {cells, 1, 1};
    cfg.output_times = {0.3};
    cfg.initial = [](std::span<const double> x) {
        return 0.5 + 0.2 * std::sin(2.0 * M_PI * x[0]);
    };
    return cfg;
}

double l1_error_1d(const GridSolution& sol, const std::function<double(double, double)>& exact) {
    double err = 0.0;
    const auto& s = sol.slices.back();
    double t = sol.times.back();
    for (int i = 0; i < sol.shape[0]; ++i)
        err += std::abs(s[i] - exact(t, sol.cell_center(0, i))) * sol.dx;
    return err;
}

}  // namespace

TEST_CASE("constants are exact solutions") {
    SolverConfig cfg = base_config_1d(256);
    cfg.initial = [](std::span<const double>) { return 0.37; };
    cfg.output_times = {0.0, 0.5};
    auto sol = solve(cfg);
    for (double v : sol.slices[1]) CHECK(v == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("conservation and maximum principle with zero source") {
    SolverConfig cfg = base_config_1d(1 << 10);
    cfg.initial = [](std::span<const double> x) {
        return 0.5 + 0.3 * std::sin(2.0 * M_PI * x[0]);
    };
    cfg.output_times = {0.0, 0.4};
    auto sol = solve(cfg);
    double m0 = 0, m1 = 0;
    for (double v : sol.slices[0]) m0 += v;
    for (double v : sol.slices[1]) m1 += v;
    CHECK(std::abs(m1 - m0) / sol.cells() <= 1e-12);
    for (double v : sol.slices[1]) {
        CHECK(v >= 0.2 - 1e-12);
        CHECK(v <= 0.8 + 1e-12);
    }
}

TEST_CASE("monotone initial data stay ordered") {
    Rng rng(73);
    for (int pair = 0; pair < 5; ++pair) {
        double a1 = rng.uniform(0.05, 0.15), a2 = a1 + rng.uniform(0.02, 0.1);
        int mode = 1 + static_cast<int>(rng.below(3));
        auto lo_init = [a1, mode](std::span<const double> x) {
            return 0.45 + a1 * std::sin(2.0 * M_PI * mode * x[0]);
        };
        auto hi_init = [a2, mode](std::span<const double> x) {
            return 0.5 + a2 * std::sin(2.0 * M_PI * mode * x[0]);
        };
        auto cfg_lo = base_config_1d(256);
        cfg_lo.initial = lo_init;
        auto cfg_hi = base_config_1d(256);
        // Pointwise ordering enforced by construction.
        cfg_hi.initial = [&](std::span<const double> x) {
            return std::max(lo_init(x) + 0.02, hi_init(x));
        };
        cfg_lo.output_times = cfg_hi.output_times = {0.25};
        auto lo = solve(cfg_lo);
        auto hi = solve(cfg_hi);
        for (std::size_t i = 0; i < lo.slices[0].size(); ++i)
            CHECK(hi.slices[0][i] >= lo.slices[0][i] - 1e-12);
    }
}

TEST_CASE("first-order convergence against characteristics") {
    CharacteristicSolution exact(
        FluxModel::burgers(1),
        [](std::span<const double> x) { return 0.5 + 0.2 * std::sin(2.0 * M_PI * x[0]); });
    double errs[2];
    int cells[2] = {1 << 9, 1 << 11};
    for (int k = 0; k < 2; ++k) {
        auto cfg = base_config_1d(cells[k]);
        cfg.output_times = {0.3};
        errs[k] = l1_error_1d(solve(cfg), [&](double t, double x) {
            double xx[1] = {x};
            return exact(t, xx);
        });
    }
    double order = std::log(errs[0] / errs[1]) / std::log(4.0);
    CHECK(order >= 0.8);
}

TEST_CASE("manufactured solution with source converges") {
    auto u_ex = [](double t, double x) {
        return 0.5 + 0.25 * std::sin(2.0 * M_PI * (x - t));
    };
    auto source = [&](double t, std::span<const double> x) {
        double c = std::cos(2.0 * M_PI * (x[0] - t));
        return 0.5 * M_PI * c * (u_ex(t, x[0]) - 1.0);
    };
    double errs[2];
    int cells[2] = {1 << 9, 1 << 11};
    for (int k = 0; k < 2; ++k) {
        SolverConfig cfg;
        cfg.flux = FluxModel::burgers(1);
        cfg.d = 1;
        cfg.cells = {cells[k], 1, 1};
        cfg.output_times = {0.5};
        cfg.initial = [&](std::span<const double> x) { return u_ex(0.0, x[0]); };
        cfg.source = source;
        errs[k] = l1_error_1d(solve(cfg), u_ex);
    }
    double order = std::log(errs[0] / errs[1]) / std::log(4.0);
    CHECK(order >= 0.8);
}

TEST_CASE("transonic rarefaction through a sign-changing flux derivative") {
    // f(u) = (u - 1/2)^2 / 2: f' changes sign at u = 1/2, exercising the
    // negative part of the flux splitting.
    SolverConfig cfg;
    cfg.flux = FluxModel::polynomial({{0.125, -0.5, 0.5}});
    cfg.d = 1;
    cfg.cells = {512, 1, 1};
    cfg.output_times = {0.0, 0.2};
    cfg.initial = [](std::span<const double> x) {
        return x[0] < 0.3 || x[0] > 0.8 ? 0.25 : 0.75;
    };
    auto sol = solve(cfg);
    double m0 = 0, m1 = 0;
    for (double v : sol.slices[0]) m0 += v;
    for (double v : sol.slices[1]) m1 += v;
    CHECK(std::abs(m1 - m0) / sol.cells() <= 1e-12);
    for (double v : sol.slices[1]) {
        CHECK(v >= 0.25 - 1e-12);
        CHECK(v <= 0.75 + 1e-12);
    }
    // The upward jump at 0.3 opens into a monotone rarefaction fan.
    const auto& s = sol.slices[1];
    int i_lo = static_cast<int>(0.3 * 512), i_hi = static_cast<int>(0.45 * 512);
    for (int i = i_lo; i + 1 < i_hi; ++i) CHECK(s[i + 1] >= s[i] - 1e-10);
}

TEST_CASE("tabulated fluxes drive the solver like their closed forms") {
    std::vector<double> table(1001);
    for (int i = 0; i <= 1000; ++i) {
        double u = i / 1000.0;
        table[i] = 0.5 * u * u;
    }
    auto cfg_tab = base_config_1d(256);
    cfg_tab.flux = FluxModel::tabulated({table});
    cfg_tab.output_times = {0.2};
    auto cfg_ref = base_config_1d(256);
    cfg_ref.output_times = {0.2};
    auto tab = solve(cfg_tab);
    auto ref = solve(cfg_ref);
    for (std::size_t i = 0; i < ref.slices[0].size(); ++i)
        CHECK(std::abs(tab.slices[0][i] - ref.slices[0][i]) <= 1e-5);
}

TEST_CASE("three-dimensional sweeps conserve and respect bounds") {
    SolverConfig cfg;
    cfg.flux = FluxModel::burgers(3);
    cfg.d = 3;
    cfg.cells = {24, 24, 24};
    cfg.output_times = {0.0, 0.1};
    cfg.initial = [](std::span<const double> x) {
        return 0.5 + 0.2 * std::sin(2.0 * M_PI * x[0]) * std::sin(2.0 * M_PI * x[1]) *
                         std::sin(2.0 * M_PI * x[2]);
    };
    auto sol = solve(cfg);
    double m0 = 0, m1 = 0;
    for (double v : sol.slices[0]) m0 += v;
    for (double v : sol.slices[1]) m1 += v;
    CHECK(std::abs(m1 - m0) / sol.cells() <= 1e-12);
    for (double v : sol.slices[1]) {
        CHECK(v >= 0.3 - 1e-12);
        CHECK(v <= 0.7 + 1e-12);
    }
    // Against 3D characteristics at a pre-shock time.
    CharacteristicSolution exact(FluxModel::burgers(3), [](std::span<const double> x) {
        return 0.5 + 0.2 * std::sin(2.0 * M_PI * x[0]) * std::sin(2.0 * M_PI * x[1]) *
                         std::sin(2.0 * M_PI * x[2]);
    });
    double err = 0.0;
    std::array<double, 3> x{};
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j)
            for (int k = 0; k < 24; ++k) {
                x = {sol.cell_center(0, i), sol.cell_center(1, j), sol.cell_center(2, k)};
                err += std::abs(sol.slices[1][(static_cast<std::size_t>(i) * 24 + j) * 24 + k] -
                                exact(0.1, x)) *
                       sol.dx * sol.dx * sol.dx;
            }
    CHECK(err <= 0.02);  // first-order scheme on a 24^3 grid
}

TEST_CASE("solver validates its configuration") {
    auto cfg = base_config_1d(128);
    cfg.cfl = 1.5;
    CHECK_THROWS_AS((void)solve(cfg), std::invalid_argument);
    cfg = base_config_1d(128);
    cfg.initial = nullptr;
    CHECK_THROWS_AS((void)solve(cfg), std::invalid_argument);
    cfg = base_config_1d(128);
    cfg.initial = [](std::span<const double>) { return 1.5; };
    CHECK_THROWS_AS((void)solve(cfg), std::invalid_argument);
}

TEST_CASE("values escaping the unit interval abort the run") {
    auto cfg = base_config_1d(128);
    cfg.initial = [](std::span<const double>) { return 0.999; };
    cfg.source = [](double, std::span<const double>) { return 1.0; };
    cfg.output_times = {0.5};
    CHECK_THROWS_AS((void)solve(cfg), numeric_error);
}

TEST_CASE("manufactured reference fields") {
    ManufacturedParams p;
    p.cells = 1 << 10;
    p.times = {1.0};
    p.x0 = 0.25;
    auto rare = manufactured(ManufacturedKind::riemann_rarefaction, p);
    // u = clamp((x - x0)/t, 0, 1): at x - x0 = 0.5 the value is 0.5.
    int i = rare.cell_of(0, 0.75);
    CHECK(std::abs(rare.slices[0][i] - 0.5) <= rare.dx);

    p.times = {0.0};
    CHECK_THROWS_AS((void)manufactured(ManufacturedKind::riemann_rarefaction, p),
                    std::invalid_argument);

    p.times = {0.0};
    p.gamma = 0.5;
    p.x0 = 0.5;
    auto cusp = manufactured(ManufacturedKind::holder_profile, p);
    int j = cusp.cell_of(0, 0.75);
    CHECK(std::abs(cusp.slices[0][j] - 0.5) <= 2.0 * cusp.dx);
    p.gamma = 1.5;
    CHECK_THROWS_AS((void)manufactured(ManufacturedKind::holder_profile, p),
                    std::invalid_argument);

    ManufacturedParams ps;
    ps.cells = 512;
    ps.times = {0.25, 1.25};  // one full period apart at unit speed
    auto sine = manufactured(ManufacturedKind::sine_advect, ps);
    for (std::size_t k = 0; k < sine.slices[0].size(); ++k)
        CHECK(sine.slices[0][k] == doctest::Approx(sine.slices[1][k]).epsilon(1e-12));
}

TEST_SUITE_END();
