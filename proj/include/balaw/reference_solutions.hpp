#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "balaw/common.hpp"
#include "balaw/flux_model.hpp"
#include "balaw/grid_solution.hpp"

namespace balaw {

/// Exact solutions built from the method of characteristics. These share no
/// code with the finite-volume solver and serve as references for it and as
/// isentropic inputs for the kinetic transport checks. All of them are valid
/// only up to the first characteristic crossing.

/// 1D quadratic flux with constant source: along dx/dt = u, du/dt = g, so
/// x(t) = x0 + u0(x0) t + g t^2 / 2 and u = u0(x0) + g t. The map x0 -> x is
/// strictly increasing while 1 + u0'(x0) t > 0; it is inverted by bisection.
class BurgersCharacteristic1D {
public:
    BurgersCharacteristic1D(std::function<double(double)> u0, double g_const,
                            double extent = 1.0)
        : u0_(std::move(u0)), g_(g_const), extent_(extent) {}

    double operator()(double t, double x) const {
        double shift_bound = t + std::abs(g_) * t * t + 1.0;
        double lo = x - shift_bound, hi = x + shift_bound;
        auto forward = [&](double x0) {
            return x0 + u0_periodic(x0) * t + 0.5 * g_ * t * t - x;
        };
        double flo = forward(lo);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(x)); ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = forward(mid);
            if ((fm <= 0.0) == (flo <= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        double x0 = 0.5 * (lo + hi);
        return u0_periodic(x0) + g_ * t;
    }

    GridSolution sample(int cells, const std::vector<double>& times) const {
        GridSolution sol;
        sol.d = 1;
        sol.shape[0] = cells;
        sol.extent[0] = extent_;
        sol.dx = extent_ / cells;
        sol.times = times;
        for (double t : times) {
            std::vector<double> s(cells);
            for (int i = 0; i < cells; ++i) s[i] = (*this)(t, sol.cell_center(0, i));
            sol.slices.push_back(std::move(s));
        }
        sol.validate();
        return sol;
    }

private:
    double u0_periodic(double x) const {
        double xm = std::fmod(x, extent_);
        if (xm < 0.0) xm += extent_;
        return u0_(xm);
    }

    std::function<double(double)> u0_;
    double g_;
    double extent_;
};

/// Zero-source multi-d characteristics for any flux: u = u0(x - t f'(u)),
/// solved per point by damped fixed-point iteration. Valid pre-shock, where
/// the iteration is a contraction.
class CharacteristicSolution {
public:
    CharacteristicSolution(FluxModel flux,
                           std::function<double(std::span<const double>)> u0,
                           std::array<double, 3> extent = {1.0, 1.0, 1.0})
        : flux_(std::move(flux)), u0_(std::move(u0)), extent_(extent) {}

    double operator()(double t, std::span<const double> x) const {
        int d = flux_.dim();
        double u = u0_periodic(x);
        std::array<double, 3> y{};
        double delta = 0.0;
        for (int it = 0; it < 500; ++it) {
            auto fp = flux_.prime(std::clamp(u, 0.0, 1.0));
            for (int a = 0; a < d; ++a) y[a] = x[a] - t * fp[a];
            double next = u0_periodic(std::span<const double>(y.data(), d));
            delta = std::abs(next - u);
            u = 0.5 * (u + next);  // damping keeps the iteration contracting
            if (delta < 1e-14) break;
        }
        if (delta > 1e-10)
            throw numeric_error("CharacteristicSolution: iteration stalled (post-shock?)");
        return u;
    }

    GridSolution sample(std::array<int, 3> cells, const std::vector<double>& times) const {
        int d = flux_.dim();
        GridSolution sol;
        sol.d = d;
        sol.dx = extent_[0] / cells[0];
        for (int a = 0; a < d; ++a) {
            sol.shape[a] = cells[a];
            sol.extent[a] = extent_[a];
        }
        sol.times = times;
        std::array<int, 3> idx{};
        std::array<double, 3> x{};
        for (double t : times) {
            std::vector<double> s(sol.cells());
            for (std::size_t lin = 0; lin < s.size(); ++lin) {
                std::size_t rem = lin;
                for (int a = d - 1; a >= 0; --a) {
                    idx[a] = static_cast<int>(rem % sol.shape[a]);
                    rem /= sol.shape[a];
                }
                for (int a = 0; a < d; ++a) x[a] = sol.cell_center(a, idx[a]);
                s[lin] = (*this)(t, std::span<const double>(x.data(), d));
            }
            sol.slices.push_back(std::move(s));
        }
        sol.validate();
        return sol;
    }

private:
    double u0_periodic(std::span<const double> x) const {
        std::array<double, 3> xm{};
        for (int a = 0; a < flux_.dim(); ++a) {
            xm[a] = std::fmod(x[a], extent_[a]);
            if (xm[a] < 0.0) xm[a] += extent_[a];
        }
        return u0_(std::span<const double>(xm.data(), flux_.dim()));
    }

    FluxModel flux_;
    std::function<double(std::span<const double>)> u0_;
    std::array<double, 3> extent_;
};

}  // namespace balaw
