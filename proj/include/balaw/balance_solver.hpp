#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "balaw/common.hpp"
#include "balaw/flux_model.hpp"
#include "balaw/grid_solution.hpp"
#include "balaw/polynomial.hpp"

namespace balaw {

/// Configuration for the finite-volume balance-law solver
/// du/dt + div f(u) = g on a periodic box, u in [0,1].
struct SolverConfig {
    FluxModel flux = FluxModel::burgers(1);
    int d = 1;
    std::array<int, 3> cells{256, 1, 1};
    std::array<double, 3> extent{1.0, 1.0, 1.0};
    double cfl = 0.45;
    std::vector<double> output_times{1.0};
    /// Initial data, sampled at cell centers; must map into [0,1].
    std::function<double(std::span<const double>)> initial;
    /// Source g(t, x); empty means zero source.
    std::function<double(double, std::span<const double>)> source;
    int threads = 1;
};

namespace detail {

/// Piecewise primitive of min(f_j'(s), 0) on [0,1]. The Engquist-Osher flux
/// is F(a,b) = f(a) + N(b) - N(a) with N this primitive, which splits the
/// flux into its monotone parts exactly (up to root tolerance) for fluxes
/// with polynomial form.
class NegativePartPrimitive {
public:
    NegativePartPrimitive(const FluxModel& flux, int component) {
        auto fp = flux.component_prime_poly(component);
        if (!fp.empty()) {
            breaks_.push_back(0.0);
            for (double r : poly::sign_change_roots(fp, 0.0, 1.0))
                if (r > 1e-14 && r < 1.0 - 1e-14) breaks_.push_back(r);
            breaks_.push_back(1.0);
            values_.assign(breaks_.size(), 0.0);
            negative_.assign(breaks_.size() - 1, false);
            eval_f_ = [&flux, component](double u) { return flux.component(component, u); };
            f_at_breaks_.resize(breaks_.size());
            for (std::size_t k = 0; k < breaks_.size(); ++k)
                f_at_breaks_[k] = eval_f_(breaks_[k]);
            for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
                double mid = 0.5 * (breaks_[k] + breaks_[k + 1]);
                negative_[k] = poly::eval(fp, mid) < 0.0;
                values_[k + 1] = values_[k] +
                                 (negative_[k] ? f_at_breaks_[k + 1] - f_at_breaks_[k] : 0.0);
            }
        } else {
            // Tabulated flux: integrate min(f', 0) on a fine grid.
            const int n = 4096;
            grid_.assign(n + 1, 0.0);
            double acc = 0.0;
            double prev = std::min(flux.deriv(0.0, 1)[component - 1], 0.0);
            for (int i = 1; i <= n; ++i) {
                double u = static_cast<double>(i) / n;
                double cur = std::min(flux.deriv(u, 1)[component - 1], 0.0);
                acc += 0.5 * (prev + cur) / n;
                grid_[i] = acc;
                prev = cur;
            }
        }
    }

    double operator()(double u) const {
        if (!grid_.empty()) {
            double t = std::clamp(u, 0.0, 1.0) * (grid_.size() - 1);
            int i = std::min(static_cast<int>(t), static_cast<int>(grid_.size()) - 2);
            double frac = t - i;
            return (1.0 - frac) * grid_[i] + frac * grid_[i + 1];
        }
        std::size_t k = 0;
        while (k + 2 < breaks_.size() && u > breaks_[k + 1]) ++k;
        double base = values_[k];
        return negative_[k] ? base + eval_f_(u) - f_at_breaks_[k] : base;
    }

private:
    std::vector<double> breaks_, values_, f_at_breaks_;
    std::vector<bool> negative_;
    std::function<double(double)> eval_f_;
    std::vector<double> grid_;
};

}  // namespace detail

/// Dimension-split monotone finite-volume solve with Engquist-Osher fluxes
/// per axis and Strang-split source integrated by explicit midpoint.
/// Values are clamped to [0,1] only within 1e-12; a larger excursion aborts
/// (it signals inconsistent source or initial data).
inline GridSolution solve(const SolverConfig& config) {
    if (config.d < 1 || config.d > 3) throw std::invalid_argument("solve: d must be 1..3");
    if (config.flux.dim() != config.d)
        throw std::invalid_argument("solve: flux dimension mismatch");
    if (!(config.cfl > 0.0) || config.cfl >= 1.0)
        throw std::invalid_argument("solve: cfl must be in (0,1)");
    if (!config.initial) throw std::invalid_argument("solve: initial data missing");
    if (config.output_times.empty()) throw std::invalid_argument("solve: no output times");

    GridSolution sol;
    sol.d = config.d;
    double dx = config.extent[0] / config.cells[0];
    for (int a = 0; a < config.d; ++a) {
        sol.shape[a] = config.cells[a];
        sol.extent[a] = config.extent[a];
        if (std::abs(config.extent[a] / config.cells[a] - dx) > 1e-12)
            throw std::invalid_argument("solve: grid step must be uniform across axes");
    }
    sol.dx = dx;
    sol.times = config.output_times;
    std::sort(sol.times.begin(), sol.times.end());
    if (sol.times.front() < 0.0) throw std::invalid_argument("solve: negative output time");

    std::size_t cells = sol.cells();
    std::vector<double> u(cells);
    std::array<int, 3> idx{};
    std::array<double, 3> x{};
    for (std::size_t lin = 0; lin < cells; ++lin) {
        std::size_t rem = lin;
        for (int a = sol.d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % sol.shape[a]);
            rem /= sol.shape[a];
        }
        for (int a = 0; a < sol.d; ++a) x[a] = sol.cell_center(a, idx[a]);
        double u0 = config.initial(std::span<const double>(x.data(), sol.d));
        if (!(u0 >= 0.0 && u0 <= 1.0))
            throw std::invalid_argument("solve: initial data outside [0,1]");
        u[lin] = u0;
    }

    std::vector<detail::NegativePartPrimitive> neg_parts;
    neg_parts.reserve(config.d);
    for (int a = 1; a <= config.d; ++a) neg_parts.emplace_back(config.flux, a);

    double max_speed = config.flux.max_prime_norm();
    double dt_cfl = max_speed > 1e-14 ? config.cfl * dx / max_speed
                                      : std::numeric_limits<double>::infinity();

    auto apply_source = [&](double t_eval, double weight) {
        if (!config.source) return;
        std::array<int, 3> id{};
        std::array<double, 3> xx{};
        for (std::size_t lin = 0; lin < cells; ++lin) {
            std::size_t rem = lin;
            for (int a = sol.d - 1; a >= 0; --a) {
                id[a] = static_cast<int>(rem % sol.shape[a]);
                rem /= sol.shape[a];
            }
            for (int a = 0; a < sol.d; ++a) xx[a] = sol.cell_center(a, id[a]);
            u[lin] += weight * config.source(t_eval, std::span<const double>(xx.data(), sol.d));
        }
    };

    auto sweep_axis = [&](int axis, double dt) {
        int n = sol.shape[axis];
        std::size_t stride = 1;
        for (int b = axis + 1; b < sol.d; ++b) stride *= sol.shape[b];
        std::size_t lines = cells / static_cast<std::size_t>(n);
        const auto& neg = neg_parts[axis];
        const auto& flux = config.flux;
        int comp = axis + 1;
        double lam = dt / dx;
        parallel_for(lines, config.threads, [&](std::size_t line) {
            std::size_t blk = line / stride;
            std::size_t off = line % stride;
            std::size_t base = blk * static_cast<std::size_t>(n) * stride + off;
            std::vector<double> fluxes(n);  // F_{i+1/2}
            for (int i = 0; i < n; ++i) {
                double a = u[base + static_cast<std::size_t>(i) * stride];
                double b = u[base + static_cast<std::size_t>((i + 1) % n) * stride];
                fluxes[i] = flux.component(comp, a) + neg(b) - neg(a);
            }
            for (int i = 0; i < n; ++i) {
                double fp = fluxes[i];
                double fm = fluxes[(i + n - 1) % n];
                u[base + static_cast<std::size_t>(i) * stride] -= lam * (fp - fm);
            }
        });
    };

    auto clamp_check = [&]() {
        for (auto& v : u) {
            if (v < -1e-12 || v > 1.0 + 1e-12)
                throw numeric_error("solve: values escaped [0,1] by " +
                                    std::to_string(std::max(-v, v - 1.0)) +
                                    "; source or initial data inconsistent");
            v = std::clamp(v, 0.0, 1.0);
        }
    };

    double t = 0.0;
    sol.slices.clear();
    for (double t_out : sol.times) {
        while (t < t_out - 1e-13) {
            double dt = std::min(dt_cfl, t_out - t);
            apply_source(t + 0.25 * dt, 0.5 * dt);
            for (int a = 0; a < sol.d; ++a) sweep_axis(a, dt);
            apply_source(t + 0.75 * dt, 0.5 * dt);
            clamp_check();
            t += dt;
        }
        t = t_out;
        sol.slices.push_back(u);
    }
    sol.validate();
    return sol;
}

enum class ManufacturedKind { riemann_rarefaction, sine_advect, holder_profile };

struct ManufacturedParams {
    int cells = 1024;
    double extent = 1.0;
    std::vector<double> times{1.0};
    double x0 = 0.5;         // feature location
    double gamma = 0.5;      // holder_profile exponent
    double mean = 0.5;       // sine_advect offset
    double amplitude = 0.25; // sine_advect amplitude
    double speed = 1.0;      // sine_advect translation speed
};

/// Exactly sampled reference fields: a self-similar rarefaction for the
/// quadratic flux, a translating sine, and a static |x - x0|^gamma cusp.
inline GridSolution manufactured(ManufacturedKind kind, const ManufacturedParams& p) {
    if (p.cells < 4) throw std::invalid_argument("manufactured: too few cells");
    GridSolution sol;
    sol.d = 1;
    sol.shape[0] = p.cells;
    sol.extent[0] = p.extent;
    sol.dx = p.extent / p.cells;
    sol.times = p.times;

    auto sample = [&](auto&& f) {
        std::vector<double> s(p.cells);
        for (int i = 0; i < p.cells; ++i) s[i] = f(sol.cell_center(0, i));
        return s;
    };

    for (double t : p.times) {
        switch (kind) {
            case ManufacturedKind::riemann_rarefaction:
                if (!(t > 0.0))
                    throw std::invalid_argument("manufactured: rarefaction needs t > 0");
                sol.slices.push_back(
                    sample([&](double x) { return std::clamp((x - p.x0) / t, 0.0, 1.0); }));
                break;
            case ManufacturedKind::sine_advect: {
                if (p.mean - std::abs(p.amplitude) < 0.0 || p.mean + std::abs(p.amplitude) > 1.0)
                    throw std::invalid_argument("manufactured: sine leaves [0,1]");
                sol.slices.push_back(sample([&](double x) {
                    return p.mean +
                           p.amplitude * std::sin(2.0 * M_PI * (x - p.speed * t) / p.extent);
                }));
                break;
            }
            case ManufacturedKind::holder_profile:
                if (!(p.gamma > 0.0) || p.gamma > 1.0)
                    throw std::invalid_argument("manufactured: gamma must be in (0,1]");
                sol.slices.push_back(sample([&](double x) {
                    return std::clamp(std::pow(std::abs(x - p.x0), p.gamma), 0.0, 1.0);
                }));
                break;
        }
    }
    sol.validate();
    return sol;
}

}  // namespace balaw
