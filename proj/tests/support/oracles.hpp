#pragma once

// Brute-force reference computations used to freeze expected values in the
// tests. Everything here is deliberately naive (fine grids, direct sums) and
// independent of the library's computational paths.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "balaw/flux_model.hpp"
#include "balaw/grid_solution.hpp"

namespace oracles {

/// Fraction of a fine v-grid with |tau + f'(v)·xi| < delta.
inline double grid_sublevel_measure(const balaw::FluxModel& flux, double tau,
                                    std::span<const double> xi, double delta,
                                    int n = 1'000'000) {
    int count = 0;
    for (int j = 0; j < n; ++j) {
        double v = (j + 0.5) / n;
        auto fp = flux.prime(v);
        double g = tau;
        for (int i = 0; i < flux.dim(); ++i) g += fp[i] * xi[i];
        if (std::abs(g) < delta) ++count;
    }
    return static_cast<double>(count) / n;
}

/// Measure of {z in [y-r, y+r] : u(z) > v} for a 1D profile, by fine-grid
/// counting.
inline double count_superlevel_1d(const std::function<double(double)>& u, double y, double r,
                                  double v, int n = 2'000'000) {
    int count = 0;
    for (int j = 0; j < n; ++j) {
        double z = y - r + 2.0 * r * (j + 0.5) / n;
        if (u(z) > v) ++count;
    }
    return 2.0 * r * count / n;
}

/// Integral over [a, b] by composite Simpson.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4096) {
    n += n % 2;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Average of a 1D profile over [y-r, y+r].
inline double window_average_1d(const std::function<double(double)>& u, double y, double r) {
    return simpson(u, y - r, y + r) / (2.0 * r);
}

/// Brute-force oscillation functional of a 1D profile: sweep candidate
/// centers densely through the closed interval.
inline double brute_hr_1d(const std::function<double(double)>& u, double x, double r,
                          int n_centers = 2048) {
    double hi = -1e300, lo = 1e300;
    for (int k = 0; k <= n_centers; ++k) {
        double y = x - r + 2.0 * r * k / n_centers;
        double avg = window_average_1d(u, y, r);
        hi = std::max(hi, avg);
        lo = std::min(lo, avg);
    }
    return 0.5 * (hi - lo);
}

/// Direct double sum of a cell field over an axis-aligned periodic box, the
/// slow counterpart of the prefix-table integrator.
inline double brute_box_integral_2d(const balaw::GridSolution& sol, int t_index,
                                    std::span<const double> center, double r) {
    double total = 0.0;
    const auto& s = sol.slices[t_index];
    for (int i = 0; i < sol.shape[0]; ++i) {
        double rel0 = std::remainder(sol.cell_center(0, i) - center[0], sol.extent[0]);
        double w0 = std::max(0.0, std::min(rel0 + 0.5 * sol.dx, r) -
                                      std::max(rel0 - 0.5 * sol.dx, -r));
        if (w0 <= 0.0) continue;
        for (int j = 0; j < sol.shape[1]; ++j) {
            double rel1 = std::remainder(sol.cell_center(1, j) - center[1], sol.extent[1]);
            double w1 = std::max(0.0, std::min(rel1 + 0.5 * sol.dx, r) -
                                          std::max(rel1 - 0.5 * sol.dx, -r));
            if (w1 <= 0.0) continue;
            total += w0 * w1 * s[static_cast<std::size_t>(i) * sol.shape[1] + j];
        }
    }
    return total;
}

/// Samples a 1D profile into a single-slice grid solution.
inline balaw::GridSolution sample_profile_1d(const std::function<double(double)>& u, int cells,
                                             double extent = 1.0) {
    balaw::GridSolution sol;
    sol.d = 1;
    sol.shape[0] = cells;
    sol.extent[0] = extent;
    sol.dx = extent / cells;
    sol.times = {0.0};
    std::vector<double> s(cells);
    for (int i = 0; i < cells; ++i) s[i] = u(sol.cell_center(0, i));
    sol.slices.push_back(std::move(s));
    sol.validate();
    return sol;
}

}  // namespace oracles
