#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "balaw/common.hpp"
#include "balaw/linalg.hpp"
#include "balaw/polynomial.hpp"

namespace balaw {

enum class FluxKind { burgers_family, polynomial, tabulated };

/// Flux f : [0,1] -> R^d with evaluable derivatives f^(k) for k = 1..d+2.
///
/// Three kinds are supported:
///  - burgers_family: f_i(u) = u^{i+1}/(i+1); derivatives use the closed-form
///    falling factorial and are exact.
///  - polynomial: each component given by monomial coefficients; derivatives
///    are exact coefficient arithmetic.
///  - tabulated: components sampled on a uniform grid over [0,1]; derivatives
///    use finite-difference weights on a window of nodes (suitable only for
///    smooth tables).
///
/// Immutable after construction; all member functions are const and safe to
/// call concurrently.
class FluxModel {
public:
    static FluxModel burgers(int d) {
        if (d < 1) throw std::invalid_argument("FluxModel::burgers: d must be >= 1");
        FluxModel f;
        f.d_ = d;
        f.kind_ = FluxKind::burgers_family;
        return f;
    }

    /// components[i] holds the monomial coefficients of f_{i+1}, ascending.
    static FluxModel polynomial(std::vector<std::vector<double>> components) {
        if (components.empty()) throw std::invalid_argument("FluxModel::polynomial: no components");
        FluxModel f;
        f.d_ = static_cast<int>(components.size());
        f.kind_ = FluxKind::polynomial;
        f.coeffs_ = std::move(components);
        return f;
    }

    /// components[i] holds samples of f_{i+1} at j/(n-1), j = 0..n-1.
    static FluxModel tabulated(std::vector<std::vector<double>> components) {
        if (components.empty()) throw std::invalid_argument("FluxModel::tabulated: no components");
        std::size_t n = components.front().size();
        if (n < 16) throw std::invalid_argument("FluxModel::tabulated: table too short");
        for (const auto& c : components)
            if (c.size() != n) throw std::invalid_argument("FluxModel::tabulated: ragged table");
        FluxModel f;
        f.d_ = static_cast<int>(components.size());
        f.kind_ = FluxKind::tabulated;
        f.table_ = std::move(components);
        return f;
    }

    int dim() const { return d_; }
    FluxKind kind() const { return kind_; }

    /// k-th derivative f^(k)(v), componentwise. Requires 1 <= k <= d+2 and
    /// v in [0,1].
    std::vector<double> deriv(double v, int k) const {
        if (k < 1 || k > d_ + 2)
            throw std::invalid_argument("FluxModel::deriv: order " + std::to_string(k) +
                                        " out of range [1," + std::to_string(d_ + 2) + "]");
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("FluxModel::deriv: v out of [0,1]");
        std::vector<double> out(d_, 0.0);
        switch (kind_) {
            case FluxKind::burgers_family:
                for (int i = 1; i <= d_; ++i) {
                    // f_i'(u) = u^i, so f_i^(1+l)(u) = i!/(i-l)! u^{i-l} for l <= i.
                    int l = k - 1;
                    if (l > i) {
                        out[i - 1] = 0.0;
                    } else {
                        double fac = 1.0;
                        for (int m = 0; m < l; ++m) fac *= static_cast<double>(i - m);
                        out[i - 1] = fac * power(v, i - l);
                    }
                }
                break;
            case FluxKind::polynomial:
                for (int i = 0; i < d_; ++i)
                    out[i] = poly::eval(poly::derivative(coeffs_[i], k), v);
                break;
            case FluxKind::tabulated:
                for (int i = 0; i < d_; ++i) out[i] = table_deriv(i, v, k);
                break;
        }
        return out;
    }

    std::vector<double> prime(double v) const { return deriv(v, 1); }

    /// f_i(v) itself (component index 1-based).
    double component(int i, double v) const {
        switch (kind_) {
            case FluxKind::burgers_family:
                return power(v, i + 1) / static_cast<double>(i + 1);
            case FluxKind::polynomial:
                return poly::eval(coeffs_[i - 1], v);
            case FluxKind::tabulated:
                return table_deriv(i - 1, v, 0);
        }
        return 0.0;
    }

    /// Monomial coefficients of f_i' (1-based component). Empty for
    /// tabulated fluxes, which have no polynomial form.
    std::vector<double> component_prime_poly(int i) const {
        switch (kind_) {
            case FluxKind::burgers_family: {
                std::vector<double> c(i + 1, 0.0);
                c[i] = 1.0;  // f_i'(u) = u^i
                return c;
            }
            case FluxKind::polynomial:
                return poly::derivative(coeffs_[i - 1]);
            case FluxKind::tabulated:
                return {};
        }
        return {};
    }

    bool has_polynomial_form() const { return kind_ != FluxKind::tabulated; }

    /// max over [0,1] of max_i |f_i^(k)(v)| (sampled).
    double max_deriv_norm(int k, int samples = 513) const {
        double best = 0.0;
        for (int s = 0; s < samples; ++s) {
            double v = static_cast<double>(s) / (samples - 1);
            for (double x : deriv(v, k)) best = std::max(best, std::abs(x));
        }
        return best;
    }

    double max_prime_norm() const { return max_deriv_norm(1); }
    double max_second_norm() const { return max_deriv_norm(2); }

private:
    FluxModel() = default;

    static double power(double v, int p) {
        double r = 1.0;
        for (int i = 0; i < p; ++i) r *= v;
        return r;
    }

    /// Finite-difference weights after Fornberg: weights w_j such that
    /// sum_j w_j f(x_j) approximates f^(m)(z).
    static std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
        int n = static_cast<int>(x.size());
        std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
        double c1 = 1.0;
        double c4 = x[0] - z;
        c[0][0] = 1.0;
        for (int i = 1; i < n; ++i) {
            int mn = std::min(i, m);
            double c2 = 1.0;
            double c5 = c4;
            c4 = x[i] - z;
            for (int j = 0; j < i; ++j) {
                double c3 = x[i] - x[j];
                c2 *= c3;
                if (j == i - 1) {
                    for (int k = mn; k >= 1; --k)
                        c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                    c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
                }
                for (int k = mn; k >= 1; --k)
                    c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
                c[j][0] = c4 * c[j][0] / c3;
            }
            c1 = c2;
        }
        std::vector<double> w(n);
        for (int j = 0; j < n; ++j) w[j] = c[j][m];
        return w;
    }

    double table_deriv(int comp, double v, int m) const {
        const auto& t = table_[comp];
        int n = static_cast<int>(t.size());
        double step = 1.0 / (n - 1);
        int width = std::max(7, m + 5);  // order-4 accuracy for derivative m
        width = std::min(width, n);
        int center = static_cast<int>(std::lround(v / step));
        int lo = std::clamp(center - width / 2, 0, n - width);
        std::vector<double> nodes(width);
        for (int j = 0; j < width; ++j) nodes[j] = (lo + j) * step;
        auto w = fd_weights(v, nodes, m);
        double s = 0.0;
        for (int j = 0; j < width; ++j) s += w[j] * t[lo + j];
        return s;
    }

    int d_ = 0;
    FluxKind kind_ = FluxKind::burgers_family;
    std::vector<std::vector<double>> coeffs_;  // polynomial kind
    std::vector<std::vector<double>> table_;   // tabulated kind
};

/// Measured sub-level behaviour of |tau + f'(v)·xi| over a delta grid, with
/// the fitted power law.
struct NonlinearityReport {
    std::vector<std::vector<double>> directions;  // unit vectors (tau, xi) in R^{d+1}
    std::vector<double> deltas;
    std::vector<std::vector<double>> measures;    // [direction][delta]
    std::vector<double> direction_alpha;          // NaN where no fit was possible
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double constant = std::numeric_limits<double>::quiet_NaN();
    bool conclusive = false;
};

/// L¹({v in [0,1] : |tau + f'(v)·xi| < delta}). Root isolation for fluxes
/// with a polynomial form, uniform grid counting otherwise.
inline double nonlinearity_measure(const FluxModel& flux, double tau,
                                   std::span<const double> xi, double delta) {
    if (static_cast<int>(xi.size()) != flux.dim())
        throw std::invalid_argument("nonlinearity_measure: xi dimension mismatch");
    if (delta <= 0.0) throw std::invalid_argument("nonlinearity_measure: delta must be positive");
    double n2 = tau * tau;
    for (double x : xi) n2 += x * x;
    if (std::abs(n2 - 1.0) > 1e-9)
        throw std::invalid_argument("nonlinearity_measure: non-unit direction");

    if (flux.has_polynomial_form()) {
        std::vector<double> p{tau};
        for (int i = 1; i <= flux.dim(); ++i) {
            auto comp = flux.component_prime_poly(i);
            if (comp.size() > p.size()) p.resize(comp.size(), 0.0);
            for (std::size_t j = 0; j < comp.size(); ++j) p[j] += xi[i - 1] * comp[j];
        }
        return poly::measure_abs_below(p, delta, 0.0, 1.0);
    }

    const int n = 1'000'000;
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

/// Fits the sub-level power law measure(delta) ~ C delta^alpha over sampled
/// unit directions. Directions are the 2(d+1) signed axes plus random unit
/// vectors; the reported alpha is the worst (smallest) fitted exponent.
inline NonlinearityReport fit_alpha(const FluxModel& flux, int n_directions,
                                    std::span<const double> delta_grid,
                                    std::uint64_t seed = 0, int threads = 1) {
    int d = flux.dim();
    if (n_directions < 8 * d)
        throw std::invalid_argument("fit_alpha: n_directions must be >= 8*d");
    if (delta_grid.size() < 4)
        throw std::invalid_argument("fit_alpha: delta grid too short");
    auto [dmin, dmax] = std::minmax_element(delta_grid.begin(), delta_grid.end());
    if (*dmin <= 0.0 || *dmax / *dmin < 100.0)
        throw std::invalid_argument("fit_alpha: delta grid must span at least two decades");

    NonlinearityReport rep;
    rep.deltas.assign(delta_grid.begin(), delta_grid.end());
    std::sort(rep.deltas.begin(), rep.deltas.end());

    // Signed axes first: they contain the degenerate directions of
    // polynomial fluxes. Then random unit vectors.
    for (int axis = 0; axis < d + 1; ++axis) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> dir(d + 1, 0.0);
            dir[axis] = sign;
            rep.directions.push_back(std::move(dir));
        }
    }
    Rng rng(seed);
    while (static_cast<int>(rep.directions.size()) < n_directions)
        rep.directions.push_back(rng.unit_vector(d + 1));

    std::size_t nd = rep.directions.size();
    rep.measures.assign(nd, std::vector<double>(rep.deltas.size(), 0.0));
    if (flux.has_polynomial_form()) {
        parallel_for(nd, threads, [&](std::size_t i) {
            const auto& dir = rep.directions[i];
            std::span<const double> xi(dir.data() + 1, d);
            for (std::size_t j = 0; j < rep.deltas.size(); ++j)
                rep.measures[i][j] = nonlinearity_measure(flux, dir[0], xi, rep.deltas[j]);
        });
    } else {
        // Counting path: sample |tau + f'(v)·xi| once per direction and
        // reuse the samples across the whole delta grid.
        const int n = 1'000'000;
        parallel_for(nd, threads, [&](std::size_t i) {
            const auto& dir = rep.directions[i];
            std::vector<double> g(n);
            for (int k = 0; k < n; ++k) {
                double v = (k + 0.5) / n;
                auto fp = flux.prime(v);
                double s = dir[0];
                for (int c = 0; c < d; ++c) s += fp[c] * dir[c + 1];
                g[k] = std::abs(s);
            }
            for (std::size_t j = 0; j < rep.deltas.size(); ++j) {
                int count = 0;
                for (int k = 0; k < n; ++k)
                    if (g[k] < rep.deltas[j]) ++count;
                rep.measures[i][j] = static_cast<double>(count) / n;
            }
        });
    }

    rep.direction_alpha.assign(nd, std::numeric_limits<double>::quiet_NaN());
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nd; ++i) {
        std::vector<double> lx, ly;
        for (std::size_t j = 0; j < rep.deltas.size(); ++j) {
            double m = rep.measures[i][j];
            if (m <= 0.0 || m >= 1.0 - 1e-12) continue;  // empty or saturated
            lx.push_back(std::log(rep.deltas[j]));
            ly.push_back(std::log(m));
        }
        if (lx.size() < 4 || lx.back() - lx.front() < std::log(10.0)) continue;
        double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t j = 0; j < lx.size(); ++j) {
            sx += lx[j];
            sy += ly[j];
            sxx += lx[j] * lx[j];
            sxy += lx[j] * ly[j];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.direction_alpha[i] = slope;
        alpha = std::min(alpha, slope);
    }

    if (!std::isfinite(alpha)) {
        rep.conclusive = false;
        return rep;
    }
    rep.alpha = std::min(alpha, 1.0);  // Assumption caps the exponent at 1
    rep.conclusive = true;

    double c = 0.0;
    for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < rep.deltas.size(); ++j)
            c = std::max(c, rep.measures[i][j] / std::pow(rep.deltas[j], rep.alpha));
    rep.constant = c;
    return rep;
}

/// Matrix with entry (row l, column i) = f_i^(1+l)(v) / l!, for l,i = 1..d.
/// Its invertibility encodes the nondegeneracy of the flux at v. Note the
/// transpose of this layout (components as rows) is the factor appearing in
/// the increment-matrix factorization of matrix_decomp.
inline Mat wronskian(const FluxModel& flux, double v) {
    int d = flux.dim();
    Mat w(d, d);
    double fact = 1.0;
    for (int l = 1; l <= d; ++l) {
        fact *= static_cast<double>(l);
        auto row = flux.deriv(v, 1 + l);
        for (int i = 1; i <= d; ++i) w(l - 1, i - 1) = row[i - 1] / fact;
    }
    return w;
}

struct SpanningCheck {
    bool spans = false;
    double min_singular = 0.0;         // of the d x d derivative matrix
    double min_singular_lifted = 0.0;  // of the (d+1) x (d+1) lifted matrix
};

/// Whether {f''(v), ..., f^(d+1)(v)} spans R^d, decided by the smallest
/// singular value of wronskian(flux, v). Cross-checked against the lifted
/// formulation with rows (1, f'(v)), (0, f''(v)), ..., (0, f^(d+1)(v)).
inline SpanningCheck spanning_check(const FluxModel& flux, double v, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("spanning_check: tol must be positive");
    int d = flux.dim();
    SpanningCheck out;
    out.min_singular = min_singular_value(wronskian(flux, v));

    Mat lifted(d + 1, d + 1);
    lifted(0, 0) = 1.0;
    auto fp = flux.prime(v);
    for (int i = 0; i < d; ++i) lifted(0, i + 1) = fp[i];
    for (int k = 1; k <= d; ++k) {
        auto row = flux.deriv(v, 1 + k);
        for (int i = 0; i < d; ++i) lifted(k, i + 1) = row[i];
    }
    out.min_singular_lifted = min_singular_value(lifted);
    out.spans = out.min_singular > tol;
    return out;
}

}  // namespace balaw
