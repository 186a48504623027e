#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace balaw {

/// Polynomials are coefficient vectors in the monomial basis, ascending:
/// p(x) = c[0] + c[1] x + ... + c[n] x^n.
namespace poly {

inline double eval(std::span<const double> c, double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

inline std::vector<double> derivative(std::span<const double> c) {
    if (c.size() <= 1) return {};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

/// k-th derivative.
inline std::vector<double> derivative(std::span<const double> c, int k) {
    std::vector<double> d(c.begin(), c.end());
    for (int i = 0; i < k; ++i) d = derivative(d);
    return d;
}

/// Coefficients of p(x0 + s) as a polynomial in s (Taylor shift, synthetic
/// division).
inline std::vector<double> shift(std::span<const double> c, double x0) {
    std::vector<double> out(c.begin(), c.end());
    std::size_t n = out.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = n - 1; j > i; --j) out[j - 1] += x0 * out[j];
    return out;
}

/// Roots of p in [lo, hi] where p changes sign, located by a scan over
/// n_scan subintervals followed by bisection. Roots of even multiplicity do
/// not change the sign of p and are not reported; for measure computations
/// they contribute nothing.
inline std::vector<double> sign_change_roots(std::span<const double> c, double lo, double hi,
                                             int n_scan = 1 << 14) {
    std::vector<double> roots;
    double prev_x = lo;
    double prev_v = eval(c, lo);
    for (int i = 1; i <= n_scan; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / n_scan;
        double v = eval(c, x);
        if (prev_v == 0.0) {
            roots.push_back(prev_x);
        } else if (v != 0.0 && std::signbit(v) != std::signbit(prev_v)) {
            double a = prev_x, b = x, fa = prev_v;
            for (int it = 0; it < 100 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
                double m = 0.5 * (a + b);
                double fm = eval(c, m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (std::signbit(fm) == std::signbit(fa)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_v = v;
    }
    if (eval(c, hi) == 0.0) roots.push_back(hi);
    return roots;
}

/// Lebesgue measure of {x in [lo, hi] : |p(x)| < delta}, assembled from the
/// sign intervals of p − delta and p + delta.
inline double measure_abs_below(std::span<const double> c, double delta, double lo, double hi) {
    std::vector<double> shifted(c.begin(), c.end());
    if (shifted.empty()) shifted.push_back(0.0);

    std::vector<double> cuts{lo, hi};
    for (double offset : {-delta, delta}) {
        shifted[0] = c.empty() ? offset : c[0] + offset;
        for (double r : sign_change_roots(shifted, lo, hi)) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        if (b - a <= 0.0) continue;
        double mid = 0.5 * (a + b);
        if (std::abs(eval(c, mid)) < delta) total += b - a;
    }
    return total;
}

}  // namespace poly
}  // namespace balaw
