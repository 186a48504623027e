#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "balaw/common.hpp"
#include "balaw/flux_model.hpp"
#include "balaw/linalg.hpp"
#include "balaw/polynomial.hpp"

namespace balaw {

/// The node matrix with entries ((i h / d)^l) for rows l and columns i,
/// l, i = 1..d. Invertible for every h > 0; column i at h = 1 is
/// ((i/d), (i/d)^2, ..., (i/d)^d).
struct NodeMatrix {
    int d = 0;
    double h = 0.0;
    Mat m;
};

inline NodeMatrix node_matrix(int d, double h) {
    if (d < 1) throw std::invalid_argument("node_matrix: d must be >= 1");
    if (!(h > 0.0) || h > 1.0) throw std::invalid_argument("node_matrix: h must be in (0,1]");
    NodeMatrix nm{d, h, Mat(d, d)};
    for (int l = 1; l <= d; ++l)
        for (int i = 1; i <= d; ++i)
            nm.m(l - 1, i - 1) = std::pow(static_cast<double>(i) * h / d, l);
    return nm;
}

namespace detail {

/// Integer matrix (i^l), rows l, columns i. The node matrix factors as
/// diag((h/d)^l) times this, which is what the exact inverse path exploits.
inline std::vector<std::vector<long long>> power_grid_matrix(int d) {
    std::vector<std::vector<long long>> v(d, std::vector<long long>(d));
    for (int l = 1; l <= d; ++l)
        for (int i = 1; i <= d; ++i) {
            long long p = 1;
            for (int k = 0; k < l; ++k) p *= i;
            v[l - 1][i - 1] = p;
        }
    return v;
}

}  // namespace detail

/// Inverse of the node matrix. Exact adjugate/determinant arithmetic for
/// d <= 6 (entries are rationals scaled by powers of d/h, so column l of the
/// result scales exactly as h^{-l}); pivoted elimination beyond.
inline Mat node_matrix_inverse(const NodeMatrix& nm) {
    int d = nm.d;
    if (d <= 6) {
        Mat vinv = exact_integer_inverse(detail::power_grid_matrix(d));
        Mat inv(d, d);
        for (int l = 1; l <= d; ++l) {
            double scale = std::pow(static_cast<double>(d) / nm.h, l);
            for (int i = 0; i < d; ++i) inv(i, l - 1) = vinv(i, l - 1) * scale;
        }
        return inv;
    }
    return inverse(nm.m);
}

struct NormCertRow {
    double h = 0.0;
    double norm = 0.0;     // operator norm of the inverse node matrix
    double product = 0.0;  // norm * h^d
};

/// Table of ||H_d(h)^{-1}|| * h^d over the given h values. The exact column
/// scaling h^{-l} makes the table monotone in h with a plateau as h -> 0, so
/// a finite maximum over any h list certifies the h^{-d} bound.
inline std::vector<NormCertRow> inverse_norm_certificate(int d, std::span<const double> h_list) {
    std::vector<NormCertRow> rows;
    rows.reserve(h_list.size());
    for (double h : h_list) {
        if (!(h > 0.0) || h > 1.0)
            throw std::invalid_argument("inverse_norm_certificate: h must be in (0,1]");
        Mat inv = node_matrix_inverse(node_matrix(d, h));
        double n = operator_norm(inv);
        rows.push_back({h, n, n * std::pow(h, d)});
    }
    return rows;
}

/// Increment matrix with columns f'(v_i) - f'(v_0), v_i = v0 + i h / d,
/// components as rows.
inline Mat increment_matrix(const FluxModel& flux, double v0, double h) {
    int d = flux.dim();
    if (v0 < 0.0 || !(h > 0.0) || v0 + h > 1.0 + 1e-12)
        throw std::invalid_argument("increment_matrix: need v0 >= 0, h > 0, v0 + h <= 1");
    Mat a(d, d);
    auto f0 = flux.prime(v0);
    for (int i = 1; i <= d; ++i) {
        auto fi = flux.prime(std::min(1.0, v0 + static_cast<double>(i) * h / d));
        for (int m = 0; m < d; ++m) a(m, i - 1) = fi[m] - f0[m];
    }
    return a;
}

/// Result of writing a vector against flux-derivative increments.
struct Decomposition {
    std::vector<double> nodes;   // v_0..v_d (uniform ladder) or searched v_1..v_{d+1}
    std::vector<double> coeffs;  // lambda (d entries) or a_1..a_{d+1} (zero sum)
    double residual = 0.0;       // ||reconstruction - target||
    double bound_ratio = 0.0;    // ||lambda|| h^d / ||a||, or max|a_i| h^{d/alpha} / ||a||
    double condition = 0.0;      // condition number of the solved system
    double coeff_sum = 0.0;      // sum of coefficients (zero-sum variant only)
};

namespace detail {

/// ||A|| * ||A^{-1}|| via the inverse; unlike the smallest eigenvalue of
/// At*A this stays accurate out to condition numbers near 1/eps.
inline double robust_condition(const Mat& a) {
    try {
        return operator_norm(a) * operator_norm(inverse(a));
    } catch (const numeric_error&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace detail

/// Solves a = sum_i lambda_i (f'(v_i) - f'(v_0)) on the uniform node ladder
/// v_i = v + i h / d. Requires the flux derivatives to span at v; refuses
/// systems with condition number beyond 1e14.
inline Decomposition decompose_improved(const FluxModel& flux, double v, double h,
                                        std::span<const double> a) {
    int d = flux.dim();
    if (static_cast<int>(a.size()) != d)
        throw std::invalid_argument("decompose_improved: vector dimension mismatch");
    if (v < 0.0 || !(h > 0.0) || v + h > 1.0 + 1e-12)
        throw std::invalid_argument("decompose_improved: need v >= 0, h > 0, v + h <= 1");

    Mat A = increment_matrix(flux, v, h);
    double cond = detail::robust_condition(A);
    if (!(cond < 1e14))
        throw numeric_error("decompose_improved: increment matrix on [" + std::to_string(v) +
                            ", " + std::to_string(v + h) + "] is ill-conditioned (cond " +
                            std::to_string(cond) + ")");

    Decomposition out;
    out.condition = cond;
    out.nodes.resize(d + 1);
    for (int i = 0; i <= d; ++i) out.nodes[i] = v + static_cast<double>(i) * h / d;
    out.coeffs = solve_refined(A, a);
    out.residual = residual_norm(A, out.coeffs, a);
    double an = 0.0;
    for (double x : a) an += x * x;
    an = std::sqrt(an);
    out.bound_ratio = an > 0.0 ? norm2(out.coeffs) * std::pow(h, d) / an : 0.0;
    return out;
}

namespace detail {

inline double node_tuple_quality(const FluxModel& flux, std::span<const double> nodes) {
    int d = flux.dim();
    Mat m(d + 1, d + 1);
    for (int i = 0; i <= d; ++i) {
        m(i, 0) = 1.0;
        auto fp = flux.prime(nodes[i]);
        for (int j = 0; j < d; ++j) m(i, j + 1) = fp[j];
    }
    return min_singular_value(m);
}

}  // namespace detail

/// Zero-sum decomposition (0, a) = sum_i a_i (1, f'(v_i)) on d+1 searched
/// nodes in [v, v+h] with pairwise gaps >= h / (2(d+1)). Nodes are chosen to
/// maximize the smallest singular value of the matrix with rows (1, f'(v_i))
/// over a coarse grid of admissible tuples, then refined locally.
inline Decomposition decompose_general(const FluxModel& flux, double v, double h,
                                       std::span<const double> a, double alpha) {
    int d = flux.dim();
    if (static_cast<int>(a.size()) != d)
        throw std::invalid_argument("decompose_general: vector dimension mismatch");
    if (v < 0.0 || !(h > 0.0) || v + h > 1.0 + 1e-12)
        throw std::invalid_argument("decompose_general: need v >= 0, h > 0, v + h <= 1");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("decompose_general: alpha must be in (0,1]");

    // Coarse search: 21 candidate positions per node, index spacing enforcing
    // the minimum gap.
    const int grid = 20;
    double min_gap = h / (2.0 * (d + 1));
    int idx_gap = static_cast<int>(std::ceil(static_cast<double>(grid) / (2.0 * (d + 1)) - 1e-12));
    idx_gap = std::max(idx_gap, 1);

    std::vector<int> idx(d + 1);
    std::vector<double> best_nodes;
    double best_quality = -1.0;
    std::vector<double> nodes(d + 1);

    auto consider = [&](const std::vector<int>& tuple) {
        for (int i = 0; i <= d; ++i) nodes[i] = v + h * static_cast<double>(tuple[i]) / grid;
        double q = detail::node_tuple_quality(flux, nodes);
        if (q > best_quality) {
            best_quality = q;
            best_nodes = nodes;
        }
    };

    // Enumerate increasing index tuples with the spacing constraint.
    std::vector<int> stack(d + 1, 0);
    int level = 0;
    stack[0] = 0;
    while (level >= 0) {
        if (stack[level] > grid - idx_gap * (d - level)) {
            --level;
            if (level >= 0) ++stack[level];
            continue;
        }
        if (level == d) {
            consider(stack);
            ++stack[level];
            continue;
        }
        ++level;
        stack[level] = stack[level - 1] + idx_gap;
    }
    if (best_quality < 0.0) throw numeric_error("decompose_general: no admissible node tuple");

    // Local refinement: coordinate-wise perturbations on finer grids.
    nodes = best_nodes;
    for (double step : {h / 80.0, h / 320.0}) {
        bool improved = true;
        for (int guard = 0; improved && guard < 64; ++guard) {
            improved = false;
            for (int i = 0; i <= d; ++i) {
                for (double dir : {-1.0, 1.0}) {
                    auto trial = nodes;
                    trial[i] += dir * step;
                    if (trial[i] < v || trial[i] > v + h) continue;
                    bool ok = true;
                    for (int j = 0; j <= d; ++j)
                        if (j != i && std::abs(trial[j] - trial[i]) < min_gap - 1e-15) ok = false;
                    if (!ok) continue;
                    std::sort(trial.begin(), trial.end());
                    double q = detail::node_tuple_quality(flux, trial);
                    if (q > best_quality) {
                        best_quality = q;
                        nodes = trial;
                        improved = true;
                    }
                }
            }
        }
    }

    if (best_quality < 1e-13)
        throw numeric_error("decompose_general: all candidate node tuples near-singular "
                            "(best min singular value " + std::to_string(best_quality) + ")");

    // Eliminate the zero-sum constraint analytically: solve the reduced d x d
    // system on increments from the first node, then back out a_1 as the
    // negated sum. This keeps sum(a_i) at rounding level by construction.
    Mat b(d, d);
    auto f1 = flux.prime(nodes[0]);
    for (int i = 1; i <= d; ++i) {
        auto fi = flux.prime(nodes[i]);
        for (int m = 0; m < d; ++m) b(m, i - 1) = fi[m] - f1[m];
    }
    double cond = detail::robust_condition(b);
    if (!(cond < 1e14))
        throw numeric_error("decompose_general: reduced system ill-conditioned (cond " +
                            std::to_string(cond) + ")");

    auto tail = solve_refined(b, a);

    Decomposition out;
    out.nodes = nodes;
    out.condition = cond;
    out.coeffs.assign(d + 1, 0.0);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += tail[i];
    out.coeffs[0] = -s;
    for (int i = 0; i < d; ++i) out.coeffs[i + 1] = tail[i];

    // Residual of the full (d+1)-dimensional system.
    long double sum_c = 0.0L;
    std::vector<long double> res(d, 0.0L);
    for (int i = 0; i <= d; ++i) {
        sum_c += out.coeffs[i];
        auto fp = flux.prime(nodes[i]);
        for (int m = 0; m < d; ++m) res[m] += static_cast<long double>(out.coeffs[i]) * fp[m];
    }
    long double r2 = sum_c * sum_c;
    for (int m = 0; m < d; ++m) {
        long double rm = res[m] - a[m];
        r2 += rm * rm;
    }
    out.residual = static_cast<double>(std::sqrt(static_cast<double>(r2)));
    out.coeff_sum = static_cast<double>(sum_c);

    double an = 0.0;
    for (double x : a) an += x * x;
    an = std::sqrt(an);
    double amax = 0.0;
    for (double x : out.coeffs) amax = std::max(amax, std::abs(x));
    out.bound_ratio = an > 0.0 ? amax * std::pow(h, static_cast<double>(d) / alpha) / an : 0.0;
    return out;
}

/// Factorization of the increment matrix as (component-major derivative
/// matrix) * (node matrix) + remainder * (h/d)^{d+1}. The derivative factor
/// is the transpose of wronskian(flux, v0).
struct Factorization {
    Mat wronskian;      // rows = derivative order, columns = component
    Mat node_matrix;
    Mat remainder;      // component-major, scaled so A = Wt*H + R*(h/d)^{d+1}
    double scale = 0.0; // (h/d)^{d+1}
    double reconstruction_error = 0.0;  // Frobenius norm of the defect
    double remainder_norm = 0.0;
    double inverse_norm = 0.0;          // ||A^{-1}||
    double neumann_bound = 0.0;         // ||At^{-1}|| / (1 - ||At^{-1} R~||); NaN if inapplicable
    bool remainder_consistent = false;  // implied (d+2)-derivatives within range
};

/// Splits the increment matrix into its Taylor factorization and the scaled
/// remainder. For fluxes with a polynomial form the remainder is computed
/// from exact coefficient arithmetic (identically zero when every component
/// of f' has degree <= d); otherwise it is the numerical defect.
inline Factorization remainder_matrix(const FluxModel& flux, double v0, double h) {
    int d = flux.dim();
    Factorization out;
    out.wronskian = wronskian(flux, v0);
    out.node_matrix = node_matrix(d, h).m;
    out.scale = std::pow(h / d, d + 1);

    Mat A = increment_matrix(flux, v0, h);
    Mat R(d, d);
    if (flux.has_polynomial_form()) {
        for (int m = 1; m <= d; ++m) {
            auto shifted = poly::shift(flux.component_prime_poly(m), v0);
            for (int i = 1; i <= d; ++i) {
                double s = static_cast<double>(i) * h / d;
                double acc = 0.0;  // sum over q >= d+1 of c_q s^{q-d-1}
                for (std::size_t q = shifted.size(); q-- > static_cast<std::size_t>(d + 1);)
                    acc = acc * s + shifted[q];
                R(m - 1, i - 1) = acc * std::pow(static_cast<double>(i), d + 1);
            }
        }
    } else {
        Mat defect = A - out.wronskian.transposed() * out.node_matrix;
        for (int m = 0; m < d; ++m)
            for (int i = 0; i < d; ++i) R(m, i) = defect(m, i) / out.scale;
    }
    out.remainder = R;
    out.remainder_norm = operator_norm(R);

    Mat reconstructed = out.wronskian.transposed() * out.node_matrix;
    for (int m = 0; m < d; ++m)
        for (int i = 0; i < d; ++i) reconstructed(m, i) += R(m, i) * out.scale;
    out.reconstruction_error = (A - reconstructed).frobenius_norm();

    // Mean-value consistency: R(m,i) * (d+1)! / i^{d+1} must lie within the
    // range of f_m^{(d+2)} over [v0, v_i].
    out.remainder_consistent = true;
    double fact = 1.0;
    for (int k = 2; k <= d + 1; ++k) fact *= k;
    for (int m = 1; m <= d && out.remainder_consistent; ++m) {
        for (int i = 1; i <= d; ++i) {
            double implied = R(m - 1, i - 1) * fact / std::pow(static_cast<double>(i), d + 1);
            double vi = v0 + static_cast<double>(i) * h / d;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (int s = 0; s <= 64; ++s) {
                double x = v0 + (vi - v0) * s / 64.0;
                double val = flux.deriv(std::min(x, 1.0), d + 2)[m - 1];
                lo = std::min(lo, val);
                hi = std::max(hi, val);
            }
            double pad = 1e-8 * (1.0 + hi - lo) + 1e-10 * std::abs(implied);
            if (implied < lo - pad || implied > hi + pad) {
                out.remainder_consistent = false;
                break;
            }
        }
    }

    try {
        Mat At = out.wronskian.transposed() * out.node_matrix;
        Mat At_inv = inverse(At);
        Mat Rs(d, d);
        for (int m = 0; m < d; ++m)
            for (int i = 0; i < d; ++i) Rs(m, i) = R(m, i) * out.scale;
        double t = operator_norm(At_inv * Rs);
        out.neumann_bound = t < 1.0 ? operator_norm(At_inv) / (1.0 - t)
                                    : std::numeric_limits<double>::quiet_NaN();
        out.inverse_norm = operator_norm(inverse(A));
    } catch (const numeric_error&) {
        out.neumann_bound = std::numeric_limits<double>::quiet_NaN();
        out.inverse_norm = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

struct GainRow {
    double h = 0.0;
    double lambda_norm = 0.0;
    double product = 0.0;  // ||lambda|| * h^ell
};

/// Coefficient growth along the distinguished directions: for the direction
/// aligned with the (1+ell)-th derivative the coefficients of the uniform
/// ladder decomposition grow like h^{-ell} instead of the generic h^{-d}, so
/// the products ||lambda(h)|| h^ell stay bounded above and below.
inline std::vector<GainRow> directional_gain(const FluxModel& flux, double v,
                                             std::span<const double> h_list, int ell) {
    int d = flux.dim();
    if (ell < 1 || ell > d) throw std::invalid_argument("directional_gain: ell out of range");
    if (!spanning_check(flux, v, 1e-12).spans)
        throw numeric_error("directional_gain: derivatives do not span at v");

    std::vector<GainRow> rows;
    rows.reserve(h_list.size());
    double fact = 1.0;
    for (int k = 2; k <= ell; ++k) fact *= k;
    double rem_fact = 1.0;
    for (int k = 2; k <= d + 1; ++k) rem_fact *= k;

    for (double h : h_list) {
        std::vector<double> dir = flux.deriv(v, 1 + ell);
        if (flux.kind() != FluxKind::burgers_family) {
            // Perturbed direction: the ladder-aligned correction of the
            // Taylor remainder, proportional to H^{-1} f^{(d+2)} h^{d+1}.
            for (auto& x : dir) x /= fact;
            Mat hinv = node_matrix_inverse(node_matrix(d, h));
            auto fd2 = flux.deriv(v, d + 2);
            auto corr = hinv * fd2;
            double c = std::pow(2.0, d + 1) / (std::pow(static_cast<double>(d), d + 1) * rem_fact);
            for (int i = 0; i < d; ++i) dir[i] += c * corr[i] * std::pow(h, d + 1);
        }
        double n = norm2(dir);
        if (n == 0.0) throw numeric_error("directional_gain: zero derivative direction");
        for (auto& x : dir) x /= n;

        auto dec = decompose_improved(flux, v, h, dir);
        double ln = norm2(dec.coeffs);
        rows.push_back({h, ln, ln * std::pow(h, ell)});
    }
    return rows;
}

struct BoundTableRow {
    double h = 0.0;
    double inverse_norm = 0.0;  // ||A(v,h,d)^{-1}||
    double product = 0.0;       // inverse_norm * h^d
};

/// Operator-norm certification of the uniform-ladder decomposition: the
/// products ||A^{-1}(v,h,d)|| h^d over an h list. Individual right-hand
/// sides can only do better (the derivative-aligned ones gain extra powers
/// of h; see directional_gain).
inline std::vector<BoundTableRow> decomposition_norm_table(const FluxModel& flux, double v,
                                                           std::span<const double> h_list) {
    std::vector<BoundTableRow> rows;
    rows.reserve(h_list.size());
    for (double h : h_list) {
        Mat A = increment_matrix(flux, v, h);
        double n = operator_norm(inverse(A));
        rows.push_back({h, n, n * std::pow(h, flux.dim())});
    }
    return rows;
}

}  // namespace balaw
