#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "balaw/common.hpp"

namespace balaw {

/// Dense row-major matrix. Sized for the small systems this library works
/// with (node ladders, Wronskians); no attempt at blocking or expression
/// templates.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<double>& data() const { return a_; }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double x : a_) s += x * x;
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0.0;
        for (double x : a_) s = std::max(s, std::abs(x));
        return s;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("Mat multiply: shape mismatch");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Mat operator-(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("Mat subtract: shape mismatch");
    Mat c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline std::vector<double> operator*(const Mat& a, const std::vector<double>& x) {
    if (a.cols() != static_cast<int>(x.size()))
        throw std::invalid_argument("Mat*vec: shape mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// LU factorization with partial pivoting of a square matrix.
class Lu {
public:
    explicit Lu(const Mat& m) : n_(m.rows()), lu_(m), perm_(m.rows()) {
        if (m.rows() != m.cols()) throw std::invalid_argument("Lu: matrix not square");
        for (int i = 0; i < n_; ++i) perm_[i] = i;
        sign_ = 1.0;
        for (int k = 0; k < n_; ++k) {
            int piv = k;
            double best = std::abs(lu_(k, k));
            for (int i = k + 1; i < n_; ++i) {
                double v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (piv != k) {
                for (int j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
                sign_ = -sign_;
            }
            if (lu_(k, k) == 0.0) {
                singular_ = true;
                continue;
            }
            for (int i = k + 1; i < n_; ++i) {
                lu_(i, k) /= lu_(k, k);
                double lik = lu_(i, k);
                for (int j = k + 1; j < n_; ++j) lu_(i, j) -= lik * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    double determinant() const {
        if (singular_) return 0.0;
        double d = sign_;
        for (int i = 0; i < n_; ++i) d *= lu_(i, i);
        return d;
    }

    std::vector<double> solve(std::span<const double> b) const {
        if (singular_) throw numeric_error("Lu::solve: singular matrix");
        std::vector<double> x(n_);
        for (int i = 0; i < n_; ++i) x[i] = b[perm_[i]];
        for (int i = 1; i < n_; ++i)
            for (int j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
        for (int i = n_ - 1; i >= 0; --i) {
            for (int j = i + 1; j < n_; ++j) x[i] -= lu_(i, j) * x[j];
            x[i] /= lu_(i, i);
        }
        return x;
    }

private:
    int n_;
    Mat lu_;
    std::vector<int> perm_;
    double sign_ = 1.0;
    bool singular_ = false;
};

/// Solves A x = b with one or two steps of iterative refinement; the residual
/// is accumulated in long double so the refined solution is accurate even
/// when A is moderately ill-conditioned.
inline std::vector<double> solve_refined(const Mat& a, std::span<const double> b, int refine_steps = 2) {
    Lu lu(a);
    std::vector<double> x = lu.solve(b);
    int n = a.rows();
    for (int step = 0; step < refine_steps; ++step) {
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) {
            long double s = b[i];
            for (int j = 0; j < n; ++j) s -= static_cast<long double>(a(i, j)) * x[j];
            r[i] = static_cast<double>(s);
        }
        std::vector<double> dx = lu.solve(r);
        for (int i = 0; i < n; ++i) x[i] += dx[i];
    }
    return x;
}

/// Residual ‖A x − b‖₂ with long double accumulation.
inline double residual_norm(const Mat& a, std::span<const double> x, std::span<const double> b) {
    long double s = 0.0L;
    for (int i = 0; i < a.rows(); ++i) {
        long double r = b[i];
        for (int j = 0; j < a.cols(); ++j) r -= static_cast<long double>(a(i, j)) * x[j];
        s += r * r;
    }
    return static_cast<double>(std::sqrt(static_cast<double>(s)));
}

inline Mat inverse(const Mat& a) {
    Lu lu(a);
    if (lu.singular()) throw numeric_error("inverse: singular matrix");
    int n = a.rows();
    Mat inv(n, n);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        auto col = lu.solve(e);
        e[j] = 0.0;
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
/// Adequate for the n ≤ ~10 matrices that appear here.
inline std::vector<double> symmetric_eigenvalues(Mat s) {
    int n = s.rows();
    if (n != s.cols()) throw std::invalid_argument("symmetric_eigenvalues: not square");
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += sqr(s(p, q));
        if (off < 1e-300 || off < 1e-30 * sqr(s.frobenius_norm())) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = s(p, q);
                if (apq == 0.0) continue;
                double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double snt = t * c;
                for (int k = 0; k < n; ++k) {
                    double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - snt * skq;
                    s(k, q) = snt * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - snt * sqk;
                    s(q, k) = snt * spk + c * sqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = s(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Singular values, ascending; computed from the eigenvalues of AᵀA.
inline std::vector<double> singular_values(const Mat& a) {
    Mat ata = a.transposed() * a;
    auto ev = symmetric_eigenvalues(ata);
    for (auto& v : ev) v = std::sqrt(std::max(0.0, v));
    return ev;
}

inline double operator_norm(const Mat& a) {
    auto sv = singular_values(a);
    return sv.empty() ? 0.0 : sv.back();
}

inline double min_singular_value(const Mat& a) {
    auto sv = singular_values(a);
    return sv.empty() ? 0.0 : sv.front();
}

inline double condition_number(const Mat& a) {
    auto sv = singular_values(a);
    if (sv.empty() || sv.front() == 0.0) return std::numeric_limits<double>::infinity();
    return sv.back() / sv.front();
}

using int128 = __int128;

/// Determinant of a small integer matrix by fraction-free (Bareiss)
/// elimination; exact as long as intermediates fit in 128 bits, which holds
/// for the Vandermonde-type matrices up to dimension 6 used here.
inline int128 integer_determinant(std::vector<std::vector<int128>> m) {
    int n = static_cast<int>(m.size());
    if (n == 0) return 1;
    int128 denom = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return 0;
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / denom;
            m[i][k] = 0;
        }
        denom = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

inline double to_double(int128 v) {
    bool neg = v < 0;
    if (neg) v = -v;
    double r = 0.0;
    double scale = 1.0;
    while (v > 0) {
        r += scale * static_cast<double>(static_cast<std::uint64_t>(v & 0xffffffffull));
        v >>= 32;
        scale *= 4294967296.0;
    }
    return neg ? -r : r;
}

/// Exact adjugate-over-determinant inverse of an integer matrix, returned in
/// doubles (each entry is the ratio of two exactly computed integers).
inline Mat exact_integer_inverse(const std::vector<std::vector<long long>>& m) {
    int n = static_cast<int>(m.size());
    std::vector<std::vector<int128>> wide(n, std::vector<int128>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) wide[i][j] = m[i][j];
    int128 det = integer_determinant(wide);
    if (det == 0) throw numeric_error("exact_integer_inverse: singular matrix");
    Mat inv(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // Cofactor C_ji: minor deleting row j, column i, signed.
            std::vector<std::vector<int128>> minor;
            minor.reserve(n - 1);
            for (int r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<int128> row;
                row.reserve(n - 1);
                for (int c = 0; c < n; ++c) {
                    if (c == i) continue;
                    row.push_back(wide[r][c]);
                }
                minor.push_back(std::move(row));
            }
            int128 cof = integer_determinant(std::move(minor));
            if ((i + j) % 2 != 0) cof = -cof;
            inv(i, j) = to_double(cof) / to_double(det);
        }
    }
    return inv;
}

}  // namespace balaw
