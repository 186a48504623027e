#include <doctest.h>

#include <cmath>

#include "balaw/common.hpp"
#include "balaw/linalg.hpp"

using namespace balaw;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("lu solve and determinant on small systems") {
    Mat a(2, 2);
    a(0, 0) = 2;  a(0, 1) = 1;
    a(1, 0) = 1;  a(1, 1) = 3;
    Lu lu(a);
    CHECK(lu.determinant() == doctest::Approx(5.0));
    std::vector<double> b{5.0, 10.0};
    auto x = lu.solve(b);
    CHECK(x[0] == doctest::Approx(1.0));  // 2x + y = 5, x + 3y = 10
    CHECK(x[1] == doctest::Approx(3.0));

    Mat sing(2, 2);
    sing(0, 0) = 1; sing(0, 1) = 2;
    sing(1, 0) = 2; sing(1, 1) = 4;
    CHECK(Lu(sing).singular());
    CHECK(Lu(sing).determinant() == 0.0);
}

TEST_CASE("iterative refinement keeps residuals small on graded systems") {
    // Columns scaled by powers of 1e-3: condition around 1e12.
    int n = 5;
    Rng rng(11);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = (rng.unit() - 0.5) * std::pow(1e-3, j);
    std::vector<double> x_true(n);
    for (auto& v : x_true) v = rng.uniform(-1, 1);
    auto b = a * x_true;
    auto x = solve_refined(a, b);
    CHECK(residual_norm(a, x, b) <= 1e-13 * norm2(b) + 1e-300);
}

TEST_CASE("jacobi eigenvalues of a known symmetric matrix") {
    Mat s(2, 2);
    s(0, 0) = 2; s(0, 1) = 1;
    s(1, 0) = 1; s(1, 1) = 2;
    auto ev = symmetric_eigenvalues(s);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));
}

TEST_CASE("singular values of an orthogonally scaled matrix") {
    // A = R(theta) * diag(3, 1/2): singular values are exactly {1/2, 3}.
    double c = std::cos(0.7), s = std::sin(0.7);
    Mat a(2, 2);
    a(0, 0) = 3 * c;  a(0, 1) = -0.5 * s;
    a(1, 0) = 3 * s;  a(1, 1) = 0.5 * c;
    auto sv = singular_values(a);
    CHECK(sv[0] == doctest::Approx(0.5));
    CHECK(sv[1] == doctest::Approx(3.0));
    CHECK(operator_norm(a) == doctest::Approx(3.0));
    CHECK(min_singular_value(a) == doctest::Approx(0.5));
    CHECK(condition_number(a) == doctest::Approx(6.0));
}

TEST_CASE("operator norm of the inverse 2x2 node matrix at h=1") {
    // [[4,-4],[-1,2]]: Frobenius norm sqrt(37); the operator norm lies in
    // [sqrt(37)/sqrt(2), sqrt(37)].
    Mat m(2, 2);
    m(0, 0) = 4;  m(0, 1) = -4;
    m(1, 0) = -1; m(1, 1) = 2;
    double frob = m.frobenius_norm();
    CHECK(frob == doctest::Approx(std::sqrt(37.0)));
    double op = operator_norm(m);
    CHECK(op <= frob * (1 + 1e-12));
    CHECK(op >= frob / std::sqrt(2.0) * (1 - 1e-12));
}

TEST_CASE("norm equivalence and transpose invariance on random matrices") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.below(4));
        Mat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-2, 2);
        double op = operator_norm(a), fr = a.frobenius_norm();
        CHECK(op <= fr * (1 + 1e-10));
        CHECK(fr <= std::sqrt(static_cast<double>(n)) * op * (1 + 1e-10));
        auto sv = singular_values(a);
        auto svt = singular_values(a.transposed());
        for (std::size_t k = 0; k < sv.size(); ++k)
            CHECK(sv[k] == doctest::Approx(svt[k]).epsilon(1e-9));
    }
}

TEST_CASE("exact integer determinants and inverse") {
    Mat inv = exact_integer_inverse({{2, 1}, {1, 1}});
    CHECK(inv(0, 0) == 1.0);
    CHECK(inv(0, 1) == -1.0);
    CHECK(inv(1, 0) == -1.0);
    CHECK(inv(1, 1) == 2.0);

    std::vector<std::vector<int128>> m{{3, 8}, {4, 6}};
    CHECK(to_double(integer_determinant(m)) == -14.0);
}

TEST_CASE("matrix inverse round trip") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng.below(5));
        Mat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1) + (i == j ? 3.0 : 0.0);
        Mat prod = a * inverse(a);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
}

TEST_SUITE_END();
