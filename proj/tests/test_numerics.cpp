#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <random>

#include "kmcf/numerics.hpp"

using namespace kmcf;
using namespace kmcf::numerics;

namespace {

// Test-local oracle: Newton root finder for a scalar polynomial, independent
// of the eigensolver under test.
double poly_root(const std::vector<double>& coeffs, double start) {
    double z = start;
    for (int it = 0; it < 100; ++it) {
        double p = 0.0, dp = 0.0;
        for (double c : coeffs) {
            dp = dp * z + p;
            p = p * z + c;
        }
        if (std::abs(p) < 1e-14) return z;
        z -= p / dp;
    }
    return z;
}

bool contains_value(const CVec& values, Complex target, double tol) {
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (std::abs(values[i] - target) < tol) return true;
    return false;
}

Mat random_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
    return a;
}

} // namespace

TEST_CASE("eig_general: diagonal matrix") {
    Mat a = Mat::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const auto sys = eig_general(a);
    REQUIRE(contains_value(sys.values, {-1.0, 0.0}, 1e-12));
    REQUIRE(contains_value(sys.values, {-2.0, 0.0}, 1e-12));
    // Right vectors are the standard basis up to scale.
    for (Eigen::Index j = 0; j < 2; ++j) {
        const Eigen::Index which = std::abs(sys.values[j].real() + 1.0) < 1e-9 ? 0 : 1;
        CVec v = sys.right.col(j);
        v /= v(which);
        REQUIRE(std::abs(v(1 - which)) < 1e-12);
    }
}

TEST_CASE("eig_general: rotation matrix has +/- i") {
    Mat a(2, 2);
    a << 0, 1, -1, 0;
    const auto sys = eig_general(a);
    REQUIRE(contains_value(sys.values, {0.0, 1.0}, 1e-12));
    REQUIRE(contains_value(sys.values, {0.0, -1.0}, 1e-12));
}

TEST_CASE("eig_general: companion matrix against independent root-finding") {
    // p(z) = z^2 + 3z + 2, companion in controllable form.
    const double r1 = poly_root({1.0, 3.0, 2.0}, -0.5);
    const double r2 = poly_root({1.0, 3.0, 2.0}, -3.5);
    REQUIRE(r1 == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(r2 == Catch::Approx(-2.0).margin(1e-12));

    Mat a(2, 2);
    a << 0, 1, -2, -3;
    const auto sys = eig_general(a);
    REQUIRE(contains_value(sys.values, {r1, 0.0}, 1e-10));
    REQUIRE(contains_value(sys.values, {r2, 0.0}, 1e-10));
}

TEST_CASE("eig_general: rejects non-square input") {
    REQUIRE_THROWS_AS(eig_general(Mat::Zero(2, 3)), ValidationError);
}

TEST_CASE("eig_general: residuals, biorthonormality and conjugate closure on random matrices") {
    std::mt19937 rng(20240811);
    for (int n : {2, 5, 10, 25, 50}) {
        const Mat a = random_matrix(n, rng);
        const auto sys = eig_general(a);
        const double scale = a.norm();

        // Residual bounds for right and (transpose-sense) left pairs.
        for (Eigen::Index j = 0; j < n; ++j) {
            const CVec xi = sys.right.col(j);
            const CVec u = sys.left.col(j);
            REQUIRE((a * xi - sys.values[j] * xi).norm() <= 1e-8 * scale * xi.norm());
            REQUIRE((a.transpose() * u - sys.values[j] * u).norm() <= 1e-8 * scale * u.norm());
        }

        // Conjugate closure.
        for (Eigen::Index j = 0; j < n; ++j)
            REQUIRE(contains_value(sys.values, std::conj(sys.values[j]), 1e-8 * scale));

        // Biorthonormality whenever the spectrum is well separated.
        double min_gap = std::numeric_limits<double>::max();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                min_gap = std::min(min_gap, std::abs(sys.values[i] - sys.values[j]));
        if (min_gap > 1e-6 * scale) {
            const CMat gram = sys.left.transpose() * sys.right;
            REQUIRE((gram - CMat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("lstsq: identity and mean") {
    Mat b(3, 2);
    b << 1, 2, 3, 4, 5, 6;
    REQUIRE((lstsq(Mat::Identity(3, 3), b) - b).norm() < 1e-14);

    Mat a(2, 1), rhs(2, 1);
    a << 1, 1;
    rhs << 0, 2;
    const Mat x = lstsq(a, rhs);
    REQUIRE(x(0, 0) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("lstsq: reproduces exact solutions on full-rank systems") {
    std::mt19937 rng(7);
    std::normal_distribution<double> dist;
    Mat a(5, 3), x0(3, 2);
    for (int i = 0; i < a.size(); ++i) a(i / 3, i % 3) = dist(rng);
    for (int i = 0; i < x0.size(); ++i) x0(i / 2, i % 2) = dist(rng);
    const Mat x = lstsq(a, a * x0);
    REQUIRE((x - x0).norm() <= 1e-10);
    REQUIRE((x - x0).norm() <= 1e-8 * x0.norm());
}

TEST_CASE("lstsq: rank truncation keeps the solution bounded") {
    Mat a(2, 2);
    a << 1, 0, 0, 1e-14;
    Mat b(2, 1);
    b << 1, 1;
    LstsqInfo info;
    const Mat x = lstsq(a, b, 1e-10, &info);
    REQUIRE(info.rank == 1);
    REQUIRE(info.rank_deficient());
    REQUIRE(x.norm() < 10.0);
    REQUIRE(x(0, 0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("lstsq: dimension mismatch") {
    REQUIRE_THROWS_AS(lstsq(Mat::Zero(3, 2), Mat::Zero(4, 1)), ValidationError);
}

TEST_CASE("newton_solve: affine and classic sqrt(2)") {
    auto f1 = [](const Vec& x) { return Vec::Constant(1, x[0] - 1.0); };
    auto j1 = [](const Vec&) { return Mat::Identity(1, 1); };
    REQUIRE(newton_solve(f1, j1, Vec::Zero(1))[0] == Catch::Approx(1.0).margin(1e-12));

    int jac_calls = 0;
    auto f2 = [](const Vec& x) { return Vec::Constant(1, x[0] * x[0] - 2.0); };
    auto j2 = [&](const Vec& x) {
        ++jac_calls;
        return Mat::Constant(1, 1, 2.0 * x[0]);
    };
    const Vec root = newton_solve(f2, j2, Vec::Ones(1), 1e-12);
    REQUIRE(root[0] == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    REQUIRE(jac_calls <= 10);
}

TEST_CASE("newton_solve: 2-d circle/line intersection") {
    auto f = [](const Vec& v) {
        Vec r(2);
        r << v[0] * v[0] + v[1] * v[1] - 1.0, v[0] - v[1];
        return r;
    };
    auto j = [](const Vec& v) {
        Mat m(2, 2);
        m << 2 * v[0], 2 * v[1], 1, -1;
        return m;
    };
    Vec x0(2);
    x0 << 1, 0;
    int jac_calls = 0;
    auto counting_j = [&](const Vec& v) {
        ++jac_calls;
        return j(v);
    };
    const Vec sol = newton_solve(f, counting_j, x0, 1e-13);
    const double expected = std::sqrt(2.0) / 2.0;
    REQUIRE(sol[0] == Catch::Approx(expected).margin(1e-12));
    REQUIRE(sol[1] == Catch::Approx(expected).margin(1e-12));
    REQUIRE(jac_calls <= 10);
}

TEST_CASE("newton_solve: failure modes are distinct and carry the last iterate") {
    auto f = [](const Vec& x) { return Vec::Constant(1, x[0] * x[0] - 1.0); };
    auto j = [](const Vec& x) { return Mat::Constant(1, 1, 2.0 * x[0]); };
    REQUIRE_THROWS_AS(newton_solve(f, j, Vec::Zero(1)), SingularJacobianError);

    auto g = [](const Vec& x) { return Vec::Constant(1, x[0] * x[0] + 1.0); };
    try {
        newton_solve(g, j, Vec::Constant(1, 0.5), 1e-12, 8);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        REQUIRE(e.last_iterate.size() == 1);
        REQUIRE(e.residual > 0.0);
    }
}

TEST_CASE("finite_diff_jacobian: linear map and sine") {
    Mat a(2, 3);
    a << 1, -2, 0.5, 3, 4, -1;
    auto f = [&](const Vec& x) -> Vec { return a * x; };
    Vec x(3);
    x << 0.3, -1.2, 2.0;
    REQUIRE((finite_diff_jacobian(f, x, 1e-5) - a).cwiseAbs().maxCoeff() < 1e-9);

    auto s = [](const Vec& x) { return Vec::Constant(1, std::sin(x[0])); };
    const Mat d = finite_diff_jacobian(s, Vec::Zero(1), 1e-5);
    REQUIRE(d(0, 0) == Catch::Approx(1.0).margin(1e-9));

    REQUIRE_THROWS_AS(finite_diff_jacobian(s, Vec::Zero(1), 0.0), ValidationError);
}
