#pragma once

// Shared oracles for the test suites. These deliberately avoid the library's
// spectral code paths so that comparisons stay independent.

#include <cmath>

#include "kmcf/dae.hpp"

namespace kmcf::testing {

// Matrix exponential by scaling-and-squaring on a plain Taylor series.
inline Mat expm_taylor(Mat a) {
    int squarings = 0;
    while (a.cwiseAbs().maxCoeff() * a.rows() > 0.5) {
        a *= 0.5;
        ++squarings;
    }
    Mat result = Mat::Identity(a.rows(), a.cols());
    Mat term = Mat::Identity(a.rows(), a.cols());
    for (int k = 1; k <= 24; ++k) {
        term = term * a / double(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// Stable 3-state linear DAE with a nontrivial algebraic block. The reduced
// matrix A = A1 - A2 A4^{-1} A3 has eigenvalues {-0.5, -1 +/- 2i}.
struct LinearDaeFixture {
    Mat a1, a2, a3, a4, reduced;
    dae::DaeSystem sys;

    LinearDaeFixture() {
        // Choose the reduced matrix first, then split it so the algebraic
        // part genuinely participates: A1 = R + A2 A4^{-1} A3.
        Mat r(3, 3);
        r << -0.5, 0.3, 0.0,
              0.0, -1.0, 2.0,
              0.1, -2.0, -1.0;
        a2.resize(3, 2);
        a2 << 1.0, 0.0,
              0.5, -1.0,
              0.0, 2.0;
        a3.resize(2, 3);
        a3 << 0.4, 0.0, -0.3,
              0.0, 0.7, 0.2;
        a4.resize(2, 2);
        a4 << 2.0, 0.3,
             -0.1, 1.5;
        a1 = r + a2 * a4.inverse() * a3;
        reduced = r;

        sys.n_diff = 3;
        sys.n_alg = 2;
        const Mat a1c = a1, a2c = a2, a3c = a3, a4c = a4;
        sys.F = [a1c, a2c](const Vec& x, const Vec& y) -> Vec { return a1c * x + a2c * y; };
        sys.G = [a3c, a4c](const Vec& x, const Vec& y) -> Vec { return a3c * x + a4c * y; };
        sys.dF_dx = [a1c](const Vec&, const Vec&) { return a1c; };
        sys.dF_dy = [a2c](const Vec&, const Vec&) { return a2c; };
        sys.dG_dx = [a3c](const Vec&, const Vec&) { return a3c; };
        sys.dG_dy = [a4c](const Vec&, const Vec&) { return a4c; };
        sys.x_names = {"x1", "x2", "x3"};
        sys.y_names = {"y1", "y2"};
    }

    dae::SystemState consistent_state(const Vec& x) const {
        return {x, dae::solve_algebraic(sys, x, Vec::Zero(2))};
    }
};

// x1' = -x1, x2' = -3 x2 + x1^2: the dictionary [x1, x2, x1^2] spans an
// exactly invariant subspace with generator eigenvalues {-1, -3, -2}.
struct QuadraticClosedFixture {
    dae::DaeSystem sys;

    QuadraticClosedFixture() {
        sys.n_diff = 2;
        sys.n_alg = 0;
        sys.F = [](const Vec& x, const Vec&) {
            Vec f(2);
            f << -x[0], -3.0 * x[1] + x[0] * x[0];
            return f;
        };
        sys.x_names = {"x1", "x2"};
    }

    // Closed-form solution for comparison.
    static Vec exact(const Vec& x0, double t) {
        Vec x(2);
        x[0] = x0[0] * std::exp(-t);
        const double c = x0[0] * x0[0];
        x[1] = (x0[1] - c) * std::exp(-3.0 * t) + c * std::exp(-2.0 * t);
        return x;
    }

    static edmd::ObservableDictionary dictionary(double scale_x1sq = 1.0) {
        edmd::ObservableDictionary dict;
        dict.size = 3;
        dict.names = {"x1", "x2", "x1^2"};
        dict.eval = [scale_x1sq](const dae::SystemState& s) {
            Vec g(3);
            g << s.x[0], s.x[1], scale_x1sq * s.x[0] * s.x[0];
            return g;
        };
        dict.grad = [scale_x1sq](const dae::SystemState& s) {
            Mat g = Mat::Zero(3, 2);
            g(0, 0) = 1.0;
            g(1, 1) = 1.0;
            g(2, 0) = 2.0 * scale_x1sq * s.x[0];
            return g;
        };
        dict.state_projection = Mat::Zero(2, 3);
        dict.state_projection(0, 0) = 1.0;
        dict.state_projection(1, 1) = 1.0;
        return dict;
    }
};

} // namespace kmcf::testing
