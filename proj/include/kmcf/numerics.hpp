#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "kmcf/errors.hpp"

namespace kmcf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

namespace numerics {

/// Full eigensystem of a real square matrix.
///
/// Columns of `right` are the right eigenvectors xi_j; columns of `left` are
/// left eigenvectors u_j in the transpose sense (u_j^T A = mu_j u_j^T),
/// scaled so that u_j^T xi_k = delta_jk. The transpose pairing (rather than a
/// conjugate inner product) is what makes the modal expansion
/// A = sum_j mu_j xi_j u_j^T and the participation identity
/// sum_j u_{j,k} xi_{j,k} = 1 hold entrywise for complex pairs.
struct EigenSystem {
    CVec values;
    CMat right;
    CMat left;

    Eigen::Index size() const { return values.size(); }
};

namespace detail {

inline void require_finite(const Mat& a, const char* what) {
    if (!a.allFinite()) throw ValidationError(std::string(what) + ": non-finite entries");
}

// Deterministic mode order: descending real part, then descending imaginary
// part (conjugate pairs adjacent, + branch first).
inline std::vector<Eigen::Index> eigen_sort_order(const CVec& values) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
        return values[a].imag() > values[b].imag();
    });
    return order;
}

} // namespace detail

/// Eigendecomposition with biorthonormalized left/right pairs.
///
/// Left vectors come from eigendecomposing A^T and pairing each of its
/// eigenvectors to the nearest right eigenvalue (greedy, without replacement,
/// ties by index order), then rescaling so u_j^T xi_j = 1.
inline EigenSystem eig_general(const Mat& a) {
    if (a.rows() != a.cols()) {
        std::ostringstream msg;
        msg << "eig_general: matrix must be square, got " << a.rows() << "x" << a.cols();
        throw ValidationError(msg.str());
    }
    detail::require_finite(a, "eig_general");

    Eigen::EigenSolver<Mat> right_solver(a, /*computeEigenvectors=*/true);
    if (right_solver.info() != Eigen::Success)
        throw NumericalError("eig_general: QR iteration failed to converge");
    Eigen::EigenSolver<Mat> left_solver(a.transpose(), /*computeEigenvectors=*/true);
    if (left_solver.info() != Eigen::Success)
        throw NumericalError("eig_general: QR iteration failed to converge on transpose");

    const Eigen::Index n = a.rows();
    CVec values = right_solver.eigenvalues();
    CMat right = right_solver.eigenvectors();
    const CVec left_values = left_solver.eigenvalues();
    const CMat left_raw = left_solver.eigenvectors();

    // Pair transpose eigenvectors to right eigenvalues by nearest match.
    CMat left(n, n);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index best = -1;
        double best_dist = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            const double dist = std::abs(left_values[k] - values[j]);
            if (best < 0 || dist < best_dist) {
                best = k;
                best_dist = dist;
            }
        }
        used[static_cast<std::size_t>(best)] = true;
        left.col(j) = left_raw.col(best);
    }

    // Scale so u_j^T xi_j = 1. Near-defective pairs (vanishing product) are
    // left unscaled; the biorthonormality contract assumes distinct values.
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex d = (left.col(j).transpose() * right.col(j))(0, 0);
        if (std::abs(d) > 1e-300) left.col(j) /= d;
    }

    const auto order = detail::eigen_sort_order(values);
    EigenSystem sys;
    sys.values.resize(n);
    sys.right.resize(n, n);
    sys.left.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        sys.values[j] = values[order[static_cast<std::size_t>(j)]];
        sys.right.col(j) = right.col(order[static_cast<std::size_t>(j)]);
        sys.left.col(j) = left.col(order[static_cast<std::size_t>(j)]);
    }
    return sys;
}

struct LstsqInfo {
    Eigen::Index rank = 0;
    Eigen::Index cols = 0;
    bool rank_deficient() const { return rank < cols; }
};

/// Minimum-norm least-squares solve of A X = B via SVD, truncating singular
/// values below rank_tol * sigma_max (pseudoinverse semantics).
inline Mat lstsq(const Mat& a, const Mat& b, double rank_tol = 1e-10, LstsqInfo* info = nullptr) {
    if (a.rows() != b.rows()) {
        std::ostringstream msg;
        msg << "lstsq: row mismatch, A is " << a.rows() << "x" << a.cols() << " but B has "
            << b.rows() << " rows";
        throw ValidationError(msg.str());
    }
    if (rank_tol < 0) throw ValidationError("lstsq: rank_tol must be >= 0");
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rank_tol);
    if (info) {
        info->rank = svd.rank();
        info->cols = a.cols();
    }
    return svd.solve(b);
}

using VecFn = std::function<Vec(const Vec&)>;
using JacFn = std::function<Mat(const Vec&)>;

/// Newton iteration on f(x) = 0 with user-supplied Jacobian.
/// Convergence test is the infinity norm of f. Throws SingularJacobianError
/// or ConvergenceError carrying the last iterate.
inline Vec newton_solve(const VecFn& f, const JacFn& jac, const Vec& x0, double tol = 1e-12,
                        int max_iter = 50) {
    Vec x = x0;
    Vec r = f(x);
    if (r.size() != x.size() && jac(x).rows() != r.size())
        throw ValidationError("newton_solve: Jacobian shape inconsistent with f");
    for (int it = 0; it < max_iter; ++it) {
        if (!r.allFinite())
            throw NumericalError("newton_solve: non-finite residual at iteration " +
                                 std::to_string(it));
        if (r.lpNorm<Eigen::Infinity>() <= tol) return x;
        const Mat j = jac(x);
        Eigen::FullPivLU<Mat> lu(j);
        if (!lu.isInvertible()) {
            throw SingularJacobianError(
                "newton_solve: singular Jacobian at iteration " + std::to_string(it), to_std(x));
        }
        x -= lu.solve(r);
        r = f(x);
    }
    if (r.lpNorm<Eigen::Infinity>() <= tol) return x;
    std::ostringstream msg;
    msg << "newton_solve: no convergence after " << max_iter
        << " iterations, |f| = " << r.lpNorm<Eigen::Infinity>();
    throw ConvergenceError(msg.str(), to_std(x), r.lpNorm<Eigen::Infinity>());
}

/// Central-difference Jacobian with per-component step h * max(1, |x_i|).
inline Mat finite_diff_jacobian(const VecFn& f, const Vec& x, double h = 1e-6) {
    if (h <= 0) throw ValidationError("finite_diff_jacobian: h must be > 0");
    const Vec f0 = f(x);
    Mat jac(f0.size(), x.size());
    Vec xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + step;
        const Vec fp = f(xp);
        xp[i] = x[i] - step;
        const Vec fm = f(xp);
        xp[i] = x[i];
        jac.col(i) = (fp - fm) / (2.0 * step);
    }
    return jac;
}

} // namespace numerics
} // namespace kmcf
