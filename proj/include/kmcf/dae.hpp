#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmcf/numerics.hpp"
#include "kmcf/text.hpp"

namespace kmcf::dae {

using numerics::finite_diff_jacobian;

/// Semi-explicit index-1 DAE:  x' = F(x, y),  0 = G(x, y).
///
/// Analytic Jacobian blocks are optional; absent blocks fall back to central
/// finite differences with componentwise step 1e-6 * max(1, |x_i|).
struct DaeSystem {
    using RhsFn = std::function<Vec(const Vec&, const Vec&)>;
    using BlockFn = std::function<Mat(const Vec&, const Vec&)>;

    int n_diff = 0;
    int n_alg = 0;
    RhsFn F;
    RhsFn G; // unused when n_alg == 0
    BlockFn dF_dx, dF_dy, dG_dx, dG_dy;
    std::vector<std::string> x_names;
    std::vector<std::string> y_names;

    static constexpr double kFdStep = 1e-6;

    Mat jac_F_x(const Vec& x, const Vec& y) const {
        if (dF_dx) return dF_dx(x, y);
        return finite_diff_jacobian([&](const Vec& xv) { return F(xv, y); }, x, kFdStep);
    }
    Mat jac_F_y(const Vec& x, const Vec& y) const {
        if (n_alg == 0) return Mat::Zero(n_diff, 0);
        if (dF_dy) return dF_dy(x, y);
        return finite_diff_jacobian([&](const Vec& yv) { return F(x, yv); }, y, kFdStep);
    }
    Mat jac_G_x(const Vec& x, const Vec& y) const {
        if (n_alg == 0) return Mat::Zero(0, n_diff);
        if (dG_dx) return dG_dx(x, y);
        return finite_diff_jacobian([&](const Vec& xv) { return G(xv, y); }, x, kFdStep);
    }
    Mat jac_G_y(const Vec& x, const Vec& y) const {
        if (n_alg == 0) return Mat::Zero(0, 0);
        if (dG_dy) return dG_dy(x, y);
        return finite_diff_jacobian([&](const Vec& yv) { return G(x, yv); }, y, kFdStep);
    }
};

struct SystemState {
    Vec x;
    Vec y;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SystemState> states;
    double dt = 0.0;

    std::size_t size() const { return states.size(); }
};

struct Equilibrium {
    Vec x;
    Vec y;
    double residual = 0.0;
};

struct SolveOptions {
    double newton_tol = 1e-12;
    int max_iter = 50;
    double consistency_tol = 1e-10;
    int substeps = 1; // internal RK4 steps per emitted sample
};

/// Solve G(x, y) = 0 for y at fixed x (Newton, warm-started from y_guess).
/// Throws RegularityError when dG/dy is singular at an iterate, and
/// ConvergenceError when the iteration stalls.
inline Vec solve_algebraic(const DaeSystem& sys, const Vec& x, const Vec& y_guess,
                           double tol = 1e-12, int max_iter = 50) {
    if (sys.n_alg == 0) return Vec();
    Vec y = y_guess;
    Vec r = sys.G(x, y);
    for (int it = 0; it < max_iter; ++it) {
        if (!r.allFinite())
            throw NumericalError("solve_algebraic: non-finite constraint residual");
        if (r.lpNorm<Eigen::Infinity>() <= tol) return y;
        Eigen::FullPivLU<Mat> lu(sys.jac_G_y(x, y));
        if (!lu.isInvertible())
            throw RegularityError("solve_algebraic: singular dG/dy (regularity violation)");
        y -= lu.solve(r);
        r = sys.G(x, y);
    }
    if (r.lpNorm<Eigen::Infinity>() <= tol) return y;
    throw ConvergenceError("solve_algebraic: Newton stalled, |G| = " +
                               text::format_full(r.lpNorm<Eigen::Infinity>()),
                           to_std(y), r.lpNorm<Eigen::Infinity>());
}

inline bool is_consistent(const DaeSystem& sys, const SystemState& s, double tol = 1e-10) {
    if (sys.n_alg == 0) return true;
    return sys.G(s.x, s.y).lpNorm<Eigen::Infinity>() <= tol;
}

/// Fixed-step half-explicit RK4: every stage re-solves the algebraic
/// constraint at the stage abscissa, warm-started from the previous stage.
/// Emitted samples are spaced exactly dt apart; opts.substeps internal steps
/// are taken per sample for stiff systems.
inline Trajectory integrate(const DaeSystem& sys, const SystemState& initial, double dt,
                            int steps, const SolveOptions& opts = {}) {
    if (dt <= 0) throw ValidationError("integrate: dt must be > 0");
    if (steps < 0) throw ValidationError("integrate: steps must be >= 0");
    if (opts.substeps < 1) throw ValidationError("integrate: substeps must be >= 1");
    if (initial.x.size() != sys.n_diff)
        throw ValidationError("integrate: initial state has wrong differential dimension");
    if (!is_consistent(sys, initial, opts.consistency_tol))
        throw ValidationError("integrate: initial state violates the algebraic constraint");

    Trajectory traj;
    traj.dt = dt;
    traj.times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(initial);

    const double h = dt / opts.substeps;
    Vec x = initial.x;
    Vec y = initial.y;

    auto stage_y = [&](const Vec& xs, const Vec& warm, double t_fail) {
        try {
            return solve_algebraic(sys, xs, warm, opts.newton_tol, opts.max_iter);
        } catch (const RegularityError& e) {
            throw RegularityError(std::string(e.what()) + " at t = " + text::format_full(t_fail));
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(e.what()) + " at t = " + text::format_full(t_fail),
                                   e.last_iterate, e.residual);
        }
    };

    for (int k = 0; k < steps; ++k) {
        const double t0 = k * dt;
        for (int s = 0; s < opts.substeps; ++s) {
            const double t = t0 + s * h;
            const Vec k1 = sys.F(x, y);
            const Vec x2 = x + 0.5 * h * k1;
            const Vec y2 = stage_y(x2, y, t);
            const Vec k2 = sys.F(x2, y2);
            const Vec x3 = x + 0.5 * h * k2;
            const Vec y3 = stage_y(x3, y2, t);
            const Vec k3 = sys.F(x3, y3);
            const Vec x4 = x + h * k3;
            const Vec y4 = stage_y(x4, y3, t);
            const Vec k4 = sys.F(x4, y4);
            x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            y = stage_y(x, y4, t + h);
            if (!x.allFinite())
                throw NumericalError("integrate: state diverged at t = " + text::format_full(t + h));
        }
        traj.times.push_back((k + 1) * dt);
        traj.states.push_back({x, y});
    }
    return traj;
}

/// Newton on the stacked residual [F; G] over (x, y).
inline Equilibrium find_equilibrium(const DaeSystem& sys, const SystemState& guess,
                                    double tol = 1e-12, int max_iter = 50) {
    const int n = sys.n_diff, m = sys.n_alg;
    Vec z(n + m);
    z.head(n) = guess.x;
    if (m > 0) z.tail(m) = guess.y;

    auto residual = [&](const Vec& zv) {
        Vec r(n + m);
        const Vec x = zv.head(n), y = zv.tail(m);
        r.head(n) = sys.F(x, y);
        if (m > 0) r.tail(m) = sys.G(x, y);
        return r;
    };
    auto jacobian = [&](const Vec& zv) {
        const Vec x = zv.head(n), y = zv.tail(m);
        Mat j(n + m, n + m);
        j.topLeftCorner(n, n) = sys.jac_F_x(x, y);
        if (m > 0) {
            j.topRightCorner(n, m) = sys.jac_F_y(x, y);
            j.bottomLeftCorner(m, n) = sys.jac_G_x(x, y);
            j.bottomRightCorner(m, m) = sys.jac_G_y(x, y);
        }
        return j;
    };

    const Vec sol = numerics::newton_solve(residual, jacobian, z, tol, max_iter);
    Equilibrium eq;
    eq.x = sol.head(n);
    eq.y = sol.tail(m);
    eq.residual = residual(sol).lpNorm<Eigen::Infinity>();
    return eq;
}

/// Reduced state matrix A = A1 - A2 A4^{-1} A3 of the linearized DAE at an
/// equilibrium (A1 = dF/dx, A2 = dF/dy, A3 = dG/dx, A4 = dG/dy).
inline Mat linearize(const DaeSystem& sys, const Equilibrium& eq) {
    const Mat a1 = sys.jac_F_x(eq.x, eq.y);
    if (sys.n_alg == 0) return a1;
    const Mat a2 = sys.jac_F_y(eq.x, eq.y);
    const Mat a3 = sys.jac_G_x(eq.x, eq.y);
    const Mat a4 = sys.jac_G_y(eq.x, eq.y);
    Eigen::FullPivLU<Mat> lu(a4);
    if (!lu.isInvertible())
        throw RegularityError("linearize: singular dG/dy at the equilibrium");
    return a1 - a2 * lu.solve(a3);
}

/// Sensitivity of the constraint manifold: dy/dx = -(dG/dy)^{-1} dG/dx.
inline Mat algebraic_sensitivity(const DaeSystem& sys, const SystemState& state) {
    if (sys.n_alg == 0) return Mat::Zero(0, sys.n_diff);
    Eigen::FullPivLU<Mat> lu(sys.jac_G_y(state.x, state.y));
    if (!lu.isInvertible())
        throw RegularityError("algebraic_sensitivity: singular dG/dy");
    return -lu.solve(sys.jac_G_x(state.x, state.y));
}

// ---------------------------------------------------------------------------
// Trajectory CSV interchange: header `t,<x names...>,<y names...>`, one row
// per sample, full-precision decimals.

inline void export_trajectory_csv(const Trajectory& traj, const std::vector<std::string>& x_names,
                                  const std::vector<std::string>& y_names, std::ostream& out) {
    out << "t";
    for (const auto& n : x_names) out << ',' << n;
    for (const auto& n : y_names) out << ',' << n;
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << text::format_full(traj.times[k]);
        const auto& s = traj.states[k];
        for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ',' << text::format_full(s.x[i]);
        for (Eigen::Index i = 0; i < s.y.size(); ++i) out << ',' << text::format_full(s.y[i]);
        out << '\n';
    }
}

inline void export_trajectory_csv(const Trajectory& traj, const DaeSystem& sys,
                                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    export_trajectory_csv(traj, sys.x_names, sys.y_names, out);
}

struct ImportedTrajectory {
    Trajectory trajectory;
    std::vector<std::string> x_names;
    std::vector<std::string> y_names;
};

/// Parse a trajectory CSV. n_diff tells the reader where the differential
/// block ends; the remaining columns are algebraic. Malformed content is
/// reported with file and line.
inline ImportedTrajectory import_trajectory_csv(std::istream& in, int n_diff,
                                                const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(name + ": empty file");
    auto header = text::split(text::trim(line), ',');
    if (header.size() < static_cast<std::size_t>(n_diff) + 1 || header[0] != "t")
        throw ValidationError(name + ":1: bad header, expected `t,<x...>,<y...>`");

    ImportedTrajectory out;
    const int total = static_cast<int>(header.size()) - 1;
    const int n_alg = total - n_diff;
    if (n_alg < 0) throw ValidationError(name + ":1: fewer columns than differential variables");
    out.x_names.assign(header.begin() + 1, header.begin() + 1 + n_diff);
    out.y_names.assign(header.begin() + 1 + n_diff, header.end());

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        const auto cells = text::split(trimmed, ',');
        if (cells.size() != header.size())
            throw ValidationError(name + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " columns, got " +
                                  std::to_string(cells.size()));
        const std::string ctx = name + ":" + std::to_string(lineno);
        out.trajectory.times.push_back(text::parse_double(cells[0], ctx));
        SystemState s;
        s.x.resize(n_diff);
        s.y.resize(n_alg);
        for (int i = 0; i < n_diff; ++i) s.x[i] = text::parse_double(cells[1 + i], ctx);
        for (int i = 0; i < n_alg; ++i) s.y[i] = text::parse_double(cells[1 + n_diff + i], ctx);
        out.trajectory.states.push_back(std::move(s));
    }
    if (out.trajectory.times.size() < 1) throw ValidationError(name + ": no samples");
    if (out.trajectory.times.size() >= 2) {
        const double dt = out.trajectory.times[1] - out.trajectory.times[0];
        for (std::size_t k = 1; k < out.trajectory.times.size(); ++k) {
            const double step = out.trajectory.times[k] - out.trajectory.times[k - 1];
            if (step <= 0 || std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
                throw ValidationError(name + ":" + std::to_string(k + 2) +
                                      ": non-uniform or non-increasing time stamps");
        }
        out.trajectory.dt = dt;
    }
    return out;
}

inline ImportedTrajectory import_trajectory_csv(const std::string& path, int n_diff) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open trajectory CSV: " + path);
    return import_trajectory_csv(in, n_diff, path);
}

} // namespace kmcf::dae
