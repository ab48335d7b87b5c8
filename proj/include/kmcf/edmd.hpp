#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kmcf/dae.hpp"

namespace kmcf::edmd {

using dae::DaeSystem;
using dae::SystemState;
using dae::Trajectory;

/// Dictionary of scalar observables gamma_l(x, y) with analytic gradients.
///
/// Gradients are total derivatives along the constraint manifold: the chain
/// rule includes dy/dx from dae::algebraic_sensitivity wherever an entry
/// depends on algebraic variables. The first n_diff entries are the state
/// coordinates themselves, so state_projection is [I 0].
struct ObservableDictionary {
    int size = 0;
    std::vector<std::string> names;
    std::function<Vec(const SystemState&)> eval;
    std::function<Mat(const SystemState&)> grad; // size x n_diff
    Mat state_projection;                        // n_diff x size

    int state_count() const { return static_cast<int>(state_projection.rows()); }
};

/// gamma(x) = x. Exact for linear systems; the baseline dictionary.
inline ObservableDictionary build_dictionary_identity(const DaeSystem& sys) {
    ObservableDictionary dict;
    dict.size = sys.n_diff;
    dict.names = sys.x_names;
    if (dict.names.empty())
        for (int i = 0; i < sys.n_diff; ++i) dict.names.push_back("x" + std::to_string(i + 1));
    const int n = sys.n_diff;
    dict.eval = [](const SystemState& s) { return s.x; };
    dict.grad = [n](const SystemState&) { return Mat::Identity(n, n); };
    dict.state_projection = Mat::Identity(n, n);
    return dict;
}

/// The 22-entry dictionary for the AC/MTDC model: the 12 states plus
/// products of {1, omega, eq'} with cos/sin of (delta - theta1) and its
/// second harmonic. theta1 is algebraic, so every trig gradient carries the
/// implicit -dtheta1/dx term.
inline ObservableDictionary build_dictionary_acmtdc(const DaeSystem& sys) {
    auto index_of = [](const std::vector<std::string>& names, const std::string& want) {
        const auto it = std::find(names.begin(), names.end(), want);
        if (it == names.end())
            throw ValidationError("build_dictionary_acmtdc: variable '" + want +
                                  "' not found in system layout");
        return static_cast<int>(it - names.begin());
    };
    const int k_delta = index_of(sys.x_names, "delta");
    const int k_omega = index_of(sys.x_names, "omega");
    const int k_eq = index_of(sys.x_names, "eq_prime");
    const int k_theta1 = index_of(sys.y_names, "theta1");
    const int n = sys.n_diff;

    // (state factor index or -1, harmonic, use_sin)
    struct Term {
        int factor;
        int harmonic;
        bool use_sin;
    };
    const std::vector<Term> terms = {
        {-1, 1, false},      {-1, 1, true},      {-1, 2, false},      {-1, 2, true},
        {k_omega, 1, false}, {k_omega, 1, true}, {k_omega, 2, false}, {k_omega, 2, true},
        {k_eq, 1, false},    {k_eq, 1, true},
    };

    ObservableDictionary dict;
    dict.size = n + static_cast<int>(terms.size());
    dict.names = sys.x_names;
    for (const auto& t : terms) {
        std::string nm = t.factor < 0 ? "" : sys.x_names[static_cast<std::size_t>(t.factor)] + "*";
        nm += t.use_sin ? "sin" : "cos";
        nm += t.harmonic == 1 ? "(delta-theta1)" : "(2(delta-theta1))";
        dict.names.push_back(nm);
    }

    dict.eval = [=](const SystemState& s) {
        Vec g(n + static_cast<int>(terms.size()));
        g.head(n) = s.x;
        const double angle = s.x[k_delta] - s.y[k_theta1];
        int row = n;
        for (const auto& t : terms) {
            const double base = t.use_sin ? std::sin(t.harmonic * angle) : std::cos(t.harmonic * angle);
            const double factor = t.factor < 0 ? 1.0 : s.x[t.factor];
            g[row++] = factor * base;
        }
        return g;
    };

    dict.grad = [=](const SystemState& s) {
        Mat g = Mat::Zero(n + static_cast<Eigen::Index>(terms.size()), n);
        g.topLeftCorner(n, n).setIdentity();
        const Mat sens = dae::algebraic_sensitivity(sys, s); // dy/dx
        const double angle = s.x[k_delta] - s.y[k_theta1];
        // d(delta - theta1)/dx_k
        Vec dangle = -sens.row(k_theta1).transpose();
        dangle[k_delta] += 1.0;
        int row = n;
        for (const auto& t : terms) {
            const double trig = t.use_sin ? std::sin(t.harmonic * angle) : std::cos(t.harmonic * angle);
            const double dtrig = t.use_sin ? t.harmonic * std::cos(t.harmonic * angle)
                                           : -t.harmonic * std::sin(t.harmonic * angle);
            const double factor = t.factor < 0 ? 1.0 : s.x[t.factor];
            g.row(row) = factor * dtrig * dangle.transpose();
            if (t.factor >= 0) g(row, t.factor) += trig;
            ++row;
        }
        return g;
    };

    dict.state_projection = Mat::Zero(n, dict.size);
    dict.state_projection.topLeftCorner(n, n).setIdentity();
    return dict;
}

/// Snapshot matrices for the EDMD fit. Row k of gamma_next is the dictionary
/// image of the successor of row k of gamma, always within one trajectory.
struct SnapshotPairs {
    Mat gamma;
    Mat gamma_next;
    double dt = 0.0;
    Eigen::Index count = 0;
};

inline SnapshotPairs assemble_snapshots(const std::vector<Trajectory>& trajectories,
                                        const ObservableDictionary& dict) {
    if (trajectories.empty()) throw ValidationError("assemble_snapshots: no trajectories");
    const double dt = trajectories.front().dt;
    Eigen::Index pairs = 0;
    for (const auto& traj : trajectories) {
        if (traj.size() < 2) continue;
        if (std::abs(traj.dt - dt) > 1e-12 * std::max(1.0, std::abs(dt)))
            throw ValidationError("assemble_snapshots: trajectories disagree on dt");
        pairs += static_cast<Eigen::Index>(traj.size()) - 1;
    }
    if (pairs == 0) throw ValidationError("assemble_snapshots: no snapshot pairs");

    SnapshotPairs out;
    out.dt = dt;
    out.count = pairs;
    out.gamma.resize(pairs, dict.size);
    out.gamma_next.resize(pairs, dict.size);
    Eigen::Index row = 0;
    for (const auto& traj : trajectories) {
        if (traj.size() < 2) continue;
        Vec current = dict.eval(traj.states.front());
        for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
            const Vec next = dict.eval(traj.states[k + 1]);
            out.gamma.row(row) = current.transpose();
            out.gamma_next.row(row) = next.transpose();
            current = next;
            ++row;
        }
    }
    return out;
}

struct FitDiagnostics {
    Eigen::Index rank = 0;
    Eigen::Index dictionary_size = 0;
    bool rank_deficient = false;
    bool underdetermined = false; // fewer pairs than observables
};

/// Least-squares Koopman matrix: K = argmin |gamma K - gamma_next|_F.
/// Convention: row vectors propagate, gamma(x_{k+1})^T = gamma(x_k)^T K.
inline Mat fit_operator(const SnapshotPairs& pairs, double rank_tol = 1e-10,
                        FitDiagnostics* diag = nullptr) {
    numerics::LstsqInfo info;
    const Mat k = numerics::lstsq(pairs.gamma, pairs.gamma_next, rank_tol, &info);
    if (diag) {
        diag->rank = info.rank;
        diag->dictionary_size = pairs.gamma.cols();
        diag->rank_deficient = info.rank_deficient();
        diag->underdetermined = pairs.count < pairs.gamma.cols();
    }
    return k;
}

/// Spectral content of a fitted Koopman matrix.
///
/// With the row-propagation convention the propagation matrix on column
/// observable vectors is K^T: gamma(x_{k+1}) = K^T gamma(x_k). Eigenfunction
/// coefficients u_j therefore satisfy K u_j = mu_j u_j (phi_j = u_j^T gamma
/// is then an eigenfunction), the mode-generating vectors xi_j satisfy
/// K^T xi_j = mu_j xi_j, pairs are normalized u_j^T xi_k = delta_jk, and the
/// Koopman modes are V_j = B xi_j.
struct KoopmanDecomposition {
    double dt = 0.0;
    CVec mu;                      // discrete-time eigenvalues
    CVec lambda;                  // continuous: ln(mu)/dt, principal branch
    CMat u;                       // size x modes, eigenfunction coefficients
    CMat xi;                      // size x modes, right eigenvectors of K^T
    CMat modes;                   // n_diff x modes, V_j
    std::vector<bool> aliasing_suspect;
    ObservableDictionary dict;

    Eigen::Index mode_count() const { return mu.size(); }
};

inline KoopmanDecomposition decompose(const Mat& koopman, double dt,
                                      const ObservableDictionary& dict) {
    if (koopman.rows() != koopman.cols())
        throw ValidationError("decompose: Koopman matrix must be square");
    if (koopman.rows() != dict.size)
        throw ValidationError("decompose: matrix size disagrees with dictionary");
    if (dt <= 0) throw ValidationError("decompose: dt must be > 0");

    // eig_general(K^T): right vectors are xi, left vectors (transpose sense)
    // are the u_j, already scaled so u_j^T xi_k = delta_jk.
    const auto es = numerics::eig_general(koopman.transpose());

    // Sort by |mu| descending, ties by imaginary part descending.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(es.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ma = std::abs(es.values[a]), mb = std::abs(es.values[b]);
        if (ma != mb) return ma > mb;
        return es.values[a].imag() > es.values[b].imag();
    });

    KoopmanDecomposition dec;
    dec.dt = dt;
    dec.dict = dict;
    const Eigen::Index m = es.size();
    dec.mu.resize(m);
    dec.lambda.resize(m);
    dec.u.resize(m, m);
    dec.xi.resize(m, m);
    dec.aliasing_suspect.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        const Complex mu = es.values[src];
        dec.mu[j] = mu;
        const double mag = std::max(std::abs(mu), 1e-300);
        dec.lambda[j] = Complex(std::log(mag) / dt, std::arg(mu) / dt);
        dec.u.col(j) = es.left.col(src);
        dec.xi.col(j) = es.right.col(src);
        dec.aliasing_suspect[static_cast<std::size_t>(j)] =
            std::abs(std::arg(mu)) > 0.9 * M_PI;
    }
    dec.modes = dict.state_projection * dec.xi;
    return dec;
}

inline void check_mode_index(const KoopmanDecomposition& dec, Eigen::Index j) {
    if (j < 0 || j >= dec.mode_count())
        throw ValidationError("mode index " + std::to_string(j) + " out of range (have " +
                              std::to_string(dec.mode_count()) + ")");
}

/// phi_j(x) = u_j^T gamma(x), with y taken from the consistent state.
inline Complex evaluate_eigenfunction(const KoopmanDecomposition& dec, Eigen::Index j,
                                      const SystemState& state) {
    check_mode_index(dec, j);
    const Vec gamma = dec.dict.eval(state);
    return (dec.u.col(j).transpose() * gamma.cast<Complex>())(0, 0);
}

/// Gradient of phi_j with respect to the differential variables:
/// k-th entry is sum_l u_{j,l} dgamma_l/dx_k at the given state.
inline CVec grad_eigenfunction(const KoopmanDecomposition& dec, Eigen::Index j,
                               const SystemState& state) {
    check_mode_index(dec, j);
    const Mat g = dec.dict.grad(state);
    return g.transpose().cast<Complex>() * dec.u.col(j);
}

/// KMD evaluation sum_j e^{lambda_j t} phi_j(x0) V_j (real part).
/// The imaginary residue is small for conjugate-closed spectra; pass
/// imag_residue to observe it.
inline Vec reconstruct(const KoopmanDecomposition& dec, const SystemState& x0_state, double t,
                       double* imag_residue = nullptr) {
    if (t < 0) throw ValidationError("reconstruct: t must be >= 0");
    const Vec gamma = dec.dict.eval(x0_state);
    const CVec phi0 = dec.u.transpose() * gamma.cast<Complex>();
    CVec amp(dec.mode_count());
    for (Eigen::Index j = 0; j < dec.mode_count(); ++j)
        amp[j] = std::exp(dec.lambda[j] * t) * phi0[j];
    const CVec x = dec.modes * amp;
    if (imag_residue) *imag_residue = x.imag().cwiseAbs().maxCoeff();
    return x.real();
}

/// Relative deviation of phi_j along a trajectory from its semigroup law:
/// max_k |phi_j(x(t_k)) - e^{lambda_j t_k} phi_j(x(0))| / max_k |phi_j(x(t_k))|.
inline double temporal_invariant_deviation(const KoopmanDecomposition& dec, Eigen::Index j,
                                           const Trajectory& traj) {
    check_mode_index(dec, j);
    if (traj.size() == 0) throw ValidationError("temporal_invariant_deviation: empty trajectory");
    const Complex phi0 = evaluate_eigenfunction(dec, j, traj.states.front());
    double max_dev = 0.0;
    double max_phi = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Complex phi = evaluate_eigenfunction(dec, j, traj.states[k]);
        const Complex predicted = std::exp(dec.lambda[j] * traj.times[k]) * phi0;
        max_dev = std::max(max_dev, std::abs(phi - predicted));
        max_phi = std::max(max_phi, std::abs(phi));
    }
    return max_phi > 0.0 ? max_dev / max_phi : max_dev;
}

// ---------------------------------------------------------------------------
// JSON interchange for decompositions. The dictionary itself (closures) is
// not serializable; loading re-attaches one built for the same model.

using Json = nlohmann::ordered_json;

inline Json complex_to_json(const Complex& z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Complex complex_from_json(const Json& j) {
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

inline Json to_json(const KoopmanDecomposition& dec) {
    Json doc;
    doc["dt"] = dec.dt;
    doc["observable_count"] = dec.u.rows();
    doc["state_count"] = dec.modes.rows();
    doc["mode_count"] = dec.mode_count();
    doc["observable_names"] = dec.dict.names;
    Json modes = Json::array();
    for (Eigen::Index j = 0; j < dec.mode_count(); ++j) {
        Json mode;
        mode["mu"] = complex_to_json(dec.mu[j]);
        mode["lambda"] = complex_to_json(dec.lambda[j]);
        mode["aliasing_suspect"] = static_cast<bool>(dec.aliasing_suspect[static_cast<std::size_t>(j)]);
        Json u = Json::array(), xi = Json::array(), v = Json::array();
        for (Eigen::Index i = 0; i < dec.u.rows(); ++i) {
            u.push_back(complex_to_json(dec.u(i, j)));
            xi.push_back(complex_to_json(dec.xi(i, j)));
        }
        for (Eigen::Index i = 0; i < dec.modes.rows(); ++i)
            v.push_back(complex_to_json(dec.modes(i, j)));
        mode["u"] = std::move(u);
        mode["xi"] = std::move(xi);
        mode["V"] = std::move(v);
        modes.push_back(std::move(mode));
    }
    doc["modes"] = std::move(modes);
    return doc;
}

inline KoopmanDecomposition decomposition_from_json(const Json& doc,
                                                    const ObservableDictionary& dict) {
    KoopmanDecomposition dec;
    try {
        dec.dt = doc.at("dt").get<double>();
        const auto m = doc.at("observable_count").get<Eigen::Index>();
        const auto n = doc.at("state_count").get<Eigen::Index>();
        const auto count = doc.at("mode_count").get<Eigen::Index>();
        if (m != dict.size)
            throw ValidationError("decomposition JSON: observable count " + std::to_string(m) +
                                  " does not match dictionary size " + std::to_string(dict.size));
        dec.dict = dict;
        dec.mu.resize(count);
        dec.lambda.resize(count);
        dec.u.resize(m, count);
        dec.xi.resize(m, count);
        dec.modes.resize(n, count);
        dec.aliasing_suspect.resize(static_cast<std::size_t>(count));
        const auto& modes = doc.at("modes");
        if (static_cast<Eigen::Index>(modes.size()) != count)
            throw ValidationError("decomposition JSON: mode array size mismatch");
        for (Eigen::Index j = 0; j < count; ++j) {
            const auto& mode = modes.at(static_cast<std::size_t>(j));
            dec.mu[j] = complex_from_json(mode.at("mu"));
            dec.lambda[j] = complex_from_json(mode.at("lambda"));
            dec.aliasing_suspect[static_cast<std::size_t>(j)] =
                mode.at("aliasing_suspect").get<bool>();
            for (Eigen::Index i = 0; i < m; ++i) {
                dec.u(i, j) = complex_from_json(mode.at("u").at(static_cast<std::size_t>(i)));
                dec.xi(i, j) = complex_from_json(mode.at("xi").at(static_cast<std::size_t>(i)));
            }
            for (Eigen::Index i = 0; i < n; ++i)
                dec.modes(i, j) = complex_from_json(mode.at("V").at(static_cast<std::size_t>(i)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("decomposition JSON: ") + e.what());
    }
    return dec;
}

} // namespace kmcf::edmd
