#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <string>
#include <vector>

#include "kmcf/edmd.hpp"

namespace kmcf::contrib {

using dae::SystemState;
using edmd::KoopmanDecomposition;

inline std::string format_eigenvalue(const Complex& z) {
    char buf[64];
    if (z.imag() == 0.0)
        std::snprintf(buf, sizeof(buf), "%.6g", z.real());
    else
        std::snprintf(buf, sizeof(buf), "%.6g%+.6gi", z.real(), z.imag());
    return buf;
}

/// Mode-in-state contribution factors at one initial state.
/// raw(k, j) = dphi_j/dx_k (x0) * V_{j,k}; normalized rows are
/// |omega| / sum_j |omega| (all-zero rows stay zero and are flagged).
struct ContributionTable {
    std::vector<std::string> states;
    std::vector<std::string> mode_labels;
    CVec eigenvalues;
    CMat raw;        // n x modes
    Mat normalized;  // n x modes
    std::vector<bool> zero_rows;
    Vec initial_state; // empty for the linear baseline
    std::vector<std::string> warnings;
};

struct NormalizeResult {
    Mat normalized;
    std::vector<bool> zero_rows;
};

/// Row-stochastic normalization over modes, Eq.-style: |w| / sum |w|.
inline NormalizeResult normalize(const CMat& raw) {
    NormalizeResult out;
    out.normalized = Mat::Zero(raw.rows(), raw.cols());
    out.zero_rows.assign(static_cast<std::size_t>(raw.rows()), false);
    for (Eigen::Index k = 0; k < raw.rows(); ++k) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < raw.cols(); ++j) sum += std::abs(raw(k, j));
        if (sum == 0.0) {
            out.zero_rows[static_cast<std::size_t>(k)] = true;
            continue;
        }
        for (Eigen::Index j = 0; j < raw.cols(); ++j)
            out.normalized(k, j) = std::abs(raw(k, j)) / sum;
    }
    return out;
}

/// Contribution factors from a Koopman decomposition at a consistent state.
inline ContributionTable contribution_factors(const KoopmanDecomposition& dec,
                                              const SystemState& initial) {
    const Eigen::Index n = dec.modes.rows();
    const Eigen::Index m = dec.mode_count();
    ContributionTable table;
    table.states.assign(dec.dict.names.begin(), dec.dict.names.begin() + n);
    table.eigenvalues = dec.lambda;
    table.initial_state = initial.x;
    table.raw.resize(n, m);

    // One dictionary-gradient evaluation serves every mode.
    const CMat grad = dec.dict.grad(initial).transpose().cast<Complex>(); // n x size
    for (Eigen::Index j = 0; j < m; ++j) {
        const CVec dphi = grad * dec.u.col(j);
        table.raw.col(j) = dphi.cwiseProduct(dec.modes.col(j));
        table.mode_labels.push_back(format_eigenvalue(dec.lambda[j]));
    }
    auto norm = normalize(table.raw);
    table.normalized = std::move(norm.normalized);
    table.zero_rows = std::move(norm.zero_rows);
    return table;
}

/// Classical linear participation factors u_{j,k} v_{j,k} from the reduced
/// state matrix. Rows of the raw table sum to 1.
inline ContributionTable participation_factors_linear(const Mat& a,
                                                      std::vector<std::string> state_names = {}) {
    const auto es = numerics::eig_general(a);
    const Eigen::Index n = a.rows();
    ContributionTable table;
    if (state_names.empty())
        for (Eigen::Index i = 0; i < n; ++i) state_names.push_back("x" + std::to_string(i + 1));
    if (static_cast<Eigen::Index>(state_names.size()) != n)
        throw ValidationError("participation_factors_linear: state name count mismatch");
    table.states = std::move(state_names);
    table.eigenvalues = es.values;

    double min_gap = std::numeric_limits<double>::max();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            min_gap = std::min(min_gap, std::abs(es.values[i] - es.values[j]));
    if (n > 1 && min_gap <= 1e-6 * std::max(1.0, a.norm()))
        table.warnings.push_back("near-degenerate spectrum: participation factors ill-conditioned");

    table.raw.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        table.raw.col(j) = es.left.col(j).cwiseProduct(es.right.col(j));
        table.mode_labels.push_back(format_eigenvalue(es.values[j]));
    }
    auto norm = normalize(table.raw);
    table.normalized = std::move(norm.normalized);
    table.zero_rows = std::move(norm.zero_rows);
    return table;
}

// ---------------------------------------------------------------------------
// Conjugate-pair merging: bar plots usually show one bar per oscillatory
// pair. Groups are formed by matching each eigenvalue with its conjugate.

struct MergedTable {
    std::vector<std::string> states;
    std::vector<std::string> mode_labels; // one per group, Im >= 0 representative
    CVec eigenvalues;
    Mat omega_star; // n x groups, rows sum to 1 for nonzero rows
    std::vector<bool> zero_rows;
};

inline MergedTable merge_conjugate_pairs(const ContributionTable& table, double tol = 1e-8) {
    const Eigen::Index n = table.raw.rows();
    const Eigen::Index m = table.raw.cols();
    std::vector<int> group(static_cast<std::size_t>(m), -1);
    std::vector<Eigen::Index> representative;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (group[static_cast<std::size_t>(j)] >= 0) continue;
        const int g = static_cast<int>(representative.size());
        group[static_cast<std::size_t>(j)] = g;
        representative.push_back(j);
        if (std::abs(table.eigenvalues[j].imag()) > tol) {
            const Complex conj_target = std::conj(table.eigenvalues[j]);
            Eigen::Index best = -1;
            double best_dist = tol * std::max(1.0, std::abs(table.eigenvalues[j]));
            for (Eigen::Index k = j + 1; k < m; ++k) {
                if (group[static_cast<std::size_t>(k)] >= 0) continue;
                const double dist = std::abs(table.eigenvalues[k] - conj_target);
                if (dist <= best_dist) {
                    best = k;
                    best_dist = dist;
                }
            }
            if (best >= 0) group[static_cast<std::size_t>(best)] = g;
        }
    }

    MergedTable merged;
    merged.states = table.states;
    const Eigen::Index groups = static_cast<Eigen::Index>(representative.size());
    merged.eigenvalues.resize(groups);
    Mat sums = Mat::Zero(n, groups);
    for (Eigen::Index j = 0; j < m; ++j)
        sums.col(group[static_cast<std::size_t>(j)]) += table.raw.col(j).cwiseAbs();
    for (Eigen::Index g = 0; g < groups; ++g) {
        Complex rep = table.eigenvalues[representative[static_cast<std::size_t>(g)]];
        if (rep.imag() < 0) rep = std::conj(rep);
        merged.eigenvalues[g] = rep;
        merged.mode_labels.push_back(format_eigenvalue(rep));
    }
    merged.omega_star = Mat::Zero(n, groups);
    merged.zero_rows.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double total = sums.row(k).sum();
        if (total == 0.0) {
            merged.zero_rows[static_cast<std::size_t>(k)] = true;
            continue;
        }
        merged.omega_star.row(k) = sums.row(k) / total;
    }
    return merged;
}

// ---------------------------------------------------------------------------
// Eigenvalue lattice diagnostics: lambda_j ~ lambda_a + c * lambda_b.

struct LatticeMatch {
    Eigen::Index j, a, b;
    int c;
    double distance;
    Complex combination;
};

/// All combinations lambda_a + c*lambda_b (c = 1..c_max, a != j, b != j)
/// within absolute distance tol of some lambda_j, sorted by distance.
inline std::vector<LatticeMatch> lattice_match(const std::vector<Complex>& eigenvalues,
                                               double tol, int c_max = 3) {
    std::vector<LatticeMatch> out;
    const auto n = static_cast<Eigen::Index>(eigenvalues.size());
    double scale = 0.0;
    for (const auto& z : eigenvalues) scale = std::max(scale, std::abs(z));
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index a = 0; a < n; ++a) {
            if (a == j) continue;
            for (Eigen::Index b = 0; b < n; ++b) {
                if (b == j) continue;
                // A vanishing lambda_b makes every c degenerate; skip it.
                if (std::abs(eigenvalues[static_cast<std::size_t>(b)]) < 1e-9 * scale) continue;
                for (int c = 1; c <= c_max; ++c) {
                    const Complex combo = eigenvalues[static_cast<std::size_t>(a)] +
                                          double(c) * eigenvalues[static_cast<std::size_t>(b)];
                    const double dist = std::abs(eigenvalues[static_cast<std::size_t>(j)] - combo);
                    if (dist <= tol) out.push_back({j, a, b, c, dist, combo});
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LatticeMatch& x, const LatticeMatch& y) {
                         return x.distance < y.distance;
                     });
    return out;
}

// ---------------------------------------------------------------------------
// CSV interchange. Long format, state-major: one row per (state, mode).

inline void export_contribution_csv(const ContributionTable& table, std::ostream& out) {
    out << "state,mode_label,re_omega,im_omega,omega_star\n";
    for (Eigen::Index k = 0; k < table.raw.rows(); ++k)
        for (Eigen::Index j = 0; j < table.raw.cols(); ++j)
            out << table.states[static_cast<std::size_t>(k)] << ','
                << table.mode_labels[static_cast<std::size_t>(j)] << ','
                << text::format_full(table.raw(k, j).real()) << ','
                << text::format_full(table.raw(k, j).imag()) << ','
                << text::format_full(table.normalized(k, j)) << '\n';
}

inline void export_merged_csv(const MergedTable& merged, std::ostream& out) {
    out << "state,mode_label,omega_star\n";
    for (Eigen::Index k = 0; k < merged.omega_star.rows(); ++k)
        for (Eigen::Index g = 0; g < merged.omega_star.cols(); ++g)
            out << merged.states[static_cast<std::size_t>(k)] << ','
                << merged.mode_labels[static_cast<std::size_t>(g)] << ','
                << text::format_full(merged.omega_star(k, g)) << '\n';
}

/// Index of the eigenvalue nearest to target (mode matching across tables).
inline Eigen::Index nearest_mode(const CVec& eigenvalues, const Complex& target) {
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::max();
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        const double dist = std::abs(eigenvalues[j] - target);
        if (dist < best_dist) {
            best = j;
            best_dist = dist;
        }
    }
    return best;
}

} // namespace kmcf::contrib
