#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "kmcf/dae.hpp"

namespace kmcf::acmtdc {

using dae::DaeSystem;
using dae::Equilibrium;
using dae::SystemState;

/// Parameters of the interconnected AC/MTDC system: one synchronous
/// generator (one-axis model) behind a two-segment AC corridor to an
/// infinite bus, three VSCs joined by a triangle DC grid, VSC2 and VSC3
/// AC terminals tied to the infinite bus by their own lines.
///
/// Electrical table values are kept exactly as published; lengths and base
/// quantities are the reconstruction's free choices and every field can be
/// overridden from a config file.
struct AcMtdcParams {
    // AC and DC grids (physical units per km)
    double r_ac = 0.0261;   // ohm/km
    double l_ac = 0.83;     // mH/km
    double r_dc = 0.0192;   // ohm/km
    double l_dc = 0.24;     // mH/km
    double c_dc = 0.152;    // uF/km
    double c_dcconv = 75.0; // uF, converter smoothing

    // VSC conversion and control constants
    double k_v = 2.0;       // voltage conversion
    double sqrt3_k_i = 1.0; // current conversion (sqrt(3) K_I)
    double g_gain = -1.0;   // controller gain
    double t_ctrl = 0.001;  // controller time constant (s)
    double p_dc_ref1 = 0.2;
    double v_dc_ref2 = 1.0;
    double p_dc_ref3 = -0.3;

    // Generator (machine per-unit; inertia and open-circuit constant in
    // per-unit time, i.e. multiples of 1/omega_base seconds)
    double x_d = 1.79;
    double x_q = 1.77;
    double x_d_prime = 0.3;
    double e_fd = 1.70;
    double p_m = 0.5;
    double damping = 1.0;
    double inertia = 0.89 * 100.0 * M_PI;
    double t_d0_prime = 1.2 * 100.0 * M_PI;

    // Base quantities
    double s_gen_mva = 2800.0;
    double s_ac_mva = 1000.0;
    double v_ac_kv = 500.0;
    double s_dc_mva = 1000.0;
    double v_dc_kv = 500.0;
    double omega_base = 100.0 * M_PI; // rad/s

    // Line lengths (km). The generator corridor is split at the VSC1 bus;
    // its total sets the electromechanical mode frequency.
    double len_ac_gen = 210.0;  // generator bus -- VSC1 bus
    double len_ac_vsc1 = 210.0; // VSC1 bus -- infinite bus
    double len_ac_vsc2 = 100.0; // VSC2 bus -- infinite bus
    double len_ac_vsc3 = 100.0; // VSC3 bus -- infinite bus
    double len_dc12 = 100.0;
    double len_dc13 = 100.0;
    double len_dc23 = 100.0;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw ValidationError(std::string("acmtdc: parameter '") + name +
                                      "' must be > 0");
        };
        positive(r_ac, "r_ac");
        positive(l_ac, "l_ac");
        positive(r_dc, "r_dc");
        positive(l_dc, "l_dc");
        positive(c_dc, "c_dc");
        positive(c_dcconv, "c_dcconv");
        positive(t_ctrl, "t_ctrl");
        positive(x_d, "x_d");
        positive(x_q, "x_q");
        positive(x_d_prime, "x_d_prime");
        positive(inertia, "inertia");
        positive(t_d0_prime, "t_d0_prime");
        positive(s_gen_mva, "s_gen_mva");
        positive(s_ac_mva, "s_ac_mva");
        positive(v_ac_kv, "v_ac_kv");
        positive(s_dc_mva, "s_dc_mva");
        positive(v_dc_kv, "v_dc_kv");
        positive(omega_base, "omega_base");
        positive(len_ac_gen, "len_ac_gen");
        positive(len_ac_vsc1, "len_ac_vsc1");
        positive(len_ac_vsc2, "len_ac_vsc2");
        positive(len_ac_vsc3, "len_ac_vsc3");
        positive(len_dc12, "len_dc12");
        positive(len_dc13, "len_dc13");
        positive(len_dc23, "len_dc23");
        if (damping < 0.0) throw ValidationError("acmtdc: parameter 'damping' must be >= 0");
        if (x_d_prime >= x_d)
            throw ValidationError("acmtdc: transient reactance x_d_prime must be below x_d");
    }
};

/// Published table values with this reconstruction's default lengths.
inline AcMtdcParams default_params() { return {}; }

// Differential variable indices.
enum XIndex : int {
    X_DELTA = 0,
    X_OMEGA,
    X_EQ_PRIME,
    X_IDC12,
    X_IDC13,
    X_IDC23,
    X_VDC1,
    X_VDC2,
    X_VDC3,
    X_U1,
    X_U2,
    X_U3,
    X_COUNT
};

// Algebraic variable indices: bus 1 = generator, bus 2 = VSC1 terminal,
// bus 3 = VSC2 terminal (amplitude slaved to v_dc2), bus 4 = VSC3 terminal.
enum YIndex : int {
    Y_VAC1 = 0,
    Y_THETA1,
    Y_VAC2,
    Y_THETA2,
    Y_THETA3,
    Y_VAC4,
    Y_THETA4,
    Y_COUNT
};

inline std::vector<std::string> x_names() {
    return {"delta", "omega", "eq_prime", "i_dc12", "i_dc13", "i_dc23",
            "v_dc1", "v_dc2",  "v_dc3",    "u1",     "u2",     "u3"};
}

inline std::vector<std::string> y_names() {
    return {"v_ac1", "theta1", "v_ac2", "theta2", "theta3", "v_ac4", "theta4"};
}

namespace detail {

// Complex power flowing from bus i toward bus j over a series branch with
// admittance g + jb, with all partial derivatives.
struct BranchFlow {
    double p, q;
    double dp_dvi, dp_dvj, dp_dthi, dp_dthj;
    double dq_dvi, dq_dvj, dq_dthi, dq_dthj;
};

inline BranchFlow branch_flow(double vi, double thi, double vj, double thj, double g, double b) {
    const double c = std::cos(thi - thj);
    const double s = std::sin(thi - thj);
    BranchFlow f;
    f.p = vi * vi * g - vi * vj * (g * c + b * s);
    f.q = -vi * vi * b - vi * vj * (g * s - b * c);
    f.dp_dvi = 2.0 * vi * g - vj * (g * c + b * s);
    f.dp_dvj = -vi * (g * c + b * s);
    f.dp_dthi = vi * vj * (g * s - b * c);
    f.dp_dthj = -f.dp_dthi;
    f.dq_dvi = -2.0 * vi * b - vj * (g * s - b * c);
    f.dq_dvj = -vi * (g * s - b * c);
    f.dq_dthi = -vi * vj * (g * c + b * s);
    f.dq_dthj = -f.dq_dthi;
    return f;
}

struct Admittance {
    double g, b;
};

inline Admittance series_admittance(double r, double x) {
    const double d = r * r + x * x;
    return {r / d, -x / d};
}

// One-axis generator electrical quantities and their partials with respect
// to (angle = delta - theta1, eq_prime, v_terminal). Machine per-unit.
struct GeneratorFlow {
    double p, q, id;
    double dp_dang, dp_deq, dp_dv;
    double dq_dang, dq_deq, dq_dv;
    double did_dang, did_deq, did_dv;
};

inline GeneratorFlow generator_flow(double angle, double eq, double v, double xd, double xq,
                                    double xdp) {
    const double s = std::sin(angle), c = std::cos(angle);
    const double s2 = std::sin(2.0 * angle), c2 = std::cos(2.0 * angle);
    const double saliency = 1.0 / xq - 1.0 / xdp;
    GeneratorFlow f;
    f.p = eq * v * s / xdp + 0.5 * v * v * saliency * s2;
    f.q = eq * v * c / xdp - v * v * (c * c / xdp + s * s / xq);
    f.id = (eq - v * c) / xdp;
    f.dp_dang = eq * v * c / xdp + v * v * saliency * c2;
    f.dp_deq = v * s / xdp;
    f.dp_dv = eq * s / xdp + v * saliency * s2;
    f.dq_dang = -eq * v * s / xdp + v * v * s2 * (1.0 / xdp - 1.0 / xq);
    f.dq_deq = v * c / xdp;
    f.dq_dv = eq * c / xdp - 2.0 * v * (c * c / xdp + s * s / xq);
    f.did_dang = v * s / xdp;
    f.did_deq = 1.0 / xdp;
    f.did_dv = -c / xdp;
    return f;
}

// Everything build_model precomputes from the parameter set.
struct ModelConstants {
    AcMtdcParams p;
    double omega_b;
    double s_scale; // generator MVA / AC grid MVA
    Admittance y_gen, y_vsc1, y_vsc2, y_vsc3;
    double r12, r13, r23, x12, x13, x23;
    double bc1, bc2, bc3; // per-unit-time bus capacitances
};

inline ModelConstants make_constants(const AcMtdcParams& p) {
    ModelConstants k;
    k.p = p;
    k.omega_b = p.omega_base;
    k.s_scale = p.s_gen_mva / p.s_ac_mva;
    const double z_ac = (p.v_ac_kv * p.v_ac_kv) / p.s_ac_mva; // ohm
    const double z_dc = (p.v_dc_kv * p.v_dc_kv) / p.s_dc_mva;
    auto ac_branch = [&](double len) {
        return series_admittance(p.r_ac * len / z_ac,
                                 p.omega_base * p.l_ac * 1e-3 * len / z_ac);
    };
    k.y_gen = ac_branch(p.len_ac_gen);
    k.y_vsc1 = ac_branch(p.len_ac_vsc1);
    k.y_vsc2 = ac_branch(p.len_ac_vsc2);
    k.y_vsc3 = ac_branch(p.len_ac_vsc3);

    k.r12 = p.r_dc * p.len_dc12 / z_dc;
    k.r13 = p.r_dc * p.len_dc13 / z_dc;
    k.r23 = p.r_dc * p.len_dc23 / z_dc;
    k.x12 = p.omega_base * p.l_dc * 1e-3 * p.len_dc12 / z_dc;
    k.x13 = p.omega_base * p.l_dc * 1e-3 * p.len_dc13 / z_dc;
    k.x23 = p.omega_base * p.l_dc * 1e-3 * p.len_dc23 / z_dc;

    auto bus_cap = [&](double len_a, double len_b) {
        const double farad = p.c_dcconv * 1e-6 + p.c_dc * 1e-6 * 0.5 * (len_a + len_b);
        return p.omega_base * farad * z_dc;
    };
    k.bc1 = bus_cap(p.len_dc12, p.len_dc13);
    k.bc2 = bus_cap(p.len_dc12, p.len_dc23);
    k.bc3 = bus_cap(p.len_dc13, p.len_dc23);
    return k;
}

} // namespace detail

/// Assemble the 12-state / 7-algebraic-variable DaeSystem with analytic
/// Jacobian blocks. Time is in seconds; the swing and flux equations carry
/// the omega_base factor of the per-unit-time normalization.
inline DaeSystem build_model(const AcMtdcParams& params) {
    params.validate();
    const detail::ModelConstants k = detail::make_constants(params);

    DaeSystem sys;
    sys.n_diff = X_COUNT;
    sys.n_alg = Y_COUNT;
    sys.x_names = x_names();
    sys.y_names = y_names();

    sys.F = [k](const Vec& x, const Vec& y) -> Vec {
        const auto& p = k.p;
        const double wb = k.omega_b;
        Vec f(X_COUNT);
        const double angle = x[X_DELTA] - y[Y_THETA1];
        const auto gen = detail::generator_flow(angle, x[X_EQ_PRIME], y[Y_VAC1], p.x_d, p.x_q,
                                                p.x_d_prime);
        f[X_DELTA] = wb * x[X_OMEGA];
        f[X_OMEGA] = wb * (p.p_m - p.damping * x[X_OMEGA] - gen.p) / p.inertia;
        f[X_EQ_PRIME] =
            wb * (p.e_fd - x[X_EQ_PRIME] - (p.x_d - p.x_d_prime) * gen.id) / p.t_d0_prime;
        f[X_IDC12] = wb * (x[X_VDC1] - x[X_VDC2] - k.r12 * x[X_IDC12]) / k.x12;
        f[X_IDC13] = wb * (x[X_VDC1] - x[X_VDC3] - k.r13 * x[X_IDC13]) / k.x13;
        f[X_IDC23] = wb * (x[X_VDC2] - x[X_VDC3] - k.r23 * x[X_IDC23]) / k.x23;
        const double ic1 = p.sqrt3_k_i * x[X_U1];
        const double ic2 = p.sqrt3_k_i * x[X_U2];
        const double ic3 = p.sqrt3_k_i * x[X_U3];
        f[X_VDC1] = wb * (ic1 - x[X_IDC12] - x[X_IDC13]) / k.bc1;
        f[X_VDC2] = wb * (ic2 + x[X_IDC12] - x[X_IDC23]) / k.bc2;
        f[X_VDC3] = wb * (ic3 + x[X_IDC13] + x[X_IDC23]) / k.bc3;
        f[X_U1] = (-x[X_U1] + p.g_gain * (x[X_VDC1] * ic1 - p.p_dc_ref1)) / p.t_ctrl;
        f[X_U2] = (-x[X_U2] + p.g_gain * (x[X_VDC2] - p.v_dc_ref2)) / p.t_ctrl;
        f[X_U3] = (-x[X_U3] + p.g_gain * (x[X_VDC3] * ic3 - p.p_dc_ref3)) / p.t_ctrl;
        return f;
    };

    sys.G = [k](const Vec& x, const Vec& y) -> Vec {
        const auto& p = k.p;
        Vec g(Y_COUNT);
        const double angle = x[X_DELTA] - y[Y_THETA1];
        const auto gen = detail::generator_flow(angle, x[X_EQ_PRIME], y[Y_VAC1], p.x_d, p.x_q,
                                                p.x_d_prime);
        const double v3 = 0.5 * p.k_v * x[X_VDC2];
        const auto f12 = detail::branch_flow(y[Y_VAC1], y[Y_THETA1], y[Y_VAC2], y[Y_THETA2],
                                             k.y_gen.g, k.y_gen.b);
        const auto f21 = detail::branch_flow(y[Y_VAC2], y[Y_THETA2], y[Y_VAC1], y[Y_THETA1],
                                             k.y_gen.g, k.y_gen.b);
        const auto f20 = detail::branch_flow(y[Y_VAC2], y[Y_THETA2], 1.0, 0.0, k.y_vsc1.g,
                                             k.y_vsc1.b);
        const auto f30 = detail::branch_flow(v3, y[Y_THETA3], 1.0, 0.0, k.y_vsc2.g, k.y_vsc2.b);
        const auto f40 = detail::branch_flow(y[Y_VAC4], y[Y_THETA4], 1.0, 0.0, k.y_vsc3.g,
                                             k.y_vsc3.b);
        const double pdc1 = x[X_VDC1] * p.sqrt3_k_i * x[X_U1];
        const double pdc2 = x[X_VDC2] * p.sqrt3_k_i * x[X_U2];
        const double pdc3 = x[X_VDC3] * p.sqrt3_k_i * x[X_U3];
        g[0] = k.s_scale * gen.p - f12.p;
        g[1] = k.s_scale * gen.q - f12.q;
        g[2] = -pdc1 - f21.p - f20.p;
        g[3] = -f21.q - f20.q;
        g[4] = -pdc2 - f30.p;
        g[5] = -pdc3 - f40.p;
        g[6] = -f40.q;
        return g;
    };

    sys.dF_dx = [k](const Vec& x, const Vec& y) -> Mat {
        const auto& p = k.p;
        const double wb = k.omega_b;
        Mat j = Mat::Zero(X_COUNT, X_COUNT);
        const double angle = x[X_DELTA] - y[Y_THETA1];
        const auto gen = detail::generator_flow(angle, x[X_EQ_PRIME], y[Y_VAC1], p.x_d, p.x_q,
                                                p.x_d_prime);
        j(X_DELTA, X_OMEGA) = wb;
        j(X_OMEGA, X_DELTA) = -wb * gen.dp_dang / p.inertia;
        j(X_OMEGA, X_OMEGA) = -wb * p.damping / p.inertia;
        j(X_OMEGA, X_EQ_PRIME) = -wb * gen.dp_deq / p.inertia;
        const double flux = wb * (p.x_d - p.x_d_prime) / p.t_d0_prime;
        j(X_EQ_PRIME, X_DELTA) = -flux * gen.did_dang;
        j(X_EQ_PRIME, X_EQ_PRIME) = wb * (-1.0) / p.t_d0_prime - flux * gen.did_deq;
        j(X_IDC12, X_IDC12) = -wb * k.r12 / k.x12;
        j(X_IDC12, X_VDC1) = wb / k.x12;
        j(X_IDC12, X_VDC2) = -wb / k.x12;
        j(X_IDC13, X_IDC13) = -wb * k.r13 / k.x13;
        j(X_IDC13, X_VDC1) = wb / k.x13;
        j(X_IDC13, X_VDC3) = -wb / k.x13;
        j(X_IDC23, X_IDC23) = -wb * k.r23 / k.x23;
        j(X_IDC23, X_VDC2) = wb / k.x23;
        j(X_IDC23, X_VDC3) = -wb / k.x23;
        j(X_VDC1, X_IDC12) = -wb / k.bc1;
        j(X_VDC1, X_IDC13) = -wb / k.bc1;
        j(X_VDC1, X_U1) = wb * p.sqrt3_k_i / k.bc1;
        j(X_VDC2, X_IDC12) = wb / k.bc2;
        j(X_VDC2, X_IDC23) = -wb / k.bc2;
        j(X_VDC2, X_U2) = wb * p.sqrt3_k_i / k.bc2;
        j(X_VDC3, X_IDC13) = wb / k.bc3;
        j(X_VDC3, X_IDC23) = wb / k.bc3;
        j(X_VDC3, X_U3) = wb * p.sqrt3_k_i / k.bc3;
        j(X_U1, X_VDC1) = p.g_gain * p.sqrt3_k_i * x[X_U1] / p.t_ctrl;
        j(X_U1, X_U1) = (-1.0 + p.g_gain * x[X_VDC1] * p.sqrt3_k_i) / p.t_ctrl;
        j(X_U2, X_VDC2) = p.g_gain / p.t_ctrl;
        j(X_U2, X_U2) = -1.0 / p.t_ctrl;
        j(X_U3, X_VDC3) = p.g_gain * p.sqrt3_k_i * x[X_U3] / p.t_ctrl;
        j(X_U3, X_U3) = (-1.0 + p.g_gain * x[X_VDC3] * p.sqrt3_k_i) / p.t_ctrl;
        return j;
    };

    sys.dF_dy = [k](const Vec& x, const Vec& y) -> Mat {
        const auto& p = k.p;
        const double wb = k.omega_b;
        Mat j = Mat::Zero(X_COUNT, Y_COUNT);
        const double angle = x[X_DELTA] - y[Y_THETA1];
        const auto gen = detail::generator_flow(angle, x[X_EQ_PRIME], y[Y_VAC1], p.x_d, p.x_q,
                                                p.x_d_prime);
        j(X_OMEGA, Y_VAC1) = -wb * gen.dp_dv / p.inertia;
        j(X_OMEGA, Y_THETA1) = wb * gen.dp_dang / p.inertia;
        const double flux = wb * (p.x_d - p.x_d_prime) / p.t_d0_prime;
        j(X_EQ_PRIME, Y_VAC1) = -flux * gen.did_dv;
        j(X_EQ_PRIME, Y_THETA1) = flux * gen.did_dang;
        return j;
    };

    sys.dG_dx = [k](const Vec& x, const Vec& y) -> Mat {
        const auto& p = k.p;
        Mat j = Mat::Zero(Y_COUNT, X_COUNT);
        const double angle = x[X_DELTA] - y[Y_THETA1];
        const auto gen = detail::generator_flow(angle, x[X_EQ_PRIME], y[Y_VAC1], p.x_d, p.x_q,
                                                p.x_d_prime);
        j(0, X_DELTA) = k.s_scale * gen.dp_dang;
        j(0, X_EQ_PRIME) = k.s_scale * gen.dp_deq;
        j(1, X_DELTA) = k.s_scale * gen.dq_dang;
        j(1, X_EQ_PRIME) = k.s_scale * gen.dq_deq;
        j(2, X_VDC1) = -p.sqrt3_k_i * x[X_U1];
        j(2, X_U1) = -x[X_VDC1] * p.sqrt3_k_i;
        const double v3 = 0.5 * p.k_v * x[X_VDC2];
        const auto f30 = detail::branch_flow(v3, y[Y_THETA3], 1.0, 0.0, k.y_vsc2.g, k.y_vsc2.b);
        j(4, X_VDC2) = -p.sqrt3_k_i * x[X_U2] - f30.dp_dvi * 0.5 * p.k_v;
        j(4, X_U2) = -x[X_VDC2] * p.sqrt3_k_i;
        j(5, X_VDC3) = -p.sqrt3_k_i * x[X_U3];
        j(5, X_U3) = -x[X_VDC3] * p.sqrt3_k_i;
        return j;
    };

    sys.dG_dy = [k](const Vec& x, const Vec& y) -> Mat {
        const auto& p = k.p;
        Mat j = Mat::Zero(Y_COUNT, Y_COUNT);
        const double angle = x[X_DELTA] - y[Y_THETA1];
        const auto gen = detail::generator_flow(angle, x[X_EQ_PRIME], y[Y_VAC1], p.x_d, p.x_q,
                                                p.x_d_prime);
        const double v3 = 0.5 * p.k_v * x[X_VDC2];
        const auto f12 = detail::branch_flow(y[Y_VAC1], y[Y_THETA1], y[Y_VAC2], y[Y_THETA2],
                                             k.y_gen.g, k.y_gen.b);
        const auto f21 = detail::branch_flow(y[Y_VAC2], y[Y_THETA2], y[Y_VAC1], y[Y_THETA1],
                                             k.y_gen.g, k.y_gen.b);
        const auto f20 = detail::branch_flow(y[Y_VAC2], y[Y_THETA2], 1.0, 0.0, k.y_vsc1.g,
                                             k.y_vsc1.b);
        const auto f30 = detail::branch_flow(v3, y[Y_THETA3], 1.0, 0.0, k.y_vsc2.g, k.y_vsc2.b);
        const auto f40 = detail::branch_flow(y[Y_VAC4], y[Y_THETA4], 1.0, 0.0, k.y_vsc3.g,
                                             k.y_vsc3.b);
        // g0: s P_gen(angle(th1), eq, V1) - P_12(V1, th1, V2, th2)
        j(0, Y_VAC1) = k.s_scale * gen.dp_dv - f12.dp_dvi;
        j(0, Y_THETA1) = -k.s_scale * gen.dp_dang - f12.dp_dthi;
        j(0, Y_VAC2) = -f12.dp_dvj;
        j(0, Y_THETA2) = -f12.dp_dthj;
        // g1: reactive twin
        j(1, Y_VAC1) = k.s_scale * gen.dq_dv - f12.dq_dvi;
        j(1, Y_THETA1) = -k.s_scale * gen.dq_dang - f12.dq_dthi;
        j(1, Y_VAC2) = -f12.dq_dvj;
        j(1, Y_THETA2) = -f12.dq_dthj;
        // g2: -pdc1 - P_21 - P_20
        j(2, Y_VAC2) = -f21.dp_dvi - f20.dp_dvi;
        j(2, Y_THETA2) = -f21.dp_dthi - f20.dp_dthi;
        j(2, Y_VAC1) = -f21.dp_dvj;
        j(2, Y_THETA1) = -f21.dp_dthj;
        // g3: -Q_21 - Q_20
        j(3, Y_VAC2) = -f21.dq_dvi - f20.dq_dvi;
        j(3, Y_THETA2) = -f21.dq_dthi - f20.dq_dthi;
        j(3, Y_VAC1) = -f21.dq_dvj;
        j(3, Y_THETA1) = -f21.dq_dthj;
        // g4: -pdc2 - P_30 (V3 is slaved to v_dc2, handled in dG_dx)
        j(4, Y_THETA3) = -f30.dp_dthi;
        // g5, g6: VSC3 bus balance
        j(5, Y_VAC4) = -f40.dp_dvi;
        j(5, Y_THETA4) = -f40.dp_dthi;
        j(6, Y_VAC4) = -f40.dq_dvi;
        j(6, Y_THETA4) = -f40.dq_dthi;
        return j;
    };

    return sys;
}

/// The conventional power-flow starting point: unit voltages, zero angles,
/// unit DC voltages, idle converters.
inline SystemState flat_start() {
    SystemState s;
    s.x = Vec::Zero(X_COUNT);
    s.x[X_EQ_PRIME] = 1.0;
    s.x[X_VDC1] = 1.0;
    s.x[X_VDC2] = 1.0;
    s.x[X_VDC3] = 1.0;
    s.y = Vec::Zero(Y_COUNT);
    s.y[Y_VAC1] = 1.0;
    s.y[Y_VAC2] = 1.0;
    s.y[Y_VAC4] = 1.0;
    return s;
}

/// The experiment's initial-condition family: eq' perturbed in steps of
/// `step` from the equilibrium value, everything else at the equilibrium,
/// each state made consistent again through the algebraic solve.
inline std::vector<SystemState> initial_condition_sweep(const DaeSystem& sys,
                                                        const Equilibrium& eq, int count,
                                                        double step) {
    if (count < 1) throw ValidationError("initial_condition_sweep: count must be >= 1");
    std::vector<SystemState> states;
    states.reserve(static_cast<std::size_t>(count));
    Vec y_warm = eq.y;
    for (int l = 0; l < count; ++l) {
        SystemState s;
        s.x = eq.x;
        s.x[X_EQ_PRIME] += step * l;
        try {
            s.y = dae::solve_algebraic(sys, s.x, y_warm);
        } catch (const NumericalError& e) {
            throw NumericalError("initial_condition_sweep: consistency solve failed at l = " +
                                 std::to_string(l) + ": " + e.what());
        }
        y_warm = s.y;
        states.push_back(std::move(s));
    }
    return states;
}

} // namespace kmcf::acmtdc
