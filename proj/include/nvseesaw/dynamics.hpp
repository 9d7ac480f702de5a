#pragma once

#include "nvseesaw/constants.hpp"
#include "nvseesaw/errors.hpp"
#include "nvseesaw/spin_model.hpp"
#include "nvseesaw/units.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace nvseesaw {

// ---------------------------------------------------------------------------
// Bell-basis state
// ---------------------------------------------------------------------------

/// Two-qubit state in the Bell basis, |psi> = C1 |Phi+> + C2 |Phi-> +
/// C3 |psi+> + C4 |psi->, with |Phi+-> = (|ee> +- |gg>)/sqrt(2) and
/// |psi+-> = (|eg> +- |ge>)/sqrt(2). Product basis order is {ee, eg, ge, gg}.
struct BellAmplitudes {
    std::array<complexd, 4> c{};

    complexd& operator[](std::size_t i) { return c[i]; }
    const complexd& operator[](std::size_t i) const { return c[i]; }

    double norm_squared() const {
        double n = 0.0;
        for (const auto& a : c) n += std::norm(a);
        return n;
    }

    Eigen::Vector4cd to_product() const {
        const double r = 1.0 / std::sqrt(2.0);
        Eigen::Vector4cd p;
        p(0) = r * (c[0] + c[1]); // ee
        p(1) = r * (c[2] + c[3]); // eg
        p(2) = r * (c[2] - c[3]); // ge
        p(3) = r * (c[0] - c[1]); // gg
        return p;
    }

    static BellAmplitudes from_product(const Eigen::Vector4cd& p) {
        const double r = 1.0 / std::sqrt(2.0);
        BellAmplitudes b;
        b.c[0] = r * (p(0) + p(3));
        b.c[1] = r * (p(0) - p(3));
        b.c[2] = r * (p(1) + p(2));
        b.c[3] = r * (p(1) - p(2));
        return b;
    }

    /// Factory for initial states; enforces unit norm to 1e-12.
    static BellAmplitudes normalized_initial(const std::array<complexd, 4>& amplitudes) {
        BellAmplitudes b{amplitudes};
        if (std::abs(b.norm_squared() - 1.0) > 1e-12)
            throw std::invalid_argument("BellAmplitudes: initial state must have unit norm");
        return b;
    }
};

// ---------------------------------------------------------------------------
// Closed-form coefficient bundle
// ---------------------------------------------------------------------------

/// Rates of the Bell-basis closed-form solution, all rad/s. A drives the
/// Phi-block rotation; B, D, F = sqrt(B^2 + D^2) the psi block.
struct ABDFCoefficients {
    double A = 0.0;
    double B = 0.0;
    double D = 0.0;
    double F = 0.0;
};

/// Coefficient bundle as printed:
///   A =  (lambda^2 / 2 omega)(2n+1) alpha [1 - (alpha - 1) delta_h^2]
///   B = -(lambda^2 Omega^2 / 2 omega^2 Delta) [1 - (alpha - 1) delta_h^2]
///   D = -(lambda^2 / 2 omega)(2n+1) alpha (alpha - 1) delta_h
///   F =  sqrt(B^2 + D^2)
/// Note the (alpha - 1) factor; the coupling-strength expansion uses
/// (alpha^2 - 1). The mismatch is documented by the verify report rather than
/// reconciled here.
inline ABDFCoefficients abdf(const CouplingSet& set) {
    const double lam2 = set.lambda * set.lambda;
    const double two_np1 = 2.0 * set.phonon_number + 1.0;
    const double shape = 1.0 - (set.alpha - 1.0) * set.delta_h * set.delta_h;
    ABDFCoefficients k;
    k.A = (lam2 / (2.0 * set.omega)) * two_np1 * set.alpha * shape;
    k.B = -(lam2 * set.rabi * set.rabi /
            (2.0 * set.omega * set.omega * set.detuning)) * shape;
    k.D = -(lam2 / (2.0 * set.omega)) * two_np1 * set.alpha * (set.alpha - 1.0) *
          set.delta_h;
    k.F = std::hypot(k.B, k.D);
    return k;
}

// ---------------------------------------------------------------------------
// Effective two-spin Hamiltonian
// ---------------------------------------------------------------------------

/// H_eff in the product basis {ee, eg, ge, gg}:
///   H = -1/4 [ s1 sz_1 + s2 sz_2 ] - 1/4 J (s1+ s2- + s1- s2+)
/// with s_i = sin^2(theta_i) (lambda_i^2 / Delta_i)(2n+1) and
/// J = sin(theta_1) sin(theta_2) lambda_1 lambda_2 (1/Delta_1 + 1/Delta_2).
/// Couples only within the {ee, gg} and {eg, ge} subspaces.
struct EffectiveHamiltonian {
    Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
    CouplingSet coupling{};
    double sz_rate1 = 0.0; // s1 [rad/s]
    double sz_rate2 = 0.0; // s2 [rad/s]
    double exchange = 0.0; // J [rad/s]
};

inline EffectiveHamiltonian build_heff(const CouplingSet& set) {
    if (set.detuning1 == 0.0 || set.detuning2 == 0.0)
        throw dispersive_breakdown_error("build_heff: Delta_1 and Delta_2 must be nonzero");
    EffectiveHamiltonian h;
    h.coupling = set;
    const double two_np1 = 2.0 * set.phonon_number + 1.0;
    const double sin1 = std::sin(set.theta1);
    const double sin2 = std::sin(set.theta2);
    h.sz_rate1 = sin1 * sin1 * set.lambda1 * set.lambda1 / set.detuning1 * two_np1;
    h.sz_rate2 = sin2 * sin2 * set.lambda2 * set.lambda2 / set.detuning2 * two_np1;
    h.exchange = sin1 * sin2 * set.lambda1 * set.lambda2 *
                 (1.0 / set.detuning1 + 1.0 / set.detuning2);

    Eigen::Matrix4cd& m = h.matrix;
    // sigma_z eigenvalues over {ee, eg, ge, gg}: spin 1 (+,+,-,-), spin 2 (+,-,+,-).
    m(0, 0) = -0.25 * (h.sz_rate1 + h.sz_rate2);
    m(1, 1) = -0.25 * (h.sz_rate1 - h.sz_rate2);
    m(2, 2) = 0.25 * (h.sz_rate1 - h.sz_rate2);
    m(3, 3) = 0.25 * (h.sz_rate1 + h.sz_rate2);
    m(1, 2) = m(2, 1) = -0.25 * h.exchange;
    return h;
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

enum class EvolutionMode { printed, unitary, numeric };

inline const char* to_string(EvolutionMode m) {
    switch (m) {
        case EvolutionMode::printed: return "printed";
        case EvolutionMode::unitary: return "unitary";
        case EvolutionMode::numeric: return "numeric";
    }
    return "?";
}

inline EvolutionMode evolution_mode_from_string(const std::string& s) {
    if (s == "printed") return EvolutionMode::printed;
    if (s == "unitary") return EvolutionMode::unitary;
    if (s == "numeric") return EvolutionMode::numeric;
    throw config_error("unknown evolution mode '" + s + "' (printed|unitary|numeric)");
}

namespace detail {
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}
} // namespace detail

/// Closed-form Bell-amplitude propagation.
///
/// Phi block, printed mode (kept exactly as published, non-unitary):
///   C1(t) = C1 cos(At) - C2 sin(At),  C2(t) = C2 cos(At) - C1 sin(At)
/// Phi block, unitary mode: the -sin entries carry the imaginary unit,
///   C1(t) = C1 cos(At) - i C2 sin(At),  C2(t) = C2 cos(At) - i C1 sin(At).
/// psi block (both modes), trigonometric form of the published rational
/// expression, finite for F -> 0 and F -> |B| via t sinc(Ft):
///   C3(t) = (cos Ft - i(B/F) sin Ft) C3 - i (D/F) sin Ft C4
///   C4(t) = -i (D/F) sin Ft C3 + (cos Ft + i(B/F) sin Ft) C4
inline BellAmplitudes evolve_closed_form(const BellAmplitudes& state0,
                                         const ABDFCoefficients& coeffs, double t,
                                         EvolutionMode mode) {
    if (t < 0.0) throw std::invalid_argument("evolve_closed_form: t must be >= 0");
    if (mode == EvolutionMode::numeric)
        throw std::invalid_argument("evolve_closed_form: mode must be printed or unitary");

    BellAmplitudes out;
    const double ca = std::cos(coeffs.A * t);
    const double sa = std::sin(coeffs.A * t);
    if (mode == EvolutionMode::printed) {
        out.c[0] = state0.c[0] * ca - state0.c[1] * sa;
        out.c[1] = state0.c[1] * ca - state0.c[0] * sa;
    } else {
        const complexd isa(0.0, sa);
        out.c[0] = state0.c[0] * ca - isa * state0.c[1];
        out.c[1] = state0.c[1] * ca - isa * state0.c[0];
    }

    const double cf = std::cos(coeffs.F * t);
    const double snc = t * detail::sinc(coeffs.F * t); // sin(Ft)/F, finite at F = 0
    const complexd diag_b(0.0, coeffs.B * snc);
    const complexd off_d(0.0, coeffs.D * snc);
    out.c[2] = (cf - diag_b) * state0.c[2] - off_d * state0.c[3];
    out.c[3] = -off_d * state0.c[2] + (cf + diag_b) * state0.c[3];
    return out;
}

/// Infinity norm of the Hamiltonian, used for the step-size contract.
inline double hamiltonian_norm(const EffectiveHamiltonian& h) {
    double best = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += std::abs(h.matrix(i, j));
        best = std::max(best, row);
    }
    return best;
}

/// Fixed-step RK4 integration of i d|psi>/dt = H |psi> in the product basis.
/// Norm drift is left in place so oracle tests can measure it. Requires
/// ||H|| dt < 0.1 and dt <= t (unless t = 0).
inline BellAmplitudes evolve_numeric(const BellAmplitudes& state0,
                                     const EffectiveHamiltonian& h, double t, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("evolve_numeric: dt must be > 0");
    if (t < 0.0) throw std::invalid_argument("evolve_numeric: t must be >= 0");
    if (t > 0.0 && dt > t) throw std::invalid_argument("evolve_numeric: dt must be <= t");
    if (hamiltonian_norm(h) * dt >= 0.1)
        throw std::invalid_argument("evolve_numeric: ||H|| dt must stay below 0.1");
    if (t == 0.0) return state0;

    const Eigen::Matrix4cd minus_i_h = complexd(0.0, -1.0) * h.matrix;
    auto rk4_step = [&](Eigen::Vector4cd& psi, double step) {
        const Eigen::Vector4cd k1 = minus_i_h * psi;
        const Eigen::Vector4cd k2 = minus_i_h * (psi + 0.5 * step * k1);
        const Eigen::Vector4cd k3 = minus_i_h * (psi + 0.5 * step * k2);
        const Eigen::Vector4cd k4 = minus_i_h * (psi + step * k3);
        psi += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    Eigen::Vector4cd psi = state0.to_product();
    const auto full_steps = static_cast<long long>(std::floor(t / dt + 1e-9));
    for (long long i = 0; i < full_steps; ++i) rk4_step(psi, dt);
    const double remainder = t - static_cast<double>(full_steps) * dt;
    if (remainder > 1e-12 * t) rk4_step(psi, remainder);
    return BellAmplitudes::from_product(psi);
}

// ---------------------------------------------------------------------------
// Concurrence
// ---------------------------------------------------------------------------

namespace detail {
/// sigma_y x sigma_y in the product basis {ee, eg, ge, gg}.
inline const Eigen::Matrix4cd& spin_flip() {
    static const Eigen::Matrix4cd s = [] {
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
        m(0, 3) = -1.0;
        m(1, 2) = 1.0;
        m(2, 1) = 1.0;
        m(3, 0) = -1.0;
        return m;
    }();
    return s;
}
} // namespace detail

/// Pure-state concurrence C = |<psi*| sigma_y x sigma_y |psi>|, evaluated in
/// the product basis with explicit conjugation of the amplitudes.
inline double concurrence_pure(const BellAmplitudes& state) {
    const Eigen::Vector4cd psi = state.to_product();
    const Eigen::Vector4cd psi_star = psi.conjugate();
    // Eigen's dot() conjugates its left operand, so this is psi^T S psi.
    const complexd overlap = psi_star.dot(detail::spin_flip() * psi);
    return std::abs(overlap);
}

/// Concurrence through the spin-flip density-matrix construction:
/// mu_i = sqrt eigenvalues of rho (sy x sy) rho* (sy x sy) in decreasing
/// order, C = max(0, mu_1 - mu_2 - mu_3 - mu_4). For pure rho = |psi><psi|
/// this must agree with concurrence_pure; it is kept on the eigenvalue route
/// as an independent cross-check. Eigenvalues below 1e-12 of the largest are
/// rank noise and are clamped to zero before the square root.
inline double wootters_concurrence(const BellAmplitudes& state) {
    const Eigen::Vector4cd psi = state.to_product();
    const Eigen::Matrix4cd rho = psi * psi.adjoint();
    const Eigen::Matrix4cd& flip = detail::spin_flip();
    const Eigen::Matrix4cd r = rho * flip * rho.conjugate() * flip;

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(r, false);
    std::array<double, 4> mu{};
    double largest = 0.0;
    for (int i = 0; i < 4; ++i) largest = std::max(largest, solver.eigenvalues()(i).real());
    const double floor_value = 1e-12 * std::max(largest, 0.0);
    for (int i = 0; i < 4; ++i) {
        const double ev = solver.eigenvalues()(i).real();
        mu[static_cast<std::size_t>(i)] = ev > floor_value ? std::sqrt(ev) : 0.0;
    }
    std::sort(mu.begin(), mu.end(), std::greater<>());
    return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

/// Result of the printed closed-form concurrence expression. used_fallback is
/// set when a degenerate denominator (F = 0 or F -> |B|) forced the evaluation
/// through closed-form propagation plus the spin-flip formula instead.
struct ConcurrenceValue {
    double value = 0.0;
    bool used_fallback = false;
};

/// Literal evaluation of the published seven-term concurrence expression.
///
/// The expression's final term mixes powers of D inconsistently, which makes
/// it dimensionally inhomogeneous; it is therefore evaluated in the unit
/// system it was printed in (rad/us and us). Initial amplitudes are assumed
/// real, as in the derivation. Deviations from the propagate-then-measure
/// route at delta_h != 0 are expected and reported by verify, not patched.
inline ConcurrenceValue concurrence_closed_form(const BellAmplitudes& state0,
                                                const ABDFCoefficients& coeffs, double t) {
    const double a = units::rad_us_from_rad_s(coeffs.A);
    const double b = units::rad_us_from_rad_s(coeffs.B);
    const double d = units::rad_us_from_rad_s(coeffs.D);
    const double f = units::rad_us_from_rad_s(coeffs.F);
    const double t_us = units::us_from_s(t);

    const bool degenerate =
        f <= 0.0 || std::min(std::abs(f - b), std::abs(f + b)) < 1e-9 * f;
    if (degenerate) {
        const BellAmplitudes evolved =
            evolve_closed_form(state0, coeffs, t, EvolutionMode::printed);
        return {concurrence_pure(evolved), true};
    }

    const complexd c1 = state0.c[0];
    const complexd c2 = state0.c[1];
    const complexd c3 = state0.c[2];
    const complexd c4 = state0.c[3];
    const complexd e_minus = std::exp(complexd(0.0, -2.0 * f * t_us));
    const complexd e_plus = std::exp(complexd(0.0, 2.0 * f * t_us));
    const double f2 = f * f;

    const complexd term1 = (c1 * c1 - c2 * c2) * std::cos(2.0 * a * t_us);
    const complexd num2 = -d * c3 + (f + b) * c4;
    const complexd term2 = e_minus * num2 * num2 / (4.0 * f2);
    const complexd num3 = d * d * c3 - d * (f + b) * c4;
    const complexd term3 = -e_minus * num3 * num3 / (4.0 * f2 * (f + b) * (f + b));
    const complexd num4 = d * c3 + (f - b) * c4;
    const complexd term4 = e_plus * num4 * num4 / (4.0 * f2);
    const complexd num5 = d * d * c3 + d * (f - b) * c4;
    const complexd term5 = -e_plus * num5 * num5 / (4.0 * f2 * (f - b) * (f - b));
    const complexd term6 = (-d * c3 + (f + b) * c4) * (d * c3 + (f - b) * c4) / (2.0 * f2);
    const complexd term7 = -(d * c3 - d * (f + b) * c4) * (d * d * c3 + d * (f - b) * c4) /
                           (2.0 * f2 * (f - b) * (f - b));

    return {std::abs(term1 + term2 + term3 + term4 + term5 + term6 + term7), false};
}

} // namespace nvseesaw
