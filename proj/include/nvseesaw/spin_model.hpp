#pragma once

#include "nvseesaw/constants.hpp"
#include "nvseesaw/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <sstream>

namespace nvseesaw {

using complexd = std::complex<double>;

/// Microwave drive and field environment of one NV spin. Angular units (rad/s)
/// for frequencies, tesla for fields.
struct DriveConfig {
    double bare_rabi = 0.0;          // Omega_0 [rad/s]
    double static_field = 0.0;       // B_0 [T]
    double tip_field_at_spin = 0.0;  // B_ms, film stray field at the spin [T]
    double detuning = 0.0;           // delta [rad/s]
    double resonator_frequency = 0.0; // omega_r [rad/s]
    double tip_field_magnitude = 0.0; // |B_tip| [T]
    bool lambda_configuration = true; // strong-splitting reduction selected

    void validate() const {
        if (bare_rabi <= 0.0)
            throw std::invalid_argument("DriveConfig: bare_rabi must be > 0");
        if (resonator_frequency <= 0.0)
            throw std::invalid_argument("DriveConfig: resonator_frequency must be > 0");
        if (tip_field_at_spin < 0.0)
            throw std::invalid_argument("DriveConfig: tip_field_at_spin must be >= 0");
        if (lambda_configuration && static_field <= tip_field_at_spin)
            throw std::invalid_argument(
                "DriveConfig: lambda configuration requires B0 > B_ms >= 0");
    }
};

/// Ground-state spin triplet driven near both |0> <-> |+-1> transitions.
/// Basis order {|-1>, |0>, |+1>}.
struct ThreeLevelSystem {
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double rabi_plus = 0.0;
    double rabi_minus = 0.0;
    Eigen::Matrix3cd hamiltonian = Eigen::Matrix3cd::Zero();

    static Eigen::Vector3cd ket_minus() { return {1.0, 0.0, 0.0}; }
    static Eigen::Vector3cd ket_zero() { return {0.0, 1.0, 0.0}; }
    static Eigen::Vector3cd ket_plus() { return {0.0, 0.0, 1.0}; }
    /// Bright and dark superpositions of the excited doublet.
    static Eigen::Vector3cd ket_bright() {
        return Eigen::Vector3cd(1.0, 0.0, 1.0) / std::sqrt(2.0);
    }
    static Eigen::Vector3cd ket_dark() {
        return Eigen::Vector3cd(1.0, 0.0, -1.0) / std::sqrt(2.0);
    }
};

/// H = sum_{i = +-1} ( -delta_i |i><i| + (Omega_i / 2)(|0><i| + |i><0|) ).
inline ThreeLevelSystem three_level_hamiltonian(double delta_plus, double delta_minus,
                                                double rabi_plus, double rabi_minus) {
    ThreeLevelSystem sys;
    sys.delta_plus = delta_plus;
    sys.delta_minus = delta_minus;
    sys.rabi_plus = rabi_plus;
    sys.rabi_minus = rabi_minus;
    Eigen::Matrix3cd& h = sys.hamiltonian;
    h(0, 0) = -delta_minus;
    h(2, 2) = -delta_plus;
    h(0, 1) = h(1, 0) = 0.5 * rabi_minus;
    h(2, 1) = h(1, 2) = 0.5 * rabi_plus;
    return sys;
}

/// Effective Rabi frequency of the reduced two-level transition,
/// Omega(B) = Omega_0 - mu_B (B_0 + B_ms) / hbar.
inline double effective_rabi(const DriveConfig& config,
                             const PhysicalConstants& consts = si_constants()) {
    config.validate();
    const double shift = consts.bohr_magneton *
                         (config.static_field + config.tip_field_at_spin) / consts.hbar;
    const double rabi = config.bare_rabi - shift;
    if (rabi <= 0.0) {
        std::ostringstream os;
        os << "effective_rabi: field shift " << shift
           << " rad/s exceeds bare Rabi frequency " << config.bare_rabi << " rad/s";
        throw parameter_regime_error(os.str());
    }
    return rabi;
}

/// Dressed-state splitting and mixing angle of the driven two-level system.
/// Branch fixed so sin(theta) = Omega / omega and cos(theta) = -delta / omega;
/// tan(theta) = -Omega / delta either way.
struct DressedParameters {
    double omega = 0.0; // sqrt(Omega^2 + delta^2) [rad/s]
    double theta = 0.0; // mixing angle [rad]
};

inline DressedParameters dressed_parameters(double rabi, double detuning) {
    if (rabi == 0.0 && detuning == 0.0)
        throw std::invalid_argument("dressed_parameters: (Omega, delta) = (0, 0)");
    DressedParameters d;
    d.omega = std::hypot(rabi, detuning);
    d.theta = std::atan2(rabi, -detuning);
    return d;
}

/// Magnetic spin-resonator coupling, lambda = g_S mu_B G_m a_0 / hbar, with
/// G_m = |B_tip| / h the tip-field gradient at gap h.
inline double tip_coupling(double gradient, double zero_point_amplitude,
                           const PhysicalConstants& consts = si_constants()) {
    if (gradient < 0.0 || zero_point_amplitude < 0.0)
        throw std::invalid_argument("tip_coupling: inputs must be >= 0");
    return consts.g_factor * consts.bohr_magneton * gradient * zero_point_amplitude /
           consts.hbar;
}

/// Symmetric-case constants plus their first-order splitting under a gap
/// asymmetry delta_h. Spin 1 sits at the narrowed gap.
struct CouplingSet {
    double lambda = 0.0;  // symmetric spin-resonator coupling [rad/s]
    double lambda1 = 0.0; // lambda (1 + delta_h)
    double lambda2 = 0.0; // lambda (1 - delta_h)
    double rabi = 0.0;    // Omega [rad/s]
    double rabi1 = 0.0;
    double rabi2 = 0.0;
    double detuning_drive = 0.0; // delta [rad/s]
    double omega = 0.0;   // dressed splitting sqrt(Omega^2 + delta^2)
    double omega1 = 0.0;  // omega + delta_omega
    double omega2 = 0.0;  // omega - delta_omega
    double delta_omega = 0.0; // (Omega^2 / omega) delta_h
    double resonator_frequency = 0.0; // omega_r [rad/s]
    double detuning = 0.0;  // Delta = omega_r - omega
    double detuning1 = 0.0; // Delta_1 = omega_r - omega_1
    double detuning2 = 0.0; // Delta_2 = omega_r - omega_2
    double theta = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double delta_h = 0.0;
    double phonon_number = 0.0; // mean resonator occupation n
    double alpha = 0.0;         // Omega^2 / (omega Delta)
};

/// Expand the dressed constants around the symmetric point. delta_h may take
/// either sign (negative means the cantilever bends toward spin 2); the
/// configuration boundary is where [0, 1) is enforced.
inline CouplingSet asymmetric_couplings(double lambda, double rabi, double detuning_drive,
                                        double resonator_frequency, double delta_h,
                                        double phonon_number) {
    if (std::abs(delta_h) >= 1.0)
        throw std::invalid_argument("asymmetric_couplings: |delta_h| must be < 1");
    if (phonon_number < 0.0)
        throw std::invalid_argument("asymmetric_couplings: phonon_number must be >= 0");
    CouplingSet s;
    s.lambda = lambda;
    s.rabi = rabi;
    s.detuning_drive = detuning_drive;
    s.resonator_frequency = resonator_frequency;
    s.delta_h = delta_h;
    s.phonon_number = phonon_number;

    const DressedParameters sym = dressed_parameters(rabi, detuning_drive);
    s.omega = sym.omega;
    s.theta = sym.theta;
    s.detuning = resonator_frequency - s.omega;
    if (s.detuning == 0.0)
        throw dispersive_breakdown_error(
            "asymmetric_couplings: Delta = omega_r - omega vanishes");

    s.lambda1 = lambda * (1.0 + delta_h);
    s.lambda2 = lambda * (1.0 - delta_h);
    s.rabi1 = rabi * (1.0 + delta_h);
    s.rabi2 = rabi * (1.0 - delta_h);
    s.delta_omega = (rabi * rabi / s.omega) * delta_h;
    s.omega1 = s.omega + s.delta_omega;
    s.omega2 = s.omega - s.delta_omega;
    s.detuning1 = resonator_frequency - s.omega1;
    s.detuning2 = resonator_frequency - s.omega2;
    if (s.detuning1 == 0.0 || s.detuning2 == 0.0)
        throw dispersive_breakdown_error(
            "asymmetric_couplings: a spin-resonator detuning Delta_i vanishes");
    s.theta1 = dressed_parameters(s.rabi1, detuning_drive).theta;
    s.theta2 = dressed_parameters(s.rabi2, detuning_drive).theta;
    s.alpha = rabi * rabi / (s.omega * s.detuning);
    return s;
}

/// Resonator-mediated spin-spin coupling in the small-asymmetry expansion,
/// J = (2 lambda^2 / omega) alpha [1 + (alpha^2 - 1) delta_h^2].
/// Uses sin(theta) ~= Omega / omega; the exact per-spin angles live in the
/// effective-Hamiltonian builder so the approximation stays measurable.
inline double effective_coupling_strength(const CouplingSet& set) {
    const double correction = 1.0 + (set.alpha * set.alpha - 1.0) * set.delta_h * set.delta_h;
    return (2.0 * set.lambda * set.lambda / set.omega) * set.alpha * correction;
}

/// Whether gap asymmetry strengthens the spin-spin coupling:
/// Omega^4 / (omega^2 Delta^2) > 1, i.e. alpha^2 > 1 (boundary excluded).
inline bool enhancement_predicate(const CouplingSet& set) {
    return set.alpha * set.alpha > 1.0;
}

} // namespace nvseesaw
