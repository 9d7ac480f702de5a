#pragma once

#include "nvseesaw/constants.hpp"
#include "nvseesaw/errors.hpp"
#include "nvseesaw/units.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>

namespace nvseesaw {

/// Geometry and material data of the film-coated cantilever. SI units.
///
/// The substrate is modelled as a uniform Euler-Bernoulli beam; the magnetic
/// film enters only through its thickness, magnetoelastic coefficient and
/// moment density (thin-film limit t_f < t_s).
struct CantileverSpec {
    double length = 0.0;              // L [m]
    double width = 0.0;               // w [m]
    double substrate_thickness = 0.0; // t_s [m]
    double film_thickness = 0.0;      // t_f [m]
    double young_modulus = 0.0;       // Y [Pa]
    double poisson_ratio = 0.0;       // nu, 0 < nu < 0.5
    double density = 0.0;             // rho [kg/m^3]
    double magnetoelastic_b1 = 0.0;   // B1 [J/m^3]
    double atomic_volume = 0.0;       // volume per film atom [m^3]
    double moment_per_atom = 2.0;     // film moment in units of mu_B
    double rest_gap = 0.0;            // h_0, tip-spin gap at zero deflection [m]

    void validate() const {
        require(length > 0.0, "length must be > 0");
        require(width > 0.0, "width must be > 0");
        require(substrate_thickness > 0.0, "substrate_thickness must be > 0");
        require(film_thickness >= 0.0, "film_thickness must be >= 0");
        require(film_thickness < substrate_thickness,
                "thin-film formulas require film_thickness < substrate_thickness");
        require(young_modulus > 0.0, "young_modulus must be > 0");
        require(poisson_ratio > 0.0 && poisson_ratio < 0.5,
                "poisson_ratio must lie in (0, 0.5)");
        require(density > 0.0, "density must be > 0");
        require(atomic_volume > 0.0, "atomic_volume must be > 0");
        require(moment_per_atom >= 0.0, "moment_per_atom must be >= 0");
        require(rest_gap > 0.0, "rest_gap must be > 0");
    }

  private:
    static void require(bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(std::string("CantileverSpec: ") + msg);
    }
};

/// Si(100) substrate with a 10 nm Ni film, the reference device used by the
/// bundled configs: 3000 x 300 x 30 nm, Y = 130 GPa, nu = 0.279,
/// rho = 2330 kg/m^3, B1 = 9.38 MJ/m^3, bulk-Ni atomic volume, h_0 = 25 nm.
inline CantileverSpec reference_cantilever() {
    CantileverSpec s;
    s.length = units::m_from_nm(3000.0);
    s.width = units::m_from_nm(300.0);
    s.substrate_thickness = units::m_from_nm(30.0);
    s.film_thickness = units::m_from_nm(10.0);
    s.young_modulus = units::pa_from_gpa(130.0);
    s.poisson_ratio = 0.279;
    s.density = 2330.0;
    s.magnetoelastic_b1 = 9.38e6;
    s.atomic_volume = 1.096e-29;
    s.moment_per_atom = 2.0;
    s.rest_gap = units::m_from_nm(25.0);
    return s;
}

enum class DeflectionMechanism { magnetoelastic, torque };

inline const char* to_string(DeflectionMechanism m) {
    return m == DeflectionMechanism::magnetoelastic ? "magnetoelastic" : "torque";
}

/// Static deflection of the free end and the resulting tip-spin gap split.
/// Invariants: h1 = h0 - deflection > 0, h2 = h0 + deflection,
/// delta_h = 2|h1 - h2| / (h1 + h2) = 2 deflection / h0.
struct DeflectionReport {
    DeflectionMechanism mechanism = DeflectionMechanism::torque;
    double deflection = 0.0; // [m]
    double h1 = 0.0;         // gap to the near spin [m]
    double h2 = 0.0;         // gap to the far spin [m]
    double delta_h = 0.0;    // dimensionless asymmetry
    bool over_field_warning = false;
};

inline DeflectionReport make_deflection_report(DeflectionMechanism mechanism,
                                               double deflection, double rest_gap) {
    if (deflection >= rest_gap) {
        std::ostringstream os;
        os << to_string(mechanism) << " deflection " << units::nm_from_m(deflection)
           << " nm closes the " << units::nm_from_m(rest_gap) << " nm tip-spin gap";
        throw gap_closure_error(os.str());
    }
    DeflectionReport r;
    r.mechanism = mechanism;
    r.deflection = deflection;
    r.h1 = rest_gap - deflection;
    // Complement-gap pairing. Downstream code asserts h1 + h2 == 2 h0
    // bit-exactly; when 2 h0 - h1 lands on a rounding tie of h2's grid the
    // pair cannot sum back exactly, so shift h1 one (finer) ulp to break the
    // tie. Both gaps stay within 1 ulp of their ideal values.
    const double gap_sum = 2.0 * rest_gap;
    r.h2 = gap_sum - r.h1;
    if (r.h1 + r.h2 != gap_sum) {
        r.h1 = std::nextafter(r.h1, 0.0);
        r.h2 = gap_sum - r.h1;
    }
    r.delta_h = 2.0 * deflection / rest_gap;
    return r;
}

/// m = rho L w t_s.
inline double mass(const CantileverSpec& spec) {
    spec.validate();
    return spec.density * spec.length * spec.width * spec.substrate_thickness;
}

/// First three flexural resonance frequencies [Hz],
/// f = t_s beta^2 sqrt(Y / (3 rho)) / (4 pi L^2).
/// Only the tabulated modes are supported; higher ones are rejected.
inline double resonance_frequency(const CantileverSpec& spec, int mode_index) {
    spec.validate();
    static constexpr std::array<double, 3> beta = {1.8751, 4.6941, 7.8548};
    if (mode_index < 1 || mode_index > 3)
        throw std::invalid_argument("resonance_frequency: mode_index must be 1, 2 or 3");
    const double b = beta[static_cast<std::size_t>(mode_index - 1)];
    return spec.substrate_thickness * b * b *
           std::sqrt(spec.young_modulus / (3.0 * spec.density)) /
           (two_pi * 2.0 * spec.length * spec.length);
}

/// Self-weight end deflection of a uniformly loaded cantilever,
/// 3 rho g L^4 / (2 Y t_s^2). Includes g, which the usual quoted form omits.
inline double gravity_sag(const CantileverSpec& spec,
                          const PhysicalConstants& consts = si_constants()) {
    spec.validate();
    return 3.0 * spec.density * consts.gravity *
           std::pow(spec.length, 4) /
           (2.0 * spec.young_modulus * spec.substrate_thickness * spec.substrate_thickness);
}

/// Magnetoelastic end deflection, 3 L^2 t_f (1 + nu) B1 / (Y t_s^2).
/// Independent of the applied field magnitude; the field only reorients the
/// film magnetization.
inline double deflection_magnetoelastic_m(const CantileverSpec& spec) {
    spec.validate();
    return 3.0 * spec.length * spec.length * spec.film_thickness *
           (1.0 + spec.poisson_ratio) * spec.magnetoelastic_b1 /
           (spec.young_modulus * spec.substrate_thickness * spec.substrate_thickness);
}

inline DeflectionReport deflection_magnetoelastic(const CantileverSpec& spec) {
    return make_deflection_report(DeflectionMechanism::magnetoelastic,
                                  deflection_magnetoelastic_m(spec), spec.rest_gap);
}

/// B_0 <= B_max keeps the Zeeman shift below the zero-field splitting,
/// B_max = hbar omega_0 / mu_B.
inline double max_field(double zero_field_splitting,
                        const PhysicalConstants& consts = si_constants()) {
    if (zero_field_splitting <= 0.0)
        throw std::invalid_argument("max_field: zero_field_splitting must be > 0");
    return consts.hbar * zero_field_splitting / consts.bohr_magneton;
}

/// Torque-induced end deflection,
/// 4 t_f (moment_per_atom mu_B) B_0 L^3 / (atomic_volume Y t_s^3).
/// Linear in B_0.
inline double deflection_torque_m(const CantileverSpec& spec, double b0,
                                  const PhysicalConstants& consts = si_constants()) {
    spec.validate();
    if (b0 < 0.0) throw std::invalid_argument("deflection_torque: B0 must be >= 0");
    return 4.0 * spec.film_thickness *
           (spec.moment_per_atom * consts.bohr_magneton) * b0 *
           std::pow(spec.length, 3) /
           (spec.atomic_volume * spec.young_modulus * std::pow(spec.substrate_thickness, 3));
}

inline DeflectionReport deflection_torque(const CantileverSpec& spec, double b0,
                                          const PhysicalConstants& consts = si_constants()) {
    DeflectionReport r = make_deflection_report(
        DeflectionMechanism::torque, deflection_torque_m(spec, b0, consts), spec.rest_gap);
    // Fields beyond the splitting bound stay evaluable; flag them instead of failing.
    r.over_field_warning = b0 > max_field(nv_zero_field_splitting, consts);
    return r;
}

/// Asymmetry parameter of the torque-deflected cantilever,
/// delta_h(B_0) = 8 t_f (moment_per_atom) mu_B B_0 L^3 / (h_0 atomic_volume Y t_s^3),
/// identical to 2 deflection_torque / h_0.
inline double asymmetry(const CantileverSpec& spec, double b0,
                        const PhysicalConstants& consts = si_constants()) {
    spec.validate();
    if (b0 < 0.0) throw std::invalid_argument("asymmetry: B0 must be >= 0");
    const double defl = deflection_torque_m(spec, b0, consts);
    if (defl >= spec.rest_gap)
        throw gap_closure_error("asymmetry: torque deflection reaches the rest gap");
    return 8.0 * spec.film_thickness * spec.moment_per_atom * consts.bohr_magneton * b0 *
           std::pow(spec.length, 3) /
           (spec.rest_gap * spec.atomic_volume * spec.young_modulus *
            std::pow(spec.substrate_thickness, 3));
}

/// Zero-point amplitude of the mechanical mode, a_0 = sqrt(hbar / (2 m omega_r)).
inline double zero_point_amplitude(double mass_kg, double omega_r,
                                   const PhysicalConstants& consts = si_constants()) {
    if (mass_kg <= 0.0 || omega_r <= 0.0)
        throw std::invalid_argument("zero_point_amplitude: mass and omega_r must be > 0");
    return std::sqrt(consts.hbar / (2.0 * mass_kg * omega_r));
}

} // namespace nvseesaw
