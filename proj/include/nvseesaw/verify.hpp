#pragma once

#include "nvseesaw/engine.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace nvseesaw {

struct VerifyOptions {
    std::uint64_t seed = 20240801;
    /// Test hook: overriding the mode-2 beta constant used for the expected
    /// resonance ratios must make the resonance check fail.
    std::optional<double> beta2_override;
};

struct CheckResult {
    std::string id;
    bool pass = false;
    std::string detail;
};

namespace detail {

/// Deterministic uniform/normal source (Box-Muller over mt19937_64), so the
/// randomized checks reproduce bit-for-bit for a given --seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    double normal() {
        const double u1 = std::max(uniform(0.0, 1.0), 1e-300);
        const double u2 = uniform(0.0, 1.0);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    BellAmplitudes random_pure_state() {
        std::array<complexd, 4> c{};
        double norm = 0.0;
        for (auto& a : c) {
            a = complexd(normal(), normal());
            norm += std::norm(a);
        }
        const double scale = 1.0 / std::sqrt(norm);
        for (auto& a : c) a *= scale;
        return BellAmplitudes{c};
    }

    CantileverSpec random_cantilever() {
        CantileverSpec s;
        s.length = uniform(1e-6, 5e-6);
        s.width = uniform(1e-7, 5e-7);
        s.substrate_thickness = uniform(1e-8, 1e-7);
        s.film_thickness = uniform(0.05, 0.45) * s.substrate_thickness;
        s.young_modulus = uniform(5e10, 3e11);
        s.poisson_ratio = uniform(0.05, 0.45);
        s.density = uniform(1000.0, 5000.0);
        s.magnetoelastic_b1 = uniform(1e6, 2e7);
        s.atomic_volume = uniform(5e-30, 2e-29);
        s.moment_per_atom = uniform(0.5, 4.0);
        s.rest_gap = uniform(1e-8, 1e-7);
        return s;
    }

    /// Coupling sets away from the dispersive boundaries.
    CouplingSet random_coupling_set() {
        for (;;) {
            const double lambda = units::rad_s_from_mhz(uniform(0.02, 0.3));
            const double alpha = uniform(0.2, 3.5);
            const double dh = uniform(0.0, 0.8);
            if (std::abs(alpha * dh - 1.0) < 0.05) continue;
            const double n = uniform(0.0, 3.0);
            const double big_delta = 2.0 * lambda;
            const double rabi = alpha * big_delta;
            const double omega_r = rabi + big_delta;
            return asymmetric_couplings(lambda, rabi, 0.0, omega_r, dh, n);
        }
    }

  private:
    std::mt19937_64 gen_;
};

inline bool close_rel(double a, double b, double tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= tol * scale;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

} // namespace detail

/// Run every cross-module invariant and oracle check. Returns the per-check
/// results; printing and exit-code mapping happen in run_verify.
inline std::vector<CheckResult> verify_checks(const VerifyOptions& opts) {
    std::vector<CheckResult> results;
    detail::Rng rng(opts.seed);
    const PhysicalConstants& consts = si_constants();
    auto add = [&](const std::string& id, bool pass, const std::string& detail) {
        results.push_back({id, pass, detail});
    };

    // --- mechanics ---------------------------------------------------------
    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 64 && ok; ++i) {
            const CantileverSpec s = rng.random_cantilever();
            const double b0 = rng.uniform(0.0, 0.02);
            const double defl = deflection_torque_m(s, b0, consts);
            if (defl >= s.rest_gap) continue;
            const double direct = asymmetry(s, b0, consts);
            const double via_report = 2.0 * defl / s.rest_gap;
            worst = std::max(worst, std::abs(direct - via_report) /
                                        std::max(1e-300, std::abs(direct)));
            ok = detail::close_rel(direct, via_report, 1e-12);
        }
        add("mech.asymmetry_identity", ok,
            "asymmetry vs 2 defl_torque / h0, worst rel dev " + detail::fmt(worst));
    }
    {
        bool ok = true;
        for (int i = 0; i < 64 && ok; ++i) {
            const CantileverSpec s = rng.random_cantilever();
            const double b0 = rng.uniform(1e-4, 0.02);
            ok = detail::close_rel(deflection_torque_m(s, 2.0 * b0, consts),
                                   2.0 * deflection_torque_m(s, b0, consts), 1e-12);
        }
        add("mech.torque_linearity", ok, "defl(2 B0) = 2 defl(B0) to 1e-12 relative");
    }
    {
        const double beta1 = 1.8751;
        const double beta2 = opts.beta2_override.value_or(4.6941);
        const double beta3 = 7.8548;
        const double expect21 = (beta2 / beta1) * (beta2 / beta1);
        const double expect31 = (beta3 / beta1) * (beta3 / beta1);
        bool ok = true;
        for (int i = 0; i < 16 && ok; ++i) {
            const CantileverSpec s = rng.random_cantilever();
            const double f1 = resonance_frequency(s, 1);
            ok = detail::close_rel(resonance_frequency(s, 2) / f1, expect21, 1e-12) &&
                 detail::close_rel(resonance_frequency(s, 3) / f1, expect31, 1e-12);
        }
        add("mech.resonance_ratios", ok,
            "f2/f1 and f3/f1 geometry-independent, expected " + detail::fmt(expect21) +
                " and " + detail::fmt(expect31));
    }
    {
        const CantileverSpec ref = reference_cantilever();
        const double ratio = gravity_sag(ref, consts) /
                             deflection_torque_m(ref, units::t_from_mt(10.0), consts);
        add("mech.gravity_sag_negligible", ratio < 1e-4,
            "sag / torque-deflection(10 mT) = " + detail::fmt(ratio));
    }
    {
        bool ok = true;
        for (int i = 0; i < 64 && ok; ++i) {
            const CantileverSpec s = rng.random_cantilever();
            const double defl = rng.uniform(0.0, 0.9) * s.rest_gap;
            const DeflectionReport r =
                make_deflection_report(DeflectionMechanism::torque, defl, s.rest_gap);
            ok = (r.h1 + r.h2) == 2.0 * s.rest_gap;
        }
        add("mech.gap_sum", ok, "h1 + h2 = 2 h0 exactly");
    }

    // --- spin model --------------------------------------------------------
    {
        bool ok = true;
        for (int i = 0; i < 256 && ok; ++i) {
            const double rabi = rng.uniform(1e3, 1e8);
            const double delta = rng.uniform(-1e7, 1e7);
            const DressedParameters d = dressed_parameters(rabi, delta);
            const double s = std::sin(d.theta);
            const double c = std::cos(d.theta);
            ok = std::abs(s * s + c * c - 1.0) <= 1e-12 &&
                 detail::close_rel(d.omega * s, rabi, 1e-12);
        }
        add("spin.dressed_identity", ok, "sin^2 + cos^2 = 1 and omega sin(theta) = Omega");
    }
    {
        bool ok = true;
        for (int i = 0; i < 64 && ok; ++i) {
            const CouplingSet a = rng.random_coupling_set();
            const CouplingSet b =
                asymmetric_couplings(a.lambda, a.rabi, a.detuning_drive,
                                     a.resonator_frequency, -a.delta_h, a.phonon_number);
            ok = detail::close_rel(a.lambda1, b.lambda2, 1e-12) &&
                 detail::close_rel(a.lambda2, b.lambda1, 1e-12) &&
                 detail::close_rel(a.omega1, b.omega2, 1e-12) &&
                 detail::close_rel(a.detuning1, b.detuning2, 1e-12) &&
                 detail::close_rel(a.theta1, b.theta2, 1e-12);
        }
        add("spin.involution", ok, "delta_h -> -delta_h swaps the spin labels");
    }
    {
        bool ok = true;
        for (int i = 0; i < 64 && ok; ++i) {
            const CouplingSet s = rng.random_coupling_set();
            const CouplingSet sym = asymmetric_couplings(
                s.lambda, s.rabi, s.detuning_drive, s.resonator_frequency, 0.0,
                s.phonon_number);
            const double ratio =
                effective_coupling_strength(s) / effective_coupling_strength(sym);
            const double expected =
                1.0 + (s.alpha * s.alpha - 1.0) * s.delta_h * s.delta_h;
            ok = detail::close_rel(ratio, expected, 1e-12);
        }
        add("spin.coupling_ratio_identity", ok,
            "J(delta_h) / J(0) = 1 + (alpha^2 - 1) delta_h^2");
    }
    {
        bool ok = true;
        for (int i = 0; i < 64 && ok; ++i) {
            const double delta = rng.uniform(-1e7, 1e7);
            const double rabi = rng.uniform(1e3, 1e8);
            const ThreeLevelSystem sys = three_level_hamiltonian(delta, delta, rabi, rabi);
            const complexd elem = ThreeLevelSystem::ket_dark().dot(
                sys.hamiltonian * ThreeLevelSystem::ket_zero());
            ok = std::abs(elem) == 0.0;
        }
        add("spin.dark_state", ok, "symmetric drive leaves <d|H|0> exactly zero");
    }
    {
        bool ok = true;
        for (int i = 0; i < 64 && ok; ++i) {
            CouplingSet s = rng.random_coupling_set();
            if (std::abs(s.alpha - 1.0) < 0.05) continue;
            const CouplingSet at0 = asymmetric_couplings(
                s.lambda, s.rabi, s.detuning_drive, s.resonator_frequency, 0.0,
                s.phonon_number);
            const CouplingSet at_eps = asymmetric_couplings(
                s.lambda, s.rabi, s.detuning_drive, s.resonator_frequency, 1e-3,
                s.phonon_number);
            const bool increasing = effective_coupling_strength(at_eps) >
                                    effective_coupling_strength(at0);
            ok = increasing == enhancement_predicate(s);
        }
        add("spin.enhancement_slope", ok,
            "enhancement predicate matches the sign of dJ/d(delta_h) at 0+");
    }

    // --- dynamics ----------------------------------------------------------
    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 64 && ok; ++i) {
            const EffectiveHamiltonian h = build_heff(rng.random_coupling_set());
            const double dev = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
            worst = std::max(worst, dev);
            ok = dev <= 1e-12;
        }
        add("dyn.heff_hermitian", ok, "max |H - H^dagger| = " + detail::fmt(worst));
    }
    {
        bool ok = true;
        for (int i = 0; i < 8 && ok; ++i) {
            const EffectiveHamiltonian h = build_heff(rng.random_coupling_set());
            BellAmplitudes phi{};
            const double x = rng.uniform(0.1, 0.9);
            phi.c[0] = std::sqrt(x);
            phi.c[1] = complexd(0.0, std::sqrt(1.0 - x));
            const BellAmplitudes phi_out =
                evolve_numeric(phi, h, units::s_from_us(2.0), units::s_from_us(1e-3));
            BellAmplitudes psi{};
            psi.c[2] = std::sqrt(1.0 - x);
            psi.c[3] = complexd(0.0, std::sqrt(x));
            const BellAmplitudes psi_out =
                evolve_numeric(psi, h, units::s_from_us(2.0), units::s_from_us(1e-3));
            const double leak =
                std::max(std::abs(phi_out.c[2]) + std::abs(phi_out.c[3]),
                         std::abs(psi_out.c[0]) + std::abs(psi_out.c[1]));
            ok = leak <= 1e-9;
        }
        add("dyn.block_leakage", ok, "numeric evolution keeps Phi and psi blocks separate");
    }
    {
        const CouplingSet set = standard_mapping(1.5, 0.4, 1.0);
        const ABDFCoefficients k = abdf(set);
        const EffectiveHamiltonian h = build_heff(set);
        const BellAmplitudes initial =
            BellAmplitudes::normalized_initial({0.5, 0.5, 0.5, 0.5});
        bool ok = true;
        double worst_printed = 0.0;
        for (int i = 1; i <= 40 && ok; ++i) {
            const double t = units::s_from_us(0.7 * i);
            const BellAmplitudes u =
                evolve_closed_form(initial, k, t, EvolutionMode::unitary);
            ok = std::abs(u.norm_squared() - 1.0) <= 1e-9;
            const BellAmplitudes p =
                evolve_closed_form(initial, k, t, EvolutionMode::printed);
            const double predicted = std::abs(std::sin(2.0 * k.A * t)) / 2.0;
            const double measured = std::abs(p.norm_squared() - 1.0);
            worst_printed = std::max(worst_printed, std::abs(measured - predicted));
            ok = ok && worst_printed <= 1e-9;
        }
        const BellAmplitudes n = evolve_numeric(initial, h, units::s_from_us(30.0),
                                                units::s_from_us(1e-3));
        ok = ok && std::abs(n.norm_squared() - 1.0) <= 1e-9;
        add("dyn.unitarity", ok,
            "unitary/numeric norms conserved; printed-mode norm deviation matches "
            "|sin 2At| / 2 (worst mismatch " + detail::fmt(worst_printed) + ")");
    }
    {
        bool ok = true;
        for (int i = 0; i < 128 && ok; ++i) {
            const CouplingSet s = rng.random_coupling_set();
            const ABDFCoefficients k = abdf(s);
            ok = detail::close_rel(k.B * (2.0 * s.phonon_number + 1.0), -k.A, 1e-12) &&
                 k.F >= std::abs(k.B);
        }
        add("dyn.abdf_identity", ok, "B (2n+1) + A = 0 and F >= |B| for every set");
    }
    {
        const CouplingSet set = standard_mapping(3.0, 0.0, 1.0);
        const ABDFCoefficients k = abdf(set);
        const EffectiveHamiltonian h = build_heff(set);
        const BellAmplitudes initial =
            BellAmplitudes::normalized_initial({0.5, 0.5, 0.5, 0.5});
        const double dt = units::s_from_us(1e-3);
        BellAmplitudes numeric = initial;
        double worst = 0.0;
        for (int i = 1; i <= 30000; ++i) {
            numeric = evolve_numeric(numeric, h, dt, dt);
            if (i % 10 != 0) continue;
            const double t = static_cast<double>(i) * dt;
            const double closed = concurrence_pure(
                evolve_closed_form(initial, k, t, EvolutionMode::unitary));
            worst = std::max(worst, std::abs(closed - wootters_concurrence(numeric)));
        }
        add("dyn.oracle_chain", worst <= 1e-6,
            "delta_h = 0 closed form vs RK4 + spin-flip oracle, Linf = " +
                detail::fmt(worst));
    }
    {
        bool ok = true;
        double worst = 0.0;
        const BellAmplitudes initial =
            BellAmplitudes::normalized_initial({0.5, 0.5, 0.5, 0.5});
        const CouplingSet sym = standard_mapping(1.0, 0.0, 1.0);
        const ABDFCoefficients k0 = abdf(sym);
        for (int i = 0; i <= 300; ++i) {
            const double t = units::s_from_us(0.1 * i);
            const double printed = concurrence_pure(
                evolve_closed_form(initial, k0, t, EvolutionMode::printed));
            const double unitary = concurrence_pure(
                evolve_closed_form(initial, k0, t, EvolutionMode::unitary));
            const double eq22 = concurrence_closed_form(initial, k0, t).value;
            worst = std::max({worst, std::abs(printed - unitary),
                              std::abs(printed - eq22)});
        }
        // At nonzero asymmetry only printed vs unitary is expected to agree for
        // this initial state; the literal expression deviates (see notes).
        const ABDFCoefficients k1 = abdf(standard_mapping(3.0, 0.5, 1.0));
        for (int i = 0; i <= 300; ++i) {
            const double t = units::s_from_us(0.1 * i);
            const double printed = concurrence_pure(
                evolve_closed_form(initial, k1, t, EvolutionMode::printed));
            const double unitary = concurrence_pure(
                evolve_closed_form(initial, k1, t, EvolutionMode::unitary));
            worst = std::max(worst, std::abs(printed - unitary));
        }
        ok = worst <= 1e-9;
        add("dyn.concurrence_pairwise", ok,
            "equal-amplitude start: route agreement, worst gap " + detail::fmt(worst));
    }
    {
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 256 && ok; ++i) {
            const BellAmplitudes state = rng.random_pure_state();
            const double a = concurrence_pure(state);
            const double b = wootters_concurrence(state);
            worst = std::max(worst, std::abs(a - b));
            ok = worst <= 1e-9 && a >= 0.0 && a <= 1.0 + 1e-9 && b >= 0.0 &&
                 b <= 1.0 + 1e-9;
        }
        add("dyn.pure_vs_wootters", ok,
            "spin-flip formula vs eigenvalue route, worst gap " + detail::fmt(worst));
    }

    // --- harness -----------------------------------------------------------
    {
        ScenarioConfig cfg;
        cfg.alpha = 1.5;
        cfg.delta_h = 0.25;
        cfg.t_max_us = 2.0;
        cfg.dt_us = 1e-3;
        cfg.alpha_steps = 8;
        cfg.delta_h_steps = 7;
        std::ostringstream first, second;
        write_timeseries_csv(run_timeseries(cfg), first);
        write_sweep_csv(run_contour(cfg), first);
        write_timeseries_csv(run_timeseries(cfg), second);
        write_sweep_csv(run_contour(cfg), second);
        add("harness.determinism", first.str() == second.str(),
            "repeated timeseries + sweep runs are byte-identical");
    }
    {
        ScenarioConfig cfg;
        cfg.alpha_min = 0.25;
        cfg.alpha_max = 3.0;
        cfg.alpha_steps = 2;
        cfg.delta_h_min = 0.0;
        cfg.delta_h_max = 0.5;
        cfg.delta_h_steps = 2;
        cfg.t_star_us = 13.3;
        const SweepResult sweep = run_contour(cfg);
        bool ok = true;
        double worst = 0.0;
        for (std::size_t ai = 0; ai < sweep.alphas.size() && ok; ++ai) {
            for (std::size_t di = 0; di < sweep.delta_hs.size() && ok; ++di) {
                ScenarioConfig ts_cfg = cfg;
                ts_cfg.alpha = sweep.alphas[ai];
                ts_cfg.delta_h = sweep.delta_hs[di];
                ts_cfg.t_max_us = cfg.t_star_us;
                const TimeseriesResult ts = run_timeseries(ts_cfg);
                const double dev =
                    std::abs(ts.rows.back().c_printed - sweep.at(ai, di));
                worst = std::max(worst, dev);
                ok = dev <= 1e-12;
            }
        }
        add("harness.grid_consistency", ok,
            "contour cells match timeseries at t*, worst gap " + detail::fmt(worst));
    }
    {
        ScenarioConfig cfg;
        cfg.alpha = 2.25;
        cfg.delta_h = 0.125;
        cfg.mode = EvolutionMode::unitary;
        const ScenarioConfig reloaded = parse_config(to_json(cfg));
        const bool ok = to_json(reloaded) == to_json(cfg);
        add("harness.config_roundtrip", ok, "serialize + reload preserves every field");
    }
    {
        bool ok = true;
        double low = 1.0, high = 0.0;
        const BellAmplitudes initial =
            BellAmplitudes::normalized_initial({0.5, 0.5, 0.5, 0.5});
        for (double alpha : {0.25, 1.5, 3.0}) {
            for (double dh : {0.0, 0.25, 0.5}) {
                const ABDFCoefficients k = abdf(standard_mapping(alpha, dh, 1.0));
                for (int i = 0; i <= 100; ++i) {
                    const double t = units::s_from_us(0.3 * i);
                    for (EvolutionMode mode :
                         {EvolutionMode::printed, EvolutionMode::unitary}) {
                        const double c =
                            concurrence_pure(evolve_closed_form(initial, k, t, mode));
                        low = std::min(low, c);
                        high = std::max(high, c);
                        ok = ok && c >= 0.0 && c <= 1.0 + 1e-9;
                    }
                }
            }
        }
        add("dyn.concurrence_range", ok,
            "sampled concurrence stays in [0, 1], range [" + detail::fmt(low) + ", " +
                detail::fmt(high) + "]");
    }

    return results;
}

/// Discrepancies between the published derivation and independent evaluation.
/// These are reported verbatim on every verify run and deliberately left
/// unpatched in the implementation.
inline std::vector<std::string> discrepancy_notes() {
    const PhysicalConstants& consts = si_constants();
    const CantileverSpec ref = reference_cantilever();
    std::vector<std::string> notes;
    {
        std::ostringstream os;
        os << "gravity-sag exponent: the quoted self-weight deflection 2.4e-15 m "
              "omits g; the dimensionally consistent 3 rho g L^4 / (2 Y t_s^2) gives "
           << detail::fmt(gravity_sag(ref, consts))
           << " m (factor ~10). Documented, not patched.";
        notes.push_back(os.str());
    }
    {
        const double m = mass(ref);
        const double f1 = resonance_frequency(ref, 1);
        std::ostringstream os;
        os << "zero-point amplitude 2pi convention: the quoted a0 ~ 5e-13 m "
              "reproduces only with omega_r taken as "
           << detail::fmt(f1) << " 1/s (no 2 pi), giving "
           << detail::fmt(zero_point_amplitude(m, f1, consts))
           << " m; the angular convention gives "
           << detail::fmt(zero_point_amplitude(m, two_pi * f1, consts))
           << " m. Both are reported; angular is the default.";
        notes.push_back(os.str());
    }
    {
        const double lambda_chain =
            tip_coupling(1e6, 5e-13, consts); // quoted gradient and a0
        std::ostringstream os;
        os << "lambda magnitude chain: g_S mu_B G_m a0 / hbar with the quoted "
              "G_m = 1e6 T/m and a0 = 5e-13 m gives "
           << detail::fmt(units::mhz_from_rad_s(lambda_chain))
           << " MHz (2pi units), not the quoted lambda/2pi ~ 0.1 MHz (factor ~7). "
              "lambda is therefore accepted directly as a configuration scalar.";
        notes.push_back(os.str());
    }
    notes.push_back(
        "Eq. (12) vs Eq. (20) exponent: the coupling enhancement uses (alpha^2 - 1) "
        "while the evolution coefficients use (alpha - 1). Each formula is "
        "implemented as printed; the mismatch is documented, not reconciled.");
    notes.push_back(
        "Eq. (18) Phi-block non-unitarity: as printed, C1 and C2 both evolve with "
        "a real -sin(At) term, which does not conserve the norm. Both the literal "
        "'printed' mode and a 'unitary' (-i sin) repair are shipped; for the "
        "equal-amplitude figure start the two give identical concurrence.");
    notes.push_back(
        "high-alpha asymmetry trend: the claim that asymmetry raises the "
        "concurrence for alpha > 1 is not reproduced by any evaluation route "
        "(printed, unitary, literal expression, or exact effective Hamiltonian); "
        "the time-averaged concurrence falls with delta_h at alpha = 3 under the "
        "standard mapping. The quoted 3x coupling gain comes from a second-order "
        "expansion evaluated outside its radius of convergence (alpha delta_h > 1); "
        "the exact ratio (1 - dh^2)/(1 - alpha^2 dh^2) there is -0.6, and the "
        "sigma_z dephasing asymmetry grows faster than the exchange gain. "
        "Reported, not patched.");
    return notes;
}

/// Print the full report. Returns 0 when every check passes, 3 otherwise.
inline int run_verify(std::ostream& out, const VerifyOptions& opts = {}) {
    int failures = 0;
    std::vector<CheckResult> checks;
    try {
        checks = verify_checks(opts);
    } catch (const std::exception& e) {
        out << "FAIL verify.aborted " << e.what() << "\n";
        return 3;
    }
    for (const CheckResult& c : checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.id << "  " << c.detail << "\n";
        if (!c.pass) ++failures;
    }
    out << "\nDocumented source-derivation discrepancies (reported, not patched):\n";
    for (const std::string& note : discrepancy_notes()) out << "  * " << note << "\n";
    out << "\n" << (checks.size() - static_cast<std::size_t>(failures)) << "/"
        << checks.size() << " checks passed\n";
    return failures == 0 ? 0 : 3;
}

} // namespace nvseesaw
