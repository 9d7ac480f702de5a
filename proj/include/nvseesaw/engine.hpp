#pragma once

#include "nvseesaw/config.hpp"
#include "nvseesaw/csv.hpp"
#include "nvseesaw/dynamics.hpp"
#include "nvseesaw/mechanics.hpp"
#include "nvseesaw/spin_model.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace nvseesaw {

// ---------------------------------------------------------------------------
// Standard parameter mapping
// ---------------------------------------------------------------------------

/// Coupling set for the standard operating point: lambda / 2 pi = 0.1 MHz,
/// Delta = 2 lambda (the time scale of the problem), omega = Omega = alpha
/// Delta and delta = 0, so alpha = Omega^2 / (omega Delta) by construction.
/// With a nonzero drive detuning omega > Omega and the requested alpha is
/// only approximate; the set's alpha field always carries the exact value.
inline CouplingSet standard_mapping(double alpha, double delta_h, double phonon_number,
                                    double lambda_over_2pi_mhz = 0.1,
                                    double delta_over_2pi_mhz = 0.0) {
    if (alpha <= 0.0) throw std::invalid_argument("standard_mapping: alpha must be > 0");
    const double lambda = units::rad_s_from_mhz(lambda_over_2pi_mhz);
    const double big_delta = 2.0 * lambda;
    const double rabi = alpha * big_delta;
    const double drive_detuning = units::rad_s_from_mhz(delta_over_2pi_mhz);
    const double omega = std::hypot(rabi, drive_detuning);
    const double omega_r = omega + big_delta;
    return asymmetric_couplings(lambda, rabi, drive_detuning, omega_r, delta_h,
                                phonon_number);
}

// ---------------------------------------------------------------------------
// Parallel helper
// ---------------------------------------------------------------------------

/// Worker count: NV_SEESAW_THREADS if set (clamped to >= 1), else hardware.
inline unsigned effective_thread_count() {
    if (const char* env = std::getenv("NV_SEESAW_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<unsigned>(parsed);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Run fn(i) for i in [0, count). Each index writes only its own slot, so the
/// result is identical for every worker count.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(effective_thread_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Time series
// ---------------------------------------------------------------------------

struct TimeseriesRow {
    double t_us = 0.0;
    double c_printed = 0.0;
    double c_unitary = 0.0;
    double c_numeric = 0.0;
    double c_eq22 = 0.0;
    double norm_printed = 0.0;
    double norm_numeric = 0.0;
};

struct TimeseriesResult {
    std::vector<TimeseriesRow> rows;
    CouplingSet coupling;
    ABDFCoefficients coeffs;
    bool eq22_used_fallback = false;
};

/// Evolve the configured initial state over [0, t_max] and record every
/// concurrence route per row. The RK4 trajectory advances row to row with the
/// configured dt, which doubles as the output spacing.
inline TimeseriesResult run_timeseries(const ScenarioConfig& cfg) {
    cfg.validate();
    TimeseriesResult result;
    result.coupling = standard_mapping(cfg.alpha, cfg.delta_h, cfg.phonon_number,
                                       cfg.lambda_over_2pi_mhz, cfg.delta_over_2pi_mhz);
    result.coeffs = abdf(result.coupling);
    const EffectiveHamiltonian heff = build_heff(result.coupling);
    const BellAmplitudes initial = cfg.initial_state();
    const double dt = units::s_from_us(cfg.dt_us);

    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_max_us / cfg.dt_us));
    result.rows.resize(steps + 1);

    BellAmplitudes numeric_state = initial;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (i > 0) numeric_state = evolve_numeric(numeric_state, heff, dt, dt);

        TimeseriesRow& row = result.rows[i];
        row.t_us = static_cast<double>(i) * cfg.dt_us;
        const BellAmplitudes printed =
            evolve_closed_form(initial, result.coeffs, t, EvolutionMode::printed);
        const BellAmplitudes unitary =
            evolve_closed_form(initial, result.coeffs, t, EvolutionMode::unitary);
        row.c_printed = concurrence_pure(printed);
        row.c_unitary = concurrence_pure(unitary);
        row.c_numeric = wootters_concurrence(numeric_state);
        const ConcurrenceValue eq22 = concurrence_closed_form(initial, result.coeffs, t);
        row.c_eq22 = eq22.value;
        result.eq22_used_fallback = result.eq22_used_fallback || eq22.used_fallback;
        row.norm_printed = printed.norm_squared();
        row.norm_numeric = numeric_state.norm_squared();
    }
    return result;
}

inline void write_timeseries_csv(const TimeseriesResult& result, std::ostream& out) {
    csv_row(out, {"t_us", "C_printed", "C_unitary", "C_numeric", "C_eq22",
                  "norm_printed", "norm_numeric"});
    for (const TimeseriesRow& r : result.rows)
        csv_values(out, {r.t_us, r.c_printed, r.c_unitary, r.c_numeric, r.c_eq22,
                         r.norm_printed, r.norm_numeric});
}

// ---------------------------------------------------------------------------
// (alpha, delta_h) sweep
// ---------------------------------------------------------------------------

struct CellProvenance {
    double lambda = 0.0;
    double rabi = 0.0;
    double omega = 0.0;
    double detuning = 0.0;
    double A = 0.0;
    double B = 0.0;
    double D = 0.0;
    double F = 0.0;
    bool eq22_fallback = false;
};

struct SweepResult {
    std::vector<double> alphas;
    std::vector<double> delta_hs;
    double t_star_us = 0.0;
    EvolutionMode mode = EvolutionMode::printed;
    std::vector<double> concurrence; // row-major, [alpha][delta_h]
    std::vector<CellProvenance> provenance;

    double at(std::size_t alpha_index, std::size_t dh_index) const {
        return concurrence[alpha_index * delta_hs.size() + dh_index];
    }
};

inline std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        v[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return v;
}

/// Concurrence snapshot of one (alpha, delta_h) cell at t_star via the
/// requested route.
inline double concurrence_snapshot(const CouplingSet& coupling,
                                   const ABDFCoefficients& coeffs,
                                   const BellAmplitudes& initial, double t, double dt,
                                   EvolutionMode mode) {
    if (mode == EvolutionMode::numeric) {
        const EffectiveHamiltonian heff = build_heff(coupling);
        if (t == 0.0) return wootters_concurrence(initial);
        const double step = std::min(dt, t);
        return wootters_concurrence(evolve_numeric(initial, heff, t, step));
    }
    return concurrence_pure(evolve_closed_form(initial, coeffs, t, mode));
}

/// Evaluate |C(t*)| over the configured grid. Cells are independent and run
/// in parallel; results land in fixed row-major slots.
inline SweepResult run_contour(const ScenarioConfig& cfg) {
    cfg.validate();
    SweepResult result;
    result.alphas = linspace(cfg.alpha_min, cfg.alpha_max, cfg.alpha_steps);
    result.delta_hs = linspace(cfg.delta_h_min, cfg.delta_h_max, cfg.delta_h_steps);
    result.t_star_us = cfg.t_star_us;
    result.mode = cfg.mode;
    const std::size_t cells = result.alphas.size() * result.delta_hs.size();
    result.concurrence.assign(cells, 0.0);
    result.provenance.assign(cells, {});

    const BellAmplitudes initial = cfg.initial_state();
    const double t_star = units::s_from_us(cfg.t_star_us);
    const double dt = units::s_from_us(cfg.dt_us);
    std::vector<std::string> cell_errors(cells);

    parallel_for(cells, [&](std::size_t idx) {
        const std::size_t ai = idx / result.delta_hs.size();
        const std::size_t di = idx % result.delta_hs.size();
        try {
            const CouplingSet coupling =
                standard_mapping(result.alphas[ai], result.delta_hs[di], cfg.phonon_number,
                                 cfg.lambda_over_2pi_mhz, cfg.delta_over_2pi_mhz);
            const ABDFCoefficients coeffs = abdf(coupling);
            CellProvenance& prov = result.provenance[idx];
            prov.lambda = coupling.lambda;
            prov.rabi = coupling.rabi;
            prov.omega = coupling.omega;
            prov.detuning = coupling.detuning;
            prov.A = coeffs.A;
            prov.B = coeffs.B;
            prov.D = coeffs.D;
            prov.F = coeffs.F;
            if (result.mode != EvolutionMode::numeric)
                prov.eq22_fallback =
                    concurrence_closed_form(initial, coeffs, t_star).used_fallback;
            result.concurrence[idx] =
                concurrence_snapshot(coupling, coeffs, initial, t_star, dt, result.mode);
        } catch (const std::exception& e) {
            cell_errors[idx] = e.what();
        }
    });

    for (std::size_t idx = 0; idx < cells; ++idx) {
        if (!cell_errors[idx].empty()) {
            std::ostringstream os;
            os << "sweep cell alpha=" << result.alphas[idx / result.delta_hs.size()]
               << " delta_h=" << result.delta_hs[idx % result.delta_hs.size()] << ": "
               << cell_errors[idx];
            throw domain_error(os.str());
        }
    }
    return result;
}

inline void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
    csv_row(out, {"alpha", "delta_h", "concurrence"});
    for (std::size_t ai = 0; ai < sweep.alphas.size(); ++ai)
        for (std::size_t di = 0; di < sweep.delta_hs.size(); ++di)
            csv_values(out, {sweep.alphas[ai], sweep.delta_hs[di], sweep.at(ai, di)});
}

inline ordered_json sweep_to_json(const SweepResult& sweep) {
    ordered_json j;
    j["t_star_us"] = sweep.t_star_us;
    j["mode"] = to_string(sweep.mode);
    j["alphas"] = sweep.alphas;
    j["delta_hs"] = sweep.delta_hs;
    j["concurrence"] = sweep.concurrence;
    ordered_json cells = ordered_json::array();
    for (std::size_t idx = 0; idx < sweep.provenance.size(); ++idx) {
        const CellProvenance& p = sweep.provenance[idx];
        cells.push_back({{"alpha", sweep.alphas[idx / sweep.delta_hs.size()]},
                         {"delta_h", sweep.delta_hs[idx % sweep.delta_hs.size()]},
                         {"lambda_rad_s", p.lambda},
                         {"rabi_rad_s", p.rabi},
                         {"omega_rad_s", p.omega},
                         {"detuning_rad_s", p.detuning},
                         {"A_rad_s", p.A},
                         {"B_rad_s", p.B},
                         {"D_rad_s", p.D},
                         {"F_rad_s", p.F},
                         {"eq22_fallback", p.eq22_fallback}});
    }
    j["cells"] = std::move(cells);
    return j;
}

// ---------------------------------------------------------------------------
// Deflection report
// ---------------------------------------------------------------------------

/// Mechanical summary of the configured cantilever: mass, first three
/// resonances, gravity sag, both deflection mechanisms, the asymmetry per
/// requested field and the zero-point amplitude in both frequency readings.
/// Gap closures are reported per entry without aborting the batch.
inline ordered_json run_deflection(const ScenarioConfig& cfg) {
    cfg.validate();
    const CantileverSpec spec = cfg.cantilever();
    const PhysicalConstants& consts = si_constants();
    ordered_json j;

    const double m = mass(spec);
    j["mass_kg"] = m;
    j["resonance_frequencies_mhz"] = {
        units::mhz_from_hz(resonance_frequency(spec, 1)),
        units::mhz_from_hz(resonance_frequency(spec, 2)),
        units::mhz_from_hz(resonance_frequency(spec, 3)),
    };
    j["gravity_sag_m"] = gravity_sag(spec, consts);

    ordered_json me;
    me["deflection_nm"] = units::nm_from_m(deflection_magnetoelastic_m(spec));
    try {
        const DeflectionReport r = deflection_magnetoelastic(spec);
        me["gap_closure"] = false;
        me["h1_nm"] = units::nm_from_m(r.h1);
        me["h2_nm"] = units::nm_from_m(r.h2);
        me["delta_h"] = r.delta_h;
    } catch (const gap_closure_error& e) {
        me["gap_closure"] = true;
        me["error"] = e.what();
    }
    j["magnetoelastic"] = std::move(me);

    const double b0_max = max_field(nv_zero_field_splitting, consts);
    ordered_json torque_entries = ordered_json::array();
    for (double b0_mt : cfg.b0_list_mt) {
        const double b0 = units::t_from_mt(b0_mt);
        ordered_json entry;
        entry["b0_mt"] = b0_mt;
        entry["deflection_nm"] = units::nm_from_m(deflection_torque_m(spec, b0, consts));
        try {
            const DeflectionReport r = deflection_torque(spec, b0, consts);
            entry["gap_closure"] = false;
            entry["h1_nm"] = units::nm_from_m(r.h1);
            entry["h2_nm"] = units::nm_from_m(r.h2);
            entry["delta_h"] = r.delta_h;
            entry["over_field_warning"] = r.over_field_warning;
        } catch (const gap_closure_error& e) {
            entry["gap_closure"] = true;
            entry["over_field_warning"] = b0 > b0_max;
            entry["error"] = e.what();
        }
        torque_entries.push_back(std::move(entry));
    }
    j["torque"] = std::move(torque_entries);

    const double f1 = resonance_frequency(spec, 1);
    ordered_json zp;
    zp["angular_m"] = zero_point_amplitude(m, two_pi * f1, consts);
    // Second reading: the printed first-resonance number treated as a rate in
    // 1/s without the 2 pi, which is the only way its quoted magnitude checks out.
    zp["cyclic_value_as_rate_m"] = zero_point_amplitude(m, f1, consts);
    j["zero_point_amplitude"] = std::move(zp);

    j["b0_max_mt"] = units::mt_from_t(b0_max);
    return j;
}

// ---------------------------------------------------------------------------
// Figure datasets
// ---------------------------------------------------------------------------

struct FigureCurveSpec {
    std::string file;
    double alpha = 0.0;
    std::vector<double> delta_hs;
};

/// The bundled time-evolution datasets: one alpha per file, curves over
/// delta_h in {0, 0.25, 0.5}. These particular values are this project's
/// representative choice.
inline std::vector<FigureCurveSpec> figure_timeseries_plan() {
    return {
        {"fig3.csv", 3.0, {0.0, 0.25, 0.5}},
        {"fig4.csv", 0.25, {0.0, 0.25, 0.5}},
        {"fig5.csv", 1.5, {0.0, 0.25, 0.5}},
    };
}

/// Emit fig3..fig5 (time series), fig6 (contour at t* = 13.3 us) and a
/// provenance JSON into outdir. Output is byte-identical across runs and
/// worker counts.
inline void write_figures(const ScenarioConfig& cfg, const std::filesystem::path& outdir) {
    cfg.validate();
    std::filesystem::create_directories(outdir);
    const BellAmplitudes initial = cfg.initial_state();
    const EvolutionMode mode = cfg.mode;
    const double out_dt_us = 0.01;
    const auto steps = static_cast<std::size_t>(std::llround(30.0 / out_dt_us));

    ordered_json provenance;
    provenance["mode"] = to_string(mode);
    provenance["n"] = cfg.phonon_number;
    provenance["lambda_over_2pi_mhz"] = cfg.lambda_over_2pi_mhz;
    provenance["initial_bell"] = cfg.initial_bell;
    ordered_json curve_list = ordered_json::array();

    for (const FigureCurveSpec& fig : figure_timeseries_plan()) {
        struct Curve {
            CouplingSet coupling;
            ABDFCoefficients coeffs;
            std::vector<double> values;
        };
        std::vector<Curve> curves(fig.delta_hs.size());
        parallel_for(curves.size(), [&](std::size_t ci) {
            Curve& curve = curves[ci];
            curve.coupling = standard_mapping(fig.alpha, fig.delta_hs[ci], cfg.phonon_number,
                                              cfg.lambda_over_2pi_mhz, cfg.delta_over_2pi_mhz);
            curve.coeffs = abdf(curve.coupling);
            curve.values.resize(steps + 1);
            if (mode == EvolutionMode::numeric) {
                const EffectiveHamiltonian heff = build_heff(curve.coupling);
                BellAmplitudes state = initial;
                const double dt = units::s_from_us(out_dt_us);
                for (std::size_t i = 0; i <= steps; ++i) {
                    if (i > 0) state = evolve_numeric(state, heff, dt, dt);
                    curve.values[i] = wootters_concurrence(state);
                }
            } else {
                for (std::size_t i = 0; i <= steps; ++i) {
                    const double t = units::s_from_us(static_cast<double>(i) * out_dt_us);
                    curve.values[i] = concurrence_pure(
                        evolve_closed_form(initial, curve.coeffs, t, mode));
                }
            }
        });

        std::ofstream out(outdir / fig.file, std::ios::binary);
        csv_row(out, {"alpha", "delta_h", "t_us", "concurrence"});
        for (std::size_t ci = 0; ci < curves.size(); ++ci)
            for (std::size_t i = 0; i <= steps; ++i)
                csv_values(out, {fig.alpha, fig.delta_hs[ci],
                                 static_cast<double>(i) * out_dt_us, curves[ci].values[i]});

        for (std::size_t ci = 0; ci < curves.size(); ++ci) {
            const Curve& c = curves[ci];
            curve_list.push_back({{"file", fig.file},
                                  {"alpha", fig.alpha},
                                  {"delta_h", fig.delta_hs[ci]},
                                  {"lambda_rad_s", c.coupling.lambda},
                                  {"rabi_rad_s", c.coupling.rabi},
                                  {"omega_rad_s", c.coupling.omega},
                                  {"detuning_rad_s", c.coupling.detuning},
                                  {"A_rad_s", c.coeffs.A},
                                  {"B_rad_s", c.coeffs.B},
                                  {"D_rad_s", c.coeffs.D},
                                  {"F_rad_s", c.coeffs.F}});
        }
    }
    provenance["timeseries_curves"] = std::move(curve_list);

    const SweepResult sweep = run_contour(cfg);
    {
        std::ofstream out(outdir / "fig6.csv", std::ios::binary);
        write_sweep_csv(sweep, out);
    }
    provenance["contour"] = {{"file", "fig6.csv"},
                             {"t_star_us", sweep.t_star_us},
                             {"mode", to_string(sweep.mode)},
                             {"alpha_steps", sweep.alphas.size()},
                             {"delta_h_steps", sweep.delta_hs.size()}};

    std::ofstream prov_out(outdir / "figures.json", std::ios::binary);
    prov_out << provenance.dump(2) << '\n';
}

} // namespace nvseesaw
