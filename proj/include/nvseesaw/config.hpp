#pragma once

#include "nvseesaw/dynamics.hpp"
#include "nvseesaw/errors.hpp"
#include "nvseesaw/mechanics.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace nvseesaw {

using ordered_json = nlohmann::ordered_json;

/// Scenario description as read from a JSON config. Boundary units are
/// human scale (nm, mT, MHz, us); everything downstream is SI / angular.
struct ScenarioConfig {
    int schema = 1;

    // cantilever section (mirrors CantileverSpec, boundary units)
    double length_nm = 3000.0;
    double width_nm = 300.0;
    double substrate_thickness_nm = 30.0;
    double film_thickness_nm = 10.0;
    double young_modulus_gpa = 130.0;
    double poisson_ratio = 0.279;
    double density_kg_m3 = 2330.0;
    double magnetoelastic_b1_mj_m3 = 9.38;
    double atomic_volume_m3 = 1.096e-29;
    double moment_per_atom_bohr = 2.0;
    double rest_gap_nm = 25.0;
    std::vector<double> b0_list_mt = {10.0};

    // drive section
    double lambda_over_2pi_mhz = 0.1;
    double alpha = 0.25;
    double delta_h = 0.0;
    double phonon_number = 1.0;
    double delta_over_2pi_mhz = 0.0;

    // dynamics section
    double t_max_us = 30.0;
    double dt_us = 1e-3;
    std::array<std::array<double, 2>, 4> initial_bell = {{{0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}}};
    EvolutionMode mode = EvolutionMode::printed;

    // sweep section
    double alpha_min = 0.1;
    double alpha_max = 4.0;
    int alpha_steps = 40;
    double delta_h_min = 0.0;
    double delta_h_max = 0.9;
    int delta_h_steps = 31;
    double t_star_us = 13.3;

    CantileverSpec cantilever() const {
        CantileverSpec s;
        s.length = units::m_from_nm(length_nm);
        s.width = units::m_from_nm(width_nm);
        s.substrate_thickness = units::m_from_nm(substrate_thickness_nm);
        s.film_thickness = units::m_from_nm(film_thickness_nm);
        s.young_modulus = units::pa_from_gpa(young_modulus_gpa);
        s.poisson_ratio = poisson_ratio;
        s.density = density_kg_m3;
        s.magnetoelastic_b1 = magnetoelastic_b1_mj_m3 * 1e6;
        s.atomic_volume = atomic_volume_m3;
        s.moment_per_atom = moment_per_atom_bohr;
        s.rest_gap = units::m_from_nm(rest_gap_nm);
        return s;
    }

    BellAmplitudes initial_state() const {
        std::array<complexd, 4> c{};
        for (std::size_t i = 0; i < 4; ++i)
            c[i] = complexd(initial_bell[i][0], initial_bell[i][1]);
        return BellAmplitudes::normalized_initial(c);
    }

    void validate() const {
        auto check = [](bool ok, const std::string& path, const std::string& why) {
            if (!ok) throw config_error("config field '" + path + "': " + why);
        };
        check(schema == 1, "schema", "unsupported schema version");
        const std::array<std::pair<const char*, double>, 12> finite_fields = {{
            {"cantilever.length_nm", length_nm},
            {"cantilever.young_modulus_gpa", young_modulus_gpa},
            {"drive.lambda_over_2pi_mhz", lambda_over_2pi_mhz},
            {"drive.alpha", alpha},
            {"drive.delta_h", delta_h},
            {"drive.n", phonon_number},
            {"dynamics.t_max_us", t_max_us},
            {"dynamics.dt_us", dt_us},
            {"sweep.alpha_min", alpha_min},
            {"sweep.alpha_max", alpha_max},
            {"sweep.delta_h_max", delta_h_max},
            {"sweep.t_star_us", t_star_us},
        }};
        for (const auto& [path, value] : finite_fields)
            check(std::isfinite(value), path, "must be finite");
        check(length_nm > 0.0, "cantilever.length_nm", "must be > 0");
        check(width_nm > 0.0, "cantilever.width_nm", "must be > 0");
        check(substrate_thickness_nm > 0.0, "cantilever.substrate_thickness_nm", "must be > 0");
        check(film_thickness_nm >= 0.0, "cantilever.film_thickness_nm", "must be >= 0");
        check(film_thickness_nm < substrate_thickness_nm, "cantilever.film_thickness_nm",
              "must be below substrate_thickness_nm");
        check(young_modulus_gpa > 0.0, "cantilever.young_modulus_gpa", "must be > 0");
        check(poisson_ratio > 0.0 && poisson_ratio < 0.5, "cantilever.poisson_ratio",
              "must lie in (0, 0.5)");
        check(density_kg_m3 > 0.0, "cantilever.density_kg_m3", "must be > 0");
        check(atomic_volume_m3 > 0.0, "cantilever.atomic_volume_m3", "must be > 0");
        check(moment_per_atom_bohr >= 0.0, "cantilever.moment_per_atom_bohr", "must be >= 0");
        check(rest_gap_nm > 0.0, "cantilever.rest_gap_nm", "must be > 0");
        for (double b : b0_list_mt)
            check(b >= 0.0, "cantilever.b0_list_mt", "entries must be >= 0");

        check(lambda_over_2pi_mhz > 0.0, "drive.lambda_over_2pi_mhz", "must be > 0");
        check(alpha > 0.0, "drive.alpha", "must be > 0");
        check(delta_h >= 0.0 && delta_h < 1.0, "drive.delta_h", "must lie in [0, 1)");
        check(phonon_number >= 0.0, "drive.n", "must be >= 0");
        check(std::isfinite(delta_over_2pi_mhz), "drive.delta_over_2pi_mhz", "must be finite");

        check(t_max_us >= 0.0, "dynamics.t_max_us", "must be >= 0");
        check(dt_us > 0.0, "dynamics.dt_us", "must be > 0");
        double norm = 0.0;
        for (const auto& pair : initial_bell)
            norm += pair[0] * pair[0] + pair[1] * pair[1];
        check(std::abs(norm - 1.0) <= 1e-12, "dynamics.initial_bell",
              "amplitudes must have unit norm");

        check(alpha_steps >= 2, "sweep.alpha_steps", "must be >= 2");
        check(delta_h_steps >= 2, "sweep.delta_h_steps", "must be >= 2");
        check(alpha_min > 0.0 && alpha_max >= alpha_min, "sweep.alpha_min",
              "need 0 < alpha_min <= alpha_max");
        check(delta_h_min >= 0.0 && delta_h_max < 1.0 && delta_h_max >= delta_h_min,
              "sweep.delta_h_min", "need 0 <= delta_h_min <= delta_h_max < 1");
        check(t_star_us >= 0.0, "sweep.t_star_us", "must be >= 0");
    }
};

namespace detail {

template <typename T>
void read_field(const ordered_json& section, const std::string& section_name,
                const char* key, T& target) {
    if (!section.contains(key)) return;
    try {
        target = section.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        const std::string path =
            section_name.empty() ? std::string(key) : section_name + "." + key;
        throw config_error("config field '" + path + "': " + e.what());
    }
}

} // namespace detail

/// Parse a config object; absent fields keep the reference-device defaults.
inline ScenarioConfig parse_config(const ordered_json& j) {
    if (!j.is_object()) throw config_error("config root must be a JSON object");
    ScenarioConfig cfg;
    detail::read_field(j, "", "schema", cfg.schema);

    if (j.contains("cantilever")) {
        const auto& c = j.at("cantilever");
        detail::read_field(c, "cantilever", "length_nm", cfg.length_nm);
        detail::read_field(c, "cantilever", "width_nm", cfg.width_nm);
        detail::read_field(c, "cantilever", "substrate_thickness_nm", cfg.substrate_thickness_nm);
        detail::read_field(c, "cantilever", "film_thickness_nm", cfg.film_thickness_nm);
        detail::read_field(c, "cantilever", "young_modulus_gpa", cfg.young_modulus_gpa);
        detail::read_field(c, "cantilever", "poisson_ratio", cfg.poisson_ratio);
        detail::read_field(c, "cantilever", "density_kg_m3", cfg.density_kg_m3);
        detail::read_field(c, "cantilever", "magnetoelastic_b1_mj_m3", cfg.magnetoelastic_b1_mj_m3);
        detail::read_field(c, "cantilever", "atomic_volume_m3", cfg.atomic_volume_m3);
        detail::read_field(c, "cantilever", "moment_per_atom_bohr", cfg.moment_per_atom_bohr);
        detail::read_field(c, "cantilever", "rest_gap_nm", cfg.rest_gap_nm);
        detail::read_field(c, "cantilever", "b0_list_mt", cfg.b0_list_mt);
    }
    if (j.contains("drive")) {
        const auto& d = j.at("drive");
        detail::read_field(d, "drive", "lambda_over_2pi_mhz", cfg.lambda_over_2pi_mhz);
        detail::read_field(d, "drive", "alpha", cfg.alpha);
        detail::read_field(d, "drive", "delta_h", cfg.delta_h);
        detail::read_field(d, "drive", "n", cfg.phonon_number);
        detail::read_field(d, "drive", "delta_over_2pi_mhz", cfg.delta_over_2pi_mhz);
    }
    if (j.contains("dynamics")) {
        const auto& d = j.at("dynamics");
        detail::read_field(d, "dynamics", "t_max_us", cfg.t_max_us);
        detail::read_field(d, "dynamics", "dt_us", cfg.dt_us);
        detail::read_field(d, "dynamics", "initial_bell", cfg.initial_bell);
        if (d.contains("mode")) {
            std::string mode_name;
            detail::read_field(d, "dynamics", "mode", mode_name);
            cfg.mode = evolution_mode_from_string(mode_name);
        }
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::read_field(s, "sweep", "alpha_min", cfg.alpha_min);
        detail::read_field(s, "sweep", "alpha_max", cfg.alpha_max);
        detail::read_field(s, "sweep", "alpha_steps", cfg.alpha_steps);
        detail::read_field(s, "sweep", "delta_h_min", cfg.delta_h_min);
        detail::read_field(s, "sweep", "delta_h_max", cfg.delta_h_max);
        detail::read_field(s, "sweep", "delta_h_steps", cfg.delta_h_steps);
        detail::read_field(s, "sweep", "t_star_us", cfg.t_star_us);
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config parse error in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

inline ordered_json to_json(const ScenarioConfig& cfg) {
    ordered_json j;
    j["schema"] = cfg.schema;
    j["cantilever"] = {
        {"length_nm", cfg.length_nm},
        {"width_nm", cfg.width_nm},
        {"substrate_thickness_nm", cfg.substrate_thickness_nm},
        {"film_thickness_nm", cfg.film_thickness_nm},
        {"young_modulus_gpa", cfg.young_modulus_gpa},
        {"poisson_ratio", cfg.poisson_ratio},
        {"density_kg_m3", cfg.density_kg_m3},
        {"magnetoelastic_b1_mj_m3", cfg.magnetoelastic_b1_mj_m3},
        {"atomic_volume_m3", cfg.atomic_volume_m3},
        {"moment_per_atom_bohr", cfg.moment_per_atom_bohr},
        {"rest_gap_nm", cfg.rest_gap_nm},
        {"b0_list_mt", cfg.b0_list_mt},
    };
    j["drive"] = {
        {"lambda_over_2pi_mhz", cfg.lambda_over_2pi_mhz},
        {"alpha", cfg.alpha},
        {"delta_h", cfg.delta_h},
        {"n", cfg.phonon_number},
        {"delta_over_2pi_mhz", cfg.delta_over_2pi_mhz},
    };
    j["dynamics"] = {
        {"t_max_us", cfg.t_max_us},
        {"dt_us", cfg.dt_us},
        {"initial_bell", cfg.initial_bell},
        {"mode", to_string(cfg.mode)},
    };
    j["sweep"] = {
        {"alpha_min", cfg.alpha_min},
        {"alpha_max", cfg.alpha_max},
        {"alpha_steps", cfg.alpha_steps},
        {"delta_h_min", cfg.delta_h_min},
        {"delta_h_max", cfg.delta_h_max},
        {"delta_h_steps", cfg.delta_h_steps},
        {"t_star_us", cfg.t_star_us},
    };
    return j;
}

} // namespace nvseesaw
