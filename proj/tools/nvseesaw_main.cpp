// nvseesaw command line front end.
//
// Subcommands: deflect, evolve, sweep, verify, figures. Exit codes:
// 0 success, 1 config error, 2 physics-domain error, 3 verification failure.

#include "nvseesaw/config.hpp"
#include "nvseesaw/engine.hpp"
#include "nvseesaw/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDomain = 2;
constexpr int kExitVerify = 3;

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string outdir;
    std::string mode;
    double dt_us = 0.0;
    std::uint64_t seed = 20240801;
};

nvseesaw::ScenarioConfig load_with_overrides(const CliOptions& opt) {
    nvseesaw::ScenarioConfig cfg = nvseesaw::load_config(opt.config_path);
    if (!opt.mode.empty()) cfg.mode = nvseesaw::evolution_mode_from_string(opt.mode);
    if (opt.dt_us > 0.0) cfg.dt_us = opt.dt_us;
    cfg.validate();
    return cfg;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nvseesaw::config_error("cannot open output file '" + path + "'");
    return out;
}

int run_deflect(const CliOptions& opt) {
    const nvseesaw::ScenarioConfig cfg = load_with_overrides(opt);
    const nvseesaw::ordered_json report = nvseesaw::run_deflection(cfg);
    if (opt.out_path.empty()) {
        std::cout << report.dump(2) << '\n';
    } else {
        open_output(opt.out_path) << report.dump(2) << '\n';
    }
    return kExitOk;
}

int run_evolve(const CliOptions& opt) {
    const nvseesaw::ScenarioConfig cfg = load_with_overrides(opt);
    const nvseesaw::TimeseriesResult result = nvseesaw::run_timeseries(cfg);
    const std::string path = opt.out_path.empty() ? "timeseries.csv" : opt.out_path;
    auto out = open_output(path);
    nvseesaw::write_timeseries_csv(result, out);
    std::cerr << "wrote " << result.rows.size() << " rows to " << path << '\n';
    return kExitOk;
}

int run_sweep(const CliOptions& opt) {
    const nvseesaw::ScenarioConfig cfg = load_with_overrides(opt);
    const nvseesaw::SweepResult sweep = nvseesaw::run_contour(cfg);
    const std::string csv_path = opt.out_path.empty() ? "sweep.csv" : opt.out_path;
    std::string json_path = csv_path;
    if (json_path.size() > 4 && json_path.substr(json_path.size() - 4) == ".csv")
        json_path = json_path.substr(0, json_path.size() - 4) + ".json";
    else
        json_path += ".json";
    {
        auto out = open_output(csv_path);
        nvseesaw::write_sweep_csv(sweep, out);
    }
    open_output(json_path) << nvseesaw::sweep_to_json(sweep).dump(2) << '\n';
    std::cerr << "wrote " << sweep.concurrence.size() << " cells to " << csv_path
              << " and " << json_path << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cantilever-coupled NV-spin entanglement toolkit"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* deflect = app.add_subcommand(
        "deflect", "Mechanical and magnetomechanical report for a config");
    deflect->add_option("config", opt.config_path, "scenario config (JSON)")->required();
    deflect->add_option("--out", opt.out_path, "output path (default: stdout)");

    CLI::App* evolve = app.add_subcommand(
        "evolve", "Concurrence time series for one (alpha, delta_h) point");
    evolve->add_option("config", opt.config_path, "scenario config (JSON)")->required();
    evolve->add_option("--out", opt.out_path, "CSV output path");
    evolve->add_option("--mode", opt.mode, "printed|unitary|numeric");
    evolve->add_option("--dt-us", opt.dt_us, "time step / row spacing in us");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Concurrence snapshot over the (alpha, delta_h) grid");
    sweep->add_option("config", opt.config_path, "scenario config (JSON)")->required();
    sweep->add_option("--out", opt.out_path, "CSV output path (JSON lands beside it)");
    sweep->add_option("--mode", opt.mode, "printed|unitary|numeric");
    sweep->add_option("--dt-us", opt.dt_us, "integrator step for numeric mode");

    CLI::App* verify = app.add_subcommand(
        "verify", "Run the invariant and oracle suite, print the report");
    verify->add_option("--seed", opt.seed, "seed for randomized property checks");

    CLI::App* figures = app.add_subcommand(
        "figures", "Emit fig3..fig6 datasets plus provenance JSON");
    figures->add_option("outdir", opt.outdir, "output directory")->required();
    figures->add_option("--mode", opt.mode, "printed|unitary|numeric");

    CLI11_PARSE(app, argc, argv);

    try {
        if (deflect->parsed()) return run_deflect(opt);
        if (evolve->parsed()) return run_evolve(opt);
        if (sweep->parsed()) return run_sweep(opt);
        if (verify->parsed()) {
            nvseesaw::VerifyOptions vopt;
            vopt.seed = opt.seed;
            return nvseesaw::run_verify(std::cout, vopt) == 0 ? kExitOk : kExitVerify;
        }
        if (figures->parsed()) {
            nvseesaw::ScenarioConfig cfg; // reference defaults
            if (!opt.mode.empty())
                cfg.mode = nvseesaw::evolution_mode_from_string(opt.mode);
            nvseesaw::write_figures(cfg, opt.outdir);
            std::cerr << "wrote figure datasets to " << opt.outdir << '\n';
            return kExitOk;
        }
    } catch (const nvseesaw::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nvseesaw::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitOk;
}
