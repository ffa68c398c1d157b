// Command-line driver: bands, run, sweep, check.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "latticeecho/commands.hpp"
#include "latticeecho/error.hpp"

using namespace latticeecho;

namespace {

struct Overrides {
    std::string config;
    std::string out;
    int workers = 0;
    std::string propagator;
};

ExperimentConfig prepare(const Overrides& o) {
    if (o.config.empty()) throw ConfigError("--config is required");
    ExperimentConfig cfg = load_config(o.config);
    if (!o.out.empty()) {
        cfg.output.dir = o.out;
    } else if (cfg.output.dir.empty()) {
        if (const char* env = std::getenv("LATTICEECHO_OUT")) cfg.output.dir = env;
    }
    if (o.workers > 0) cfg.run.workers = o.workers;
    if (!o.propagator.empty()) cfg.run.propagator = parse_propagator(o.propagator);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-mirror (Loschmidt echo) simulator for tight-binding lattices"};
    app.require_subcommand(1);

    Overrides o;
    auto add_common = [&o](CLI::App* cmd) {
        cmd->add_option("--config", o.config, "Experiment config (INI)")->check(CLI::ExistingFile);
        cmd->add_option("--out", o.out, "Output directory (fallback: LATTICEECHO_OUT)");
        cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--propagator", o.propagator, "kspace | realspace")
            ->check(CLI::IsMember({"kspace", "realspace"}));
    };

    auto* bands = app.add_subcommand("bands", "Write band tables");
    add_common(bands);
    auto* run = app.add_subcommand("run", "Run the echo protocol");
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "Echo peak over a parameter sweep");
    add_common(sweep);
    std::string axis;
    std::vector<double> values;
    sweep->add_option("--axis", axis, "M | delta_T | J2 | J3 (default: [sweep] axis)");
    sweep->add_option("--values", values, "Sweep values (default: [sweep] values)")->delimiter(',');

    auto* check = app.add_subcommand("check", "Oracle self-checks");
    CheckOptions check_opt;
    check->add_option("--size", check_opt.size, "Linear lattice size (even)");
    check->add_flag("--perturb", check_opt.perturb, "Inject a 1e-6 fault into the oracle Hamiltonian");
    check->add_option("--seed", check_opt.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*bands) {
            for (const auto& f : cmd_bands(prepare(o))) std::cout << f.string() << '\n';
        } else if (*run) {
            const RunResult result = cmd_run(prepare(o));
            if (result.report) write_report(std::cout, *result.report);
            else std::cout << "no pulse scheduled; trajectory only\n";
        } else if (*sweep) {
            const ExperimentConfig cfg = prepare(o);
            const SweepAxis ax = axis.empty() ? cfg.sweep.axis.value_or(SweepAxis::M) : parse_sweep_axis(axis);
            if (axis.empty() && !cfg.sweep.axis) throw ConfigError("sweep axis not given");
            const auto& list = values.empty() ? cfg.sweep.values : values;
            for (const auto& row : cmd_sweep(cfg, ax, list))
                std::cout << to_string(ax) << '=' << row.value << " peak_value=" << row.report.peak_value
                          << " predicted=" << row.report.predicted_value << '\n';
        } else if (*check) {
            const auto lines = cmd_check(check_opt);
            print_check(std::cout, lines);
            for (const auto& line : lines)
                if (!line.passed()) return kExitCheckFailed;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return kExitOk;
}
