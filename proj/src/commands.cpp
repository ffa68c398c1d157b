#include "latticeecho/commands.hpp"

#include <fmt/format.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "latticeecho/bands.hpp"
#include "latticeecho/error.hpp"
#include "latticeecho/io.hpp"
#include "latticeecho/parallel.hpp"

namespace latticeecho {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::filesystem::path output_dir(const ExperimentConfig& cfg) {
    return cfg.output.dir.empty() ? std::filesystem::path(".") : cfg.output.dir;
}

std::vector<std::string> momentum_columns(int dimension) {
    return dimension == 2 ? std::vector<std::string>{"k_x", "k_y"} : std::vector<std::string>{"k"};
}

std::filesystem::path write_folded(const std::filesystem::path& path, const LatticeSpec& spec,
                                   double M, const std::vector<Momentum>& grid) {
    auto header = momentum_columns(spec.dimension);
    if (spec.dimension == 2) {
        header.insert(header.end(), {"E_lower", "E_upper", "v_lower_x", "v_lower_y", "v_upper_x", "v_upper_y"});
    } else {
        header.insert(header.end(), {"E_lower", "E_upper", "v_lower", "v_upper"});
    }
    const BandStructure bands = sample_bands(spec, M, grid);
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& v = bands.velocity[i];
        if (spec.dimension == 2)
            rows.push_back({grid[i][0], grid[i][1], bands.lower[i], bands.upper[i], v.lower[0],
                            v.lower[1], v.upper[0], v.upper[1]});
        else
            rows.push_back({grid[i][0], bands.lower[i], bands.upper[i], v.lower[0], v.upper[0]});
    }
    write_csv(path, header, rows);
    return path;
}

std::string snapshot_stem(double t) { return fmt::format("snap_t{:.6f}", t); }

void set_hopping(LatticeSpec& spec, int order, double amplitude) {
    std::erase_if(spec.hoppings, [order](const Hopping& h) { return h.order == order; });
    if (amplitude != 0.0) spec.hoppings.push_back({order, -1, amplitude});
    spec.validate();
}

double predicted_fidelity(const ExperimentConfig& cfg, const WaveState& initial) {
    if (!cfg.schedule || !cfg.lattice.supports_kspace()) return kNaN;
    return predict_echo_peak(initial, cfg.lattice, cfg.pulse_schedule().events.front(), cfg.schedule->T0).value;
}

ProtocolOptions protocol_options(const ExperimentConfig& cfg, int workers) {
    ProtocolOptions opt;
    opt.t_end = cfg.run.t_end;
    opt.sample_dt = cfg.run.sample_dt;
    opt.snapshot_times = cfg.run.snapshot_times;
    opt.propagator = cfg.run.propagator;
    opt.workers = workers;
    return opt;
}

double max_difference(const WaveState& a, const WaveState& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.amplitudes[i] - b.amplitudes[i]));
    return d;
}

double oracle_residual(const LatticeSpec& spec, const CheckOptions& options, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> strength(0.0, 20.0);
    std::uniform_real_distribution<double> duration(0.0, 5.0);
    KSpacePropagator kspace(spec);
    double worst = 0.0;
    for (int trial = 0; trial < options.trials; ++trial) {
        const WaveState psi = make_state(spec, RandomState{rng()});
        const double M = strength(rng);
        const double t = duration(rng);
        Eigen::MatrixXd h = build_hamiltonian(spec, M);
        if (options.perturb) h(0, 0) += 1e-6;
        WaveState a = psi;
        kspace.evolve(a, M, t);
        WaveState b = psi;
        RealSpacePropagator(h).evolve(b, t);
        worst = std::max(worst, max_difference(a, b));
    }
    return worst;
}

double unitarity_residual(const LatticeSpec& spec, PropagatorKind kind) {
    const WaveState psi = make_state(spec, Gaussian{{spec.extents[0] / 2.0, spec.extents[1] / 2.0}, 1.5, {0.3, 0.2}});
    const double M = 10.0;
    PulseSchedule schedule{{PulseEvent{2.0, std::numbers::pi / (2.0 * M), M}}};
    ProtocolOptions opt;
    opt.t_end = 4.0 + schedule.events.front().delta_T;
    opt.sample_dt = 0.25;
    opt.propagator = kind;
    opt.band_occupations = false;
    return std::abs(run_protocol(spec, psi, schedule, opt).final_state.norm() - 1.0);
}

double transfer_residual() {
    using Matrix2c = Eigen::Matrix2cd;
    double worst = 0.0;
    const double r = std::numbers::sqrt2 / 2.0;
    const Eigen::Vector2cd lower(r, r);
    const Eigen::Vector2cd upper(r, -r);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            for (int m = 0; m < 10; ++m) {
                const double J = 2.0 * i / 9.0;
                const double M = 0.5 + 19.5 * j / 9.0;
                const double dT = std::numbers::pi * m / 9.0;
                Matrix2c h;
                h << M, -J, -J, -M;
                const Matrix2c u = (cplx{0.0, -dT} * h).exp();
                const cplx beta = upper.dot(u * lower);
                const cplx alpha = lower.dot(u * lower);
                const auto closed = transfer_amplitude(J, M, dT);
                worst = std::max({worst, std::abs(beta - closed.beta), std::abs(alpha - closed.alpha)});
            }
        }
    }
    return worst;
}

double folding_residual() {
    const LatticeSpec chain = LatticeSpec::chain(256);
    double worst = 0.0;
    for (const auto& k : reduced_zone_line(256)) {
        const BandPair folded = dispersion_folded(chain, 0.0, k);
        const double unfolded = dispersion_unfolded(chain, k);
        worst = std::max({worst, std::abs(folded.lower - unfolded), std::abs(folded.upper + unfolded)});
    }
    const double M = 3.5;
    const BandStructure gapped = sample_bands(chain, M, reduced_zone_line(256));
    return std::max(worst, std::abs(gapped.gap - 2.0 * M));
}

}  // namespace

std::vector<std::filesystem::path> cmd_bands(const ExperimentConfig& cfg) {
    const LatticeSpec& spec = cfg.lattice;
    if (spec.boundary != Boundary::periodic)
        throw ConfigError("band tables need a periodic lattice (the k-grid comes from its extents)");
    const auto dir = output_dir(cfg);
    std::vector<std::filesystem::path> files;

    auto header = momentum_columns(spec.dimension);
    if (spec.dimension == 2) header.insert(header.end(), {"E", "v_x", "v_y"});
    else header.insert(header.end(), {"E", "v"});
    std::vector<std::vector<double>> rows;
    for (const auto& k : full_zone_grid(spec)) {
        const Momentum v = group_velocity_unfolded(spec, k);
        if (spec.dimension == 2) rows.push_back({k[0], k[1], dispersion_unfolded(spec, k), v[0], v[1]});
        else rows.push_back({k[0], dispersion_unfolded(spec, k), v[0]});
    }
    write_csv(dir / "bands_unfolded.csv", header, rows);
    files.push_back(dir / "bands_unfolded.csv");

    const auto diamond = diamond_grid(spec);
    const double M = cfg.schedule ? cfg.schedule->M : 0.0;
    files.push_back(write_folded(dir / "bands_folded_gapless.csv", spec, 0.0, diamond));
    files.push_back(write_folded(dir / "bands_folded_gapped.csv", spec, M, diamond));
    return files;
}

RunResult cmd_run(const ExperimentConfig& cfg) {
    const LatticeSpec& spec = cfg.lattice;
    const WaveState initial = make_state(spec, cfg.initial);
    const PulseSchedule schedule = cfg.pulse_schedule();

    RunResult result;
    result.trajectory = run_protocol(spec, initial, schedule, protocol_options(cfg, cfg.run.workers));
    const Trajectory& traj = result.trajectory;
    if (cfg.schedule) result.report = echo_report(traj, cfg.pulse_end(), predicted_fidelity(cfg, initial));

    const auto dir = output_dir(cfg);
    std::filesystem::create_directories(dir);

    std::vector<std::vector<double>> rows;
    rows.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const bool bands = !traj.band_occupations.empty();
        rows.push_back({traj.times[i], traj.fidelity_amplitude[i], traj.overlap_modulus[i],
                        bands ? traj.band_occupations[i][0] : kNaN,
                        bands ? traj.band_occupations[i][1] : kNaN});
    }
    write_csv(dir / "trajectory.csv", {"t", "F", "overlap", "P_lower", "P_upper"}, rows);
    result.files.push_back(dir / "trajectory.csv");

    const int grid_rows = spec.dimension == 2 ? spec.extents[0] : 1;
    const int grid_cols = spec.dimension == 2 ? spec.extents[1] : spec.extents[0];
    for (const auto& snap : traj.snapshots) {
        const std::string stem = snapshot_stem(snap.time);
        if (cfg.output.csv) {
            std::vector<std::vector<double>> grid(grid_rows);
            for (int r = 0; r < grid_rows; ++r)
                grid[r].assign(snap.density.begin() + static_cast<long>(r) * grid_cols,
                               snap.density.begin() + static_cast<long>(r + 1) * grid_cols);
            write_csv(dir / (stem + ".csv"), {}, grid);
            result.files.push_back(dir / (stem + ".csv"));
        }
        if (cfg.output.pgm) {
            write_pgm(dir / (stem + ".pgm"), grid_rows, grid_cols, snap.density);
            result.files.push_back(dir / (stem + ".pgm"));
        }
    }

    std::ofstream summary(dir / "summary.txt");
    if (!summary) throw Error("cannot write " + (dir / "summary.txt").string());
    summary << "command=run\n"
            << "sites=" << spec.num_sites() << '\n'
            << "seed=" << cfg.run.seed << '\n'
            << "propagator=" << (cfg.run.propagator == PropagatorKind::kspace ? "kspace" : "realspace") << '\n'
            << "t_end=" << format_number(cfg.run.t_end) << '\n'
            << "sample_dt=" << format_number(cfg.run.sample_dt) << '\n'
            << "samples=" << traj.times.size() << '\n'
            << "final_norm=" << format_number(traj.final_state.norm()) << '\n';
    if (cfg.schedule) {
        summary << "T0=" << format_number(cfg.schedule->T0) << '\n'
                << "M=" << format_number(cfg.schedule->M) << '\n'
                << "delta_T=" << format_number(cfg.schedule->delta_T) << '\n';
    }
    if (result.report) write_report(summary, *result.report);
    result.files.push_back(dir / "summary.txt");
    return result;
}

std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                const std::vector<double>& values) {
    if (!cfg.schedule) throw ConfigError("sweep needs a [schedule] section");
    if (values.empty()) throw ConfigError("sweep needs at least one value");

    std::vector<SweepRow> rows(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    parallel_for(values.size(), cfg.run.workers, [&](std::size_t i) {
        try {
            ExperimentConfig point = cfg;
            switch (axis) {
                case SweepAxis::M: point.set_pulse_strength(values[i]); break;
                case SweepAxis::delta_T: point.schedule->delta_T = values[i]; break;
                case SweepAxis::J2: set_hopping(point.lattice, 2, values[i]); break;
                case SweepAxis::J3: set_hopping(point.lattice, 3, values[i]); break;
            }
            point.pulse_schedule().validate();
            const WaveState initial = make_state(point.lattice, point.initial);
            ProtocolOptions opt = protocol_options(point, 1);
            opt.snapshot_times.clear();
            opt.band_occupations = false;
            opt.t_end = 2.0 * point.schedule->T0 +
                        (point.schedule->kind == PulseKind::exact ? point.schedule->delta_T : 0.0);
            opt.t_end = std::max(opt.t_end, cfg.run.t_end);
            const Trajectory traj = run_protocol(point.lattice, initial, point.pulse_schedule(), opt);
            rows[i] = {values[i], echo_report(traj, point.pulse_end(), predicted_fidelity(point, initial))};
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<std::vector<double>> table;
    for (const auto& row : rows)
        table.push_back({row.value, row.report.peak_time, row.report.peak_value,
                         row.report.predicted_value, row.report.residual});
    write_csv(output_dir(cfg) / "sweep.csv",
              {to_string(axis), "peak_time", "peak_value", "predicted_value", "residual"}, table);
    return rows;
}

std::vector<CheckLine> cmd_check(const CheckOptions& options) {
    if (options.size < 2 || options.size % 2 != 0) throw ConfigError("--size must be even and >= 2");
    std::mt19937_64 rng(options.seed);
    const LatticeSpec ring = LatticeSpec::chain(2 * options.size);
    const LatticeSpec torus = LatticeSpec::square(options.size, options.size);

    std::vector<CheckLine> lines;
    lines.push_back({fmt::format("oracle_ring_{}", ring.num_sites()), oracle_residual(ring, options, rng), 1e-10});
    lines.push_back({fmt::format("oracle_torus_{}x{}", options.size, options.size),
                     oracle_residual(torus, options, rng), 1e-10});
    lines.push_back({"unitarity_kspace", unitarity_residual(torus, PropagatorKind::kspace), 1e-10});
    lines.push_back({"unitarity_realspace", unitarity_residual(torus, PropagatorKind::realspace), 1e-10});
    lines.push_back({"transfer_amplitude", transfer_residual(), 1e-8});
    lines.push_back({"folding_identity_and_gap", folding_residual(), 1e-12});
    return lines;
}

void print_check(std::ostream& out, const std::vector<CheckLine>& lines) {
    for (const auto& line : lines)
        out << fmt::format("{:<26} max_residual={:.3e} threshold={:.0e} {}\n", line.name, line.residual,
                           line.threshold, line.passed() ? "PASS" : "FAIL");
}

}  // namespace latticeecho
