#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "latticeecho/commands.hpp"
#include "latticeecho/error.hpp"
#include "latticeecho/io.hpp"

using namespace latticeecho;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const fs::path kConfigs = LATTICEECHO_CONFIG_DIR;
const std::string kExe = LATTICEECHO_EXE;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "latticeecho_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig parse(const std::string& text, const fs::path& base = ".") {
    std::istringstream in(text);
    return parse_config(in, base);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
    const int status = std::system((kExe + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kSmall = R"(
[lattice]
dimension = 2
extents = 48, 48
J = 1

[initial]
kind = gaussian
center = 24, 24
sigma = 1.5
k0 = 0.4, 0.2

[schedule]
T0 = 8
M = 10
delta_T = pi

[run]
sample_dt = 0.05
snapshot_times = 0, T0, 2*T0 + dT
)";

std::string fmt_stem(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snap_t%.6f", t);
    return buf;
}

std::string with_dir(const std::string& text, const fs::path& dir) {
    return text + "\n[output]\ndir = " + dir.string() + "\n";
}

}  // namespace

TEST(Config, ExpressionsAndDefaults) {
    const ExperimentConfig cfg = parse(kSmall);
    ASSERT_TRUE(cfg.schedule);
    EXPECT_NEAR(cfg.schedule->delta_T, pi / 20.0, 1e-15);
    EXPECT_NEAR(cfg.run.t_end, 16.0 + pi / 20.0, 1e-14);
    ASSERT_EQ(cfg.run.snapshot_times.size(), 3u);
    EXPECT_NEAR(cfg.run.snapshot_times[2], cfg.run.t_end, 1e-14);
    EXPECT_EQ(cfg.run.propagator, PropagatorKind::kspace);
    EXPECT_DOUBLE_EQ(evaluate_expression("2*(T0 - 1) / 4 + pi", {{"T0", 3.0}}), 1.0 + pi);
    EXPECT_DOUBLE_EQ(evaluate_expression("-1.5e1", {}), -15.0);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse("[run]\nsample_dt = 1\n"), ConfigError);
    EXPECT_THROW(parse(kSmall + "\n[output]\nformats = csv\n[lattice]\n"), ConfigError);
    std::string bad = kSmall;
    bad.replace(bad.find("sample_dt = 0.05"), 16, "sample_dt = 100");
    EXPECT_THROW(parse(bad), ConfigError);
    bad = kSmall;
    bad.replace(bad.find("extents = 48, 48"), 16, "extents = 47, 48");
    EXPECT_THROW(parse(bad), ConfigError);
    bad = kSmall;
    bad.replace(bad.find("sigma = 1.5"), 11, "sigma = 0");
    EXPECT_THROW(parse(bad), ConfigError);
    bad = kSmall;
    bad.replace(bad.find("T0 = 8"), 6, "T0 = x*");
    EXPECT_THROW(parse(bad), ConfigError);
    bad = kSmall;
    bad.replace(bad.find("kind = gaussian"), 15, "kind = bitmap\npath = nowhere.grid");
    EXPECT_THROW(parse(bad), ConfigError);
    EXPECT_THROW(load_config(kConfigs / "does_not_exist.cfg"), ConfigError);
}

TEST(Config, ShippedPaperConfig) {
    const ExperimentConfig cfg = load_config(kConfigs / "paper_pi.cfg");
    EXPECT_EQ(cfg.lattice.extents, (std::array<int, 2>{64, 64}));
    ASSERT_TRUE(cfg.schedule);
    EXPECT_DOUBLE_EQ(cfg.schedule->T0, 10.0);
    EXPECT_DOUBLE_EQ(cfg.schedule->M, 10.0);
    EXPECT_NEAR(cfg.schedule->delta_T, pi / 20.0, 1e-15);
    const double dT = cfg.schedule->delta_T;
    const std::vector<double> expected{0.0, 5.0, 10.0, 15.0 + dT, 20.0 + dT};
    ASSERT_EQ(cfg.run.snapshot_times.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(cfg.run.snapshot_times[i], expected[i], 1e-13);
    EXPECT_TRUE(std::holds_alternative<Bitmap>(cfg.initial));
    EXPECT_TRUE(fs::exists(std::get<Bitmap>(cfg.initial).path));
}

TEST(Bands, OneDimensionalTables) {
    const fs::path dir = scratch("bands1d");
    ExperimentConfig cfg = parse(with_dir(R"(
[lattice]
dimension = 1
extents = 64
J = 1
E0 = 0.5
[initial]
kind = single_site
[schedule]
T0 = 1
M = 10
[run]
sample_dt = 0.1
)", dir));
    cmd_bands(cfg);
    const CsvTable gapless = read_csv(dir / "bands_folded_gapless.csv");
    for (const auto& row : gapless.rows) EXPECT_NEAR(row[1] + row[2], 1.0, 1e-13);
    const CsvTable gapped = read_csv(dir / "bands_folded_gapped.csv");
    double gap = 1e300;
    for (const auto& row : gapped.rows) gap = std::min(gap, row[2] - row[1]);
    EXPECT_NEAR(gap, 20.0, 1e-12);
    EXPECT_EQ(read_csv(dir / "bands_unfolded.csv").rows.size(), 64u);
}

TEST(Bands, DiamondRowCount) {
    const fs::path dir = scratch("bands2d");
    cmd_bands(parse(with_dir(kSmall, dir)));
    std::size_t expected = 0;
    for (int mx = -23; mx <= 24; ++mx)
        for (int my = -23; my <= 24; ++my)
            if (2 * (std::abs(mx) + std::abs(my)) <= 48) ++expected;
    const CsvTable t = read_csv(dir / "bands_folded_gapped.csv");
    EXPECT_EQ(t.rows.size(), expected);
    EXPECT_EQ(t.header.size(), 8u);
    for (const auto& row : t.rows) EXPECT_LE(std::abs(row[0]) + std::abs(row[1]), pi + 1e-12);
}

TEST(Run, OutputsAndReport) {
    const fs::path dir = scratch("run");
    const RunResult r = cmd_run(parse(with_dir(kSmall, dir)));
    ASSERT_TRUE(r.report);
    EXPECT_TRUE(r.report->revival);
    EXPECT_LT(r.report->residual, 1e-6);
    const CsvTable traj = read_csv(dir / "trajectory.csv");
    EXPECT_EQ(traj.header, (std::vector<std::string>{"t", "F", "overlap", "P_lower", "P_upper"}));
    EXPECT_EQ(traj.rows.size(), r.trajectory.times.size());
    for (std::size_t i = 0; i < traj.rows.size(); ++i)
        EXPECT_EQ(traj.rows[i][1], r.trajectory.fidelity_amplitude[i]);  // exact round trip

    // Snapshot CSV and PGM agree with the recorded density.
    const auto& last = r.trajectory.snapshots.back();
    const CsvTable grid = read_csv(dir / (fmt_stem(last.time) + ".csv"), false);
    ASSERT_EQ(grid.rows.size(), 48u);
    double peak = 0.0;
    for (double d : last.density) peak = std::max(peak, d);
    const Graymap g = read_pgm(dir / (fmt_stem(last.time) + ".pgm"));
    EXPECT_EQ(g.rows, 48);
    EXPECT_EQ(g.cols, 48);
    for (int i = 0; i < 48 * 48; ++i) {
        EXPECT_EQ(grid.rows[i / 48][i % 48], last.density[i]);
        EXPECT_EQ(g.pixels[i], static_cast<int>(std::lround(255.0 * last.density[i] / peak)));
    }
    const std::string summary = read_file(dir / "summary.txt");
    EXPECT_NE(summary.find("revival=1"), std::string::npos);
}

TEST(Run, WithoutScheduleHasNoReport) {
    const fs::path dir = scratch("free");
    std::string text = kSmall;
    text.erase(text.find("[schedule]"), text.find("[run]") - text.find("[schedule]"));
    text.replace(text.find("snapshot_times = 0, T0, 2*T0 + dT"), 33, "t_end = 3");
    const RunResult r = cmd_run(parse(with_dir(text, dir)));
    EXPECT_FALSE(r.report);
    EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
}

TEST(Run, DeterministicAcrossWorkers) {
    std::string contents[2];
    int slot = 0;
    for (int workers : {1, 4}) {
        const fs::path dir = scratch("workers" + std::to_string(workers));
        ExperimentConfig cfg = parse(with_dir(kSmall, dir));
        cfg.run.workers = workers;
        const RunResult r = cmd_run(cfg);
        for (const auto& f : r.files) contents[slot] += f.filename().string() + "\n" + read_file(f);
        ++slot;
    }
    EXPECT_EQ(contents[0], contents[1]);
}

TEST(Sweep, PulseLengthAndEvenHopping) {
    const fs::path dir = scratch("sweep");
    ExperimentConfig cfg = parse(with_dir(kSmall, dir));
    cfg.run.workers = 2;
    const double M = cfg.schedule->M;
    auto rows = cmd_sweep(cfg, SweepAxis::delta_T, {pi / (8 * M), pi / (4 * M), pi / (2 * M)});
    EXPECT_LT(rows[0].report.peak_value, rows[1].report.peak_value);
    EXPECT_LT(rows[1].report.peak_value, rows[2].report.peak_value);
    const CsvTable t = read_csv(dir / "sweep.csv");
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.header.front(), "delta_T");
    EXPECT_EQ(t.rows[2][2], rows[2].report.peak_value);

    rows = cmd_sweep(cfg, SweepAxis::J2, {0.0, 0.1, 0.2});
    EXPECT_GT(rows[0].report.peak_value, rows[1].report.peak_value);
    EXPECT_GT(rows[1].report.peak_value, rows[2].report.peak_value);

    rows = cmd_sweep(cfg, SweepAxis::M, {10.0});
    EXPECT_EQ(read_csv(dir / "sweep.csv").rows.size(), 1u);
    EXPECT_THROW(cmd_sweep(cfg, SweepAxis::M, {}), ConfigError);
}

TEST(Check, DefaultAndFault) {
    for (const auto& line : cmd_check({})) EXPECT_TRUE(line.passed()) << line.name;
    CheckOptions fault;
    fault.size = 4;
    fault.perturb = true;
    bool any_failed = false;
    for (const auto& line : cmd_check(fault)) any_failed |= !line.passed();
    EXPECT_TRUE(any_failed);
}

TEST(Executable, ExitCodes) {
    const fs::path dir = scratch("exe");
    {
        std::ofstream out(dir / "bad.cfg");
        out << "[lattice]\ndimension = 3\n";
    }
    {
        std::ofstream out(dir / "ok.cfg");
        out << kSmall;
    }
    EXPECT_EQ(run_cli("check --size 4"), 0);
    EXPECT_EQ(run_cli("check --size 4 --perturb"), 1);
    EXPECT_EQ(run_cli("run --config " + (dir / "bad.cfg").string()), 2);
    EXPECT_EQ(run_cli("run --config " + (dir / "missing.cfg").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("run --config " + (dir / "ok.cfg").string() + " --out " + (dir / "o").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "o" / "trajectory.csv"));
    EXPECT_EQ(run_cli("run --config " + (dir / "ok.cfg").string() + " --propagator realspace --out " +
                      (dir / "rs").string()),
              0);
    const int env = std::system(("cd " + dir.string() + " && LATTICEECHO_OUT=" + (dir / "env").string() + " " +
                                 kExe + " bands --config ok.cfg > /dev/null 2>&1")
                                    .c_str());
    EXPECT_EQ(WEXITSTATUS(env), 0);
    EXPECT_TRUE(fs::exists(dir / "env" / "bands_unfolded.csv"));
}
