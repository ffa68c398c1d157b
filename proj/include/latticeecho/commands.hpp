#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "latticeecho/analysis.hpp"
#include "latticeecho/config.hpp"
#include "latticeecho/protocol.hpp"

namespace latticeecho {

// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitConfigError = 2,
    kExitRuntimeError = 3,
};

// Writes bands_unfolded.csv, bands_folded_gapless.csv and
// bands_folded_gapped.csv (M from [schedule], 0 without one).
std::vector<std::filesystem::path> cmd_bands(const ExperimentConfig& cfg);

struct RunResult {
    Trajectory trajectory;
    std::optional<EchoReport> report;
    std::vector<std::filesystem::path> files;
};

// trajectory.csv, snap_t<time>.csv/.pgm per snapshot, summary.txt.
RunResult cmd_run(const ExperimentConfig& cfg);

struct SweepRow {
    double value = 0.0;
    EchoReport report;
};

// One independent protocol per value, spread over cfg.run.workers; rows
// come back in input order. Writes sweep.csv.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                const std::vector<double>& values);

struct CheckOptions {
    int size = 8;
    bool perturb = false;
    std::uint64_t seed = 42;
    int trials = 100;
};

struct CheckLine {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    bool passed() const { return residual < threshold; }
};

// Oracle equivalence (2*size ring, size x size torus), unitarity, transfer
// amplitude against a numerical 2x2 exponential, folding identity and gap.
std::vector<CheckLine> cmd_check(const CheckOptions& options);
void print_check(std::ostream& out, const std::vector<CheckLine>& lines);

}  // namespace latticeecho
