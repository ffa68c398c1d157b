#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latticeecho/evolve.hpp"
#include "latticeecho/lattice.hpp"

namespace latticeecho {

struct ScheduleConfig {
    double T0 = 10.0;
    double M = 10.0;
    double delta_T = 0.0;
    // delta_T = pi: the pulse length follows M as pi / (2 M).
    bool pi_pulse = false;
    PulseKind kind = PulseKind::exact;
    int sign = +1;
};

struct RunConfig {
    double t_end = 0.0;
    double sample_dt = 0.1;
    std::vector<double> snapshot_times;
    PropagatorKind propagator = PropagatorKind::kspace;
    int workers = 1;
    std::uint64_t seed = 42;
};

struct OutputConfig {
    std::filesystem::path dir;
    bool csv = true;
    bool pgm = true;
};

enum class SweepAxis { M, delta_T, J2, J3 };

struct SweepConfig {
    std::optional<SweepAxis> axis;
    std::vector<double> values;
};

// INI-style experiment description:
//
//   [lattice]   dimension, extents, spacing, J | Jx, Jy, J2, J3, ..., boundary, E0
//   [initial]   kind = single_site | gaussian | bitmap | random, plus its fields
//   [schedule]  T0, M, delta_T (number or "pi"), mode = exact | phase_flip, sign
//   [run]       t_end, sample_dt, snapshot_times, propagator, workers, seed
//   [output]    dir, formats
//   [sweep]     axis, values
//
// Numeric fields accept small arithmetic expressions over T0, M, dT and pi,
// e.g. "2*T0 + dT" or "pi/(8*M)". Relative paths resolve against the
// config file's directory.
struct ExperimentConfig {
    LatticeSpec lattice;
    InitialStateSpec initial = SingleSite{};
    std::optional<ScheduleConfig> schedule;
    RunConfig run;
    OutputConfig output;
    SweepConfig sweep;

    PulseSchedule pulse_schedule() const;
    double pulse_end() const;
    // Re-derives delta_T for pi pulses after M changed.
    void set_pulse_strength(double M);
};

double evaluate_expression(const std::string& text, const std::map<std::string, double>& symbols);

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);
PropagatorKind parse_propagator(const std::string& name);

// Throws ConfigError (with the offending key or line) on any problem.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace latticeecho
