#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "latticeecho/evolve.hpp"
#include "latticeecho/lattice.hpp"
#include "latticeecho/protocol.hpp"

namespace latticeecho {

// Echo peaks below this level do not count as a revival.
inline constexpr double kRevivalThreshold = 0.5;

struct EchoReport {
    double peak_time = 0.0;
    double peak_value = 0.0;
    double predicted_value = 0.0;
    double residual = 0.0;
    bool revival = false;
};

// sum_n |ref_n| |cur_n|
double fidelity_amplitude(const WaveState& reference, const WaveState& current);
// |sum_n conj(ref_n) cur_n|
double overlap_modulus(const WaveState& reference, const WaveState& current);

// (P_A, P_B): weight on even / odd parity sites.
std::array<double, 2> sublattice_populations(const WaveState& state, const LatticeSpec& spec);

// Occupation of the free (M = 0) lower and upper folded branch.
std::array<double, 2> band_populations(const WaveState& state, const LatticeSpec& spec);

// Mean position <n> * l per axis. Periodic axes use the circular mean,
// returned in [0, N l).
Momentum centroid(const WaveState& state, const LatticeSpec& spec);

// Least-squares slope of the (unwrapped) centroid against state.time.
Momentum centroid_velocity(std::span<const WaveState> window, const LatticeSpec& spec);

struct EchoPrediction {
    double time = 0.0;
    double value = 0.0;
};

// Band-wise prediction of the state `wait` after the pulse ends (default
// T0): free phases exp(-i E+-(k) T0), pulse mixing
// [[alpha, beta], [beta, conj alpha]] from transfer_amplitude (a pure
// rotation for phase flips), free phases again for `wait`. The pulse is
// taken to start at T0; its t_start is ignored. Requires a periodic
// lattice with even extents.
WaveState predict_echo_state(const WaveState& initial, const LatticeSpec& spec,
                             const PulseEvent& pulse, double T0,
                             std::optional<double> wait = std::nullopt);

// F(initial, predicted state) at t = 2 T0 + delta_T.
double predict_echo_fidelity(const WaveState& initial, const LatticeSpec& spec,
                             const PulseEvent& pulse, double T0);

// Maximum of the predicted F(t) within +-0.5 of the nominal echo time. At
// finite M the interference with the non-reflected part moves the peak
// slightly off 2 T0 + delta_T.
EchoPrediction predict_echo_peak(const WaveState& initial, const LatticeSpec& spec,
                                 const PulseEvent& pulse, double T0);

// Post-pulse maximum of F(t) with a three-point parabolic refinement.
// Throws InvalidInput when no sample lies after pulse_end.
EchoReport echo_report(const Trajectory& trajectory, double pulse_end, double predicted);
EchoReport echo_report(std::span<const double> times, std::span<const double> fidelity,
                       double pulse_end, double predicted);

void write_report(std::ostream& out, const EchoReport& report);
EchoReport read_report(std::istream& in);

}  // namespace latticeecho
