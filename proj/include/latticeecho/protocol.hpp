#pragma once

#include <optional>
#include <vector>

#include "latticeecho/evolve.hpp"
#include "latticeecho/lattice.hpp"

namespace latticeecho {

struct Snapshot {
    double time = 0.0;
    std::vector<double> density;  // |psi_n|^2, row-major
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> fidelity_amplitude;
    std::vector<double> overlap_modulus;
    std::vector<Snapshot> snapshots;
    // Free-band occupations (P_lower, P_upper); empty when the lattice has
    // no supercell transform (open boundaries, odd extents).
    std::vector<std::array<double, 2>> band_occupations;
    WaveState final_state;
};

struct ProtocolOptions {
    double t_end = 0.0;
    double sample_dt = 0.0;
    std::vector<double> snapshot_times;
    PropagatorKind propagator = PropagatorKind::kspace;
    int workers = 1;
    bool band_occupations = true;
};

// Free segments (M = 0) alternate with the scheduled pulses. The state is
// recorded on the union of the sample grid i * sample_dt, every segment
// boundary, the snapshot instants and t_end; evolution between them is
// exact, so the subdivision is lossless. Phase flips are applied on
// reaching their instant (records are right-continuous).
Trajectory run_protocol(const LatticeSpec& spec, const WaveState& initial,
                        const PulseSchedule& schedule, const ProtocolOptions& options);
Trajectory run_protocol(const LatticeSpec& spec, const InitialStateSpec& init,
                        const PulseSchedule& schedule, const ProtocolOptions& options);

}  // namespace latticeecho
