#pragma once

#include <vector>

#include "latticeecho/lattice.hpp"

namespace latticeecho {

// Abstract two-band model: an arbitrary tabulated band E1(k) and its mirror
// E2(k) = delta_E - lambda * E1(k). E2 is always derived, never stored.
struct TwoBandModel {
    std::vector<double> k;
    std::vector<double> e1;
    double delta_e = 0.0;
    double lambda = 1.0;

    double e2(std::size_t i) const { return delta_e - lambda * e1[i]; }
};

// Mixes the band amplitudes of every mode at `time` with the rotation
// [[c, -f], [f, c]], c = sqrt(1 - f^2). fraction = 1 is the full swap.
struct SwapEvent {
    double time = 0.0;
    double fraction = 1.0;
};

struct TwoBandTrajectory {
    std::vector<double> times;
    std::vector<double> overlap;     // |<psi(0)|psi(t)>| with both bands sharing the mode profile
    std::vector<double> population1;
    std::vector<double> population2;
};

// Per-mode phase evolution exp(-i E_b(k) t) in the occupied band b. The
// initial packet lives in band 1. Throws InvalidInput for an unsorted
// schedule, fractions outside [0, 1] or a non-normalized packet.
TwoBandTrajectory twoband_evolve(const TwoBandModel& model, const std::vector<cplx>& psi_k,
                                 const std::vector<SwapEvent>& schedule, double t_end,
                                 double sample_dt);

}  // namespace latticeecho
