#pragma once

#include <memory>
#include <vector>

#include "latticeecho/lattice.hpp"

namespace latticeecho {

// Two-component supercell representation (phi(k), chi(k)) of a lattice
// wave function: phi collects the A sublattice (even parity), chi the B
// sublattice. Phases use the actual site positions, so the nearest
// neighbour block is the real matrix [[E0 + M, -J(k)], [-J(k), E0 - M]].
struct KSpaceAmplitudes {
    std::vector<Momentum> k;
    std::vector<cplx> phi;
    std::vector<cplx> chi;
};

// Unitary DFT on the full periodic grid, owned plans. Not thread-safe per
// instance; independent instances may run concurrently.
class Fft {
public:
    explicit Fft(const LatticeSpec& spec);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;

    // In place, normalised by 1/sqrt(N).
    void forward(std::vector<cplx>& data);
    void backward(std::vector<cplx>& data);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Index bookkeeping shared by the transform and the propagator: for each
// reduced-zone representative, its full-grid index and that of k + Q.
struct SupercellGrid {
    std::vector<Momentum> k;
    std::vector<int> index;
    std::vector<int> partner;

    explicit SupercellGrid(const LatticeSpec& spec);
};

// Throws InvalidInput unless the lattice is periodic with even extents.
void require_kspace(const LatticeSpec& spec);

KSpaceAmplitudes kspace_transform(const WaveState& state, const LatticeSpec& spec);
WaveState inverse_kspace_transform(const KSpaceAmplitudes& amplitudes, const LatticeSpec& spec,
                                   double time = 0.0);

}  // namespace latticeecho
