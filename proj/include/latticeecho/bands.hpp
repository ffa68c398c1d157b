#pragma once

#include <span>
#include <utility>
#include <vector>

#include "latticeecho/lattice.hpp"

namespace latticeecho {

struct BandPair {
    double lower = 0.0;
    double upper = 0.0;
};

// Per-axis velocities of both folded branches.
struct VelocityPair {
    Momentum lower{0.0, 0.0};
    Momentum upper{0.0, 0.0};
};

struct TransferAmplitudes {
    cplx alpha;  // stay in the initial branch
    cplx beta;   // lower -> upper branch
};

// Folded dispersion sampled over the reduced zone.
struct BandStructure {
    std::vector<Momentum> k_grid;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<VelocityPair> velocity;
    double gap = 0.0;
};

// Momentum-space pieces of the hopping stencil. The odd-order part couples
// the two sublattices, the even-order part stays on one sublattice.
//   odd(k)  = sum_{a, r odd}  J_{r,a} cos(r k_a l)
//   even(k) = sum_{a, r even} J_{r,a} cos(r k_a l)
double hopping_odd(const LatticeSpec& spec, const Momentum& k);
double hopping_even(const LatticeSpec& spec, const Momentum& k);
Momentum hopping_odd_gradient(const LatticeSpec& spec, const Momentum& k);
Momentum hopping_even_gradient(const LatticeSpec& spec, const Momentum& k);

bool in_full_zone(const LatticeSpec& spec, const Momentum& k);
bool in_reduced_zone(const LatticeSpec& spec, const Momentum& k);

// E0 - sum_a sum_r J_r cos(r k_a l). Domain: |k_a| <= pi/l.
double dispersion_unfolded(const LatticeSpec& spec, const Momentum& k);

// E0 - even(k) -/+ sqrt(M^2 + odd(k)^2). Even-order hopping lands on the
// diagonal of the supercell Hamiltonian and shifts both branches together,
// which is what breaks the E+ + E- = 2 E0 symmetry.
BandPair dispersion_folded(const LatticeSpec& spec, double M, const Momentum& k);

Momentum group_velocity_unfolded(const LatticeSpec& spec, const Momentum& k);
VelocityPair group_velocity_folded(const LatticeSpec& spec, double M, const Momentum& k);

// Central differences on a tabulated band; one-sided at both ends.
std::vector<double> group_velocity_tabulated(std::span<const double> k, std::span<const double> energy);

// Branch mixing of a sudden staggered pulse of strength M and duration
// delta_T on a mode with sublattice coupling J(k), in the free eigenbasis:
//   beta  = -i M / E sin(E dT)
//   alpha = cos(E dT) + i J / E sin(E dT),   E = sqrt(M^2 + J^2)
TransferAmplitudes transfer_amplitude(double J_of_k, double M, double delta_T);

// Reduced-zone momenta on the grid 2 pi m / (N l) of the lattice extents.
// One representative per {k, k + Q} class, zone-edge points resolved
// towards positive momentum.
std::vector<Momentum> reduced_zone_grid(const LatticeSpec& spec);

// Full-zone grid points k_a in (-pi/l, pi/l], row-major.
std::vector<Momentum> full_zone_grid(const LatticeSpec& spec);

// Uniform 1D reduced-zone grid (-pi/2l, pi/2l], zone edge included on the
// positive side.
std::vector<Momentum> reduced_zone_line(int points, double spacing = 1.0);

// Every full-grid point with |kx| + |ky| <= pi/l (1D: |k| <= pi/2l),
// boundary points on both sides included.
std::vector<Momentum> diamond_grid(const LatticeSpec& spec);

BandStructure sample_bands(const LatticeSpec& spec, double M, std::span<const Momentum> k_grid);

}  // namespace latticeecho
