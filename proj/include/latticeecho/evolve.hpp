#pragma once

#include <Eigen/Dense>

#include <vector>

#include "latticeecho/bands.hpp"
#include "latticeecho/kspace.hpp"
#include "latticeecho/lattice.hpp"

namespace latticeecho {

enum class PulseKind {
    // Full hopping plus staggered Hamiltonian for delta_T.
    exact,
    // M -> infinity limit: instantaneous phase exp(-i sign M delta_T parity),
    // no hopping, no elapsed time.
    phase_flip,
};

struct PulseEvent {
    double t_start = 0.0;
    double delta_T = 0.0;
    double M = 0.0;
    int sign = +1;
    PulseKind kind = PulseKind::exact;

    double strength() const noexcept { return sign * M; }
    double t_end() const noexcept { return kind == PulseKind::exact ? t_start + delta_T : t_start; }
};

struct PulseSchedule {
    std::vector<PulseEvent> events;

    // Sorted, non-overlapping, delta_T > 0, M >= 0, sign = +-1.
    void validate() const;
    bool empty() const noexcept { return events.empty(); }
};

enum class PropagatorKind { kspace, realspace };

inline constexpr int kRealSpaceSiteLimit = 4096;

// Dense single-particle Hamiltonian: -J_r/2 between r-th neighbours (both
// directions, wrapped when periodic), E0 + parity * M on the diagonal.
Eigen::MatrixXd build_hamiltonian(const LatticeSpec& spec, double M);

// Exact exp(-i M(k) t) per reduced-zone mode via the Pauli form
// exp(-i a t) [cos(|b| t) - i sin(|b| t) b.sigma / |b|].
class KSpacePropagator {
public:
    explicit KSpacePropagator(const LatticeSpec& spec, int workers = 1);

    void evolve(WaveState& state, double M, double duration);
    const LatticeSpec& spec() const noexcept { return spec_; }

private:
    LatticeSpec spec_;
    SupercellGrid grid_;
    Fft fft_;
    int workers_;
    std::vector<double> diagonal_;  // E0 - even(k)
    std::vector<double> coupling_;  // -odd(k)
};

// U = V exp(-i Lambda t) V^T from a dense symmetric eigendecomposition.
class RealSpacePropagator {
public:
    explicit RealSpacePropagator(const Eigen::MatrixXd& hamiltonian);
    RealSpacePropagator(const LatticeSpec& spec, double M);

    void evolve(WaveState& state, double duration) const;
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

WaveState evolve_segment_kspace(const WaveState& state, const LatticeSpec& spec, double M,
                                double duration);
WaveState evolve_segment_realspace(const WaveState& state, const LatticeSpec& spec, double M,
                                   double duration);

// psi_n *= exp(-i angle parity(n)); angle = pi/2 is the ideal pi-pulse.
void apply_phase_flip(WaveState& state, const LatticeSpec& spec, double angle);

}  // namespace latticeecho
