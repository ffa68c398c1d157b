#include "latticeecho/evolve.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

#include "latticeecho/error.hpp"
#include "latticeecho/parallel.hpp"

namespace latticeecho {

void PulseSchedule::validate() const {
    double previous_end = -std::numeric_limits<double>::infinity();
    for (const auto& e : events) {
        if (!std::isfinite(e.t_start) || e.t_start < 0.0)
            throw InvalidInput("pulse start must be a finite non-negative time");
        if (!(e.delta_T > 0.0) || !std::isfinite(e.delta_T))
            throw InvalidInput("pulse duration must be positive");
        if (!(e.M >= 0.0) || !std::isfinite(e.M)) throw InvalidInput("pulse strength must be >= 0");
        if (e.sign != 1 && e.sign != -1) throw InvalidInput("pulse sign must be +1 or -1");
        if (e.t_start < previous_end)
            throw InvalidInput("pulse schedule must be sorted and non-overlapping");
        previous_end = e.t_end();
        // Two phase flips at the same instant would be ambiguous to order.
        if (e.kind == PulseKind::phase_flip) previous_end = std::nextafter(previous_end, INFINITY);
    }
}

Eigen::MatrixXd build_hamiltonian(const LatticeSpec& spec, double M) {
    spec.validate();
    const int n = spec.num_sites();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    const int orders = spec.max_order();
    for (int i = 0; i < n; ++i) {
        const Coord site = spec.coord(i);
        h(i, i) = spec.base_energy + sublattice_parity(spec, site) * M;
        for (int a = 0; a < spec.dimension; ++a) {
            for (int r = 1; r <= orders; ++r) {
                const double J = spec.hopping(r, a);
                if (J == 0.0) continue;
                Coord target = site;
                target[a] += r;
                if (target[a] >= spec.extents[a]) {
                    if (spec.boundary == Boundary::open) continue;
                    target[a] -= spec.extents[a];
                }
                const int j = spec.index(target);
                h(i, j) -= 0.5 * J;
                h(j, i) -= 0.5 * J;
            }
        }
    }
    return h;
}

KSpacePropagator::KSpacePropagator(const LatticeSpec& spec, int workers)
    : spec_([&] {
          if (spec.boundary == Boundary::open)
              throw UnsupportedMethod(
                  "k-space propagator needs periodic boundaries; use the real-space propagator");
          require_kspace(spec);
          return spec;
      }()),
      grid_(spec_),
      fft_(spec_),
      workers_(workers) {
    diagonal_.reserve(grid_.k.size());
    coupling_.reserve(grid_.k.size());
    for (const auto& k : grid_.k) {
        diagonal_.push_back(spec_.base_energy - hopping_even(spec_, k));
        coupling_.push_back(-hopping_odd(spec_, k));
    }
}

void KSpacePropagator::evolve(WaveState& state, double M, double duration) {
    if (static_cast<int>(state.size()) != spec_.num_sites())
        throw InvalidInput("state size does not match the lattice");
    if (duration == 0.0) return;

    std::vector<cplx>& psi = state.amplitudes;
    fft_.forward(psi);
    const double r = std::numbers::sqrt2 / 2.0;
    parallel_for(grid_.k.size(), workers_, [&](std::size_t j) {
        const cplx a = psi[grid_.index[j]];
        const cplx b = psi[grid_.partner[j]];
        const cplx phi = r * (a + b);
        const cplx chi = r * (a - b);

        // M(k) = d I + c sigma_x + M sigma_z
        const double c = coupling_[j];
        const double radius = std::hypot(c, M);
        const double cos_t = std::cos(radius * duration);
        const double sinc_t = radius > 0.0 ? std::sin(radius * duration) / radius : duration;
        const cplx global = std::polar(1.0, -diagonal_[j] * duration);
        const cplx u00 = global * cplx{cos_t, -sinc_t * M};
        const cplx u11 = global * cplx{cos_t, sinc_t * M};
        const cplx u01 = global * cplx{0.0, -sinc_t * c};

        const cplx phi_t = u00 * phi + u01 * chi;
        const cplx chi_t = u01 * phi + u11 * chi;
        psi[grid_.index[j]] = r * (phi_t + chi_t);
        psi[grid_.partner[j]] = r * (phi_t - chi_t);
    });
    fft_.backward(psi);
    state.time += duration;
}

RealSpacePropagator::RealSpacePropagator(const Eigen::MatrixXd& hamiltonian) {
    const Eigen::Index n = hamiltonian.rows();
    if (hamiltonian.cols() != n) throw InvalidInput("Hamiltonian must be square");
    if (n > kRealSpaceSiteLimit)
        throw ResourceError("real-space propagator limited to " +
                            std::to_string(kRealSpaceSiteLimit) + " sites, got " +
                            std::to_string(n));
    eigenvectors_ = hamiltonian;
    eigenvalues_.resize(n);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                       eigenvectors_.data(), static_cast<lapack_int>(n), eigenvalues_.data());
    if (info != 0) throw Error("dsyevd failed with info " + std::to_string(info));
}

RealSpacePropagator::RealSpacePropagator(const LatticeSpec& spec, double M)
    : RealSpacePropagator([&] {
          spec.validate();
          if (spec.num_sites() > kRealSpaceSiteLimit)
              throw ResourceError("real-space propagator limited to " +
                                  std::to_string(kRealSpaceSiteLimit) + " sites");
          return build_hamiltonian(spec, M);
      }()) {}

void RealSpacePropagator::evolve(WaveState& state, double duration) const {
    const Eigen::Index n = eigenvalues_.size();
    if (static_cast<Eigen::Index>(state.size()) != n)
        throw InvalidInput("state size does not match the Hamiltonian");
    if (duration == 0.0) return;

    Eigen::MatrixXd parts(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        parts(i, 0) = state.amplitudes[i].real();
        parts(i, 1) = state.amplitudes[i].imag();
    }
    Eigen::MatrixXd modes = eigenvectors_.transpose() * parts;
    for (Eigen::Index j = 0; j < n; ++j) {
        const cplx c = cplx{modes(j, 0), modes(j, 1)} * std::polar(1.0, -eigenvalues_[j] * duration);
        modes(j, 0) = c.real();
        modes(j, 1) = c.imag();
    }
    parts.noalias() = eigenvectors_ * modes;
    for (Eigen::Index i = 0; i < n; ++i) state.amplitudes[i] = {parts(i, 0), parts(i, 1)};
    state.time += duration;
}

WaveState evolve_segment_kspace(const WaveState& state, const LatticeSpec& spec, double M,
                                double duration) {
    KSpacePropagator propagator(spec);
    WaveState out = state;
    propagator.evolve(out, M, duration);
    return out;
}

WaveState evolve_segment_realspace(const WaveState& state, const LatticeSpec& spec, double M,
                                   double duration) {
    WaveState out = state;
    if (duration == 0.0) return out;
    RealSpacePropagator(spec, M).evolve(out, duration);
    return out;
}

void apply_phase_flip(WaveState& state, const LatticeSpec& spec, double angle) {
    if (static_cast<int>(state.size()) != spec.num_sites())
        throw InvalidInput("state size does not match the lattice");
    const cplx even = std::polar(1.0, -angle);
    const cplx odd = std::polar(1.0, angle);
    for (int i = 0; i < spec.num_sites(); ++i)
        state.amplitudes[i] *= sublattice_parity(spec, spec.coord(i)) > 0 ? even : odd;
}

}  // namespace latticeecho
