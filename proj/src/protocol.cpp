#include "latticeecho/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "latticeecho/analysis.hpp"
#include "latticeecho/error.hpp"

namespace latticeecho {

namespace {

bool same_instant(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

// Sorted, de-duplicated union of the given instants.
std::vector<double> merge_instants(std::vector<double> instants) {
    std::sort(instants.begin(), instants.end());
    std::vector<double> merged;
    for (double t : instants)
        if (merged.empty() || !same_instant(t, merged.back())) merged.push_back(t);
    return merged;
}

class Stepper {
public:
    Stepper(const LatticeSpec& spec, PropagatorKind kind, int workers)
        : spec_(spec), kind_(kind) {
        if (kind == PropagatorKind::kspace) kspace_ = std::make_unique<KSpacePropagator>(spec, workers);
    }

    void evolve(WaveState& state, double M, double duration) {
        if (duration <= 0.0) return;
        if (kspace_) {
            kspace_->evolve(state, M, duration);
            return;
        }
        auto it = realspace_.find(M);
        if (it == realspace_.end())
            it = realspace_.emplace(M, std::make_unique<RealSpacePropagator>(spec_, M)).first;
        it->second->evolve(state, duration);
    }

private:
    const LatticeSpec& spec_;
    PropagatorKind kind_;
    std::unique_ptr<KSpacePropagator> kspace_;
    std::map<double, std::unique_ptr<RealSpacePropagator>> realspace_;
};

}  // namespace

Trajectory run_protocol(const LatticeSpec& spec, const WaveState& initial,
                        const PulseSchedule& schedule, const ProtocolOptions& options) {
    spec.validate();
    schedule.validate();
    if (!(options.sample_dt > 0.0)) throw InvalidInput("sample_dt must be positive");
    if (!(options.t_end >= 0.0) || !std::isfinite(options.t_end))
        throw InvalidInput("t_end must be a finite non-negative time");
    if (static_cast<int>(initial.size()) != spec.num_sites())
        throw InvalidInput("initial state does not match the lattice");
    for (const auto& e : schedule.events)
        if (e.t_end() > options.t_end * (1.0 + 1e-12))
            throw InvalidInput("pulse schedule extends past t_end");
    for (double t : options.snapshot_times)
        if (t < 0.0 || t > options.t_end * (1.0 + 1e-12))
            throw InvalidInput("snapshot time outside [0, t_end]");

    // Segment boundaries: every instant where the Hamiltonian changes.
    std::vector<double> boundaries{0.0, options.t_end};
    for (const auto& e : schedule.events) {
        boundaries.push_back(e.t_start);
        boundaries.push_back(e.t_end());
    }
    std::vector<double> instants = boundaries;
    const auto samples = static_cast<long>(std::floor(options.t_end / options.sample_dt + 1e-9));
    for (long i = 0; i <= samples; ++i) instants.push_back(static_cast<double>(i) * options.sample_dt);
    instants.insert(instants.end(), options.snapshot_times.begin(), options.snapshot_times.end());
    instants = merge_instants(std::move(instants));
    boundaries = merge_instants(std::move(boundaries));

    Stepper stepper(spec, options.propagator, options.workers);
    const bool track_bands = options.band_occupations && spec.supports_kspace();

    Trajectory traj;
    WaveState state = initial;
    state.time = 0.0;
    std::vector<bool> flipped(schedule.events.size(), false);

    auto strength_between = [&](double a, double b) {
        const double mid = 0.5 * (a + b);
        for (const auto& e : schedule.events)
            if (e.kind == PulseKind::exact && mid > e.t_start && mid < e.t_end()) return e.strength();
        return 0.0;
    };
    auto apply_flips_at = [&](double t) {
        for (std::size_t i = 0; i < schedule.events.size(); ++i) {
            const auto& e = schedule.events[i];
            if (e.kind == PulseKind::phase_flip && !flipped[i] && same_instant(e.t_start, t)) {
                apply_phase_flip(state, spec, e.strength() * e.delta_T);
                flipped[i] = true;
            }
        }
    };
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.fidelity_amplitude.push_back(fidelity_amplitude(initial, state));
        traj.overlap_modulus.push_back(overlap_modulus(initial, state));
        if (track_bands) traj.band_occupations.push_back(band_populations(state, spec));
        for (double ts : options.snapshot_times) {
            if (!same_instant(ts, t)) continue;
            Snapshot snap{t, std::vector<double>(state.size())};
            for (std::size_t i = 0; i < state.size(); ++i) snap.density[i] = std::norm(state.amplitudes[i]);
            traj.snapshots.push_back(std::move(snap));
            break;
        }
    };

    double now = 0.0;
    for (double target : instants) {
        // Walk segment by segment so each piece has a constant Hamiltonian.
        while (!same_instant(now, target) && now < target) {
            double next = target;
            for (double b : boundaries)
                if (b > now && !same_instant(b, now) && b < next) next = b;
            apply_flips_at(now);
            stepper.evolve(state, strength_between(now, next), next - now);
            now = next;
            state.time = now;
        }
        now = target;
        state.time = target;
        apply_flips_at(now);
        record(now);
    }
    traj.final_state = std::move(state);
    return traj;
}

Trajectory run_protocol(const LatticeSpec& spec, const InitialStateSpec& init,
                        const PulseSchedule& schedule, const ProtocolOptions& options) {
    return run_protocol(spec, make_state(spec, init), schedule, options);
}

}  // namespace latticeecho
