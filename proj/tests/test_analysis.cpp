#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "latticeecho/analysis.hpp"
#include "latticeecho/bands.hpp"
#include "latticeecho/error.hpp"
#include "latticeecho/evolve.hpp"
#include "latticeecho/protocol.hpp"

using namespace latticeecho;
using std::numbers::pi;

namespace {

WaveState uniform(int n) {
    return WaveState{std::vector<cplx>(n, cplx{1.0 / std::sqrt(static_cast<double>(n)), 0.0}), 0.0};
}

std::vector<WaveState> window(const LatticeSpec& spec, WaveState s, double M, double t0, double t1, int n) {
    KSpacePropagator prop(spec);
    std::vector<WaveState> out;
    prop.evolve(s, M, t0);
    s.time = t0;
    const double dt = (t1 - t0) / (n - 1);
    for (int i = 0; i < n; ++i) {
        out.push_back(s);
        prop.evolve(s, M, dt);
    }
    return out;
}

}  // namespace

TEST(Fidelity, HandValues) {
    const WaveState u = uniform(4);
    WaveState local{{1.0, 0.0, 0.0, 0.0}, 0.0};
    WaveState other{{0.0, 0.0, 1.0, 0.0}, 0.0};
    EXPECT_NEAR(fidelity_amplitude(u, u), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(fidelity_amplitude(u, local), 0.5);
    EXPECT_DOUBLE_EQ(fidelity_amplitude(local, other), 0.0);
    EXPECT_THROW(fidelity_amplitude(u, uniform(8)), InvalidInput);
    EXPECT_THROW(overlap_modulus(u, uniform(8)), InvalidInput);
}

TEST(Fidelity, BoundsOverlapAndIgnoresPhase) {
    const LatticeSpec sq = LatticeSpec::square(8, 8);
    const WaveState a = make_state(sq, RandomState{1});
    const WaveState b = make_state(sq, RandomState{2});
    EXPECT_GE(fidelity_amplitude(a, b), overlap_modulus(a, b));
    WaveState rotated = a;
    for (auto& x : rotated.amplitudes) x *= std::polar(1.0, 0.9);
    EXPECT_NEAR(overlap_modulus(a, rotated), 1.0, 1e-14);
    EXPECT_NEAR(fidelity_amplitude(a, rotated), 1.0, 1e-14);
}

TEST(Populations, Sublattices) {
    const LatticeSpec sq = LatticeSpec::square(8, 8);
    auto p = sublattice_populations(make_state(sq, SingleSite{{2, 4}}), sq);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_DOUBLE_EQ(p[1], 0.0);
    p = sublattice_populations(uniform(64), sq);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
    const LatticeSpec chain = LatticeSpec::chain(128);
    p = sublattice_populations(make_state(chain, Gaussian{{64.0, 0.0}, 10.0}), chain);
    EXPECT_NEAR(p[0], 0.5, 1e-2);
}

TEST(Populations, BandsOfAPlaneWave) {
    const LatticeSpec chain = LatticeSpec::chain(16);
    WaveState s;
    for (int n = 0; n < 16; ++n) s.amplitudes.push_back(std::polar(0.25, 2.0 * pi * 2 / 16 * n));
    auto p = band_populations(s, chain);
    EXPECT_NEAR(p[0], 1.0, 1e-13);
    EXPECT_NEAR(p[1], 0.0, 1e-13);
    // The phase flip moves it to the upper branch.
    apply_phase_flip(s, chain, pi / 2);
    p = band_populations(s, chain);
    EXPECT_NEAR(p[1], 1.0, 1e-13);
}

TEST(Centroid, Velocity) {
    const LatticeSpec chain = LatticeSpec::chain(256);
    EXPECT_THROW(centroid_velocity(std::vector<WaveState>{uniform(256)}, chain), InvalidInput);

    const auto rest = window(chain, make_state(chain, Gaussian{{128.0, 0.0}, 4.0}), 0.0, 0.0, 5.0, 11);
    EXPECT_NEAR(centroid_velocity(rest, chain)[0], 0.0, 1e-6);

    const double k0 = pi / 4;
    const auto moving = window(chain, make_state(chain, Gaussian{{128.0, 0.0}, 4.0, {k0, 0.0}}), 0.0, 0.0, 10.0, 21);
    EXPECT_NEAR(centroid_velocity(moving, chain)[0], std::sin(k0), 0.02 * std::sin(k0));
}

TEST(Centroid, WrapsAroundTheRing) {
    const LatticeSpec chain = LatticeSpec::chain(64);
    const double k0 = pi / 2;
    const auto moving = window(chain, make_state(chain, Gaussian{{60.0, 0.0}, 4.0, {k0, 0.0}}), 0.0, 0.0, 12.0, 25);
    EXPECT_NEAR(centroid_velocity(moving, chain)[0], 1.0, 0.02);
}

TEST(Centroid, PulseReversesVelocity) {
    const LatticeSpec chain = LatticeSpec::chain(512);
    const double M = 50.0;
    const double k0 = pi / 4;
    const WaveState start = make_state(chain, Gaussian{{256.0, 0.0}, 4.0, {k0, 0.0}});
    const auto before = window(chain, start, 0.0, 0.0, 10.0, 21);
    WaveState s = before.back();
    KSpacePropagator(chain).evolve(s, M, pi / (2 * M));
    const auto after = window(chain, s, 0.0, 0.0, 10.0, 21);
    const double v0 = centroid_velocity(before, chain)[0];
    const double v1 = centroid_velocity(after, chain)[0];
    EXPECT_NEAR(v1, -v0, 0.05 * std::abs(v0));
}

TEST(EchoReport, ExactParabola) {
    std::vector<double> t, f;
    for (int i = 0; i <= 300; ++i) {
        t.push_back(0.1 * i);
        f.push_back(1.0 - (t.back() - 20.0) * (t.back() - 20.0));
    }
    const EchoReport r = echo_report(t, f, 10.0, 1.0);
    EXPECT_NEAR(r.peak_time, 20.0, 1e-6);
    EXPECT_NEAR(r.peak_value, 1.0, 1e-9);
    EXPECT_TRUE(r.revival);
}

TEST(EchoReport, OffGridParabola) {
    std::vector<double> t, f;
    for (int i = 0; i <= 300; ++i) {
        t.push_back(0.1 * i);
        f.push_back(0.8 - 3.0 * (t.back() - 20.037) * (t.back() - 20.037));
    }
    const EchoReport r = echo_report(t, f, 10.0, 0.8);
    EXPECT_NEAR(r.peak_time, 20.037, 1e-9);
    EXPECT_NEAR(r.residual, 0.0, 1e-9);
}

TEST(EchoReport, Errors) {
    const std::vector<double> t{0.0, 1.0, 2.0};
    const std::vector<double> f{1.0, 0.5, 0.2};
    EXPECT_THROW(echo_report(t, f, 2.0, 1.0), InvalidInput);
    EXPECT_THROW(echo_report(t, std::vector<double>{1.0}, 0.5, 1.0), InvalidInput);
}

TEST(EchoReport, RoundTrip) {
    const EchoReport r{20.125, 0.9867, 0.98671, 1e-5, true};
    std::stringstream io;
    write_report(io, r);
    const EchoReport back = read_report(io);
    EXPECT_EQ(back.peak_time, r.peak_time);
    EXPECT_EQ(back.peak_value, r.peak_value);
    EXPECT_EQ(back.predicted_value, r.predicted_value);
    EXPECT_EQ(back.residual, r.residual);
    EXPECT_EQ(back.revival, r.revival);
}

TEST(Predict, PhaseFlipIsExactReversal) {
    const LatticeSpec sq = LatticeSpec::square(16, 16);
    PulseEvent flip{10.0, pi / 20.0, 10.0};
    flip.kind = PulseKind::phase_flip;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const WaveState s = make_state(sq, RandomState{seed});
        EXPECT_NEAR(predict_echo_fidelity(s, sq, flip, 10.0), 1.0, 1e-12);
    }
}

TEST(Predict, NoPulseIsFreeEvolution) {
    const LatticeSpec chain = LatticeSpec::chain(64);
    const WaveState s = make_state(chain, Gaussian{{32.0, 0.0}, 3.0, {0.3, 0.0}});
    const PulseEvent none{5.0, 0.0, 10.0};
    const double free = fidelity_amplitude(s, evolve_segment_kspace(s, chain, 0.0, 10.0));
    EXPECT_NEAR(predict_echo_fidelity(s, chain, none, 5.0), free, 1e-12);
}

TEST(Predict, AgreesWithProtocol) {
    const LatticeSpec ring = LatticeSpec::chain(64);
    const WaveState s = make_state(ring, Gaussian{{32.0, 0.0}, 3.0, {0.5, 0.0}});
    const double T0 = 10.0;
    const double M = 10.0;
    const PulseEvent pulse{T0, pi / (2 * M), M};
    ProtocolOptions opt;
    opt.t_end = 2 * T0 + pulse.delta_T + 0.5;
    opt.sample_dt = 0.01;
    opt.snapshot_times = {2 * T0 + pulse.delta_T};
    const Trajectory traj = run_protocol(ring, s, PulseSchedule{{pulse}}, opt);

    // Same instant, two computations.
    const auto& snap = traj.snapshots.front();
    std::size_t at = 0;
    while (std::abs(traj.times[at] - snap.time) > 1e-12) ++at;
    EXPECT_NEAR(traj.fidelity_amplitude[at], predict_echo_fidelity(s, ring, pulse, T0), 1e-10);

    const EchoPrediction peak = predict_echo_peak(s, ring, pulse, T0);
    const EchoReport r = echo_report(traj, pulse.t_end(), peak.value);
    EXPECT_LT(r.residual, 1e-6);
    EXPECT_NEAR(r.peak_time, peak.time, opt.sample_dt);
    EXPECT_GE(peak.value, predict_echo_fidelity(s, ring, pulse, T0));
}

TEST(Predict, PiPulseMaximizesEcho) {
    const LatticeSpec sq = LatticeSpec::square(16, 16);
    const WaveState s = make_state(sq, Gaussian{{8.0, 8.0}, 2.0});
    const double M = 10.0;
    std::vector<double> peaks;
    for (int j = 1; j <= 8; ++j) peaks.push_back(predict_echo_peak(s, sq, PulseEvent{5.0, j * pi / (8 * M), M}, 5.0).value);
    EXPECT_EQ(std::max_element(peaks.begin(), peaks.end()) - peaks.begin(), 3);
    EXPECT_LT(peaks[1], peaks[3]);
}
