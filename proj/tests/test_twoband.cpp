#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "latticeecho/error.hpp"
#include "latticeecho/twoband.hpp"

using namespace latticeecho;

namespace {

struct Packet {
    TwoBandModel model;
    std::vector<cplx> psi;
};

// Gaussian packet at k0 on the cosine band E1 = -cos k.
Packet packet(double lambda, double delta_e = 0.0) {
    Packet p;
    const int n = 256;
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k = -std::numbers::pi + 2.0 * std::numbers::pi * i / n;
        p.model.k.push_back(k);
        p.model.e1.push_back(-std::cos(k));
        const cplx a = std::exp(-(k - 1.0) * (k - 1.0) / (2.0 * 0.5 * 0.5)) * std::polar(1.0, -20.0 * k);
        p.psi.push_back(a);
        norm += std::norm(a);
    }
    for (auto& a : p.psi) a /= std::sqrt(norm);
    p.model.delta_e = delta_e;
    p.model.lambda = lambda;
    return p;
}

double peak_time(const TwoBandTrajectory& t, double after) {
    std::size_t best = 0;
    double value = -1.0;
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        if (t.times[i] <= after) continue;
        if (t.overlap[i] > value) {
            value = t.overlap[i];
            best = i;
        }
    }
    return t.times[best];
}

}  // namespace

TEST(TwoBand, FullSwapReturnsAtTwiceSwapTime) {
    const Packet p = packet(1.0, 0.8);
    const double dt = 0.01;
    const auto t = twoband_evolve(p.model, p.psi, {{5.0, 1.0}}, 12.0, dt);
    const auto it = std::find_if(t.times.begin(), t.times.end(), [](double x) { return std::abs(x - 10.0) < 1e-9; });
    ASSERT_NE(it, t.times.end());
    EXPECT_NEAR(t.overlap[it - t.times.begin()], 1.0, 1e-12);
    EXPECT_NEAR(peak_time(t, 5.0), 10.0, dt);
    EXPECT_LT(t.overlap[static_cast<std::size_t>(4.9 / dt)], 0.5);
}

TEST(TwoBand, LambdaScalesReturnTime) {
    const double dt = 0.01;
    EXPECT_NEAR(peak_time(twoband_evolve(packet(2.0).model, packet(2.0).psi, {{6.0, 1.0}}, 12.0, dt), 6.0),
                9.0, dt);
    EXPECT_NEAR(peak_time(twoband_evolve(packet(0.5).model, packet(0.5).psi, {{3.0, 1.0}}, 12.0, dt), 3.0),
                9.0, dt);
}

TEST(TwoBand, ZeroFractionIsFreeEvolution) {
    const Packet p = packet(1.0, 0.3);
    const auto swapped = twoband_evolve(p.model, p.psi, {{2.0, 0.0}}, 6.0, 0.1);
    const auto free = twoband_evolve(p.model, p.psi, {}, 6.0, 0.1);
    ASSERT_EQ(swapped.times.size(), free.times.size());
    for (std::size_t i = 0; i < free.times.size(); ++i) EXPECT_NEAR(swapped.overlap[i], free.overlap[i], 1e-14);
}

TEST(TwoBand, PartialSwapSplitsPopulation) {
    const Packet p = packet(1.0);
    const double f = 0.6;
    const auto t = twoband_evolve(p.model, p.psi, {{1.0, f}}, 2.0, 0.5);
    EXPECT_NEAR(t.population1.back(), 1.0 - f * f, 1e-12);
    EXPECT_NEAR(t.population2.back(), f * f, 1e-12);
    EXPECT_NEAR(t.population1.front(), 1.0, 1e-12);
}

TEST(TwoBand, Errors) {
    const Packet p = packet(1.0);
    EXPECT_THROW(twoband_evolve(p.model, p.psi, {{3.0, 1.0}, {2.0, 1.0}}, 5.0, 0.1), InvalidInput);
    EXPECT_THROW(twoband_evolve(p.model, p.psi, {{1.0, 1.5}}, 5.0, 0.1), InvalidInput);
    EXPECT_THROW(twoband_evolve(p.model, p.psi, {{1.0, 1.0}}, 5.0, 0.0), InvalidInput);
    std::vector<cplx> unnormalized = p.psi;
    unnormalized[0] += 1.0;
    EXPECT_THROW(twoband_evolve(p.model, unnormalized, {}, 5.0, 0.1), InvalidInput);
}
