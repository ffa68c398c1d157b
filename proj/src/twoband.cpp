#include "latticeecho/twoband.hpp"

#include <algorithm>
#include <cmath>

#include "latticeecho/error.hpp"

namespace latticeecho {

TwoBandTrajectory twoband_evolve(const TwoBandModel& model, const std::vector<cplx>& psi_k,
                                 const std::vector<SwapEvent>& schedule, double t_end,
                                 double sample_dt) {
    const std::size_t modes = model.k.size();
    if (model.e1.size() != modes || psi_k.size() != modes)
        throw InvalidInput("two-band model and packet sizes differ");
    if (!(model.lambda > 0.0)) throw InvalidInput("lambda must be positive");
    if (!(sample_dt > 0.0)) throw InvalidInput("sample_dt must be positive");
    double norm = 0.0;
    for (const auto& z : psi_k) norm += std::norm(z);
    if (std::abs(norm - 1.0) > 1e-10) throw InvalidInput("packet must be normalized");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i].fraction < 0.0 || schedule[i].fraction > 1.0)
            throw InvalidInput("swap fraction must lie in [0, 1]");
        if (schedule[i].time < 0.0 || schedule[i].time > t_end)
            throw InvalidInput("swap time outside [0, t_end]");
        if (i > 0 && schedule[i].time < schedule[i - 1].time)
            throw InvalidInput("swap schedule must be sorted by time");
    }

    std::vector<cplx> band1 = psi_k;
    std::vector<cplx> band2(modes);
    double now = 0.0;
    std::size_t next_swap = 0;

    auto advance = [&](double t) {
        const double dt = t - now;
        if (dt <= 0.0) return;
        for (std::size_t i = 0; i < modes; ++i) {
            band1[i] *= std::polar(1.0, -model.e1[i] * dt);
            band2[i] *= std::polar(1.0, -model.e2(i) * dt);
        }
        now = t;
    };
    auto swap_due = [&](double t) {
        while (next_swap < schedule.size() && schedule[next_swap].time <= t) {
            advance(schedule[next_swap].time);
            const double f = schedule[next_swap].fraction;
            const double c = std::sqrt(1.0 - f * f);
            for (std::size_t i = 0; i < modes; ++i) {
                const cplx a = band1[i];
                const cplx b = band2[i];
                band1[i] = c * a - f * b;
                band2[i] = f * a + c * b;
            }
            ++next_swap;
        }
    };

    TwoBandTrajectory traj;
    const auto samples = static_cast<long>(std::floor(t_end / sample_dt + 1e-9));
    for (long s = 0; s <= samples; ++s) {
        const double t = static_cast<double>(s) * sample_dt;
        swap_due(t);
        advance(t);
        cplx overlap{};
        double p1 = 0.0;
        double p2 = 0.0;
        for (std::size_t i = 0; i < modes; ++i) {
            overlap += std::conj(psi_k[i]) * (band1[i] + band2[i]);
            p1 += std::norm(band1[i]);
            p2 += std::norm(band2[i]);
        }
        traj.times.push_back(t);
        traj.overlap.push_back(std::abs(overlap));
        traj.population1.push_back(p1);
        traj.population2.push_back(p2);
    }
    return traj;
}

}  // namespace latticeecho
