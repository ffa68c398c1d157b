#include "latticeecho/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

#include "latticeecho/bands.hpp"
#include "latticeecho/error.hpp"
#include "latticeecho/kspace.hpp"

namespace latticeecho {

namespace {

void require_same_shape(const WaveState& a, const WaveState& b) {
    if (a.size() != b.size())
        throw InvalidInput("states have different sizes (" + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
}

}  // namespace

double fidelity_amplitude(const WaveState& reference, const WaveState& current) {
    require_same_shape(reference, current);
    double sum = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i)
        sum += std::abs(reference.amplitudes[i]) * std::abs(current.amplitudes[i]);
    return sum;
}

double overlap_modulus(const WaveState& reference, const WaveState& current) {
    require_same_shape(reference, current);
    cplx sum{};
    for (std::size_t i = 0; i < reference.size(); ++i)
        sum += std::conj(reference.amplitudes[i]) * current.amplitudes[i];
    return std::abs(sum);
}

std::array<double, 2> sublattice_populations(const WaveState& state, const LatticeSpec& spec) {
    if (static_cast<int>(state.size()) != spec.num_sites())
        throw InvalidInput("state size does not match the lattice");
    std::array<double, 2> p{0.0, 0.0};
    for (int i = 0; i < spec.num_sites(); ++i)
        p[sublattice_parity(spec, spec.coord(i)) > 0 ? 0 : 1] += std::norm(state.amplitudes[i]);
    return p;
}

std::array<double, 2> band_populations(const WaveState& state, const LatticeSpec& spec) {
    const KSpaceAmplitudes amps = kspace_transform(state, spec);
    std::array<double, 2> p{0.0, 0.0};
    for (std::size_t j = 0; j < amps.k.size(); ++j) {
        // (1, 1)/sqrt2 carries E0 - even - odd: the lower branch when odd >= 0.
        const double sym = 0.5 * std::norm(amps.phi[j] + amps.chi[j]);
        const double anti = 0.5 * std::norm(amps.phi[j] - amps.chi[j]);
        if (hopping_odd(spec, amps.k[j]) >= 0.0) {
            p[0] += sym;
            p[1] += anti;
        } else {
            p[0] += anti;
            p[1] += sym;
        }
    }
    return p;
}

Momentum centroid(const WaveState& state, const LatticeSpec& spec) {
    if (static_cast<int>(state.size()) != spec.num_sites())
        throw InvalidInput("state size does not match the lattice");
    Momentum out{0.0, 0.0};
    for (int a = 0; a < spec.dimension; ++a) {
        const int n = spec.extents[a];
        if (spec.boundary == Boundary::periodic) {
            cplx z{};
            for (int i = 0; i < spec.num_sites(); ++i)
                z += std::norm(state.amplitudes[i]) *
                     std::polar(1.0, 2.0 * std::numbers::pi * spec.coord(i)[a] / n);
            double pos = std::arg(z) * n / (2.0 * std::numbers::pi);
            if (pos < 0.0) pos += n;
            out[a] = pos * spec.spacing;
        } else {
            double sum = 0.0;
            double weight = 0.0;
            for (int i = 0; i < spec.num_sites(); ++i) {
                const double w = std::norm(state.amplitudes[i]);
                sum += w * spec.coord(i)[a];
                weight += w;
            }
            out[a] = sum / weight * spec.spacing;
        }
    }
    return out;
}

Momentum centroid_velocity(std::span<const WaveState> window, const LatticeSpec& spec) {
    if (window.size() < 2) throw InvalidInput("centroid velocity needs at least two states");
    Momentum slope{0.0, 0.0};
    for (int a = 0; a < spec.dimension; ++a) {
        const double period = spec.extents[a] * spec.spacing;
        std::vector<double> x;
        x.reserve(window.size());
        for (const auto& s : window) {
            double pos = centroid(s, spec)[a];
            if (!x.empty() && spec.boundary == Boundary::periodic)
                pos -= period * std::round((pos - x.back()) / period);
            x.push_back(pos);
        }
        double mt = 0.0;
        double mx = 0.0;
        for (std::size_t i = 0; i < window.size(); ++i) {
            mt += window[i].time;
            mx += x[i];
        }
        mt /= window.size();
        mx /= window.size();
        double stt = 0.0;
        double stx = 0.0;
        for (std::size_t i = 0; i < window.size(); ++i) {
            stt += (window[i].time - mt) * (window[i].time - mt);
            stx += (window[i].time - mt) * (x[i] - mx);
        }
        if (!(stt > 0.0)) throw InvalidInput("centroid velocity needs distinct sample times");
        slope[a] = stx / stt;
    }
    return slope;
}

namespace {

// Band amplitudes right after the pulse; later instants only need the
// free phases and one inverse transform.
class EchoPredictor {
public:
    EchoPredictor(const WaveState& initial, const LatticeSpec& spec, const PulseEvent& pulse, double T0)
        : spec_(spec), amps_(kspace_transform(initial, spec)) {
        pulse_end_ = T0 + (pulse.kind == PulseKind::exact ? pulse.delta_T : 0.0);
        const std::size_t modes = amps_.k.size();
        centre_.resize(modes);
        odd_.resize(modes);
        lower_.resize(modes);
        upper_.resize(modes);
        for (std::size_t j = 0; j < modes; ++j) {
            const double centre = spec.base_energy - hopping_even(spec, amps_.k[j]);
            const double odd = hopping_odd(spec, amps_.k[j]);
            centre_[j] = centre;
            odd_[j] = odd;
            // Free eigenbasis: (1, 1)/sqrt2 at centre - odd, (1, -1)/sqrt2 at centre + odd.
            const cplx lower = kHalfRoot2 * (amps_.phi[j] + amps_.chi[j]) * std::polar(1.0, -(centre - odd) * T0);
            const cplx upper = kHalfRoot2 * (amps_.phi[j] - amps_.chi[j]) * std::polar(1.0, -(centre + odd) * T0);

            TransferAmplitudes mix;
            cplx global{1.0, 0.0};
            if (pulse.kind == PulseKind::exact) {
                mix = transfer_amplitude(odd, pulse.strength(), pulse.delta_T);
                global = std::polar(1.0, -centre * pulse.delta_T);
            } else {
                const double angle = pulse.strength() * pulse.delta_T;
                mix = {cplx{std::cos(angle), 0.0}, cplx{0.0, -std::sin(angle)}};
            }
            lower_[j] = global * (mix.alpha * lower + mix.beta * upper);
            upper_[j] = global * (mix.beta * lower + std::conj(mix.alpha) * upper);
        }
    }

    WaveState state_after(double wait) {
        for (std::size_t j = 0; j < lower_.size(); ++j) {
            const cplx lower = lower_[j] * std::polar(1.0, -(centre_[j] - odd_[j]) * wait);
            const cplx upper = upper_[j] * std::polar(1.0, -(centre_[j] + odd_[j]) * wait);
            amps_.phi[j] = kHalfRoot2 * (lower + upper);
            amps_.chi[j] = kHalfRoot2 * (lower - upper);
        }
        return inverse_kspace_transform(amps_, spec_, pulse_end_ + wait);
    }

private:
    static constexpr double kHalfRoot2 = std::numbers::sqrt2 / 2.0;

    const LatticeSpec& spec_;
    KSpaceAmplitudes amps_;
    double pulse_end_ = 0.0;
    std::vector<double> centre_;
    std::vector<double> odd_;
    std::vector<cplx> lower_;
    std::vector<cplx> upper_;
};

}  // namespace

WaveState predict_echo_state(const WaveState& initial, const LatticeSpec& spec,
                             const PulseEvent& pulse, double T0, std::optional<double> wait) {
    return EchoPredictor(initial, spec, pulse, T0).state_after(wait.value_or(T0));
}

double predict_echo_fidelity(const WaveState& initial, const LatticeSpec& spec,
                             const PulseEvent& pulse, double T0) {
    return fidelity_amplitude(initial, predict_echo_state(initial, spec, pulse, T0));
}

EchoPrediction predict_echo_peak(const WaveState& initial, const LatticeSpec& spec,
                                 const PulseEvent& pulse, double T0) {
    EchoPredictor predictor(initial, spec, pulse, T0);
    auto value_at = [&](double wait) { return fidelity_amplitude(initial, predictor.state_after(wait)); };

    constexpr double kHalfWindow = 0.5;
    constexpr int kScan = 100;
    const double lo = std::max(0.0, T0 - kHalfWindow);
    const double hi = T0 + kHalfWindow;
    const double step = (hi - lo) / kScan;
    double best_wait = lo;
    double best = -1.0;
    for (int i = 0; i <= kScan; ++i) {
        const double w = lo + i * step;
        const double f = value_at(w);
        if (f > best) {
            best = f;
            best_wait = w;
        }
    }

    // Golden-section refinement around the best scan point.
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::max(lo, best_wait - step);
    double b = std::min(hi, best_wait + step);
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = value_at(c);
    double fd = value_at(d);
    while (b - a > 1e-9) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = value_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = value_at(d);
        }
    }
    const double wait = 0.5 * (a + b);
    const double refined = value_at(wait);
    const double end = T0 + (pulse.kind == PulseKind::exact ? pulse.delta_T : 0.0);
    if (refined >= best) return {end + wait, refined};
    return {end + best_wait, best};
}

EchoReport echo_report(std::span<const double> times, std::span<const double> fidelity,
                       double pulse_end, double predicted) {
    if (times.size() != fidelity.size()) throw InvalidInput("times and fidelity differ in length");
    std::size_t best = times.size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > pulse_end)) continue;
        if (best == times.size() || fidelity[i] > fidelity[best]) best = i;
    }
    if (best == times.size()) throw InvalidInput("trajectory has no samples after the pulse");

    EchoReport report;
    report.peak_time = times[best];
    report.peak_value = fidelity[best];
    if (best > 0 && best + 1 < times.size()) {
        // Parabola through three (possibly unevenly spaced) samples.
        const double t0 = times[best - 1], t1 = times[best], t2 = times[best + 1];
        const double f0 = fidelity[best - 1], f1 = fidelity[best], f2 = fidelity[best + 1];
        const double d01 = (f1 - f0) / (t1 - t0);
        const double d12 = (f2 - f1) / (t2 - t1);
        const double curvature = (d12 - d01) / (t2 - t0);
        if (curvature < 0.0) {
            const double vertex = 0.5 * (t0 + t1) - d01 / (2.0 * curvature);
            if (vertex >= t0 && vertex <= t2) {
                report.peak_time = vertex;
                report.peak_value = f0 + d01 * (vertex - t0) + curvature * (vertex - t0) * (vertex - t1);
            }
        }
    }
    report.predicted_value = predicted;
    report.residual = std::abs(report.peak_value - predicted);
    report.revival = report.peak_value >= kRevivalThreshold;
    return report;
}

EchoReport echo_report(const Trajectory& trajectory, double pulse_end, double predicted) {
    return echo_report(trajectory.times, trajectory.fidelity_amplitude, pulse_end, predicted);
}

void write_report(std::ostream& out, const EchoReport& report) {
    out << fmt::format("peak_time={:.17g}\n", report.peak_time)
        << fmt::format("peak_value={:.17g}\n", report.peak_value)
        << fmt::format("predicted_value={:.17g}\n", report.predicted_value)
        << fmt::format("residual={:.17g}\n", report.residual)
        << "revival=" << (report.revival ? 1 : 0) << '\n';
}

EchoReport read_report(std::istream& in) {
    std::map<std::string, std::string> fields;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        fields[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto number = [&](const std::string& key) {
        const auto it = fields.find(key);
        if (it == fields.end()) throw InvalidInput("echo report lacks '" + key + "'");
        return std::stod(it->second);
    };
    EchoReport report;
    report.peak_time = number("peak_time");
    report.peak_value = number("peak_value");
    report.predicted_value = number("predicted_value");
    report.residual = number("residual");
    report.revival = number("revival") != 0.0;
    return report;
}

}  // namespace latticeecho
