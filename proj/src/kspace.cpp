#include "latticeecho/kspace.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <tuple>

#include "latticeecho/error.hpp"

namespace latticeecho {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int signed_index(int m, int n) { return m <= n / 2 ? m : m - n; }

}  // namespace

struct Fft::Impl {
    int size = 0;
    double scale = 1.0;
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buffer) fftw_free(buffer);
    }

    void run(fftw_plan plan, std::vector<cplx>& data) const {
        if (static_cast<int>(data.size()) != size) throw InvalidInput("FFT size mismatch");
        std::memcpy(buffer, data.data(), sizeof(fftw_complex) * size);
        fftw_execute(plan);
        const auto* out = reinterpret_cast<const cplx*>(buffer);
        for (int i = 0; i < size; ++i) data[i] = out[i] * scale;
    }
};

Fft::Fft(const LatticeSpec& spec) : impl_(std::make_unique<Impl>()) {
    impl_->size = spec.num_sites();
    impl_->scale = 1.0 / std::sqrt(static_cast<double>(impl_->size));
    const int dims[2] = {spec.extents[0], spec.dimension == 2 ? spec.extents[1] : 1};
    std::lock_guard lock(planner_mutex());
    impl_->buffer = fftw_alloc_complex(impl_->size);
    // FFTW_ESTIMATE leaves the buffer untouched and picks the same plan on
    // every run, which keeps the output bit-reproducible.
    impl_->forward = fftw_plan_dft(spec.dimension, dims, impl_->buffer, impl_->buffer,
                                   FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->backward = fftw_plan_dft(spec.dimension, dims, impl_->buffer, impl_->buffer,
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!impl_->forward || !impl_->backward) throw ResourceError("FFTW planning failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::vector<cplx>& data) { impl_->run(impl_->forward, data); }
void Fft::backward(std::vector<cplx>& data) { impl_->run(impl_->backward, data); }

void require_kspace(const LatticeSpec& spec) {
    spec.validate();
    if (!spec.supports_kspace())
        throw InvalidInput("supercell k-space transform needs periodic boundaries and even extents");
}

SupercellGrid::SupercellGrid(const LatticeSpec& spec) {
    require_kspace(spec);
    const int n0 = spec.extents[0];
    const int n1 = spec.dimension == 2 ? spec.extents[1] : 1;
    const int sites = spec.num_sites();

    // Exact integer classification of grid momenta against the reduced zone:
    // 1D |k| <= pi/2l, 2D |kx| + |ky| <= pi/l.
    //   key < 0 inside, key == 0 on the edge, key > 0 outside
    // Edge pairs {k, k+Q} keep the member with the larger (kx + ky, kx).
    auto classify = [&](const Coord& m) {
        const long a = signed_index(m[0], n0);
        const long b = spec.dimension == 2 ? signed_index(m[1], n1) : 0;
        long key = 0;
        long along = 0;
        long first = a * n1;
        if (spec.dimension == 1) {
            key = 4 * std::abs(a) - n0;
            along = a;
        } else {
            key = 2 * (std::abs(a) * n1 + std::abs(b) * n0) - static_cast<long>(n0) * n1;
            along = a * n1 + b * n0;
        }
        return std::tuple{key, along, first};
    };

    for (int i = 0; i < sites; ++i) {
        const Coord m = spec.coord(i);
        const Coord pm = spec.dimension == 2 ? Coord{(m[0] + n0 / 2) % n0, (m[1] + n1 / 2) % n1}
                                             : Coord{(m[0] + n0 / 2) % n0, 0};
        const auto [key, along, first] = classify(m);
        bool keep = key < 0;
        if (key == 0) {
            const auto [pkey, palong, pfirst] = classify(pm);
            keep = pkey > 0 || std::pair{along, first} > std::pair{palong, pfirst};
        }
        if (!keep) continue;
        Momentum k{0.0, 0.0};
        k[0] = 2.0 * std::numbers::pi * signed_index(m[0], n0) / (n0 * spec.spacing);
        if (spec.dimension == 2)
            k[1] = 2.0 * std::numbers::pi * signed_index(m[1], n1) / (n1 * spec.spacing);
        this->k.push_back(k);
        index.push_back(i);
        partner.push_back(spec.index(pm));
    }
    if (static_cast<int>(index.size()) * 2 != sites)
        throw Error("reduced zone enumeration produced an incomplete tiling");
}

KSpaceAmplitudes kspace_transform(const WaveState& state, const LatticeSpec& spec) {
    const SupercellGrid grid(spec);
    if (static_cast<int>(state.size()) != spec.num_sites())
        throw InvalidInput("state size does not match the lattice");
    std::vector<cplx> hat = state.amplitudes;
    Fft(spec).forward(hat);

    KSpaceAmplitudes out;
    out.k = grid.k;
    out.phi.resize(grid.k.size());
    out.chi.resize(grid.k.size());
    const double r = std::numbers::sqrt2 / 2.0;
    for (std::size_t j = 0; j < grid.k.size(); ++j) {
        const cplx a = hat[grid.index[j]];
        const cplx b = hat[grid.partner[j]];
        out.phi[j] = r * (a + b);
        out.chi[j] = r * (a - b);
    }
    return out;
}

WaveState inverse_kspace_transform(const KSpaceAmplitudes& amplitudes, const LatticeSpec& spec,
                                   double time) {
    const SupercellGrid grid(spec);
    if (amplitudes.phi.size() != grid.k.size() || amplitudes.chi.size() != grid.k.size())
        throw InvalidInput("k-space amplitudes do not match the lattice");
    WaveState state;
    state.time = time;
    state.amplitudes.resize(spec.num_sites());
    const double r = std::numbers::sqrt2 / 2.0;
    for (std::size_t j = 0; j < grid.k.size(); ++j) {
        state.amplitudes[grid.index[j]] = r * (amplitudes.phi[j] + amplitudes.chi[j]);
        state.amplitudes[grid.partner[j]] = r * (amplitudes.phi[j] - amplitudes.chi[j]);
    }
    Fft(spec).backward(state.amplitudes);
    return state;
}

}  // namespace latticeecho
