#include "latticeecho/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "latticeecho/bitmap.hpp"
#include "latticeecho/error.hpp"

namespace latticeecho {

LatticeSpec LatticeSpec::chain(int sites, double J, Boundary boundary) {
    LatticeSpec spec;
    spec.dimension = 1;
    spec.extents = {sites, 1};
    spec.hoppings = {Hopping{1, -1, J}};
    spec.boundary = boundary;
    return spec;
}

LatticeSpec LatticeSpec::square(int rows, int cols, double J, Boundary boundary) {
    LatticeSpec spec;
    spec.dimension = 2;
    spec.extents = {rows, cols};
    spec.hoppings = {Hopping{1, -1, J}};
    spec.boundary = boundary;
    return spec;
}

void LatticeSpec::validate() const {
    if (dimension != 1 && dimension != 2)
        throw InvalidInput("lattice dimension must be 1 or 2, got " + std::to_string(dimension));
    for (int a = 0; a < dimension; ++a) {
        if (extents[a] <= 0) throw InvalidInput("lattice extents must be positive");
        if (boundary == Boundary::periodic && extents[a] % 2 != 0)
            throw InvalidInput("periodic lattice needs an even extent along axis " +
                               std::to_string(a));
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw InvalidInput("lattice spacing must be positive");
    if (!std::isfinite(base_energy)) throw InvalidInput("base energy must be finite");
    for (const auto& h : hoppings) {
        if (h.order < 1) throw InvalidInput("neighbour order must be >= 1");
        if (h.axis < -1 || h.axis >= dimension) throw InvalidInput("hopping axis out of range");
        if (!std::isfinite(h.amplitude)) throw InvalidInput("hopping amplitude must be finite");
        for (int a = 0; a < dimension; ++a) {
            if ((h.axis == -1 || h.axis == a) && h.amplitude != 0.0 && h.order > extents[a] / 2)
                throw InvalidInput("neighbour order " + std::to_string(h.order) +
                                   " exceeds half the extent along axis " + std::to_string(a));
        }
    }
    for (int a = 0; a < dimension; ++a) {
        if (!(hopping(1, a) > 0.0))
            throw InvalidInput("nearest-neighbour hopping J must be positive along axis " +
                               std::to_string(a));
    }
}

int LatticeSpec::index(const Coord& n) const noexcept {
    return dimension == 2 ? n[0] * extents[1] + n[1] : n[0];
}

Coord LatticeSpec::coord(int i) const noexcept {
    if (dimension == 2) return {i / extents[1], i % extents[1]};
    return {i, 0};
}

bool LatticeSpec::contains(const Coord& n) const noexcept {
    if (n[0] < 0 || n[0] >= extents[0]) return false;
    if (dimension == 2) return n[1] >= 0 && n[1] < extents[1];
    return n[1] == 0;
}

double LatticeSpec::hopping(int order, int axis) const noexcept {
    double total = 0.0;
    for (const auto& h : hoppings)
        if (h.order == order && (h.axis == -1 || h.axis == axis)) total += h.amplitude;
    return total;
}

int LatticeSpec::max_order() const noexcept {
    int order = 0;
    for (const auto& h : hoppings)
        if (h.amplitude != 0.0) order = std::max(order, h.order);
    return order;
}

bool LatticeSpec::supports_kspace() const noexcept {
    if (boundary != Boundary::periodic) return false;
    for (int a = 0; a < dimension; ++a)
        if (extents[a] % 2 != 0) return false;
    return true;
}

double WaveState::norm() const noexcept {
    double sum = 0.0;
    for (const auto& z : amplitudes) sum += std::norm(z);
    return std::sqrt(sum);
}

void WaveState::normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw InvalidInput("cannot normalize a zero state");
    for (auto& z : amplitudes) z /= n;
}

int sublattice_parity(const LatticeSpec& spec, const Coord& n) {
    if (!spec.contains(n))
        throw DomainError("coordinate (" + std::to_string(n[0]) + ", " + std::to_string(n[1]) +
                          ") outside the lattice");
    const int sum = spec.dimension == 2 ? n[0] + n[1] : n[0];
    return sum % 2 == 0 ? 1 : -1;
}

double displacement(const LatticeSpec& spec, int axis, double position, double origin) {
    double d = position - origin;
    if (spec.boundary == Boundary::periodic) {
        const double n = spec.extent(axis);
        d -= n * std::round(d / n);
    }
    return d;
}

namespace {

void check_carrier(const Momentum& k0, bool unfolded, const LatticeSpec& spec) {
    if (unfolded) return;
    const double edge = std::numbers::pi / (2.0 * spec.spacing);
    for (int a = 0; a < spec.dimension; ++a)
        if (std::abs(k0[a]) > edge * (1.0 + 1e-12))
            throw InvalidInput("carrier momentum outside the reduced zone; set unfolded to allow it");
}

WaveState from_single_site(const LatticeSpec& spec, const SingleSite& init) {
    if (!spec.contains(init.site)) throw InvalidInput("initial site outside the lattice");
    WaveState state;
    state.amplitudes.assign(spec.num_sites(), cplx{});
    state.amplitudes[spec.index(init.site)] = 1.0;
    return state;
}

WaveState from_gaussian(const LatticeSpec& spec, const Gaussian& init) {
    if (!(init.sigma > 0.0)) throw InvalidInput("gaussian width sigma must be positive");
    check_carrier(init.k0, init.unfolded, spec);
    WaveState state;
    state.amplitudes.resize(spec.num_sites());
    const double l = spec.spacing;
    for (int i = 0; i < spec.num_sites(); ++i) {
        const Coord n = spec.coord(i);
        double r2 = 0.0;
        double phase = 0.0;
        for (int a = 0; a < spec.dimension; ++a) {
            const double d = displacement(spec, a, n[a], init.center[a]);
            r2 += d * d;
            phase += init.k0[a] * d * l;
        }
        state.amplitudes[i] = std::polar(std::exp(-r2 / (4.0 * init.sigma * init.sigma)), phase);
    }
    state.normalize();
    return state;
}

WaveState from_bitmap(const LatticeSpec& spec, const Bitmap& init) {
    const BinaryGrid grid = load_bitmap(init.path);
    const int rows = spec.dimension == 2 ? spec.extents[0] : 1;
    const int cols = spec.dimension == 2 ? spec.extents[1] : spec.extents[0];
    if (grid.rows > rows || grid.cols > cols)
        throw InvalidInput("bitmap " + std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
                           " does not fit the lattice");
    if (grid.count_marked() == 0) throw InvalidInput("bitmap has no marked pixels");
    if (init.k0) check_carrier(*init.k0, init.unfolded, spec);

    // Smaller glyphs are centred on the lattice.
    const int r0 = (rows - grid.rows) / 2;
    const int c0 = (cols - grid.cols) / 2;
    WaveState state;
    state.amplitudes.assign(spec.num_sites(), cplx{});
    const Momentum k0 = init.k0.value_or(Momentum{0.0, 0.0});
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            if (!grid.at(r, c)) continue;
            const Coord n = spec.dimension == 2 ? Coord{r0 + r, c0 + c} : Coord{c0 + c, 0};
            double phase = 0.0;
            for (int a = 0; a < spec.dimension; ++a) phase += k0[a] * n[a] * spec.spacing;
            state.amplitudes[spec.index(n)] = std::polar(1.0, phase);
        }
    }
    state.normalize();
    return state;
}

WaveState from_random(const LatticeSpec& spec, const RandomState& init) {
    std::mt19937_64 rng(init.seed);
    std::normal_distribution<double> gauss;
    WaveState state;
    state.amplitudes.resize(spec.num_sites());
    for (auto& z : state.amplitudes) {
        const double re = gauss(rng);
        z = {re, gauss(rng)};
    }
    state.normalize();
    return state;
}

}  // namespace

WaveState make_state(const LatticeSpec& spec, const InitialStateSpec& init) {
    spec.validate();
    return std::visit(
        [&](const auto& kind) -> WaveState {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, SingleSite>) return from_single_site(spec, kind);
            else if constexpr (std::is_same_v<T, Gaussian>) return from_gaussian(spec, kind);
            else if constexpr (std::is_same_v<T, Bitmap>) return from_bitmap(spec, kind);
            else return from_random(spec, kind);
        },
        init);
}

}  // namespace latticeecho
