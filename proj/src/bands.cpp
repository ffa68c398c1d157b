#include "latticeecho/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "latticeecho/error.hpp"
#include "latticeecho/kspace.hpp"

namespace latticeecho {

namespace {

constexpr double kZoneTolerance = 1e-12;

template <typename Pred>
double stencil_sum(const LatticeSpec& spec, const Momentum& k, Pred keep) {
    double sum = 0.0;
    const int orders = spec.max_order();
    for (int a = 0; a < spec.dimension; ++a)
        for (int r = 1; r <= orders; ++r)
            if (keep(r)) sum += spec.hopping(r, a) * std::cos(r * k[a] * spec.spacing);
    return sum;
}

template <typename Pred>
Momentum stencil_gradient(const LatticeSpec& spec, const Momentum& k, Pred keep) {
    Momentum grad{0.0, 0.0};
    const int orders = spec.max_order();
    const double l = spec.spacing;
    for (int a = 0; a < spec.dimension; ++a)
        for (int r = 1; r <= orders; ++r)
            if (keep(r)) grad[a] -= spec.hopping(r, a) * r * l * std::sin(r * k[a] * l);
    return grad;
}

constexpr auto is_odd = [](int r) { return r % 2 == 1; };
constexpr auto is_even = [](int r) { return r % 2 == 0; };
constexpr auto any_order = [](int) { return true; };

std::string describe(const Momentum& k, int dimension) {
    return dimension == 2 ? "(" + std::to_string(k[0]) + ", " + std::to_string(k[1]) + ")"
                          : std::to_string(k[0]);
}

double grid_momentum(int m, int n, double spacing) {
    const int shifted = m <= n / 2 ? m : m - n;
    return 2.0 * std::numbers::pi * shifted / (n * spacing);
}

}  // namespace

double hopping_odd(const LatticeSpec& spec, const Momentum& k) {
    return stencil_sum(spec, k, is_odd);
}

double hopping_even(const LatticeSpec& spec, const Momentum& k) {
    return stencil_sum(spec, k, is_even);
}

Momentum hopping_odd_gradient(const LatticeSpec& spec, const Momentum& k) {
    return stencil_gradient(spec, k, is_odd);
}

Momentum hopping_even_gradient(const LatticeSpec& spec, const Momentum& k) {
    return stencil_gradient(spec, k, is_even);
}

bool in_full_zone(const LatticeSpec& spec, const Momentum& k) {
    const double edge = std::numbers::pi / spec.spacing * (1.0 + kZoneTolerance);
    for (int a = 0; a < spec.dimension; ++a)
        if (!(std::abs(k[a]) <= edge)) return false;
    return true;
}

bool in_reduced_zone(const LatticeSpec& spec, const Momentum& k) {
    const double pi_l = std::numbers::pi / spec.spacing;
    if (spec.dimension == 1) return std::abs(k[0]) <= 0.5 * pi_l * (1.0 + kZoneTolerance);
    return std::abs(k[0]) + std::abs(k[1]) <= pi_l * (1.0 + kZoneTolerance);
}

double dispersion_unfolded(const LatticeSpec& spec, const Momentum& k) {
    if (!in_full_zone(spec, k))
        throw DomainError("momentum " + describe(k, spec.dimension) + " outside the Brillouin zone");
    return spec.base_energy - stencil_sum(spec, k, any_order);
}

BandPair dispersion_folded(const LatticeSpec& spec, double M, const Momentum& k) {
    if (!in_reduced_zone(spec, k))
        throw DomainError("momentum " + describe(k, spec.dimension) +
                          " outside the reduced Brillouin zone");
    const double centre = spec.base_energy - hopping_even(spec, k);
    const double root = std::hypot(M, hopping_odd(spec, k));
    return {centre - root, centre + root};
}

Momentum group_velocity_unfolded(const LatticeSpec& spec, const Momentum& k) {
    const Momentum g = stencil_gradient(spec, k, any_order);
    return {-g[0], -g[1]};
}

VelocityPair group_velocity_folded(const LatticeSpec& spec, double M, const Momentum& k) {
    const double odd = hopping_odd(spec, k);
    const double root = std::hypot(M, odd);
    const Momentum g_odd = hopping_odd_gradient(spec, k);
    const Momentum g_even = hopping_even_gradient(spec, k);
    VelocityPair v;
    for (int a = 0; a < spec.dimension; ++a) {
        const double split = root > 0.0 ? odd * g_odd[a] / root : 0.0;
        v.lower[a] = -g_even[a] - split;
        v.upper[a] = -g_even[a] + split;
    }
    return v;
}

std::vector<double> group_velocity_tabulated(std::span<const double> k, std::span<const double> energy) {
    if (k.size() != energy.size() || k.size() < 2)
        throw InvalidInput("tabulated band needs at least two matching samples");
    const std::size_t n = k.size();
    std::vector<double> v(n);
    v.front() = (energy[1] - energy[0]) / (k[1] - k[0]);
    v.back() = (energy[n - 1] - energy[n - 2]) / (k[n - 1] - k[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (energy[i + 1] - energy[i - 1]) / (k[i + 1] - k[i - 1]);
    return v;
}

TransferAmplitudes transfer_amplitude(double J_of_k, double M, double delta_T) {
    const double energy = std::hypot(M, J_of_k);
    const double phase = energy * delta_T;
    // sin(E dT) / E, continuous at E = 0
    const double sinc_t = energy > 0.0 ? std::sin(phase) / energy : delta_T;
    return {cplx{std::cos(phase), J_of_k * sinc_t}, cplx{0.0, -M * sinc_t}};
}

std::vector<Momentum> reduced_zone_grid(const LatticeSpec& spec) {
    return SupercellGrid(spec).k;
}

std::vector<Momentum> full_zone_grid(const LatticeSpec& spec) {
    std::vector<Momentum> grid;
    grid.reserve(spec.num_sites());
    for (int i = 0; i < spec.num_sites(); ++i) {
        const Coord m = spec.coord(i);
        Momentum k{0.0, 0.0};
        for (int a = 0; a < spec.dimension; ++a)
            k[a] = grid_momentum(m[a], spec.extents[a], spec.spacing);
        grid.push_back(k);
    }
    return grid;
}

std::vector<Momentum> reduced_zone_line(int points, double spacing) {
    if (points < 1) throw InvalidInput("k-grid needs at least one point");
    std::vector<Momentum> grid(points);
    const double width = std::numbers::pi / spacing;
    for (int j = 0; j < points; ++j) grid[j] = {-0.5 * width + (j + 1) * width / points, 0.0};
    return grid;
}

std::vector<Momentum> diamond_grid(const LatticeSpec& spec) {
    std::vector<Momentum> grid;
    for (const auto& k : full_zone_grid(spec))
        if (in_reduced_zone(spec, k)) grid.push_back(k);
    return grid;
}

BandStructure sample_bands(const LatticeSpec& spec, double M, std::span<const Momentum> k_grid) {
    BandStructure bands;
    bands.k_grid.assign(k_grid.begin(), k_grid.end());
    bands.lower.reserve(k_grid.size());
    bands.upper.reserve(k_grid.size());
    bands.velocity.reserve(k_grid.size());
    bands.gap = std::numeric_limits<double>::infinity();
    for (const auto& k : k_grid) {
        const BandPair e = dispersion_folded(spec, M, k);
        bands.lower.push_back(e.lower);
        bands.upper.push_back(e.upper);
        bands.velocity.push_back(group_velocity_folded(spec, M, k));
        bands.gap = std::min(bands.gap, e.upper - e.lower);
    }
    return bands;
}

}  // namespace latticeecho
