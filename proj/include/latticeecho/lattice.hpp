#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace latticeecho {

using cplx = std::complex<double>;

// Lattice coordinate; the second component is ignored (and kept at 0) in 1D.
using Coord = std::array<int, 2>;

// Momentum in units of 1/length; second component unused in 1D.
using Momentum = std::array<double, 2>;

enum class Boundary { periodic, open };

// Hopping amplitude J_r to the r-th neighbour along one axis. axis = -1
// applies the same amplitude along every axis.
struct Hopping {
    int order = 1;
    int axis = -1;
    double amplitude = 1.0;
};

struct LatticeSpec {
    int dimension = 1;
    std::array<int, 2> extents{2, 1};
    double spacing = 1.0;
    std::vector<Hopping> hoppings{Hopping{}};
    Boundary boundary = Boundary::periodic;
    double base_energy = 0.0;

    static LatticeSpec chain(int sites, double J = 1.0, Boundary boundary = Boundary::periodic);
    static LatticeSpec square(int rows, int cols, double J = 1.0,
                              Boundary boundary = Boundary::periodic);

    // Throws InvalidInput when an invariant is violated.
    void validate() const;

    int num_sites() const noexcept { return extents[0] * (dimension == 2 ? extents[1] : 1); }
    int extent(int axis) const noexcept { return axis < dimension ? extents[axis] : 1; }

    // Row-major site index.
    int index(const Coord& n) const noexcept;
    Coord coord(int index) const noexcept;
    bool contains(const Coord& n) const noexcept;

    // Total amplitude of the r-th neighbour hopping along `axis` (sum of
    // matching entries, axis-wildcards included).
    double hopping(int order, int axis) const noexcept;
    int max_order() const noexcept;
    bool nearest_neighbour_only() const noexcept { return max_order() <= 1; }

    // Periodic with every extent even: the supercell transform tiles exactly.
    bool supports_kspace() const noexcept;
};

struct WaveState {
    std::vector<cplx> amplitudes;
    double time = 0.0;

    std::size_t size() const noexcept { return amplitudes.size(); }
    double norm() const noexcept;
    void normalize();
};

struct SingleSite {
    Coord site{0, 0};
};

struct Gaussian {
    std::array<double, 2> center{0.0, 0.0};
    double sigma = 1.0;
    Momentum k0{0.0, 0.0};
    // Allows a carrier momentum outside the reduced zone.
    bool unfolded = false;
};

struct Bitmap {
    std::filesystem::path path;
    std::optional<Momentum> k0;
    bool unfolded = false;
};

// Gaussian-distributed amplitudes with a fixed seed; used for oracle
// cross-checks.
struct RandomState {
    std::uint64_t seed = 42;
};

using InitialStateSpec = std::variant<SingleSite, Gaussian, Bitmap, RandomState>;

// (-1)^{n1} in 1D, (-1)^{n1+n2} in 2D. Throws DomainError outside the extents.
int sublattice_parity(const LatticeSpec& spec, const Coord& n);

WaveState make_state(const LatticeSpec& spec, const InitialStateSpec& init);

// Displacement from `origin` along one axis, wrapped to the nearest image
// on periodic lattices.
double displacement(const LatticeSpec& spec, int axis, double position, double origin);

}  // namespace latticeecho
