#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "tfgamma/densities.hpp"
#include "tfgamma/potentials.hpp"

namespace tfgamma {

/// Multi-index k of a Dirichlet box mode, every component >= 1.
using MultiIndex = std::vector<int>;

/// Dirichlet eigenmode u_k(x) = prod_i sqrt(2/L) sin(pi k_i (x_i - c_i) / L) of a cube with side L.
struct BoxMode {
    MultiIndex k;
    double side = 1.0;

    std::int64_t squared_norm() const;
    /// |pi k / L|^2
    double eigenvalue() const;
};

/// The `count` lowest Dirichlet modes of `cube`, ordered by eigenvalue and then
/// lexicographically by multi-index.
std::vector<BoxMode> box_spectrum(const Cube& cube, std::size_t count);

struct CubeOccupation {
    Cube cube;
    std::vector<MultiIndex> modes;
};

/// Slater determinant built from the lowest Dirichlet modes of disjoint cubes.
class FermiSea {
public:
    FermiSea() = default;
    /// Validates mode indices, distinctness and that every cube holds a lowest-mode filling.
    FermiSea(int dimension, std::vector<CubeOccupation> cubes);

    int dimension() const noexcept { return dimension_; }
    const std::vector<CubeOccupation>& cubes() const noexcept { return cubes_; }
    std::size_t particles() const noexcept { return particles_; }
    CubePartition partition() const;

private:
    int dimension_ = 1;
    std::vector<CubeOccupation> cubes_;
    std::size_t particles_ = 0;
};

/// Sum of |pi k / L|^2 over all occupied modes (unscaled).
double sea_kinetic(const FermiSea& sea);

/// Grid aligned with the sea's cubes, fine enough to resolve every occupied mode with at
/// least `cells_per_mode * (k_max + 1)` cells per cube side. With an anchor the spacing is
/// anchor.spacing / 2^j and cells align with the anchor grid.
GridSpec resolving_grid(const FermiSea& sea, const std::optional<GridSpec>& anchor = std::nullopt,
                        std::size_t cells_per_mode = 4);

/// rho(x) = sum_occupied |u_k(x)|^2 at cell centers, zero outside the cubes.
GridDensity sea_density(const FermiSea& sea, const GridSpec& grid);

/// max |G - I| for the quadrature Gram matrix of all occupied orbitals.
double gram_deviation(const FermiSea& sea, const GridSpec& grid);

/// sea_kinetic - int |grad sqrt(rho)|^2, with grad rho taken from the closed-form orbitals.
double hoffmann_ostenhof_gap(const FermiSea& sea, const GridSpec& grid);

/// Integer particle numbers M_Q in (N|Q|f_Q - 1, N|Q|f_Q + 1] summing to N
/// (largest remainder, ties to the lower cube index). `step` must have unit mass.
std::vector<std::size_t> allocate_particles(const StepDensity& step, std::size_t particles);

struct Recovery {
    StepApproximation step;
    std::vector<std::size_t> counts;  // per cube of step.density
    FermiSea sea;
};

/// Step approximation, allocation and per-cube Fermi seas for a unit-mass density.
Recovery build_recovery(const GridDensity& f, std::size_t particles, int k);
/// Same from an existing step approximation (levels are renormalized to unit mass for allocation).
Recovery build_recovery(StepApproximation step, std::size_t particles);

/// Ladder M_k = base * growth^k, k >= 1, for the diagonal argument.
struct Ladder {
    double base = 100.0;
    double growth = 2.0;

    double threshold(int k) const;
    /// Largest k >= 1 with M_k <= N, or 0 below M_1.
    int index_for(std::size_t particles) const;
};

struct DiagonalEntry {
    std::size_t particles = 0;
    int k = 0;
    Recovery recovery;
};

/// build_recovery(f, N, k_N) for each N; k_N = 0 uses the single root cube.
std::vector<DiagonalEntry> diagonal_sequence(const GridDensity& f, std::span<const std::size_t> particle_counts,
                                             const Ladder& ladder = {}, unsigned workers = 1);

/// (lambda / 2) int int rho(x) rho(y) w(x - y) dx dy.
double slater_direct_interaction(const GridDensity& rho, const RadialKernel& w, double lambda);

/// -(lambda / 2) sum_{i,j} int int u_i u_j(x) w(x - y) u_i u_j(y), for at most `cap` particles.
double slater_exchange_interaction(const FermiSea& sea, const GridSpec& grid, const RadialKernel& w, double lambda,
                                   std::size_t cap = 16);

nlohmann::json to_json(const FermiSea& sea);
FermiSea fermi_sea_from_json(const nlohmann::json& j);

}  // namespace tfgamma
