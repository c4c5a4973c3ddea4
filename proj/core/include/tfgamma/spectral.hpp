#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "tfgamma/densities.hpp"
#include "tfgamma/fermi_box.hpp"

namespace tfgamma {

/// Nonnegative potential well U supported in the ball of radius `support_radius` around the origin.
struct WellPotential {
    int dimension = 1;
    PointFunction function;
    /// Radial profile of U if it is spherically symmetric (enables radial quadrature).
    std::function<double(double)> radial;
    double support_radius = 1.0;
    double maximum = 1.0;
    std::string name = "well";

    bool is_zero() const { return !function || maximum == 0.0; }
    double operator()(std::span<const double> x) const { return function ? function(x) : 0.0; }
    void validate() const;
};

WellPotential zero_well(int dimension);
/// depth * (1 - |x|^2)_+
WellPotential parabolic_well(int dimension, double depth = 1.0);
/// depth * 1_{|x| < radius}
WellPotential square_well(int dimension, double depth, double radius);
/// {type:"zero"}, {type:"parabolic", depth}, {type:"square", depth, radius}.
WellPotential well_from_json(const nlohmann::json& spec, int dimension);

/// Potential samples at the interior nodes of a Dirichlet box [lo, hi]^d with n nodes per axis.
struct SchrodingerGrid {
    int dimension = 1;
    double lo = -1.0;
    double hi = 1.0;
    std::size_t n = 16;
    std::vector<double> potential;

    double step() const { return (hi - lo) / static_cast<double>(n + 1); }
    double node(std::size_t i) const { return lo + static_cast<double>(i + 1) * step(); }
    void validate() const;
    static SchrodingerGrid sample(const WellPotential& U, double lo, double hi, std::size_t n);
};

/// Number of eigenvalues below x of the symmetric tridiagonal matrix (diag, off).
std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double x);

/// Negative eigenvalues of the finite-difference -h^2 Laplacian - U in ascending order.
/// d = 1 uses Sturm bisection, d = 2 a dense eigensolve.
std::vector<double> negative_eigenvalues(const SchrodingerGrid& grid, double h);

struct NegativeSum {
    double value = 0.0;
    std::size_t count = 0;
    std::size_t nodes = 0;          // per axis
    double half_width = 0.0;        // of the Dirichlet box
    double boundary_amplitude = 0;  // of the lowest eigenfunction, relative to its maximum
    bool truncated = false;         // boundary amplitude above tolerance after all enlargements
};

NegativeSum negative_sum(const SchrodingerGrid& grid, double h, double boundary_tol = 1e-4);

struct SpectralOptions {
    double resolution = 8.0;        // nodes per local wavelength scale h / sqrt(max U)
    double boundary_tol = 1e-4;
    int max_enlargements = 6;
    std::size_t max_nodes_2d = 32;
};

/// Sum of negative eigenvalues on a box padded by 4 h / sqrt(max U) beyond supp U, doubling the
/// padding until the lowest eigenfunction is negligible at the boundary.
NegativeSum negative_sum(const WellPotential& U, double h, const SpectralOptions& options = {});

/// |B_d| / ((2 pi)^d (1 + d/2))
double weyl_constant(int dimension);

/// -weyl_constant(d) int U^{1+d/2}, midpoint rule on U's grid.
double weyl_term(const GridField& U);
/// Same by adaptive quadrature (d = 1 or radial profile) or a fine grid otherwise.
double weyl_term(const WellPotential& U, double rel_tol = 1e-10);

/// weyl_term(U) + int U f on a common grid.
double dual_lower_bound(const GridDensity& f, const GridField& U);

/// Pointwise maximizer U* = (1 + 2/d) K_cl f^{2/d} (spinless K_cl).
GridField optimal_dual_potential(const GridDensity& f);

struct WeylRow {
    double h = 0.0;
    double negative_sum = 0.0;
    double weyl = 0.0;   // h^{-d} weyl_term(U)
    double ratio = 1.0;  // 1 by convention when both vanish
    bool truncated = false;
};

std::vector<WeylRow> weyl_convergence_table(const WellPotential& U, std::span<const double> hs,
                                            const SpectralOptions& options = {}, unsigned workers = 1);

/// h^2 sea_kinetic - int U rho for the Slater determinant of `sea`, with rho sampled on `grid`.
double sea_one_body_energy(const FermiSea& sea, const WellPotential& U, double h, const GridSpec& grid);

}  // namespace tfgamma
