#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "tfgamma/densities.hpp"
#include "tfgamma/potentials.hpp"

namespace tfgamma {

/// Volume of the unit ball in R^d.
double unit_ball_volume(int dimension);

/// Semiclassical kinetic constant d/(d+2) (2 pi)^2 / (q |B_d|)^{2/d}.
double kcl(int dimension, int spin = 1);

/// External potential: either an arbitrary function or V(|x - center|) from a radial profile.
struct ExternalPotential {
    PointFunction function;
    RadialKernel radial;
    Point center;
    std::string name = "zero";

    bool is_zero() const { return !function && radial.is_zero(); }
    /// Cell-center samples; singular radial profiles use the half-spacing mask.
    GridField sample(const GridSpec& grid) const;
};

ExternalPotential zero_potential();
/// strength * |x|^2
ExternalPotential harmonic_potential(double strength = 1.0);
/// -charge / |x - center|
ExternalPotential nuclear_potential(double charge, Point center);
/// {type:"zero"}, {type:"harmonic", strength}, {type:"coulomb", charge, center},
/// {type:"piecewise_constant_radial", shells, center}.
ExternalPotential external_from_json(const nlohmann::json& spec, int dimension);

enum class ConstraintKind { Equal, AtMost };

struct MassConstraint {
    ConstraintKind kind = ConstraintKind::Equal;
    double mass = 1.0;
};

struct TFProblem {
    int dimension = 1;
    int spin = 1;
    ExternalPotential external;
    RadialKernel interaction;
    ChiFamily chi;  // optional decomposition of `interaction`
    MassConstraint constraint;

    void validate() const;
    double kinetic_constant() const { return kcl(dimension, spin); }
};

struct TFEnergy {
    double kinetic = 0.0;
    double external = 0.0;
    double interaction = 0.0;
    double total = 0.0;
};

nlohmann::json to_json(const TFEnergy& e);

/// K_cl int f^{1+2/d} + int V f + 1/2 int int f(x) f(y) w(x - y) on f's grid.
TFEnergy tf_energy(const GridDensity& f, const TFProblem& problem);

struct TFOptions {
    double damping = 0.5;
    std::size_t max_iterations = 5000;
};

struct TFSolution {
    GridDensity density;
    TFEnergy energy;
    double mu = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;
    /// {atMost} problem whose unconstrained minimizer carries less than the allowed mass.
    bool unsaturated = false;
};

/// Damped fixed point on f = [(mu - V - w*f)_+ / ((1+2/d) K_cl)]^{d/2} with mu chosen by
/// bisection on the mass. Stops when the sup-norm update is <= tol.
TFSolution tf_minimize(const TFProblem& problem, const GridSpec& grid, double tol, const TFOptions& options = {});

/// sup |f - T f| for the Euler-Lagrange map T at chemical potential mu.
double euler_lagrange_residual(const GridDensity& f, const TFProblem& problem, double mu);

/// Spherically symmetric atom in R^3: V = -charge/|x|, Coulomb repulsion, mass constraint.
struct AtomicProblem {
    double charge = 1.0;
    int spin = 2;
    MassConstraint constraint{ConstraintKind::AtMost, 1.0};
    RadialGrid grid{1e-6, 500.0, 4000};
    bool repulsion = true;

    void validate() const;
};

struct AtomicSolution {
    RadialDensity density;
    TFEnergy energy;
    double mu = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool unsaturated = false;
};

/// Electrostatic potential of a radial density, Q(r)/r + int_r^inf 4 pi t f(t) dt, at the grid nodes.
std::vector<double> newton_potential(const RadialDensity& f);

TFEnergy atomic_energy(const RadialDensity& f, const AtomicProblem& problem);

/// Radial version of tf_minimize. The residual is max_r 4 pi r^3 |f - T f| (mass per unit log r).
AtomicSolution tf_minimize_atomic(const AtomicProblem& problem, double tol, const TFOptions& options = {});

struct AtomShot {
    double slope = 0.0;         // B = -phi'(0)
    std::vector<double> x;      // sample abscissae
    std::vector<double> phi;    // screening function, positive and decreasing
};

struct ShootOptions {
    double lower = 1.5;
    double upper = 1.7;
    double step = 1e-3;       // RK4 step in t = sqrt(x)
    double t_max = 40.0;
    std::size_t sample_stride = 100;
};

/// Solves phi'' = phi^{3/2} / sqrt(x), phi(0) = 1, phi(inf) = 0 by bisection on the initial slope
/// until the bracket is narrower than tol.
AtomShot tf_atom_shoot(double tol, const ShootOptions& options = {});

/// Neutral-atom energy -(3/7) Z^{7/3} B / a1 with the TF length a1 = (5 K_cl / 3) (4 pi)^{-2/3}.
double atomic_energy_from_slope(double charge, int spin, double slope);

/// min over gs of E(g + bump) - E(g), the bump carrying the missing mass, dilated by 1/ell and
/// centered at distance `distance` along the first axis. The bump lives on its own grid.
double relaxed_constraint_gap(const TFProblem& problem, std::span<const GridDensity> gs, double ell, double distance,
                              std::size_t bump_cells = 256);

/// 1/2 E(g1) + 1/2 E(g2) - E((g1 + g2)/2); g1 and g2 share a grid.
double convexity_margin(const GridDensity& g1, const GridDensity& g2, const TFProblem& problem);
double convexity_margin(const RadialDensity& g1, const RadialDensity& g2, const AtomicProblem& problem);

}  // namespace tfgamma
