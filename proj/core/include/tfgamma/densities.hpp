#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "tfgamma/grid.hpp"

namespace tfgamma {

/// Axis-aligned cube [corner, corner + side)^d.
struct Cube {
    Point corner;
    double side = 1.0;

    double volume() const;
    bool contains(std::span<const double> x) const;
};

/// Finite family of cubes with pairwise disjoint interiors.
class CubePartition {
public:
    CubePartition() = default;
    /// Validates side > 0, matching corner dimension and pairwise disjointness.
    CubePartition(int dimension, std::vector<Cube> cubes);

    /// Skips the O(n^2) disjointness check; for partitions disjoint by construction.
    static CubePartition trusted(int dimension, std::vector<Cube> cubes);

    int dimension() const noexcept { return dimension_; }
    const std::vector<Cube>& cubes() const noexcept { return cubes_; }
    std::size_t size() const noexcept { return cubes_.size(); }

    /// Lower and upper corners of the bounding box.
    std::pair<Point, Point> bounds() const;

private:
    int dimension_ = 1;
    std::vector<Cube> cubes_;
};

/// Piecewise-constant density sum_Q level_Q 1_Q.
class StepDensity {
public:
    StepDensity() = default;
    StepDensity(CubePartition partition, std::vector<double> levels);

    const CubePartition& partition() const noexcept { return partition_; }
    const std::vector<double>& levels() const noexcept { return levels_; }
    int dimension() const noexcept { return partition_.dimension(); }

    double value_at(std::span<const double> x) const;
    StepDensity scaled(double factor) const;

private:
    CubePartition partition_;
    std::vector<double> levels_;
};

double mass(const GridDensity& f);
double mass(const StepDensity& f);

/// Exact cell averages of a step density on `grid`.
GridDensity rasterize(const StepDensity& f, const GridSpec& grid);

/// Embed `f` into a larger grid with the same spacing whose cells align with f's cells.
GridDensity embed(const GridDensity& f, const GridSpec& target);

/// Smallest common grid containing both inputs. Requires equal spacing and cell alignment.
GridSpec union_grid(const GridSpec& a, const GridSpec& b);

/// Piecewise-constant upsampling by an integer factor per axis (mass preserving).
GridDensity refine(const GridDensity& f, std::size_t factor);

/// (int |f - g|^p)^(1/p) by the midpoint rule on a common grid.
double lp_distance(const GridDensity& f, const GridDensity& g, double p);
double lp_distance(const GridDensity& f, const StepDensity& g, double p);
double lp_distance(const StepDensity& f, const StepDensity& g, double p);

/// ||f - g||_1 + ||f - g||_{1+2/d}, the error measure of the step approximation. Midpoint rule on
/// f's grid, so exact only when g's cube faces lie on cell faces.
double combined_error(const GridDensity& f, const StepDensity& g);

struct StepOptions {
    /// Maximal dyadic refinement depth below the root cube; negative means "until cubes are at most one cell wide".
    int max_depth = -1;
};

struct StepApproximation {
    StepDensity density;
    double l1_error = 0.0;
    double lp_error = 0.0;  // in L^{1+2/d}
    int depth = 0;          // deepest refinement level used

    double error() const { return l1_error + lp_error; }
};

/// Cube-average approximation of `f` on a dyadic partition of its support's bounding cube,
/// refined until ||f - s||_1 + ||f - s||_{1+2/d} <= 1/k. Cubes with zero average are dropped.
/// Cubes cover fractions of grid cells when the support width is not a power of two; averages
/// are exact cell-overlap integrals. Throws ToleranceNotMet if refinement stops early.
StepApproximation step_approximate(const GridDensity& f, int k, const StepOptions& options = {});

/// Same with an explicit tolerance. An infinite tolerance returns the single root cube.
StepApproximation step_approximate_to(const GridDensity& f, double tolerance, const StepOptions& options = {});

/// Radial grid, midpoint rule in log r: nodes r_i = exp(log r_min + (i+1/2) delta).
struct RadialGrid {
    double r_min = 1e-6;
    double r_max = 50.0;
    std::size_t points = 2000;

    double delta() const;
    double node(std::size_t i) const;
    /// Weight of node i for int g(r) dr.
    double weight(std::size_t i) const;
    std::vector<double> nodes() const;
    RadialGrid scaled(double factor) const;
};

/// Spherically symmetric density in R^3 sampled on a RadialGrid.
struct RadialDensity {
    RadialGrid grid;
    std::vector<double> values;

    static RadialDensity sample(const RadialGrid& grid, const std::function<double(double)>& fn);

    double mass() const;
    /// Linear interpolation in log r; 0 beyond r_max, clamped below r_min.
    double value_at(double r) const;
    /// Mass inside the ball of radius r.
    double enclosed_mass(double r) const;
    /// int f^p over R^3.
    double power_integral(double p) const;
    RadialDensity scaled(double factor) const;
};

// Serialization: step densities as JSON {dimension, cubes:[{corner, side, level}]},
// grid densities as CSV with header x1,...,xd,value.
nlohmann::json to_json(const StepDensity& f);
StepDensity step_density_from_json(const nlohmann::json& j);
void write_csv(std::ostream& os, const GridField& f);
void write_csv(std::ostream& os, const GridDensity& f);
GridDensity read_grid_csv(std::istream& is);

}  // namespace tfgamma
