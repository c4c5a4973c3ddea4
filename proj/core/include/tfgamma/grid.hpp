#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tfgamma {

/// A point in R^d, d small.
using Point = std::vector<double>;

/// Scalar function of a point.
using PointFunction = std::function<double(std::span<const double>)>;

/// Uniform Cartesian grid of cubic cells.
///
/// Cell `i` along an axis covers [origin + i*spacing, origin + (i+1)*spacing); samples live at
/// cell centers, so every integral in the library is a midpoint rule. Storage is row-major with
/// the last axis varying fastest.
struct GridSpec {
    int dimension = 1;
    Point origin;
    double spacing = 1.0;
    std::vector<std::size_t> extents;

    /// Grid of `cells` cells per axis covering [lo, hi]^d.
    static GridSpec box(int dimension, double lo, double hi, std::size_t cells);

    std::size_t size() const;
    double cell_volume() const;
    double center(std::size_t axis, std::size_t index) const;
    void unravel(std::size_t flat, std::span<std::size_t> index) const;
    std::size_t ravel(std::span<const std::size_t> index) const;
    Point center_of(std::size_t flat) const;
    /// Upper corner of the covered region along `axis`.
    double upper(std::size_t axis) const;

    /// Throws ValidationError unless dimension, spacing and extents are consistent.
    void validate() const;
};

/// Grid samples of arbitrary sign (potentials, convolutions).
struct GridField {
    GridSpec grid;
    std::vector<double> values;

    GridField() = default;
    GridField(GridSpec g, std::vector<double> v);
    static GridField zeros(const GridSpec& g);
    static GridField sample(const GridSpec& g, const PointFunction& fn);
};

/// Nonnegative density on a uniform grid.
class GridDensity {
public:
    GridDensity() = default;
    /// Throws ValidationError on negative or non-finite values.
    GridDensity(GridSpec grid, std::vector<double> values);

    static GridDensity sample(const GridSpec& g, const PointFunction& fn);

    const GridSpec& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    int dimension() const noexcept { return grid_.dimension; }
    double spacing() const noexcept { return grid_.spacing; }

    GridDensity scaled(double factor) const;
    /// Rescaled copy with unit mass.
    GridDensity normalized() const;
    GridField as_field() const { return GridField(grid_, values_); }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Integral of a field by the midpoint rule.
double integrate(const GridField& field);

}  // namespace tfgamma
