#include "tfgamma/grid.hpp"

#include <cmath>
#include <string>

#include "tfgamma/errors.hpp"

namespace tfgamma {

GridSpec GridSpec::box(int dimension, double lo, double hi, std::size_t cells) {
    if (dimension < 1) throw ValidationError("grid dimension must be >= 1");
    if (!(hi > lo) || cells == 0) throw ValidationError("grid box must have hi > lo and cells > 0");
    GridSpec g;
    g.dimension = dimension;
    g.origin.assign(dimension, lo);
    g.spacing = (hi - lo) / static_cast<double>(cells);
    g.extents.assign(dimension, cells);
    return g;
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (auto e : extents) n *= e;
    return n;
}

double GridSpec::cell_volume() const { return std::pow(spacing, dimension); }

double GridSpec::center(std::size_t axis, std::size_t index) const {
    return origin[axis] + (static_cast<double>(index) + 0.5) * spacing;
}

double GridSpec::upper(std::size_t axis) const {
    return origin[axis] + static_cast<double>(extents[axis]) * spacing;
}

void GridSpec::unravel(std::size_t flat, std::span<std::size_t> index) const {
    for (int a = dimension - 1; a >= 0; --a) {
        index[a] = flat % extents[a];
        flat /= extents[a];
    }
}

std::size_t GridSpec::ravel(std::span<const std::size_t> index) const {
    std::size_t flat = 0;
    for (int a = 0; a < dimension; ++a) flat = flat * extents[a] + index[a];
    return flat;
}

Point GridSpec::center_of(std::size_t flat) const {
    std::vector<std::size_t> idx(dimension);
    unravel(flat, idx);
    Point x(dimension);
    for (int a = 0; a < dimension; ++a) x[a] = center(a, idx[a]);
    return x;
}

void GridSpec::validate() const {
    if (dimension < 1) throw ValidationError("grid dimension must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ValidationError("grid spacing must be positive");
    if (origin.size() != static_cast<std::size_t>(dimension) ||
        extents.size() != static_cast<std::size_t>(dimension))
        throw ValidationError("grid origin/extents do not match the dimension");
    for (auto e : extents)
        if (e == 0) throw ValidationError("grid extents must be positive");
}

GridField::GridField(GridSpec g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    grid.validate();
    if (values.size() != grid.size())
        throw ValidationError("field has " + std::to_string(values.size()) + " values, grid needs " +
                              std::to_string(grid.size()));
}

GridField GridField::zeros(const GridSpec& g) { return GridField(g, std::vector<double>(g.size(), 0.0)); }

GridField GridField::sample(const GridSpec& g, const PointFunction& fn) {
    g.validate();
    std::vector<double> v(g.size());
    std::vector<std::size_t> idx(g.dimension);
    Point x(g.dimension);
    for (std::size_t i = 0; i < v.size(); ++i) {
        g.unravel(i, idx);
        for (int a = 0; a < g.dimension; ++a) x[a] = g.center(a, idx[a]);
        v[i] = fn(x);
    }
    return GridField(g, std::move(v));
}

GridDensity::GridDensity(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.size()) throw ValidationError("density size does not match its grid");
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("density values must be finite and >= 0");
}

GridDensity GridDensity::sample(const GridSpec& g, const PointFunction& fn) {
    auto field = GridField::sample(g, fn);
    return GridDensity(std::move(field.grid), std::move(field.values));
}

GridDensity GridDensity::scaled(double factor) const {
    if (!(factor >= 0.0)) throw ValidationError("density scale factor must be >= 0");
    auto v = values_;
    for (auto& x : v) x *= factor;
    return GridDensity(grid_, std::move(v));
}

GridDensity GridDensity::normalized() const {
    double m = 0.0;
    for (double v : values_) m += v;
    m *= grid_.cell_volume();
    if (!(m > 0.0)) throw ValidationError("cannot normalize a density of zero mass");
    return scaled(1.0 / m);
}

double integrate(const GridField& field) {
    double s = 0.0;
    for (double v : field.values) s += v;
    return s * field.grid.cell_volume();
}

}  // namespace tfgamma
