#include "tfgamma/densities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "tfgamma/errors.hpp"

namespace tfgamma {

namespace {

constexpr double kAlignSlack = 1e-7;

bool is_integral(double x) { return std::abs(x - std::round(x)) <= kAlignSlack; }

// Calls fn(flat) for every cell of the index box [start, start + size)^d clipped to the grid.
// `start` may be outside the grid (negative offsets are not supported).
// Cells overlapping the cube [corner, corner + side)^d, all in cell units relative to the grid
// origin; fn(flat index, overlap volume in cells).
template <class Fn>
void for_each_overlap(const GridSpec& g, std::span<const double> corner, double side, Fn&& fn) {
    const int d = g.dimension;
    std::vector<std::size_t> lo(d), hi(d), idx(d);
    std::vector<std::vector<double>> weight(d);
    for (int a = 0; a < d; ++a) {
        const double first = std::max(0.0, std::floor(corner[a]));
        const double last = std::min(static_cast<double>(g.extents[a]), std::ceil(corner[a] + side));
        if (!(last > first)) return;
        lo[a] = static_cast<std::size_t>(first);
        hi[a] = static_cast<std::size_t>(last);
        for (std::size_t i = lo[a]; i < hi[a]; ++i) {
            const double x = static_cast<double>(i);
            weight[a].push_back(std::min(corner[a] + side, x + 1.0) - std::max(corner[a], x));
        }
    }
    idx = lo;
    while (true) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) w *= weight[a][idx[a] - lo[a]];
        if (w > 0.0) fn(g.ravel(idx), w);
        int a = d - 1;
        while (a >= 0) {
            if (++idx[a] < hi[a]) break;
            idx[a] = lo[a];
            --a;
        }
        if (a < 0) break;
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double Cube::volume() const { return std::pow(side, static_cast<double>(corner.size())); }

bool Cube::contains(std::span<const double> x) const {
    for (std::size_t a = 0; a < corner.size(); ++a)
        if (x[a] < corner[a] || x[a] >= corner[a] + side) return false;
    return true;
}

CubePartition::CubePartition(int dimension, std::vector<Cube> cubes)
    : dimension_(dimension), cubes_(std::move(cubes)) {
    if (dimension_ < 1) throw ValidationError("partition dimension must be >= 1");
    for (const auto& q : cubes_) {
        if (q.corner.size() != static_cast<std::size_t>(dimension_))
            throw DimensionMismatch("cube corner dimension does not match partition");
        if (!(q.side > 0.0)) throw ValidationError("cube sides must be positive");
    }
    for (std::size_t i = 0; i < cubes_.size(); ++i) {
        for (std::size_t j = i + 1; j < cubes_.size(); ++j) {
            const auto& a = cubes_[i];
            const auto& b = cubes_[j];
            bool overlap = true;
            for (int ax = 0; ax < dimension_ && overlap; ++ax) {
                double lo = std::max(a.corner[ax], b.corner[ax]);
                double hi = std::min(a.corner[ax] + a.side, b.corner[ax] + b.side);
                overlap = hi - lo > 1e-12 * std::max(a.side, b.side);
            }
            if (overlap)
                throw ValidationError("cubes " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
    }
}

CubePartition CubePartition::trusted(int dimension, std::vector<Cube> cubes) {
    CubePartition p;
    p.dimension_ = dimension;
    p.cubes_ = std::move(cubes);
    return p;
}

std::pair<Point, Point> CubePartition::bounds() const {
    Point lo(dimension_, std::numeric_limits<double>::infinity());
    Point hi(dimension_, -std::numeric_limits<double>::infinity());
    for (const auto& q : cubes_) {
        for (int a = 0; a < dimension_; ++a) {
            lo[a] = std::min(lo[a], q.corner[a]);
            hi[a] = std::max(hi[a], q.corner[a] + q.side);
        }
    }
    return {lo, hi};
}

StepDensity::StepDensity(CubePartition partition, std::vector<double> levels)
    : partition_(std::move(partition)), levels_(std::move(levels)) {
    if (levels_.size() != partition_.size()) throw ValidationError("one level per cube is required");
    for (double l : levels_)
        if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("step levels must be finite and >= 0");
}

double StepDensity::value_at(std::span<const double> x) const {
    const auto& cubes = partition_.cubes();
    for (std::size_t i = 0; i < cubes.size(); ++i)
        if (cubes[i].contains(x)) return levels_[i];
    return 0.0;
}

StepDensity StepDensity::scaled(double factor) const {
    auto l = levels_;
    for (auto& v : l) v *= factor;
    return StepDensity(partition_, std::move(l));
}

double mass(const GridDensity& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

double mass(const StepDensity& f) {
    double s = 0.0;
    const auto& cubes = f.partition().cubes();
    for (std::size_t i = 0; i < cubes.size(); ++i) s += f.levels()[i] * cubes[i].volume();
    return s;
}

GridDensity rasterize(const StepDensity& f, const GridSpec& grid) {
    grid.validate();
    if (grid.dimension != f.dimension()) throw DimensionMismatch("step density and grid differ in dimension");
    const int d = grid.dimension;
    const double h = grid.spacing;
    std::vector<double> out(grid.size(), 0.0);
    std::vector<std::size_t> lo(d), hi(d), idx(d);
    std::vector<std::vector<double>> frac(d);
    const auto& cubes = f.partition().cubes();
    for (std::size_t q = 0; q < cubes.size(); ++q) {
        const double level = f.levels()[q];
        if (level == 0.0) continue;
        bool empty = false;
        for (int a = 0; a < d; ++a) {
            double c0 = (cubes[q].corner[a] - grid.origin[a]) / h;
            double c1 = c0 + cubes[q].side / h;
            double first = std::max(0.0, std::floor(c0 + kAlignSlack));
            double last = std::min(static_cast<double>(grid.extents[a]), std::ceil(c1 - kAlignSlack));
            if (last <= first) {
                empty = true;
                break;
            }
            lo[a] = static_cast<std::size_t>(first);
            hi[a] = static_cast<std::size_t>(last);
            frac[a].assign(hi[a] - lo[a], 0.0);
            for (std::size_t i = lo[a]; i < hi[a]; ++i) {
                double cell_lo = static_cast<double>(i);
                double ov = std::min(c1, cell_lo + 1.0) - std::max(c0, cell_lo);
                if (std::abs(ov - 1.0) <= kAlignSlack) ov = 1.0;
                frac[a][i - lo[a]] = std::clamp(ov, 0.0, 1.0);
            }
        }
        if (empty) continue;
        idx = lo;
        while (true) {
            double w = level;
            for (int a = 0; a < d; ++a) w *= frac[a][idx[a] - lo[a]];
            out[grid.ravel(idx)] += w;
            int a = d - 1;
            while (a >= 0) {
                if (++idx[a] < hi[a]) break;
                idx[a] = lo[a];
                --a;
            }
            if (a < 0) break;
        }
    }
    return GridDensity(grid, std::move(out));
}

GridSpec union_grid(const GridSpec& a, const GridSpec& b) {
    if (a.dimension != b.dimension) throw DimensionMismatch("grids differ in dimension");
    const double h = a.spacing;
    if (std::abs(a.spacing - b.spacing) > 1e-12 * h) throw ValidationError("grids have different spacing");
    GridSpec u;
    u.dimension = a.dimension;
    u.spacing = h;
    u.origin.resize(a.dimension);
    u.extents.resize(a.dimension);
    for (int ax = 0; ax < a.dimension; ++ax) {
        if (!is_integral((a.origin[ax] - b.origin[ax]) / h)) throw ValidationError("grid cells are not aligned");
        double lo = std::min(a.origin[ax], b.origin[ax]);
        double hi = std::max(a.upper(ax), b.upper(ax));
        u.origin[ax] = lo;
        u.extents[ax] = static_cast<std::size_t>(std::llround((hi - lo) / h));
    }
    return u;
}

GridDensity embed(const GridDensity& f, const GridSpec& target) {
    const auto& g = f.grid();
    if (g.dimension != target.dimension) throw DimensionMismatch("cannot embed across dimensions");
    const int d = g.dimension;
    std::vector<std::size_t> offset(d);
    for (int a = 0; a < d; ++a) {
        double off = (g.origin[a] - target.origin[a]) / target.spacing;
        if (!is_integral(off) || off < -kAlignSlack) throw ValidationError("density grid not aligned with target");
        offset[a] = static_cast<std::size_t>(std::llround(off));
        if (offset[a] + g.extents[a] > target.extents[a]) throw ValidationError("target grid does not contain density");
    }
    if (std::abs(g.spacing - target.spacing) > 1e-12 * g.spacing) throw ValidationError("spacing mismatch in embed");
    std::vector<double> out(target.size(), 0.0);
    std::vector<std::size_t> idx(d), tidx(d);
    for (std::size_t i = 0; i < f.values().size(); ++i) {
        g.unravel(i, idx);
        for (int a = 0; a < d; ++a) tidx[a] = idx[a] + offset[a];
        out[target.ravel(tidx)] = f.values()[i];
    }
    return GridDensity(target, std::move(out));
}

GridDensity refine(const GridDensity& f, std::size_t factor) {
    if (factor == 0) throw ValidationError("refinement factor must be >= 1");
    if (factor == 1) return f;
    GridSpec g = f.grid();
    const int d = g.dimension;
    g.spacing /= static_cast<double>(factor);
    for (auto& e : g.extents) e *= factor;
    std::vector<double> out(g.size());
    std::vector<std::size_t> idx(d), cidx(d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        g.unravel(i, idx);
        for (int a = 0; a < d; ++a) cidx[a] = idx[a] / factor;
        out[i] = f.values()[f.grid().ravel(cidx)];
    }
    return GridDensity(g, std::move(out));
}

namespace {

double lp_on_common(const std::vector<double>& a, const std::vector<double>& b, double p, double cell) {
    if (!(p >= 1.0)) throw ValidationError("lp_distance needs p >= 1");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(s * cell, 1.0 / p);
}

// Grid with spacing h aligned to `anchor` that covers [lo, hi].
GridSpec covering_grid(const GridSpec& anchor, const Point& lo, const Point& hi) {
    GridSpec g;
    g.dimension = anchor.dimension;
    g.spacing = anchor.spacing;
    g.origin.resize(g.dimension);
    g.extents.resize(g.dimension);
    for (int a = 0; a < g.dimension; ++a) {
        double i0 = std::floor((lo[a] - anchor.origin[a]) / g.spacing + kAlignSlack);
        double i1 = std::ceil((hi[a] - anchor.origin[a]) / g.spacing - kAlignSlack);
        g.origin[a] = anchor.origin[a] + i0 * g.spacing;
        g.extents[a] = static_cast<std::size_t>(std::max(1.0, i1 - i0));
    }
    return g;
}

}  // namespace

double lp_distance(const GridDensity& f, const GridDensity& g, double p) {
    auto u = union_grid(f.grid(), g.grid());
    auto a = embed(f, u);
    auto b = embed(g, u);
    return lp_on_common(a.values(), b.values(), p, u.cell_volume());
}

double lp_distance(const GridDensity& f, const StepDensity& g, double p) {
    if (f.dimension() != g.dimension()) throw DimensionMismatch("lp_distance: dimensions differ");
    GridSpec u = f.grid();
    if (g.partition().size() > 0) {
        auto [lo, hi] = g.partition().bounds();
        u = union_grid(f.grid(), covering_grid(f.grid(), lo, hi));
    }
    auto a = embed(f, u);
    auto b = rasterize(g, u);
    return lp_on_common(a.values(), b.values(), p, u.cell_volume());
}

double lp_distance(const StepDensity& f, const StepDensity& g, double p) {
    if (f.dimension() != g.dimension()) throw DimensionMismatch("lp_distance: dimensions differ");
    const int d = f.dimension();
    std::vector<const Cube*> all;
    for (const auto& q : f.partition().cubes()) all.push_back(&q);
    for (const auto& q : g.partition().cubes()) all.push_back(&q);
    if (all.empty()) return 0.0;
    Point lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
    double h = std::numeric_limits<double>::infinity();
    for (const auto* q : all) {
        h = std::min(h, q->side);
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], q->corner[a]);
            hi[a] = std::max(hi[a], q->corner[a] + q->side);
        }
    }
    // Halve the spacing until every cube edge falls on a cell boundary, within a cell budget.
    auto aligned = [&](double spacing) {
        for (const auto* q : all) {
            if (!is_integral(q->side / spacing)) return false;
            for (int a = 0; a < d; ++a)
                if (!is_integral((q->corner[a] - lo[a]) / spacing)) return false;
        }
        return true;
    };
    auto cells = [&](double spacing) {
        double n = 1.0;
        for (int a = 0; a < d; ++a) n *= std::ceil((hi[a] - lo[a]) / spacing);
        return n;
    };
    while (!aligned(h) && cells(h / 2.0) <= double(1 << 24)) h /= 2.0;
    GridSpec grid;
    grid.dimension = d;
    grid.spacing = h;
    grid.origin = lo;
    for (int a = 0; a < d; ++a)
        grid.extents.push_back(static_cast<std::size_t>(std::ceil((hi[a] - lo[a]) / h - kAlignSlack)));
    auto a = rasterize(f, grid);
    auto b = rasterize(g, grid);
    return lp_on_common(a.values(), b.values(), p, grid.cell_volume());
}

double combined_error(const GridDensity& f, const StepDensity& g) {
    const double p = 1.0 + 2.0 / f.dimension();
    return lp_distance(f, g, 1.0) + lp_distance(f, g, p);
}

namespace {

struct DyadicBuilder {
    const GridDensity& f;
    double tolerance;
    int max_depth;
    double p;
    double root_cells;  // S^d
    std::vector<Cube> cubes;
    std::vector<double> levels;
    double sum_e1 = 0.0;
    double sum_ep = 0.0;
    int deepest = 0;

    // `corner` and `size` in cell units; sizes are root / 2^depth and need not be integers.
    void visit(const std::vector<double>& corner, double size, int depth) {
        const auto& g = f.grid();
        const int d = g.dimension;
        const auto& v = f.values();
        double sum = 0.0, covered = 0.0;
        for_each_overlap(g, corner, size, [&](std::size_t i, double w) {
            sum += w * v[i];
            covered += w;
        });
        if (sum == 0.0) return;  // f vanishes on this cube; dropped
        const double total = std::pow(size, d);
        const double avg = sum / total;
        double e1 = 0.0, ep = 0.0;
        for_each_overlap(g, corner, size, [&](std::size_t i, double w) {
            const double diff = std::abs(v[i] - avg);
            e1 += w * diff;
            ep += w * std::pow(diff, p);
        });
        const double outside = std::max(0.0, total - covered);
        e1 = (e1 + outside * avg) * g.cell_volume();
        ep = (ep + outside * std::pow(avg, p)) * g.cell_volume();

        const double share = total / root_cells;
        const bool over = e1 > 0.5 * tolerance * share || ep > std::pow(0.5 * tolerance, p) * share;
        const bool can_refine = size > 1.0 + 1e-9 && (max_depth < 0 || depth < max_depth);
        if (over && can_refine) {
            const double half = 0.5 * size;
            const std::size_t children = std::size_t{1} << d;
            for (std::size_t c = 0; c < children; ++c) {
                auto child = corner;
                for (int a = 0; a < d; ++a)
                    if (c & (std::size_t{1} << (d - 1 - a))) child[a] += half;
                visit(child, half, depth + 1);
            }
            return;
        }
        Cube q;
        q.side = size * g.spacing;
        q.corner.resize(d);
        for (int a = 0; a < d; ++a) q.corner[a] = g.origin[a] + corner[a] * g.spacing;
        cubes.push_back(std::move(q));
        levels.push_back(avg);
        sum_e1 += e1;
        sum_ep += ep;
        deepest = std::max(deepest, depth);
    }
};

}  // namespace

StepApproximation step_approximate_to(const GridDensity& f, double tolerance, const StepOptions& options) {
    if (!(tolerance > 0.0)) throw ValidationError("step tolerance must be positive");
    const auto& g = f.grid();
    const int d = g.dimension;
    std::vector<std::size_t> lo(d, std::numeric_limits<std::size_t>::max()), hi(d, 0), idx(d);
    bool any = false;
    for (std::size_t i = 0; i < f.values().size(); ++i) {
        if (f.values()[i] <= 0.0) continue;
        any = true;
        g.unravel(i, idx);
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], idx[a]);
            hi[a] = std::max(hi[a], idx[a]);
        }
    }
    if (!any) throw ValidationError("cannot approximate a density of zero mass");
    // The root is the bounding cube of the support, anchored at its lower corner.
    std::size_t span = 1;
    for (int a = 0; a < d; ++a) span = std::max(span, hi[a] - lo[a] + 1);
    const auto root = static_cast<double>(span);
    std::vector<double> corner(lo.begin(), lo.end());

    DyadicBuilder b{f, tolerance, options.max_depth, 1.0 + 2.0 / d, std::pow(root, d), {}, {}};
    b.visit(corner, root, 0);

    StepApproximation out;
    out.density = StepDensity(CubePartition::trusted(d, std::move(b.cubes)), std::move(b.levels));
    out.l1_error = b.sum_e1;
    out.lp_error = std::pow(b.sum_ep, 1.0 / b.p);
    out.depth = b.deepest;
    if (std::isfinite(tolerance) && out.error() > tolerance * (1.0 + 1e-12))
        throw ToleranceNotMet("step approximation stopped at depth cap " + std::to_string(options.max_depth) +
                                  " with error " + fmt_double(out.error()),
                              out.error());
    return out;
}

StepApproximation step_approximate(const GridDensity& f, int k, const StepOptions& options) {
    if (k < 1) throw ValidationError("step_approximate needs k >= 1");
    return step_approximate_to(f, 1.0 / k, options);
}

double RadialGrid::delta() const { return std::log(r_max / r_min) / static_cast<double>(points); }

double RadialGrid::node(std::size_t i) const {
    return r_min * std::exp((static_cast<double>(i) + 0.5) * delta());
}

double RadialGrid::weight(std::size_t i) const { return node(i) * delta(); }

std::vector<double> RadialGrid::nodes() const {
    std::vector<double> r(points);
    for (std::size_t i = 0; i < points; ++i) r[i] = node(i);
    return r;
}

RadialGrid RadialGrid::scaled(double factor) const { return {r_min * factor, r_max * factor, points}; }

RadialDensity RadialDensity::sample(const RadialGrid& grid, const std::function<double(double)>& fn) {
    if (!(grid.r_min > 0.0) || !(grid.r_max > grid.r_min) || grid.points < 2)
        throw ValidationError("radial grid needs 0 < r_min < r_max and >= 2 points");
    RadialDensity out{grid, std::vector<double>(grid.points)};
    for (std::size_t i = 0; i < grid.points; ++i) {
        out.values[i] = fn(grid.node(i));
        if (!(out.values[i] >= 0.0)) throw ValidationError("radial density must be >= 0");
    }
    return out;
}

double RadialDensity::mass() const { return power_integral(1.0); }

double RadialDensity::power_integral(double p) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double r = grid.node(i);
        s += 4.0 * std::numbers::pi * r * r * std::pow(values[i], p) * grid.weight(i);
    }
    return s;
}

double RadialDensity::value_at(double r) const {
    if (r >= grid.r_max) return 0.0;
    if (r <= grid.node(0)) return values.front();
    double t = std::log(r / grid.r_min) / grid.delta() - 0.5;
    auto i = static_cast<std::size_t>(t);
    if (i + 1 >= values.size()) return values.back();
    double w = t - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

double RadialDensity::enclosed_mass(double r) const {
    if (r <= grid.r_min) return 0.0;
    const double t = std::log(std::min(r, grid.r_max) / grid.r_min) / grid.delta();
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double cell = std::clamp(t - static_cast<double>(i), 0.0, 1.0);
        if (cell == 0.0) break;
        double ri = grid.node(i);
        s += cell * 4.0 * std::numbers::pi * ri * ri * values[i] * grid.weight(i);
    }
    return s;
}

RadialDensity RadialDensity::scaled(double factor) const {
    auto v = values;
    for (auto& x : v) x *= factor;
    return {grid, std::move(v)};
}

nlohmann::json to_json(const StepDensity& f) {
    nlohmann::json cubes = nlohmann::json::array();
    const auto& qs = f.partition().cubes();
    for (std::size_t i = 0; i < qs.size(); ++i)
        cubes.push_back({{"corner", qs[i].corner}, {"side", qs[i].side}, {"level", f.levels()[i]}});
    return {{"dimension", f.dimension()}, {"cubes", cubes}};
}

StepDensity step_density_from_json(const nlohmann::json& j) {
    try {
        const int d = j.at("dimension").get<int>();
        std::vector<Cube> cubes;
        std::vector<double> levels;
        for (const auto& c : j.at("cubes")) {
            cubes.push_back({c.at("corner").get<Point>(), c.at("side").get<double>()});
            levels.push_back(c.at("level").get<double>());
        }
        return StepDensity(CubePartition(d, std::move(cubes)), std::move(levels));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed step density JSON: ") + e.what());
    }
}

void write_csv(std::ostream& os, const GridField& f) {
    const auto& g = f.grid;
    for (int a = 0; a < g.dimension; ++a) os << 'x' << (a + 1) << ',';
    os << "value\n";
    std::vector<std::size_t> idx(g.dimension);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        g.unravel(i, idx);
        for (int a = 0; a < g.dimension; ++a) os << fmt_double(g.center(a, idx[a])) << ',';
        os << fmt_double(f.values[i]) << '\n';
    }
}

void write_csv(std::ostream& os, const GridDensity& f) { write_csv(os, f.as_field()); }

GridDensity read_grid_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty density CSV");
    const int d = static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (d < 1) throw ValidationError("density CSV header must be x1,...,xd,value");
    std::vector<std::vector<double>> coords;
    std::vector<double> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != static_cast<std::size_t>(d + 1)) throw ValidationError("ragged density CSV row");
        vals.push_back(row.back());
        row.pop_back();
        coords.push_back(std::move(row));
    }
    if (vals.empty()) throw ValidationError("density CSV has no rows");
    GridSpec g;
    g.dimension = d;
    g.origin.resize(d);
    g.extents.resize(d);
    std::vector<std::vector<double>> uniq(d);
    for (int a = 0; a < d; ++a) {
        for (const auto& c : coords) uniq[a].push_back(c[a]);
        std::sort(uniq[a].begin(), uniq[a].end());
        uniq[a].erase(std::unique(uniq[a].begin(), uniq[a].end(),
                                  [](double x, double y) { return std::abs(x - y) <= 1e-12 * (1 + std::abs(x)); }),
                      uniq[a].end());
        g.extents[a] = uniq[a].size();
    }
    g.spacing = 1.0;
    for (int a = 0; a < d; ++a)
        if (uniq[a].size() > 1) {
            g.spacing = uniq[a][1] - uniq[a][0];
            break;
        }
    for (int a = 0; a < d; ++a) g.origin[a] = uniq[a].front() - 0.5 * g.spacing;
    if (g.size() != vals.size()) throw ValidationError("density CSV is not a full tensor grid");
    std::vector<double> out(g.size(), 0.0);
    std::vector<std::size_t> idx(d);
    for (std::size_t r = 0; r < vals.size(); ++r) {
        for (int a = 0; a < d; ++a) {
            double t = (coords[r][a] - g.origin[a]) / g.spacing - 0.5;
            if (!is_integral(t)) throw ValidationError("density CSV coordinates are not uniformly spaced");
            idx[a] = static_cast<std::size_t>(std::llround(t));
        }
        out[g.ravel(idx)] = vals[r];
    }
    return GridDensity(g, std::move(out));
}

}  // namespace tfgamma
