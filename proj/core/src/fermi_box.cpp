#include "tfgamma/fermi_box.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

#include "tfgamma/errors.hpp"
#include "tfgamma/parallel.hpp"

namespace tfgamma {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t squared_norm(const MultiIndex& k) {
    std::int64_t s = 0;
    for (int c : k) s += static_cast<std::int64_t>(c) * c;
    return s;
}

bool mode_less(const MultiIndex& a, const MultiIndex& b) {
    const auto na = squared_norm(a), nb = squared_norm(b);
    if (na != nb) return na < nb;
    return a < b;
}

// Enumerate all k in N_{>=1}^d with |k|^2 <= bound.
void enumerate(int d, std::int64_t bound, MultiIndex& k, int axis, std::int64_t partial, std::vector<MultiIndex>& out) {
    if (axis == d) {
        out.push_back(k);
        return;
    }
    const std::int64_t rest = d - axis - 1;  // each remaining component contributes >= 1
    for (int c = 1;; ++c) {
        const std::int64_t s = partial + static_cast<std::int64_t>(c) * c;
        if (s + rest > bound) break;
        k[axis] = c;
        enumerate(d, bound, k, axis + 1, s, out);
    }
}

// Cell index range of the grid cells whose centers lie in the cube.
struct CellBox {
    std::vector<std::size_t> lo, hi;
    bool empty = false;
    std::size_t count() const {
        std::size_t n = 1;
        for (std::size_t a = 0; a < lo.size(); ++a) n *= hi[a] - lo[a];
        return empty ? 0 : n;
    }
};

CellBox cells_in(const Cube& q, const GridSpec& g) {
    CellBox box;
    const int d = g.dimension;
    box.lo.resize(d);
    box.hi.resize(d);
    for (int a = 0; a < d; ++a) {
        const double first = std::ceil((q.corner[a] - g.origin[a]) / g.spacing - 0.5 - 1e-9);
        const double last = std::ceil((q.corner[a] + q.side - g.origin[a]) / g.spacing - 0.5 - 1e-9);
        const double lo = std::max(0.0, first);
        const double hi = std::min(static_cast<double>(g.extents[a]), last);
        if (hi <= lo) {
            box.empty = true;
            box.lo[a] = box.hi[a] = 0;
            continue;
        }
        box.lo[a] = static_cast<std::size_t>(lo);
        box.hi[a] = static_cast<std::size_t>(hi);
    }
    return box;
}

// sqrt(2/L) sin(pi m (x - c)/L) and its derivative, for m = 1..kmax, at the cells of one axis.
struct AxisTable {
    std::vector<std::vector<double>> value;
    std::vector<std::vector<double>> slope;
};

AxisTable axis_table(const Cube& q, const GridSpec& g, int axis, std::size_t lo, std::size_t hi, int kmax) {
    AxisTable t;
    t.value.assign(kmax + 1, std::vector<double>(hi - lo));
    t.slope.assign(kmax + 1, std::vector<double>(hi - lo));
    const double L = q.side;
    const double amp = std::sqrt(2.0 / L);
    for (int m = 1; m <= kmax; ++m) {
        const double wave = kPi * m / L;
        for (std::size_t i = lo; i < hi; ++i) {
            const double x = g.center(axis, i) - q.corner[axis];
            t.value[m][i - lo] = amp * std::sin(wave * x);
            t.slope[m][i - lo] = amp * wave * std::cos(wave * x);
        }
    }
    return t;
}

int max_component(const std::vector<MultiIndex>& modes) {
    int m = 0;
    for (const auto& k : modes)
        for (int c : k) m = std::max(m, c);
    return m;
}

// Iterate cells of a CellBox; fn(flat index in grid, local per-axis offsets).
template <class Fn>
void for_each_in(const GridSpec& g, const CellBox& box, Fn&& fn) {
    if (box.empty) return;
    const int d = g.dimension;
    std::vector<std::size_t> idx = box.lo, local(d, 0);
    while (true) {
        fn(g.ravel(idx), local);
        int a = d - 1;
        while (a >= 0) {
            ++local[a];
            if (++idx[a] < box.hi[a]) break;
            idx[a] = box.lo[a];
            local[a] = 0;
            --a;
        }
        if (a < 0) break;
    }
}

std::vector<AxisTable> tables_for(const CubeOccupation& occ, const GridSpec& g, const CellBox& box) {
    const int kmax = max_component(occ.modes);
    std::vector<AxisTable> tables;
    for (int a = 0; a < g.dimension; ++a) tables.push_back(axis_table(occ.cube, g, a, box.lo[a], box.hi[a], kmax));
    return tables;
}

// Halves `spacing` until every cube face lies on a grid face through `origin`.
void refine_until_aligned(const FermiSea& sea, const Point& origin, double& spacing) {
    auto on_grid = [&](double x, double s) {
        const double t = x / s;
        return std::abs(t - std::round(t)) <= 1e-9 * std::max(1.0, std::abs(t));
    };
    for (int halvings = 0; halvings <= 40; ++halvings) {
        bool aligned = true;
        for (const auto& occ : sea.cubes()) {
            aligned = aligned && on_grid(occ.cube.side, spacing);
            for (std::size_t a = 0; a < origin.size(); ++a) aligned = aligned && on_grid(occ.cube.corner[a] - origin[a], spacing);
        }
        if (aligned) return;
        spacing /= 2.0;
    }
    throw NumericError("Fermi sea cubes do not align with any dyadic refinement of the grid");
}

}  // namespace

std::int64_t BoxMode::squared_norm() const { return tfgamma::squared_norm(k); }

double BoxMode::eigenvalue() const { return kPi * kPi * static_cast<double>(squared_norm()) / (side * side); }

std::vector<BoxMode> box_spectrum(const Cube& cube, std::size_t count) {
    if (count == 0) throw ValidationError("box_spectrum needs M >= 1");
    const int d = static_cast<int>(cube.corner.size());
    if (d < 1) throw ValidationError("cube has no dimension");
    // {1..c}^d holds c^d >= M modes, each with |k|^2 <= d c^2, so the M lowest modes satisfy the same bound.
    auto c = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(count), 1.0 / d)));
    while (static_cast<double>(std::pow(static_cast<double>(c), d)) < static_cast<double>(count)) ++c;
    const std::int64_t bound = static_cast<std::int64_t>(d) * c * c;
    std::vector<MultiIndex> candidates;
    MultiIndex k(d, 1);
    enumerate(d, bound, k, 0, 0, candidates);
    if (candidates.size() < count) throw NumericError("box_spectrum candidate enumeration is incomplete");
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count), candidates.end(),
                      mode_less);
    std::vector<BoxMode> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back({std::move(candidates[i]), cube.side});
    return out;
}

FermiSea::FermiSea(int dimension, std::vector<CubeOccupation> cubes) : dimension_(dimension), cubes_(std::move(cubes)) {
    if (dimension_ < 1) throw ValidationError("Fermi sea dimension must be >= 1");
    for (auto& occ : cubes_) {
        if (occ.cube.corner.size() != static_cast<std::size_t>(dimension_))
            throw DimensionMismatch("cube dimension does not match the sea");
        if (!(occ.cube.side > 0.0)) throw ValidationError("cube side must be positive");
        std::set<MultiIndex> seen;
        for (const auto& k : occ.modes) {
            if (k.size() != static_cast<std::size_t>(dimension_)) throw DimensionMismatch("mode index dimension");
            for (int c : k)
                if (c < 1) throw ValidationError("mode indices must be >= 1");
            if (!seen.insert(k).second) throw ValidationError("a mode is occupied twice (Pauli)");
        }
        if (!occ.modes.empty()) {
            auto lowest = box_spectrum(occ.cube, occ.modes.size());
            std::vector<std::int64_t> want, have;
            for (const auto& m : lowest) want.push_back(m.squared_norm());
            for (const auto& m : occ.modes) have.push_back(squared_norm(m));
            std::sort(have.begin(), have.end());
            if (want != have) throw ValidationError("cube occupation is not a lowest-mode filling");
        }
        particles_ += occ.modes.size();
    }
    // Disjointness of the cubes.
    (void)partition();
}

CubePartition FermiSea::partition() const {
    std::vector<Cube> cubes;
    for (const auto& occ : cubes_) cubes.push_back(occ.cube);
    return CubePartition(dimension_, std::move(cubes));
}

double sea_kinetic(const FermiSea& sea) {
    double total = 0.0;
    for (const auto& occ : sea.cubes()) {
        std::int64_t s = 0;
        for (const auto& k : occ.modes) s += squared_norm(k);
        total += kPi * kPi * static_cast<double>(s) / (occ.cube.side * occ.cube.side);
    }
    return total;
}

GridSpec resolving_grid(const FermiSea& sea, const std::optional<GridSpec>& anchor, std::size_t cells_per_mode) {
    if (sea.cubes().empty()) throw ValidationError("empty Fermi sea");
    const int d = sea.dimension();
    double spacing = kInfinity;
    for (const auto& occ : sea.cubes()) {
        const double needed = static_cast<double>(cells_per_mode * static_cast<std::size_t>(max_component(occ.modes) + 1));
        spacing = std::min(spacing, occ.cube.side / needed);
    }
    const auto [lo, hi] = sea.partition().bounds();
    GridSpec g;
    g.dimension = d;
    if (anchor) {
        if (anchor->dimension != d) throw DimensionMismatch("anchor grid dimension");
        g.spacing = anchor->spacing;
        while (g.spacing > spacing * (1.0 + 1e-12)) g.spacing /= 2.0;
        refine_until_aligned(sea, anchor->origin, g.spacing);
        for (int a = 0; a < d; ++a) {
            const double i0 = std::floor((lo[a] - anchor->origin[a]) / g.spacing + 1e-9);
            const double i1 = std::ceil((hi[a] - anchor->origin[a]) / g.spacing - 1e-9);
            g.origin.push_back(anchor->origin[a] + i0 * g.spacing);
            g.extents.push_back(static_cast<std::size_t>(i1 - i0));
        }
        return g;
    }
    double smallest = kInfinity;
    for (const auto& occ : sea.cubes()) smallest = std::min(smallest, occ.cube.side);
    g.spacing = smallest;
    while (g.spacing > spacing * (1.0 + 1e-12)) g.spacing /= 2.0;
    refine_until_aligned(sea, lo, g.spacing);
    g.origin = lo;
    for (int a = 0; a < d; ++a) g.extents.push_back(static_cast<std::size_t>(std::ceil((hi[a] - lo[a]) / g.spacing - 1e-9)));
    return g;
}

GridDensity sea_density(const FermiSea& sea, const GridSpec& grid) {
    grid.validate();
    if (grid.dimension != sea.dimension()) throw DimensionMismatch("sea_density: grid dimension");
    const int d = grid.dimension;
    std::vector<double> rho(grid.size(), 0.0);
    for (const auto& occ : sea.cubes()) {
        if (occ.modes.empty()) continue;
        const auto box = cells_in(occ.cube, grid);
        if (box.empty) continue;
        const auto tables = tables_for(occ, grid, box);
        for_each_in(grid, box, [&](std::size_t flat, const std::vector<std::size_t>& local) {
            double s = 0.0;
            for (const auto& k : occ.modes) {
                double u = 1.0;
                for (int a = 0; a < d; ++a) u *= tables[a].value[k[a]][local[a]];
                s += u * u;
            }
            rho[flat] += s;
        });
    }
    return GridDensity(grid, std::move(rho));
}

double gram_deviation(const FermiSea& sea, const GridSpec& grid) {
    const int d = grid.dimension;
    double worst = 0.0;
    for (const auto& occ : sea.cubes()) {
        if (occ.modes.empty()) continue;
        const auto box = cells_in(occ.cube, grid);
        if (box.empty) return kInfinity;
        const auto tables = tables_for(occ, grid, box);
        const int kmax = max_component(occ.modes);
        // The midpoint Gram matrix of product orbitals factorizes over axes.
        std::vector<std::vector<std::vector<double>>> axis_gram(d);
        for (int a = 0; a < d; ++a) {
            axis_gram[a].assign(kmax + 1, std::vector<double>(kmax + 1, 0.0));
            for (int m = 1; m <= kmax; ++m)
                for (int n = m; n <= kmax; ++n) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < tables[a].value[m].size(); ++i)
                        s += tables[a].value[m][i] * tables[a].value[n][i];
                    axis_gram[a][m][n] = axis_gram[a][n][m] = s * grid.spacing;
                }
        }
        for (std::size_t i = 0; i < occ.modes.size(); ++i)
            for (std::size_t j = i; j < occ.modes.size(); ++j) {
                double g = 1.0;
                for (int a = 0; a < d; ++a) g *= axis_gram[a][occ.modes[i][a]][occ.modes[j][a]];
                worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
            }
    }
    return worst;
}

double hoffmann_ostenhof_gap(const FermiSea& sea, const GridSpec& grid) {
    grid.validate();
    const int d = grid.dimension;
    double gradient_term = 0.0;
    std::vector<double> grad(d), u_axis(d);
    for (const auto& occ : sea.cubes()) {
        if (occ.modes.empty()) continue;
        const auto box = cells_in(occ.cube, grid);
        const auto tables = tables_for(occ, grid, box);
        for_each_in(grid, box, [&](std::size_t, const std::vector<std::size_t>& local) {
            double rho = 0.0;
            std::fill(grad.begin(), grad.end(), 0.0);
            for (const auto& k : occ.modes) {
                double u = 1.0;
                for (int a = 0; a < d; ++a) {
                    u_axis[a] = tables[a].value[k[a]][local[a]];
                    u *= u_axis[a];
                }
                rho += u * u;
                for (int a = 0; a < d; ++a) {
                    double du = tables[a].slope[k[a]][local[a]];
                    for (int b = 0; b < d; ++b)
                        if (b != a) du *= u_axis[b];
                    grad[a] += 2.0 * u * du;
                }
            }
            if (rho <= 0.0) return;
            double g2 = 0.0;
            for (double x : grad) g2 += x * x;
            gradient_term += g2 / (4.0 * std::max(rho, 1e-300));
        });
    }
    return sea_kinetic(sea) - gradient_term * grid.cell_volume();
}

std::vector<std::size_t> allocate_particles(const StepDensity& step, std::size_t particles) {
    if (particles == 0) throw ValidationError("allocate_particles needs N >= 1");
    const double m = mass(step);
    if (std::abs(m - 1.0) > 1e-9) throw ValidationError("allocate_particles needs a unit-mass step density");
    const auto& cubes = step.partition().cubes();
    const std::size_t n = cubes.size();
    std::vector<double> target(n), remainder(n);
    std::vector<std::size_t> counts(n);
    long long assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        target[i] = static_cast<double>(particles) * cubes[i].volume() * step.levels()[i];
        const double fl = std::floor(target[i]);
        counts[i] = static_cast<std::size_t>(fl);
        remainder[i] = target[i] - fl;
        assigned += static_cast<long long>(counts[i]);
    }
    const long long missing = static_cast<long long>(particles) - assigned;
    if (missing < 0 || missing > static_cast<long long>(n))
        throw AllocationError("cannot round cube targets to " + std::to_string(particles) + " particles");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (long long r = 0; r < missing; ++r) ++counts[order[static_cast<std::size_t>(r)]];
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<double>(counts[i]);
        if (!(c > target[i] - 1.0) || !(c <= target[i] + 1.0))
            throw AllocationError("cube " + std::to_string(i) + " count leaves its rounding window");
    }
    return counts;
}

Recovery build_recovery(StepApproximation step, std::size_t particles) {
    const double m = mass(step.density);
    if (!(m > 0.0)) throw ValidationError("step density has zero mass");
    auto counts = allocate_particles(step.density.scaled(1.0 / m), particles);
    std::vector<CubeOccupation> occupied;
    const auto& cubes = step.density.partition().cubes();
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        if (counts[i] == 0) continue;
        CubeOccupation occ{cubes[i], {}};
        for (auto& mode : box_spectrum(cubes[i], counts[i])) occ.modes.push_back(std::move(mode.k));
        occupied.push_back(std::move(occ));
    }
    const int d = step.density.dimension();
    Recovery out{std::move(step), std::move(counts), {}};
    out.sea = FermiSea(d, std::move(occupied));
    return out;
}

Recovery build_recovery(const GridDensity& f, std::size_t particles, int k) {
    const double m = mass(f);
    if (std::abs(m - 1.0) > 1e-6) throw ValidationError("build_recovery needs a unit-mass density (got " + std::to_string(m) + ")");
    return build_recovery(step_approximate(f, k), particles);
}

double Ladder::threshold(int k) const { return base * std::pow(growth, k); }

int Ladder::index_for(std::size_t particles) const {
    if (!(base >= 1.0) || !(growth > 1.0)) throw ValidationError("ladder needs base >= 1 and growth > 1");
    int k = 0;
    while (k < 256 && threshold(k + 1) <= static_cast<double>(particles)) ++k;
    return k;
}

std::vector<DiagonalEntry> diagonal_sequence(const GridDensity& f, std::span<const std::size_t> particle_counts,
                                             const Ladder& ladder, unsigned workers) {
    for (std::size_t i = 1; i < particle_counts.size(); ++i)
        if (particle_counts[i] <= particle_counts[i - 1]) throw ValidationError("particle counts must increase");
    std::vector<DiagonalEntry> out(particle_counts.size());
    parallel_for(particle_counts.size(), workers, [&](std::size_t i) {
        const std::size_t n = particle_counts[i];
        const int k = ladder.index_for(n);
        auto step = step_approximate_to(f, k >= 1 ? 1.0 / k : kInfinity);
        out[i] = DiagonalEntry{n, k, build_recovery(std::move(step), n)};
    });
    return out;
}

double slater_direct_interaction(const GridDensity& rho, const RadialKernel& w, double lambda) {
    if (w.is_zero() || lambda == 0.0) return 0.0;
    const auto field = rho.as_field();
    return 0.5 * lambda * pair_interaction(field, field, w);
}

double slater_exchange_interaction(const FermiSea& sea, const GridSpec& grid, const RadialKernel& w, double lambda,
                                   std::size_t cap) {
    if (sea.particles() > cap)
        throw SizeError("exchange term limited to " + std::to_string(cap) + " particles, sea has " +
                        std::to_string(sea.particles()));
    if (w.is_zero() || lambda == 0.0) return 0.0;
    const int d = grid.dimension;
    double total = 0.0;
    for (const auto& occ : sea.cubes()) {
        if (occ.modes.empty()) continue;
        const auto box = cells_in(occ.cube, grid);
        if (box.empty) continue;
        const auto tables = tables_for(occ, grid, box);
        GridSpec local;
        local.dimension = d;
        local.spacing = grid.spacing;
        for (int a = 0; a < d; ++a) {
            local.origin.push_back(grid.origin[a] + static_cast<double>(box.lo[a]) * grid.spacing);
            local.extents.push_back(box.hi[a] - box.lo[a]);
        }
        const std::size_t m = occ.modes.size();
        std::vector<std::vector<double>> orbitals(m, std::vector<double>(local.size()));
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t cell = 0;
            for_each_in(grid, box, [&](std::size_t, const std::vector<std::size_t>& loc) {
                double u = 1.0;
                for (int a = 0; a < d; ++a) u *= tables[a].value[occ.modes[j][a]][loc[a]];
                orbitals[j][cell++] = u;
            });
        }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                std::vector<double> pair(local.size());
                for (std::size_t c = 0; c < pair.size(); ++c) pair[c] = orbitals[i][c] * orbitals[j][c];
                GridField field(local, std::move(pair));
                const double e = pair_interaction(field, field, w);
                total += (i == j ? 1.0 : 2.0) * e;
            }
    }
    return -0.5 * lambda * total;
}

nlohmann::json to_json(const FermiSea& sea) {
    nlohmann::json cubes = nlohmann::json::array();
    for (const auto& occ : sea.cubes())
        cubes.push_back({{"corner", occ.cube.corner}, {"side", occ.cube.side}, {"modes", occ.modes}});
    return {{"dimension", sea.dimension()}, {"cubes", cubes}};
}

FermiSea fermi_sea_from_json(const nlohmann::json& j) {
    try {
        std::vector<CubeOccupation> cubes;
        for (const auto& c : j.at("cubes"))
            cubes.push_back({{c.at("corner").get<Point>(), c.at("side").get<double>()},
                             c.at("modes").get<std::vector<MultiIndex>>()});
        int d = j.contains("dimension") ? j.at("dimension").get<int>()
                                        : (cubes.empty() ? 1 : static_cast<int>(cubes.front().cube.corner.size()));
        return FermiSea(d, std::move(cubes));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed Fermi sea JSON: ") + e.what());
    }
}

}  // namespace tfgamma
