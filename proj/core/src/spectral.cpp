#include "tfgamma/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "tfgamma/errors.hpp"
#include "tfgamma/parallel.hpp"
#include "tfgamma/quadrature.hpp"
#include "tfgamma/tf.hpp"

namespace tfgamma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return std::sqrt(s);
}

struct Spectrum {
    std::vector<double> eigenvalues;  // negative, ascending
    double boundary_amplitude = 0.0;
};

// Inverse iteration for the eigenvector of the lowest eigenvalue of a tridiagonal matrix.
std::vector<double> lowest_vector(const std::vector<double>& diag, double off, double lowest) {
    const std::size_t n = diag.size();
    const double shift = lowest - 1e-9 * std::max(std::abs(lowest), std::abs(off));
    std::vector<double> x(n, 1.0), c(n), y(n);
    for (int iter = 0; iter < 4; ++iter) {
        // Thomas algorithm for (T - shift) y = x.
        double m = diag[0] - shift;
        c[0] = off / m;
        y[0] = x[0] / m;
        for (std::size_t i = 1; i < n; ++i) {
            m = diag[i] - shift - off * c[i - 1];
            c[i] = off / m;
            y[i] = (x[i] - off * y[i - 1]) / m;
        }
        for (std::size_t i = n - 1; i-- > 0;) y[i] -= c[i] * y[i + 1];
        double big = 0.0;
        for (double v : y) big = std::max(big, std::abs(v));
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / big;
    }
    return x;
}

Spectrum tridiagonal_spectrum(const SchrodingerGrid& g, double h) {
    const double t = h * h / (g.step() * g.step());
    const std::size_t n = g.n;
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 * t - g.potential[i];
    const std::vector<double> off(n - 1, -t);
    Spectrum s;
    const std::size_t count = sturm_count(diag, off, 0.0);
    if (count == 0) return s;
    double floor_bound = kInfinity;
    for (double a : diag) floor_bound = std::min(floor_bound, a - 2.0 * t);
    s.eigenvalues.reserve(count);
    double previous = floor_bound;
    for (std::size_t j = 0; j < count; ++j) {
        double lo = previous, hi = 0.0;
        for (int it = 0; it < 200 && hi - lo > 4.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + 1e-300; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (sturm_count(diag, off, mid) > j)
                hi = mid;
            else
                lo = mid;
        }
        s.eigenvalues.push_back(0.5 * (lo + hi));
        previous = lo;
    }
    const auto v = lowest_vector(diag, -t, s.eigenvalues.front());
    s.boundary_amplitude = std::max(std::abs(v.front()), std::abs(v.back()));
    return s;
}

Spectrum dense_spectrum_2d(const SchrodingerGrid& g, double h) {
    const double t = h * h / (g.step() * g.step());
    const std::size_t n = g.n;
    const auto N = static_cast<Eigen::Index>(n * n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto p = static_cast<Eigen::Index>(i * n + j);
            A(p, p) = 4.0 * t - g.potential[i * n + j];
            if (i + 1 < n) A(p, p + static_cast<Eigen::Index>(n)) = A(p + static_cast<Eigen::Index>(n), p) = -t;
            if (j + 1 < n) A(p, p + 1) = A(p + 1, p) = -t;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success) throw NumericError("dense eigensolve failed");
    Spectrum s;
    const auto& ev = solver.eigenvalues();
    for (Eigen::Index k = 0; k < N && ev(k) < 0.0; ++k) s.eigenvalues.push_back(ev(k));
    if (s.eigenvalues.empty()) return s;
    const Eigen::VectorXd v = solver.eigenvectors().col(0);
    const double big = v.cwiseAbs().maxCoeff();
    double edge = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i == 0 || j == 0 || i + 1 == n || j + 1 == n)
                edge = std::max(edge, std::abs(v(static_cast<Eigen::Index>(i * n + j))));
    s.boundary_amplitude = edge / big;
    return s;
}

Spectrum spectrum(const SchrodingerGrid& g, double h) {
    g.validate();
    if (!(h > 0.0)) throw ValidationError("semiclassical parameter h must be positive");
    if (g.dimension == 1) return tridiagonal_spectrum(g, h);
    if (g.dimension == 2) return dense_spectrum_2d(g, h);
    throw UnsupportedDimension("eigensolves are available for d = 1 and d = 2");
}

}  // namespace

void WellPotential::validate() const {
    if (dimension < 1) throw ValidationError("well dimension must be >= 1");
    if (!(support_radius > 0.0)) throw ValidationError("well support radius must be positive");
    if (!(maximum >= 0.0) || !std::isfinite(maximum)) throw ValidationError("well maximum must be finite and >= 0");
}

WellPotential zero_well(int dimension) {
    WellPotential U;
    U.dimension = dimension;
    U.maximum = 0.0;
    U.name = "zero";
    return U;
}

WellPotential parabolic_well(int dimension, double depth) {
    if (!(depth >= 0.0)) throw ValidationError("well depth must be >= 0");
    WellPotential U;
    U.dimension = dimension;
    U.radial = [depth](double r) { return r < 1.0 ? depth * (1.0 - r * r) : 0.0; };
    U.function = [radial = U.radial](std::span<const double> x) { return radial(norm(x)); };
    U.support_radius = 1.0;
    U.maximum = depth;
    U.name = "parabolic";
    return U;
}

WellPotential square_well(int dimension, double depth, double radius) {
    if (!(depth >= 0.0) || !(radius > 0.0)) throw ValidationError("square well needs depth >= 0 and radius > 0");
    WellPotential U;
    U.dimension = dimension;
    U.radial = [depth, radius](double r) { return r < radius ? depth : 0.0; };
    U.function = [radial = U.radial](std::span<const double> x) { return radial(norm(x)); };
    U.support_radius = radius;
    U.maximum = depth;
    U.name = "square";
    return U;
}

WellPotential well_from_json(const nlohmann::json& spec, int dimension) {
    try {
        const auto type = spec.at("type").get<std::string>();
        if (type == "zero") return zero_well(dimension);
        if (type == "parabolic") return parabolic_well(dimension, spec.value("depth", 1.0));
        if (type == "square")
            return square_well(dimension, spec.at("depth").get<double>(), spec.at("radius").get<double>());
        throw ValidationError("unknown well type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed well spec: ") + e.what());
    }
}

void SchrodingerGrid::validate() const {
    if (dimension < 1) throw ValidationError("Schrodinger grid dimension must be >= 1");
    if (n < 16) throw ValidationError("Schrodinger grid needs n >= 16 nodes per axis");
    if (!(hi > lo)) throw ValidationError("Schrodinger box needs lo < hi");
    std::size_t total = 1;
    for (int a = 0; a < dimension; ++a) total *= n;
    if (potential.size() != total) throw SizeError("potential sample count does not match the grid");
    for (double u : potential)
        if (!(u >= 0.0) || !std::isfinite(u)) throw ValidationError("potential must be finite and >= 0");
}

SchrodingerGrid SchrodingerGrid::sample(const WellPotential& U, double lo, double hi, std::size_t n) {
    SchrodingerGrid g;
    g.dimension = U.dimension;
    g.lo = lo;
    g.hi = hi;
    g.n = n;
    std::size_t total = 1;
    for (int a = 0; a < g.dimension; ++a) total *= n;
    g.potential.resize(total);
    Point x(g.dimension);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int a = g.dimension - 1; a >= 0; --a) {
            x[a] = g.node(rest % n);
            rest /= n;
        }
        g.potential[flat] = U(x);
    }
    return g;
}

std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double x) {
    if (diag.empty()) return 0;
    if (off.size() + 1 != diag.size()) throw SizeError("tridiagonal off-diagonal length must be n - 1");
    std::size_t count = 0;
    double q = diag[0] - x;
    const double tiny = std::numeric_limits<double>::min() / kEps;
    for (std::size_t i = 0;; ++i) {
        if (std::abs(q) < tiny) q = -tiny;
        if (q < 0.0) ++count;
        if (i + 1 == diag.size()) break;
        q = diag[i + 1] - x - off[i] * off[i] / q;
    }
    return count;
}

std::vector<double> negative_eigenvalues(const SchrodingerGrid& grid, double h) { return spectrum(grid, h).eigenvalues; }

NegativeSum negative_sum(const SchrodingerGrid& grid, double h, double boundary_tol) {
    const auto s = spectrum(grid, h);
    NegativeSum out;
    for (double e : s.eigenvalues) out.value += e;
    out.count = s.eigenvalues.size();
    out.nodes = grid.n;
    out.half_width = 0.5 * (grid.hi - grid.lo);
    out.boundary_amplitude = s.boundary_amplitude;
    out.truncated = s.boundary_amplitude > boundary_tol;
    return out;
}

NegativeSum negative_sum(const WellPotential& U, double h, const SpectralOptions& options) {
    U.validate();
    if (!(h > 0.0)) throw ValidationError("semiclassical parameter h must be positive");
    if (!(options.resolution > 0.0)) throw ValidationError("resolution must be positive");
    if (U.is_zero()) return {};
    const double scale = h / std::sqrt(U.maximum);
    double pad = 4.0 * scale;
    NegativeSum result;
    for (int e = 0; e <= options.max_enlargements; ++e) {
        const double half = U.support_radius + pad;
        auto n = static_cast<std::size_t>(std::ceil(2.0 * half * options.resolution / scale));
        n = std::max<std::size_t>(n, 17) - 1;
        if (U.dimension == 2) n = std::min(n, options.max_nodes_2d);
        result = negative_sum(SchrodingerGrid::sample(U, -half, half, n), h, options.boundary_tol);
        if (!result.truncated) return result;
        pad *= 2.0;
    }
    return result;
}

double weyl_constant(int dimension) {
    const double d = dimension;
    return unit_ball_volume(dimension) / (std::pow(2.0 * kPi, d) * (1.0 + 0.5 * d));
}

double weyl_term(const GridField& U) {
    const double p = 1.0 + 0.5 * U.grid.dimension;
    double s = 0.0;
    for (double u : U.values) {
        if (u < 0.0) throw ValidationError("weyl_term needs U >= 0");
        s += std::pow(u, p);
    }
    return -weyl_constant(U.grid.dimension) * s * U.grid.cell_volume();
}

double weyl_term(const WellPotential& U, double rel_tol) {
    U.validate();
    if (U.is_zero()) return 0.0;
    const int d = U.dimension;
    const double p = 1.0 + 0.5 * d;
    const double R = U.support_radius;
    if (d == 1) {
        const double v = integrate_adaptive(
            [&](double x) {
                const double pt[1] = {x};
                return std::pow(U(pt), p);
            },
            -R, R, rel_tol);
        return -weyl_constant(1) * v;
    }
    if (U.radial) {
        const double sphere = d * unit_ball_volume(d);
        const double v = integrate_adaptive(
            [&](double r) { return sphere * std::pow(r, d - 1) * std::pow(U.radial(r), p); }, 0.0, R, rel_tol);
        return -weyl_constant(d) * v;
    }
    const std::size_t cells = d == 2 ? 1024 : (d == 3 ? 128 : 24);
    return weyl_term(GridField::sample(GridSpec::box(d, -R, R, cells), [&](std::span<const double> x) { return U(x); }));
}

double dual_lower_bound(const GridDensity& f, const GridField& U) {
    const auto& a = f.grid();
    const auto& b = U.grid;
    if (a.dimension != b.dimension || a.extents != b.extents || a.spacing != b.spacing || a.origin != b.origin)
        throw DimensionMismatch("dual_lower_bound needs f and U on one grid");
    double coupling = 0.0;
    for (std::size_t i = 0; i < U.values.size(); ++i) coupling += U.values[i] * f.values()[i];
    return weyl_term(U) + coupling * a.cell_volume();
}

GridField optimal_dual_potential(const GridDensity& f) {
    const double d = f.dimension();
    const double c = (1.0 + 2.0 / d) * kcl(f.dimension(), 1);
    std::vector<double> u(f.values().size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = c * std::pow(f.values()[i], 2.0 / d);
    return GridField(f.grid(), std::move(u));
}

std::vector<WeylRow> weyl_convergence_table(const WellPotential& U, std::span<const double> hs,
                                            const SpectralOptions& options, unsigned workers) {
    for (double h : hs)
        if (!(h > 0.0)) throw ValidationError("h values must be positive");
    for (std::size_t i = 1; i < hs.size(); ++i)
        if (!(hs[i] < hs[i - 1])) throw ValidationError("h values must decrease");
    const double w = weyl_term(U);
    std::vector<WeylRow> rows(hs.size());
    parallel_for(hs.size(), workers, [&](std::size_t i) {
        const double h = hs[i];
        const auto ns = negative_sum(U, h, options);
        WeylRow row;
        row.h = h;
        row.negative_sum = ns.value;
        row.weyl = w / std::pow(h, U.dimension);
        row.ratio = row.weyl == 0.0 ? 1.0 : ns.value / row.weyl;
        row.truncated = ns.truncated;
        rows[i] = row;
    });
    return rows;
}

double sea_one_body_energy(const FermiSea& sea, const WellPotential& U, double h, const GridSpec& grid) {
    if (sea.dimension() != U.dimension || grid.dimension != U.dimension)
        throw DimensionMismatch("sea, well and grid dimensions differ");
    const auto rho = sea_density(sea, grid);
    double coupling = 0.0;
    for (std::size_t i = 0; i < rho.values().size(); ++i) {
        if (rho.values()[i] == 0.0) continue;
        coupling += U(grid.center_of(i)) * rho.values()[i];
    }
    return h * h * sea_kinetic(sea) - coupling * grid.cell_volume();
}

}  // namespace tfgamma
