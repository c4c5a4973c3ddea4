#include "tfgamma/tf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "tfgamma/errors.hpp"

namespace tfgamma {

namespace {

constexpr double kPi = std::numbers::pi;

struct MuSolve {
    double mu = 0.0;
    std::vector<double> density;
    bool unsaturated = false;
};

// Legendre density [(mu - W)_+ / c]^{d/2} with mu fixed by the constraint. `measure` holds the
// quadrature weight of each node, so mass = sum density * measure.
MuSolve solve_mu(const std::vector<double>& W, const std::vector<double>& measure, double c, double d,
                 const MassConstraint& constraint) {
    const double half_d = 0.5 * d;
    auto fill = [&](double mu, std::vector<double>& out) {
        double m = 0.0;
        for (std::size_t i = 0; i < W.size(); ++i) {
            const double gap = mu - W[i];
            out[i] = gap > 0.0 ? std::pow(gap / c, half_d) : 0.0;
            m += out[i] * measure[i];
        }
        return m;
    };
    MuSolve s;
    s.density.resize(W.size());
    const double target = constraint.mass;
    if (constraint.kind == ConstraintKind::AtMost && fill(0.0, s.density) <= target) {
        s.mu = 0.0;
        s.unsaturated = true;
        return s;
    }
    const double w_min = *std::min_element(W.begin(), W.end());
    double lo = w_min;
    double width = 1.0;
    std::vector<double> scratch(W.size());
    int expansions = 0;
    while (fill(lo + width, scratch) < target) {
        width *= 2.0;
        if (++expansions > 2000 || !std::isfinite(width))
            throw ConstraintInfeasible("no chemical potential reaches mass " + std::to_string(target));
    }
    double hi = lo + width;
    for (int it = 0; it < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi));
         ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fill(mid, scratch) < target)
            lo = mid;
        else
            hi = mid;
    }
    s.mu = 0.5 * (lo + hi);
    fill(s.mu, s.density);
    return s;
}

std::vector<double> potential_samples(const TFProblem& problem, const GridSpec& grid) {
    auto v = problem.external.sample(grid).values;
    for (double x : v)
        if (!std::isfinite(x)) throw ValidationError("external potential is not finite on the grid");
    return v;
}

bool same_grid(const GridSpec& a, const GridSpec& b) {
    return a.dimension == b.dimension && a.extents == b.extents && a.spacing == b.spacing && a.origin == b.origin;
}

std::vector<double> radial_measure(const RadialGrid& g) {
    std::vector<double> m(g.points);
    for (std::size_t i = 0; i < g.points; ++i) {
        const double r = g.node(i);
        m[i] = 4.0 * kPi * r * r * g.weight(i);
    }
    return m;
}

}  // namespace

double unit_ball_volume(int dimension) {
    if (dimension < 1) throw ValidationError("dimension must be >= 1");
    const double d = dimension;
    return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double kcl(int dimension, int spin) {
    if (dimension < 1) throw ValidationError("dimension must be >= 1");
    if (spin < 1) throw ValidationError("spin degeneracy must be >= 1");
    const double d = dimension;
    return d / (d + 2.0) * 4.0 * kPi * kPi / std::pow(spin * unit_ball_volume(dimension), 2.0 / d);
}

GridField ExternalPotential::sample(const GridSpec& grid) const {
    if (function) return sample_potential(function, grid);
    if (!radial.is_zero()) {
        Point c = center.empty() ? Point(grid.dimension, 0.0) : center;
        if (c.size() != static_cast<std::size_t>(grid.dimension))
            throw DimensionMismatch("potential center dimension");
        return sample_potential(radial, grid, c);
    }
    return GridField::zeros(grid);
}

ExternalPotential zero_potential() { return {}; }

ExternalPotential harmonic_potential(double strength) {
    ExternalPotential v;
    v.function = [strength](std::span<const double> x) {
        double s = 0.0;
        for (double c : x) s += c * c;
        return strength * s;
    };
    v.name = "harmonic";
    return v;
}

ExternalPotential nuclear_potential(double charge, Point center) {
    ExternalPotential v;
    v.radial = coulomb_kernel(-charge);
    v.center = std::move(center);
    v.name = "coulomb";
    return v;
}

ExternalPotential external_from_json(const nlohmann::json& spec, int dimension) {
    try {
        const auto type = spec.at("type").get<std::string>();
        Point center = spec.contains("center") ? spec.at("center").get<Point>() : Point(dimension, 0.0);
        if (center.size() != static_cast<std::size_t>(dimension)) throw DimensionMismatch("potential center dimension");
        if (type == "zero") return zero_potential();
        if (type == "harmonic") {
            const double s = spec.value("strength", 1.0);
            ExternalPotential v;
            v.function = [s, center](std::span<const double> x) {
                double r2 = 0.0;
                for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
                return s * r2;
            };
            v.name = "harmonic";
            return v;
        }
        if (type == "coulomb") {
            if (dimension != 3) throw UnsupportedDimension("coulomb potential needs d = 3");
            return nuclear_potential(spec.at("charge").get<double>(), center);
        }
        if (type == "piecewise_constant_radial") {
            ExternalPotential v;
            v.radial = kernel_from_json(spec);
            v.center = center;
            v.name = type;
            return v;
        }
        throw ValidationError("unknown potential type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed potential spec: ") + e.what());
    }
}

void TFProblem::validate() const {
    if (dimension < 1) throw ValidationError("TF problem dimension must be >= 1");
    if (spin < 1) throw ValidationError("spin degeneracy must be >= 1");
    if (!(constraint.mass > 0.0)) throw ValidationError("mass constraint must be positive");
    if (!chi.is_zero() && chi.dimension != dimension) throw DimensionMismatch("chi family dimension");
}

nlohmann::json to_json(const TFEnergy& e) {
    return {{"kinetic", e.kinetic}, {"external", e.external}, {"interaction", e.interaction}, {"total", e.total}};
}

TFEnergy tf_energy(const GridDensity& f, const TFProblem& problem) {
    problem.validate();
    if (f.dimension() != problem.dimension) throw DimensionMismatch("density and problem dimensions differ");
    const double vol = f.grid().cell_volume();
    const double p = 1.0 + 2.0 / problem.dimension;
    TFEnergy e;
    double kin = 0.0;
    for (double v : f.values()) kin += std::pow(v, p);
    e.kinetic = problem.kinetic_constant() * kin * vol;
    if (!problem.external.is_zero()) {
        const auto V = potential_samples(problem, f.grid());
        double ext = 0.0;
        for (std::size_t i = 0; i < V.size(); ++i)
            if (f.values()[i] != 0.0) ext += V[i] * f.values()[i];
        e.external = ext * vol;
    }
    if (!problem.interaction.is_zero()) {
        const auto field = f.as_field();
        e.interaction = 0.5 * pair_interaction(field, field, problem.interaction);
    }
    e.total = e.kinetic + e.external + e.interaction;
    return e;
}

namespace {

std::vector<double> effective_potential(const std::vector<double>& V, const GridDensity& f, const TFProblem& problem) {
    if (problem.interaction.is_zero()) return V;
    auto phi = convolve(f.as_field(), problem.interaction).values;
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += V[i];
    return phi;
}

}  // namespace

double euler_lagrange_residual(const GridDensity& f, const TFProblem& problem, double mu) {
    problem.validate();
    const auto V = potential_samples(problem, f.grid());
    const auto W = effective_potential(V, f, problem);
    const double d = problem.dimension;
    const double c = (1.0 + 2.0 / d) * problem.kinetic_constant();
    double worst = 0.0;
    for (std::size_t i = 0; i < W.size(); ++i) {
        const double gap = mu - W[i];
        const double t = gap > 0.0 ? std::pow(gap / c, 0.5 * d) : 0.0;
        worst = std::max(worst, std::abs(t - f.values()[i]));
    }
    return worst;
}

TFSolution tf_minimize(const TFProblem& problem, const GridSpec& grid, double tol, const TFOptions& options) {
    problem.validate();
    grid.validate();
    if (grid.dimension != problem.dimension) throw DimensionMismatch("grid and problem dimensions differ");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (!(options.damping > 0.0 && options.damping <= 1.0)) throw ValidationError("damping must lie in (0, 1]");

    const double d = problem.dimension;
    const double c = (1.0 + 2.0 / d) * problem.kinetic_constant();
    const std::vector<double> measure(grid.size(), grid.cell_volume());
    const auto V = potential_samples(problem, grid);

    // Without interaction the map does not depend on f and one undamped step is exact.
    double damping = problem.interaction.is_zero() ? 1.0 : options.damping;
    auto first = solve_mu(V, measure, c, d, problem.constraint);
    std::vector<double> f = std::move(first.density);
    double previous = kInfinity;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        GridDensity current(grid, f);
        const auto W = effective_potential(V, current, problem);
        auto next = solve_mu(W, measure, c, d, problem.constraint);
        double residual = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) residual = std::max(residual, std::abs(next.density[i] - f[i]));
        if (residual <= tol) {
            TFSolution s;
            s.density = GridDensity(grid, std::move(next.density));
            s.energy = tf_energy(s.density, problem);
            s.mu = next.mu;
            s.iterations = it;
            s.residual = residual;
            s.unsaturated = next.unsaturated;
            return s;
        }
        if (residual > 1.5 * previous) damping = std::max(1e-3, 0.5 * damping);
        previous = residual;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += damping * (next.density[i] - f[i]);
    }
    throw NonConvergence("tf_minimize did not converge", previous);
}

void AtomicProblem::validate() const {
    if (!(charge > 0.0)) throw ValidationError("nuclear charge must be positive");
    if (spin < 1) throw ValidationError("spin degeneracy must be >= 1");
    if (!(constraint.mass > 0.0)) throw ValidationError("mass constraint must be positive");
    if (!(grid.r_min > 0.0) || !(grid.r_max > grid.r_min) || grid.points < 16)
        throw ValidationError("radial grid needs 0 < r_min < r_max and >= 16 points");
}

std::vector<double> newton_potential(const RadialDensity& f) {
    const auto& g = f.grid;
    const std::size_t n = g.points;
    std::vector<double> inner(n), outer(n), phi(n);
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.node(i);
        const double dm = 4.0 * kPi * r * r * f.values[i] * g.weight(i);
        inner[i] = q + 0.5 * dm;
        q += dm;
    }
    double tail = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const double r = g.node(i);
        const double dt = 4.0 * kPi * r * f.values[i] * g.weight(i);
        outer[i] = tail + 0.5 * dt;
        tail += dt;
    }
    for (std::size_t i = 0; i < n; ++i) phi[i] = inner[i] / g.node(i) + outer[i];
    return phi;
}

TFEnergy atomic_energy(const RadialDensity& f, const AtomicProblem& problem) {
    problem.validate();
    const auto measure = radial_measure(f.grid);
    const double K = kcl(3, problem.spin);
    TFEnergy e;
    std::vector<double> phi;
    if (problem.repulsion) phi = newton_potential(f);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double v = f.values[i];
        if (v == 0.0) continue;
        e.kinetic += K * std::pow(v, 5.0 / 3.0) * measure[i];
        e.external += -problem.charge / f.grid.node(i) * v * measure[i];
        if (problem.repulsion) e.interaction += 0.5 * phi[i] * v * measure[i];
    }
    e.total = e.kinetic + e.external + e.interaction;
    return e;
}

AtomicSolution tf_minimize_atomic(const AtomicProblem& problem, double tol, const TFOptions& options) {
    problem.validate();
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (!(options.damping > 0.0 && options.damping <= 1.0)) throw ValidationError("damping must lie in (0, 1]");
    const auto& g = problem.grid;
    const auto measure = radial_measure(g);
    const double c = (5.0 / 3.0) * kcl(3, problem.spin);
    std::vector<double> V(g.points);
    for (std::size_t i = 0; i < g.points; ++i) V[i] = -problem.charge / g.node(i);

    auto residual_of = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double r = g.node(i);
            worst = std::max(worst, 4.0 * kPi * r * r * r * std::abs(a[i] - b[i]));
        }
        return worst;
    };

    double damping = problem.repulsion ? options.damping : 1.0;
    std::vector<double> f = solve_mu(V, measure, c, 3.0, problem.constraint).density;
    double previous = kInfinity;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        std::vector<double> W = V;
        if (problem.repulsion) {
            const auto phi = newton_potential(RadialDensity{g, f});
            for (std::size_t i = 0; i < W.size(); ++i) W[i] += phi[i];
        }
        auto next = solve_mu(W, measure, c, 3.0, problem.constraint);
        const double residual = residual_of(next.density, f);
        if (residual <= tol) {
            AtomicSolution s;
            s.density = RadialDensity{g, std::move(next.density)};
            s.energy = atomic_energy(s.density, problem);
            s.mu = next.mu;
            s.iterations = it;
            s.residual = residual;
            s.unsaturated = next.unsaturated;
            return s;
        }
        if (residual > 1.5 * previous) damping = std::max(1e-3, 0.5 * damping);
        previous = residual;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += damping * (next.density[i] - f[i]);
    }
    throw NonConvergence("atomic TF iteration did not converge", previous);
}

namespace {

using ShotState = std::array<double, 2>;

// +1: phi crosses zero (slope too steep); -1: phi turns upward (slope too shallow); 0: undecided.
int shoot(double slope, const ShootOptions& o, AtomShot* record) {
    boost::numeric::odeint::runge_kutta4<ShotState> stepper;
    auto rhs = [](const ShotState& s, ShotState& ds, double t) {
        const double phi = std::max(s[0], 0.0);
        ds[0] = 2.0 * t * s[1];
        ds[1] = 2.0 * phi * std::sqrt(phi);
    };
    ShotState s{1.0, -slope};
    double t = 0.0;
    std::size_t step = 0;
    if (record) {
        record->x.assign(1, 0.0);
        record->phi.assign(1, 1.0);
    }
    while (t < o.t_max) {
        stepper.do_step(rhs, s, t, o.step);
        t += o.step;
        ++step;
        if (s[0] <= 0.0) return 1;
        if (s[1] >= 0.0) return -1;
        if (record && step % o.sample_stride == 0) {
            record->x.push_back(t * t);
            record->phi.push_back(s[0]);
        }
    }
    return 0;
}

}  // namespace

AtomShot tf_atom_shoot(double tol, const ShootOptions& options) {
    if (!(tol > 0.0)) throw ValidationError("shooting tolerance must be positive");
    if (!(options.step > 0.0) || !(options.t_max > 0.0) || options.sample_stride == 0)
        throw ValidationError("shooting step, range and stride must be positive");
    double lo = options.lower, hi = options.upper;
    if (!(lo < hi)) throw ValidationError("shooting bracket must satisfy lower < upper");
    if (shoot(lo, options, nullptr) != -1 || shoot(hi, options, nullptr) != 1)
        throw ShootingError("initial slope bracket does not enclose the decaying solution");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const int c = shoot(mid, options, nullptr);
        if (c > 0)
            hi = mid;
        else if (c < 0)
            lo = mid;
        else {
            lo = hi = mid;
            break;
        }
    }
    AtomShot out;
    out.slope = 0.5 * (lo + hi);
    shoot(out.slope, options, &out);
    return out;
}

double atomic_energy_from_slope(double charge, int spin, double slope) {
    const double a1 = (5.0 / 3.0) * kcl(3, spin) * std::pow(4.0 * kPi, -2.0 / 3.0);
    return -(3.0 / 7.0) * std::pow(charge, 7.0 / 3.0) * slope / a1;
}

double relaxed_constraint_gap(const TFProblem& problem, std::span<const GridDensity> gs, double ell, double distance,
                              std::size_t bump_cells) {
    problem.validate();
    if (gs.empty()) throw ValidationError("relaxed_constraint_gap needs at least one density");
    if (!(ell > 0.0) || !(distance >= 0.0)) throw ValidationError("bump needs ell > 0 and distance >= 0");
    const int d = problem.dimension;
    const double target = problem.constraint.mass;
    const double radius = 1.0 / ell;

    // Bump grid centered at distance * e_1; coarser per axis in higher dimensions.
    std::size_t cells = bump_cells;
    if (d == 2) cells = std::min<std::size_t>(cells, 128);
    if (d >= 3) cells = std::min<std::size_t>(cells, 32);
    GridSpec bump_grid = GridSpec::box(d, -radius, radius, cells);
    bump_grid.origin[0] += distance;
    const auto shape = GridField::sample(bump_grid, [&](std::span<const double> x) {
        double r2 = (x[0] - distance) * (x[0] - distance);
        for (int a = 1; a < d; ++a) r2 += x[a] * x[a];
        const double t = 1.0 - r2 * ell * ell;
        return t > 0.0 ? t * t : 0.0;
    });
    const double shape_mass = integrate(shape);

    double best = kInfinity;
    for (const auto& g : gs) {
        if (g.dimension() != d) throw DimensionMismatch("density and problem dimensions differ");
        const double deficit = target - mass(g);
        if (deficit < -1e-12 * target) throw ValidationError("density exceeds the mass constraint");
        if (deficit <= 1e-12 * target) {
            best = std::min(best, 0.0);
            continue;
        }
        for (int a = 0; a < d; ++a) {
            const bool disjoint = g.grid().upper(a) <= bump_grid.origin[a] || bump_grid.upper(a) <= g.grid().origin[a];
            if (disjoint) break;
            if (a == d - 1) throw ValidationError("bump overlaps the density; increase the distance");
        }
        std::vector<double> values = shape.values;
        for (double& v : values) v *= deficit / shape_mass;
        GridDensity bump(bump_grid, std::move(values));

        const auto alone = tf_energy(bump, problem);
        double cross = 0.0;
        if (!problem.interaction.is_zero()) {
            const double w_support = problem.interaction.support();
            const double vg = g.grid().cell_volume(), vb = bump_grid.cell_volume();
            for (std::size_t i = 0; i < g.values().size(); ++i) {
                if (g.values()[i] == 0.0) continue;
                const auto x = g.grid().center_of(i);
                for (std::size_t j = 0; j < bump.values().size(); ++j) {
                    if (bump.values()[j] == 0.0) continue;
                    const auto y = bump_grid.center_of(j);
                    double r2 = 0.0;
                    for (int a = 0; a < d; ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
                    const double r = std::sqrt(r2);
                    if (r >= w_support) continue;
                    cross += g.values()[i] * bump.values()[j] * problem.interaction(r) * vg * vb;
                }
            }
        }
        best = std::min(best, alone.total + cross);
    }
    return best;
}

double convexity_margin(const GridDensity& g1, const GridDensity& g2, const TFProblem& problem) {
    if (!same_grid(g1.grid(), g2.grid())) throw DimensionMismatch("convexity_margin needs densities on one grid");
    std::vector<double> mid(g1.values().size());
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (g1.values()[i] + g2.values()[i]);
    const GridDensity m(g1.grid(), std::move(mid));
    return 0.5 * tf_energy(g1, problem).total + 0.5 * tf_energy(g2, problem).total - tf_energy(m, problem).total;
}

double convexity_margin(const RadialDensity& g1, const RadialDensity& g2, const AtomicProblem& problem) {
    if (g1.grid.points != g2.grid.points || g1.grid.r_min != g2.grid.r_min || g1.grid.r_max != g2.grid.r_max)
        throw DimensionMismatch("convexity_margin needs densities on one radial grid");
    RadialDensity m{g1.grid, std::vector<double>(g1.values.size())};
    for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = 0.5 * (g1.values[i] + g2.values[i]);
    return 0.5 * atomic_energy(g1, problem).total + 0.5 * atomic_energy(g2, problem).total -
           atomic_energy(m, problem).total;
}

}  // namespace tfgamma
