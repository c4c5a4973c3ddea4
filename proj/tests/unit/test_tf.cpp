#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "tfgamma/errors.hpp"
#include "tfgamma/quadrature.hpp"
#include "tfgamma/tf.hpp"

using namespace tfgamma;
constexpr double kPi = std::numbers::pi;

namespace {

// |B_d| from the recursion |B_d| = (2 pi / d) |B_{d-2}|.
double ball_volume_recursive(int d) {
    if (d == 0) return 1.0;
    if (d == 1) return 2.0;
    return 2.0 * kPi / d * ball_volume_recursive(d - 2);
}

double semicircle(double x) { return x * x < 2.0 ? std::sqrt(2.0 - x * x) / kPi : 0.0; }

// phi'' = phi^{3/2} / sqrt(x) by classical RK4 in x after a series start; returns +1 if phi
// crosses zero (slope too large), -1 if phi' turns nonnegative (slope too small).
int shoot_direction(double B) {
    double x = 1e-4;
    double phi = 1.0 - B * x + (4.0 / 3.0) * std::pow(x, 1.5);
    double dphi = -B + 2.0 * std::sqrt(x);
    auto acc = [](double xx, double p) { return p > 0.0 ? std::pow(p, 1.5) / std::sqrt(xx) : 0.0; };
    while (x < 200.0) {
        const double h = x < 1.0 ? 1e-4 : 1e-3;
        const double k1p = dphi, k1v = acc(x, phi);
        const double k2p = dphi + 0.5 * h * k1v, k2v = acc(x + 0.5 * h, phi + 0.5 * h * k1p);
        const double k3p = dphi + 0.5 * h * k2v, k3v = acc(x + 0.5 * h, phi + 0.5 * h * k2p);
        const double k4p = dphi + h * k3v, k4v = acc(x + h, phi + h * k3p);
        phi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        dphi += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        x += h;
        if (phi < 0.0) return 1;
        if (dphi >= 0.0) return -1;
    }
    return 0;
}

TFProblem harmonic_problem() {
    TFProblem p;
    p.external = harmonic_potential();
    return p;
}

}  // namespace

TEST_CASE("semiclassical constant") {
    for (int d = 1; d <= 5; ++d) {
        CHECK(unit_ball_volume(d) == doctest::Approx(ball_volume_recursive(d)).epsilon(1e-14));
        for (int q = 1; q <= 4; ++q) {
            const double oracle = d / (d + 2.0) * 4.0 * kPi * kPi / std::pow(q * ball_volume_recursive(d), 2.0 / d);
            CHECK(kcl(d, q) == doctest::Approx(oracle).epsilon(1e-14));
        }
    }
    CHECK(kcl(1) == doctest::Approx(kPi * kPi / 3.0));
    CHECK(kcl(3, 2) == doctest::Approx(0.6 * std::pow(3.0 * kPi * kPi, 2.0 / 3.0)));
}

TEST_CASE("energy of simple densities") {
    const auto g = GridSpec::box(1, 0.0, 1.0, 100);
    const auto one = GridDensity::sample(g, [](std::span<const double>) { return 1.0; });
    TFProblem p;
    const auto e = tf_energy(one, p);
    CHECK(e.kinetic == doctest::Approx(kPi * kPi / 3.0));
    CHECK(e.external == 0.0);
    CHECK(e.total == doctest::Approx(e.kinetic + e.external + e.interaction));

    const auto grid = GridSpec::box(1, -2.0, 2.0, 20000);
    const auto sc = GridDensity::sample(grid, [](std::span<const double> x) { return semicircle(x[0]); });
    const auto h = tf_energy(sc, harmonic_problem());
    CHECK(h.kinetic == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(h.external == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("harmonic trap minimizer is the semicircle") {
    const auto grid = GridSpec::box(1, -8.0, 8.0, 4096);
    const auto s = tf_minimize(harmonic_problem(), grid, 1e-10);
    CHECK(s.energy.total == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(s.mu == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(mass(s.density) == doctest::Approx(1.0).epsilon(1e-12));
    const auto exact = GridDensity::sample(grid, [](std::span<const double> x) { return semicircle(x[0]); });
    CHECK(lp_distance(s.density, exact, 1.0) <= 1e-3);
    CHECK(euler_lagrange_residual(s.density, harmonic_problem(), s.mu) <= 1e-8);
    CHECK_FALSE(s.unsaturated);
}

TEST_CASE("free gas in a box is uniform") {
    const auto grid = GridSpec::box(1, 0.0, 2.0, 64);
    TFProblem p;
    const auto s = tf_minimize(p, grid, 1e-12);
    for (double v : s.density.values()) CHECK(v == doctest::Approx(0.5));
    CHECK(s.energy.total == doctest::Approx(kcl(1) / 4.0));
}

TEST_CASE("inequality constraint") {
    const auto grid = GridSpec::box(1, -3.0, 3.0, 3000);
    TFProblem p;
    p.constraint = {ConstraintKind::AtMost, 1.0};
    const auto zero = tf_minimize(p, grid, 1e-10);
    CHECK(zero.unsaturated);
    CHECK(mass(zero.density) == 0.0);
    CHECK(zero.energy.total == 0.0);

    // V = x^2 - 1: the unconstrained minimizer sqrt(1 - x^2)/pi has mass 1/2
    p.external.function = [](std::span<const double> x) { return x[0] * x[0] - 1.0; };
    p.external.name = "shifted harmonic";
    const auto half = tf_minimize(p, grid, 1e-10);
    CHECK(half.unsaturated);
    CHECK(half.mu == 0.0);
    CHECK(mass(half.density) == doctest::Approx(0.5).epsilon(1e-4));
    p.constraint.mass = 0.3;
    const auto tight = tf_minimize(p, grid, 1e-10);
    CHECK_FALSE(tight.unsaturated);
    CHECK(tight.mu < 0.0);
    CHECK(mass(tight.density) == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("interacting minimizer: chemical potential grows with mass and perturbations cost energy") {
    const auto grid = GridSpec::box(1, -5.0, 5.0, 512);
    auto p = harmonic_problem();
    p.interaction = piecewise_constant_kernel({{0.0, 1.0, 1.0}, {1.0, 2.0, 0.5}});
    double previous_mu = -INFINITY;
    TFSolution base;
    for (double m : {0.5, 1.0, 2.0}) {
        p.constraint.mass = m;
        const auto s = tf_minimize(p, grid, 1e-11);
        CHECK(s.mu > previous_mu);
        CHECK(euler_lagrange_residual(s.density, p, s.mu) <= 1e-9);
        previous_mu = s.mu;
        if (m == 1.0) base = s;
    }
    p.constraint.mass = 1.0;
    std::mt19937 rng(9);
    std::uniform_int_distribution<std::size_t> cell(0, grid.size() - 1);
    for (int trial = 0; trial < 20; ++trial) {
        auto v = base.density.values();
        const std::size_t i = cell(rng), j = cell(rng);
        const double move = 0.5 * v[i] * 0.1;
        v[i] -= move;
        v[j] += move;
        const GridDensity moved(grid, v);
        CHECK(tf_energy(moved, p).total >= base.energy.total - 1e-12);
    }
}

TEST_CASE("tf_minimize input validation") {
    const auto grid = GridSpec::box(1, -1.0, 1.0, 16);
    auto p = harmonic_problem();
    CHECK_THROWS_AS(tf_minimize(p, grid, 0.0), ValidationError);
    TFOptions bad;
    bad.damping = 1.5;
    CHECK_THROWS_AS(tf_minimize(p, grid, 1e-8, bad), ValidationError);
    CHECK_THROWS_AS(tf_minimize(p, GridSpec::box(2, -1.0, 1.0, 4), 1e-8), DimensionMismatch);
    p.constraint.mass = -1.0;
    CHECK_THROWS_AS(tf_minimize(p, grid, 1e-8), ValidationError);
    auto q = harmonic_problem();
    q.interaction = piecewise_constant_kernel({{0.0, 2.0, 50.0}});
    TFOptions few;
    few.max_iterations = 3;
    CHECK_THROWS_AS(tf_minimize(q, GridSpec::box(1, -6.0, 6.0, 256), 1e-12, few), NonConvergence);
}

TEST_CASE("external potentials from JSON") {
    const auto h = external_from_json({{"type", "harmonic"}, {"strength", 2.0}}, 2);
    const auto g = GridSpec::box(2, 0.0, 1.0, 2);
    CHECK(h.sample(g).values[0] == doctest::Approx(2.0 * (0.0625 + 0.0625)));
    CHECK(external_from_json({{"type", "zero"}}, 1).is_zero());
    CHECK_THROWS_AS(external_from_json({{"type", "coulomb"}, {"charge", 1.0}}, 2), UnsupportedDimension);
    CHECK_THROWS_AS(external_from_json({{"type", "quartic"}}, 1), ValidationError);
}

TEST_CASE("screening function slope") {
    const auto shot = tf_atom_shoot(1e-9);
    // independent bisection with a different integrator
    double lo = 1.5, hi = 1.7;
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (shoot_direction(mid) > 0 ? hi : lo) = mid;
    }
    CHECK(shot.slope == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-5));
    CHECK(std::abs(shot.slope - 1.588071) <= 1e-4);
    REQUIRE(shot.x.size() > 10);
    CHECK(shot.phi.front() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < shot.phi.size(); ++i) {
        CHECK(shot.phi[i] > 0.0);
        CHECK(shot.phi[i] < shot.phi[i - 1]);
    }
    CHECK(std::abs(tf_atom_shoot(1e-3).slope - shot.slope) <= 1e-3);
    ShootOptions wrong;
    wrong.lower = 1.0;
    wrong.upper = 1.1;
    CHECK_THROWS_AS(tf_atom_shoot(1e-6, wrong), ShootingError);
}

TEST_CASE("Newton potential of a uniform ball") {
    const RadialGrid grid{1e-5, 4.0, 4000};
    const auto f = RadialDensity::sample(grid, [](double r) { return r < 1.0 ? 3.0 / (4.0 * kPi) : 0.0; });
    const auto phi = newton_potential(f);
    for (std::size_t i = 0; i < grid.points; i += 400) {
        const double r = grid.node(i);
        const double exact = r < 1.0 ? (3.0 - r * r) / 2.0 : 1.0 / r;
        CHECK(phi[i] == doctest::Approx(exact).epsilon(5e-3));
    }
}

TEST_CASE("radial atoms follow the Z^(7/3) law") {
    const double B = tf_atom_shoot(1e-9).slope;
    std::vector<double> scaled;
    for (double Z : {1.0, 3.0}) {
        AtomicProblem p;
        p.charge = Z;
        p.constraint.mass = Z;
        p.grid = RadialGrid{1e-6, 500.0, 4000}.scaled(std::pow(Z, -1.0 / 3.0));
        const auto s = tf_minimize_atomic(p, 1e-8);
        CHECK(s.energy.total == doctest::Approx(atomic_energy_from_slope(Z, 2, B)).epsilon(0.01));
        CHECK(s.density.mass() == doctest::Approx(Z).epsilon(0.01));
        CHECK(s.mu == 0.0);
        scaled.push_back(s.energy.total / std::pow(Z, 7.0 / 3.0));
    }
    CHECK(scaled[0] == doctest::Approx(scaled[1]).epsilon(0.005));
    // an ion with fewer electrons than the charge has a negative chemical potential
    AtomicProblem ion;
    ion.constraint = {ConstraintKind::Equal, 0.5};
    const auto s = tf_minimize_atomic(ion, 1e-8);
    CHECK(s.mu < 0.0);
    CHECK(s.density.mass() == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("relaxed constraint gap from a far bump") {
    const auto g = GridSpec::box(1, 0.0, 1.0, 32);
    const std::vector<GridDensity> gs{GridDensity::sample(g, [](std::span<const double>) { return 0.9; })};
    TFProblem p;  // V = 0, w = 0: the gap is the bump's kinetic energy
    const double I6 = integrate_adaptive([](double u) { return std::pow(1.0 - u * u, 6); }, -1.0, 1.0, 1e-12);
    double previous = INFINITY;
    for (double ell : {1.0, 0.5, 0.25}) {
        const double gap = relaxed_constraint_gap(p, gs, ell, 10.0 / ell);
        const double oracle = kcl(1) * std::pow(0.1, 3) * ell * ell * I6 / std::pow(16.0 / 15.0, 3);
        CHECK(gap == doctest::Approx(oracle).epsilon(1e-3));
        CHECK(gap < previous);
        previous = gap;
    }
    const std::vector<GridDensity> full{GridDensity::sample(g, [](std::span<const double>) { return 1.0; })};
    CHECK(relaxed_constraint_gap(p, full, 1.0, 10.0) == 0.0);
    CHECK_THROWS_AS(relaxed_constraint_gap(p, gs, 1.0, 0.5), ValidationError);
}

TEST_CASE("convexity margins") {
    const auto g = GridSpec::box(1, 0.0, 1.0, 64);
    const auto g1 = GridDensity::sample(g, [](std::span<const double>) { return 1.0; });
    const auto g2 = GridDensity::sample(g, [](std::span<const double> x) { return x[0] < 0.5 ? 2.0 : 0.0; });
    TFProblem p;
    // 1/2 (pi^2/3 + 4 pi^2/3) - 7 pi^2/12
    CHECK(convexity_margin(g1, g2, p) == doctest::Approx(kPi * kPi / 4.0));
    CHECK(convexity_margin(g1, g1, p) == doctest::Approx(0.0).scale(1.0));

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    p.interaction = piecewise_constant_kernel({{0.0, 0.2, 1.0}});
    p.external = harmonic_potential();
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(g.size()), b(g.size());
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        CHECK(convexity_margin(GridDensity(g, a), GridDensity(g, b), p) >= 0.0);
    }

    const RadialGrid rg{1e-4, 20.0, 2000};
    const auto gauss = [&](double s) {
        return RadialDensity::sample(rg, [s](double r) { return std::pow(2.0 * kPi * s * s, -1.5) * std::exp(-0.5 * r * r / (s * s)); });
    };
    AtomicProblem atom;
    atom.grid = rg;
    CHECK(convexity_margin(gauss(1.0), gauss(2.0), atom) > 0.0);
}
