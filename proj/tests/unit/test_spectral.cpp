#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "tfgamma/errors.hpp"
#include "tfgamma/spectral.hpp"
#include "tfgamma/tf.hpp"

using namespace tfgamma;
constexpr double kPi = std::numbers::pi;

namespace {

// Dense finite-difference matrix of -h^2 Laplacian - U with Dirichlet boundary.
Eigen::VectorXd dense_eigenvalues(const SchrodingerGrid& g, double h) {
    const std::size_t n = g.n;
    const std::size_t total = g.dimension == 1 ? n : n * n;
    const double t = h * h / (g.step() * g.step());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
    for (std::size_t i = 0; i < total; ++i) {
        A(i, i) = 2.0 * t * g.dimension - g.potential[i];
        if (g.dimension == 1) {
            if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = -t;
        } else {
            const std::size_t r = i / n, c = i % n;
            if (c + 1 < n) A(i, i + 1) = A(i + 1, i) = -t;
            if (r + 1 < n) A(i, i + n) = A(i + n, i) = -t;
        }
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("Sturm counts match a dense eigensolve") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 30 + trial;
        std::vector<double> diag(n), off(n - 1);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) A(i, i) = diag[i] = u(rng);
        for (std::size_t i = 0; i + 1 < n; ++i) A(i, i + 1) = A(i + 1, i) = off[i] = u(rng);
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
        for (double x : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
            std::size_t below = 0;
            for (Eigen::Index i = 0; i < ev.size(); ++i) below += ev[i] < x ? 1 : 0;
            CHECK(sturm_count(diag, off, x) == below);
        }
    }
    std::vector<double> d3(3), o1(1);
    CHECK_THROWS_AS(sturm_count(d3, o1, 0.0), SizeError);
}

TEST_CASE("negative eigenvalues agree with the dense oracle") {
    for (int d : {1, 2}) {
        const auto U = parabolic_well(d, 1.0);
        const auto g = SchrodingerGrid::sample(U, -1.5, 1.5, d == 1 ? 120 : 24);
        const double h = 0.15;
        const auto mine = negative_eigenvalues(g, h);
        const auto ev = dense_eigenvalues(g, h);
        std::size_t count = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) count += ev[i] < 0.0 ? 1 : 0;
        REQUIRE(mine.size() == count);
        REQUIRE(count > 0);
        for (std::size_t i = 0; i < count; ++i) CHECK(mine[i] == doctest::Approx(ev[static_cast<Eigen::Index>(i)]).epsilon(1e-9));
    }
}

TEST_CASE("wells") {
    const auto U = parabolic_well(2, 3.0);
    CHECK(U(std::vector<double>{0.0, 0.0}) == 3.0);
    CHECK(U(std::vector<double>{0.6, 0.8}) == doctest::Approx(0.0));
    CHECK(U(std::vector<double>{2.0, 0.0}) == 0.0);
    CHECK(square_well(1, 2.0, 0.5)(std::vector<double>{0.4}) == 2.0);
    CHECK(zero_well(3).is_zero());
    CHECK(well_from_json({{"type", "square"}, {"depth", 1.0}, {"radius", 2.0}}, 1).support_radius == 2.0);
    CHECK_THROWS_AS(well_from_json({{"type", "gaussian"}}, 1), ValidationError);
    CHECK_THROWS_AS(parabolic_well(1, -1.0), ValidationError);
    SchrodingerGrid small;
    small.n = 8;
    small.potential.assign(8, 0.0);
    CHECK_THROWS_AS(small.validate(), ValidationError);
}

TEST_CASE("zero well has no bound states") {
    const auto s = negative_sum(zero_well(1), 0.1);
    CHECK(s.value == 0.0);
    CHECK(s.count == 0);
    CHECK(weyl_term(zero_well(2)) == 0.0);
}

TEST_CASE("semiclassical term") {
    CHECK(weyl_constant(1) == doctest::Approx(1.0 / (1.5 * kPi)));
    CHECK(weyl_constant(3) == doctest::Approx(unit_ball_volume(3) / (std::pow(2.0 * kPi, 3) * 2.5)));
    // -(2/(3 pi)) int_{-1}^{1} (1 - x^2)^{3/2} dx = -(2/(3 pi)) (3 pi / 8)
    CHECK(weyl_term(parabolic_well(1)) == doctest::Approx(-0.25).epsilon(1e-10));
    // homogeneity: U -> c U scales by c^{1 + d/2}
    for (int d : {1, 2, 3})
        CHECK(weyl_term(parabolic_well(d, 4.0)) == doctest::Approx(std::pow(4.0, 1.0 + d / 2.0) * weyl_term(parabolic_well(d))).epsilon(1e-8));
    // square well in d = 3: -|B_3| / (2 pi)^3 / 2.5 * depth^{5/2} * |B_3| R^3
    const double sq = weyl_term(square_well(3, 1.0, 1.0));
    CHECK(sq == doctest::Approx(-weyl_constant(3) * unit_ball_volume(3)).epsilon(1e-6));
}

TEST_CASE("negative sums follow the semiclassical law") {
    const auto U = parabolic_well(1);
    const double w = weyl_term(U);
    const auto a = negative_sum(U, 0.02);
    const auto b = negative_sum(U, 0.01);
    CHECK(a.value * 0.02 / w == doctest::Approx(1.0).epsilon(0.02));
    CHECK(b.value * 0.01 / w == doctest::Approx(1.0).epsilon(0.02));
    CHECK(b.count >= 2 * a.count - 1);
    CHECK_FALSE(b.truncated);
    CHECK(b.boundary_amplitude <= 1e-4);
    // refining the finite-difference grid changes the sum by well under one percent
    SpectralOptions fine;
    fine.resolution = 16.0;
    CHECK(negative_sum(U, 0.02, fine).value == doctest::Approx(a.value).epsilon(0.01));
}

TEST_CASE("a shallow well binds one state") {
    const auto U = square_well(1, 1.0, 0.5);
    const double h = 0.5;
    // even ground state of -h^2 u'' - u on |x| < 1/2: k tan(k/2) = kappa, k^2 + kappa^2 = 1/h^2
    double lo = 0.0, hi = std::min(1.0 / h, kPi - 1e-12);
    for (int it = 0; it < 200; ++it) {
        const double k = 0.5 * (lo + hi);
        const double kappa = std::sqrt(std::max(0.0, 1.0 / (h * h) - k * k));
        (k * std::tan(k / 2.0) > kappa ? hi : lo) = k;
    }
    const double k = 0.5 * (lo + hi);
    const double exact = h * h * k * k - 1.0;
    // point-sampled jumps converge at first order in the node spacing
    double previous = INFINITY;
    for (double resolution : {16.0, 32.0, 64.0, 128.0}) {
        SpectralOptions o;
        o.resolution = resolution;
        const auto s = negative_sum(U, h, o);
        REQUIRE(s.count == 1);
        const double err = std::abs(s.value - exact);
        CHECK(err < 0.7 * previous);
        previous = err;
    }
    CHECK(previous < 0.005 * std::abs(exact));
}

TEST_CASE("dual lower bound is tight at the optimal potential") {
    const auto g = GridSpec::box(1, 0.0, 1.0, 50);
    const auto one = GridDensity::sample(g, [](std::span<const double>) { return 1.0; });
    const double kinetic = kcl(1) * 1.0;
    const auto star = optimal_dual_potential(one);
    CHECK(dual_lower_bound(one, star) == doctest::Approx(kinetic).epsilon(1e-12));
    CHECK(dual_lower_bound(one, star) == doctest::Approx(kPi * kPi / 3.0).epsilon(1e-12));
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto U = GridField::zeros(g);
        for (auto& v : U.values) v = u(rng);
        CHECK(dual_lower_bound(one, U) <= kinetic + 1e-12);
    }
    CHECK_THROWS_AS(dual_lower_bound(one, GridField::zeros(GridSpec::box(1, 0.0, 2.0, 50))), DimensionMismatch);
}

TEST_CASE("convergence table") {
    const std::vector<double> hs{0.1, 0.05};
    const auto rows = weyl_convergence_table(parabolic_well(1), hs, {}, 2);
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(rows[1].ratio - 1.0) < std::abs(rows[0].ratio - 1.0));
    const auto free = weyl_convergence_table(zero_well(1), hs);
    CHECK(free[0].ratio == 1.0);
    const std::vector<double> up{0.05, 0.1};
    CHECK_THROWS_AS(weyl_convergence_table(parabolic_well(1), up), ValidationError);
}

TEST_CASE("Slater determinants lie above the negative sum") {
    const auto U = parabolic_well(1);
    const double h = 0.1;
    const auto bound = negative_sum(U, h);
    for (std::size_t M : {1, 3, 6}) {
        const Cube q{{-1.0}, 2.0};
        std::vector<MultiIndex> modes;
        for (const auto& m : box_spectrum(q, M)) modes.push_back(m.k);
        const FermiSea sea(1, {{q, modes}});
        CHECK(sea_one_body_energy(sea, U, h, resolving_grid(sea, std::nullopt, 16)) >= bound.value);
    }
}
