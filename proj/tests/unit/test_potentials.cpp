#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tfgamma/errors.hpp"
#include "tfgamma/potentials.hpp"

using namespace tfgamma;
constexpr double kPi = std::numbers::pi;

namespace {

// Monte Carlo overlap of two radius-r balls at distance s, sampled in the bounding box of the first.
double overlap_mc(double r, double s, int d, std::size_t samples) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-r, r);
    std::size_t hits = 0;
    for (std::size_t n = 0; n < samples; ++n) {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < d; ++i) {
            const double x = u(rng);
            a += x * x;
            const double y = i == 0 ? x - s : x;
            b += y * y;
        }
        hits += (a < r * r && b < r * r) ? 1 : 0;
    }
    return std::pow(2.0 * r, d) * static_cast<double>(hits) / static_cast<double>(samples);
}

GridField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto f = GridField::zeros(g);
    for (auto& v : f.values) v = u(rng);
    return f;
}

double brute_pair(const GridField& a, const GridField& b, const RadialKernel& w) {
    const auto& g = a.grid;
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.center_of(i);
        for (std::size_t j = 0; j < g.size(); ++j) {
            const auto y = g.center_of(j);
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
            sum += a.values[i] * b.values[j] * w.grid_value(std::sqrt(s), g.spacing);
        }
    }
    return sum * g.cell_volume() * g.cell_volume();
}

}  // namespace

TEST_CASE("kernels") {
    const auto c = coulomb_kernel(2.0);
    CHECK(c(4.0) == doctest::Approx(0.5));
    CHECK(c.singular_at_origin());
    CHECK(c.grid_value(0.0, 0.2) == doctest::Approx(20.0));
    CHECK(c.grid_value(1.0, 0.2) == doctest::Approx(2.0));
    const auto w = piecewise_constant_kernel({{0.0, 1.0, 1.0}, {1.0, 2.0, 0.5}});
    CHECK(w(0.0) == 1.0);
    CHECK(w(0.999) == 1.0);
    CHECK(w(1.0) == 0.5);
    CHECK(w(2.0) == 0.0);
    CHECK(w.support() == doctest::Approx(2.0));
    CHECK(w.shells() != nullptr);
    CHECK(w.scaled(2.0)(1.5) == doctest::Approx(1.0));
    CHECK(zero_kernel().is_zero());
    CHECK_THROWS_AS(piecewise_constant_kernel({{1.0, 0.5, 1.0}}), ValidationError);
}

TEST_CASE("kernels from JSON") {
    CHECK(kernel_from_json({{"type", "zero"}}).is_zero());
    CHECK(kernel_from_json({{"type", "builtin"}, {"name", "coulomb3d"}})(2.0) == doctest::Approx(0.5));
    const auto w = kernel_from_json(nlohmann::json::parse(R"({"type":"piecewise_constant_radial","shells":[{"rMin":0,"rMax":1,"value":3}]})"));
    CHECK(w(0.5) == 3.0);
    CHECK_THROWS_AS(kernel_from_json({{"type", "yukawa"}}), ValidationError);
    CHECK_THROWS_AS(kernel_from_json({{"type", "piecewise_constant_radial"}}), ValidationError);
}

TEST_CASE("ball overlap volumes against Monte Carlo") {
    for (int d : {1, 2, 3}) {
        for (double s : {0.0, 0.3, 1.1, 1.9}) {
            const double exact = ball_self_convolution(1.0, s, d);
            CHECK(exact == doctest::Approx(overlap_mc(1.0, s, d, 400000)).epsilon(0.01));
        }
        CHECK(ball_self_convolution(1.0, 2.0, d) == doctest::Approx(0.0));
        CHECK(ball_self_convolution(1.0, 5.0, d) == 0.0);
    }
    CHECK(ball_self_convolution(1.0, 0.0, 3) == doctest::Approx(4.0 * kPi / 3.0));
    CHECK(ball_self_convolution(2.0, 1.0, 2) == doctest::Approx(4.0 * ball_self_convolution(1.0, 0.5, 2)));
}

TEST_CASE("Coulomb ball decomposition reconstructs 1/|x|") {
    const auto chi = coulomb_chi(3);
    for (double x : {0.1, 0.5, 1.0, 4.0, 10.0})
        CHECK(std::abs(fdll_reconstruct(chi, x, 1e-10) * x - 1.0) <= 1e-6);
    CHECK(chi.value(1.0, 0.5) == doctest::Approx(1.0 / std::sqrt(kPi)));
    CHECK(chi.value(1.0, 1.5) == 0.0);
    CHECK_THROWS_AS(coulomb_chi(2), UnsupportedDimension);
    CHECK_THROWS_AS(fdll_reconstruct(chi, 0.0), ValidationError);
    CHECK(fdll_reconstruct(zero_chi(3), 1.0) == 0.0);
}

TEST_CASE("ball families reject negative amplitudes") {
    CHECK_THROWS_AS(ball_family(1, [](double) { return -1.0; }, [](double r) { return r; },
                                [](double s) { return s / 2; }, 1.0, "bad"),
                    ValidationError);
}

TEST_CASE("convolution matches a direct sum") {
    for (int d : {1, 2}) {
        const auto g = GridSpec::box(d, 0.0, 1.0, d == 1 ? 40 : 12);
        const auto f = random_field(g, 3);
        // shell edges off the lattice of cell offsets
        const auto w = piecewise_constant_kernel({{0.0, 0.23, 1.0}, {0.23, 0.41, -0.5}});
        const auto c = convolve(f, w);
        for (std::size_t i = 0; i < g.size(); i += 7) {
            const auto x = g.center_of(i);
            double s = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                const auto y = g.center_of(j);
                double r = 0.0;
                for (int a = 0; a < d; ++a) r += (x[a] - y[a]) * (x[a] - y[a]);
                s += f.values[j] * w(std::sqrt(r));
            }
            CHECK(c.values[i] == doctest::Approx(s * g.cell_volume()).epsilon(1e-12));
        }
        const auto padded = convolve(f, w, true);
        CHECK(padded.grid.extents[0] > g.extents[0]);
        // with full padding the convolution carries int f times the discrete kernel mass
        double kernel_mass = 0.0;
        const int m = 20;
        for (int i = -m; i <= m; ++i)
            for (int j = (d == 1 ? 0 : -m); j <= (d == 1 ? 0 : m); ++j)
                kernel_mass += w(g.spacing * std::sqrt(double(i * i + j * j)));
        kernel_mass *= g.cell_volume();
        CHECK(integrate(padded) == doctest::Approx(integrate(f) * kernel_mass).epsilon(1e-11));
    }
}

TEST_CASE("pair interaction paths agree with brute force") {
    const auto w = piecewise_constant_kernel({{0.0, 0.17, 1.0}, {0.17, 0.43, 0.25}});
    const auto coul = coulomb_kernel();
    for (int d : {1, 2, 3}) {
        const auto g = GridSpec::box(d, 0.0, 1.0, d == 1 ? 50 : (d == 2 ? 10 : 5));
        const auto a = random_field(g, 5);
        const auto b = random_field(g, 6);
        CHECK(pair_interaction(a, b, w) == doctest::Approx(brute_pair(a, b, w)).epsilon(1e-11));
        CHECK(pair_interaction(a, b, coul) == doctest::Approx(brute_pair(a, b, coul)).epsilon(1e-11));
        CHECK(pair_interaction(a, b, w) == doctest::Approx(pair_interaction(b, a, w)).epsilon(1e-12));
    }
    // shells ending exactly on a cell offset: the offset belongs to the shell it starts
    const auto g = GridSpec::box(1, 0.0, 1.0, 20);
    const auto edge = piecewise_constant_kernel({{0.0, 0.1, 1.0}, {0.1, 0.25, 2.0}});
    const auto a = random_field(g, 8);
    double brute = 0.0;
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j) {
            const long off = std::labs(static_cast<long>(i) - static_cast<long>(j));
            brute += a.values[i] * a.values[j] * (off < 2 ? 1.0 : (off < 5 ? 2.0 : 0.0));
        }
    CHECK(pair_interaction(a, a, edge) == doctest::Approx(brute * g.spacing * g.spacing).epsilon(1e-12));
}

TEST_CASE("sampled potentials") {
    const auto g = GridSpec::box(3, -1.0, 1.0, 4);
    const auto v = sample_potential(coulomb_kernel(), g, Point{0.0, 0.0, 0.0});
    const auto x = g.center_of(0);
    CHECK(v.values[0] == doctest::Approx(1.0 / std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])));
    const auto q = sample_potential([](std::span<const double> p) { return p[0]; }, g);
    CHECK(q.values[0] == doctest::Approx(x[0]));
}
