// One line per acceptance criterion; exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tfgamma/bounds.hpp"
#include "tfgamma/experiments.hpp"
#include "tfgamma/fermi_box.hpp"
#include "tfgamma/potentials.hpp"
#include "tfgamma/spectral.hpp"
#include "tfgamma/tf.hpp"

using namespace tfgamma;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

RunContext quiet() {
    RunContext c;
    c.quiet = true;
    c.workers = 4;
    return c;
}

Outcome box_kinetic_limit() {
    Outcome o;
    const std::size_t M = 1000;
    std::vector<MultiIndex> modes;
    for (const auto& m : box_spectrum(Cube{{0.0}, 1.0}, M)) modes.push_back(m.k);
    const FermiSea sea(1, {{Cube{{0.0}, 1.0}, modes}});
    const double m = static_cast<double>(M);
    const double value = sea_kinetic(sea) / (m * m * m);
    const double closed = kPi * kPi * m * (m + 1) * (2 * m + 1) / (6 * m * m * m);
    o.require(std::abs(value - closed) <= 1e-12 * closed, "closed form " + fmt(value) + " vs " + fmt(closed));
    o.require(std::abs(value / (kPi * kPi / 3.0) - 1.0) <= 0.005, "relative to pi^2/3: " + fmt(value / (kPi * kPi / 3.0)));
    return o;
}

Outcome recovery_density() {
    Outcome o;
    const auto grid = GridSpec::box(1, 0.0, 1.0, 10000);
    const auto f = GridDensity::sample(grid, [](std::span<const double>) { return 1.0; });
    const auto rec = build_recovery(f, 200, 1);
    const auto rho = sea_density(rec.sea, grid).scaled(1.0 / 200.0);
    const double l1 = lp_distance(rho, f, 1.0);
    o.require(l1 <= 0.02, "L1 = " + fmt(l1));
    return o;
}

Outcome harmonic_gse() {
    Outcome o;
    const auto g = run_gse_experiment(Config::parse("potential = {\"type\": \"harmonic\"}\nN_list = [1, 10, 100, 1000, 10000]\n"
                                                    "grid = {\"lo\": -8, \"hi\": 8, \"cells\": 4096}\n"),
                                      quiet());
    double worst = 0.0;
    for (const auto& row : g.rows) worst = std::max(worst, std::abs(row.quantum - 1.0));
    o.require(worst <= 1e-12, "max |E_N/N - 1| = " + fmt(worst));
    o.require(std::abs(g.tf.energy.total - 1.0) <= 1e-4, "TF energy " + fmt(g.tf.energy.total));
    const auto& grid = g.tf.density.grid();
    const auto exact = GridDensity::sample(grid, [](std::span<const double> x) {
        return x[0] * x[0] < 2.0 ? std::sqrt(2.0 - x[0] * x[0]) / kPi : 0.0;
    });
    const double l1 = lp_distance(g.tf.density, exact, 1.0);
    o.require(l1 <= 1e-3, "minimizer L1 = " + fmt(l1));
    return o;
}

Outcome coulomb_reconstruction() {
    Outcome o;
    const auto chi = coulomb_chi(3);
    double worst = 0.0;
    for (double x : {0.1, 0.5, 1.0, 4.0, 10.0}) worst = std::max(worst, std::abs(fdll_reconstruct(chi, x, 1e-10) * x - 1.0));
    o.require(worst <= 1e-6, "max relative error " + fmt(worst));
    return o;
}

Outcome weyl_law() {
    Outcome o;
    const std::vector<double> hs{1e-1, 1e-2, 1e-3};
    const auto rows = weyl_convergence_table(parabolic_well(1), hs, {}, 3);
    std::string ratios;
    for (const auto& r : rows) ratios += (ratios.empty() ? "" : ", ") + fmt(r.ratio);
    o.require(std::abs(rows.back().weyl * 1e-3 + 0.25) <= 1e-9, "Weyl term -1/(4h)");
    o.require(std::abs(rows.back().ratio - 1.0) <= 0.02, "ratios " + ratios);
    o.require(std::abs(rows.back().ratio - 1.0) < std::abs(rows.front().ratio - 1.0), "approaching 1");
    o.require(!rows.back().truncated, "no truncation");
    return o;
}

Outcome legendre_duality() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> level(0.0, 2.0), potential(0.0, 10.0);
    double worst_gap = 0.0, worst_violation = -INFINITY;
    for (int d : {1, 3}) {
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t per_axis = d == 1 ? 40 : 8;
            const auto grid = GridSpec::box(d, 0.0, 1.0, per_axis);
            // random step density on 4 blocks per axis
            std::vector<double> blocks(d == 1 ? 4 : 64);
            for (auto& b : blocks) b = level(rng);
            std::vector<double> values(grid.size());
            std::vector<std::size_t> idx(d);
            for (std::size_t c = 0; c < grid.size(); ++c) {
                grid.unravel(c, idx);
                std::size_t b = 0;
                for (int a = 0; a < d; ++a) b = b * 4 + idx[a] * 4 / per_axis;
                values[c] = blocks[b];
            }
            const auto f = GridDensity(grid, values).normalized();
            const double kinetic = kcl(d) * integrate(GridField(grid, [&] {
                                                auto v = f.values();
                                                for (auto& x : v) x = std::pow(x, 1.0 + 2.0 / d);
                                                return v;
                                            }()));
            const double at_star = dual_lower_bound(f, optimal_dual_potential(f));
            worst_gap = std::max(worst_gap, std::abs(at_star - kinetic) / kinetic);
            for (int u = 0; u < 100; ++u) {
                auto U = GridField::zeros(grid);
                for (auto& x : U.values) x = potential(rng);
                worst_violation = std::max(worst_violation, dual_lower_bound(f, U) - kinetic);
            }
        }
    }
    o.require(worst_gap <= 1e-8, "max relative gap at U* " + fmt(worst_gap));
    o.require(worst_violation <= 1e-12, "max excess over kinetic " + fmt(worst_violation));
    return o;
}

Outcome interaction_channel_limit() {
    Outcome o;
    const RadialGrid grid{1e-4, 12.0, 3000};
    const auto f = RadialDensity::sample(grid, [](double r) { return std::pow(2.0 * kPi, -1.5) * std::exp(-0.5 * r * r); });
    const double hartree = hartree_direct(f);
    const auto chi = coulomb_chi(3);
    std::vector<double> values;
    for (double N : {1e2, 1e3, 1e4}) values.push_back(interaction_channel(f, chi, N, 1.0 / N).value);
    o.require(std::abs(values.back() / hartree - 1.0) <= 0.01, "N = 1e4 ratio " + fmt(values.back() / hartree));
    bool monotone = true;
    for (std::size_t i = 1; i < values.size(); ++i) monotone = monotone && values[i] >= values[i - 1] * (1.0 - 1e-3);
    o.require(monotone, "nondecreasing: " + fmt(values[0]) + ", " + fmt(values[1]) + ", " + fmt(values[2]));
    return o;
}

Outcome inequality_properties() {
    Outcome o;
    double worst_gram = 0.0, worst_ho = INFINITY;
    std::size_t seas = 0;
    auto gaussian = [](int d, std::size_t cells) {
        const auto g = GridSpec::box(d, -4.0, 4.0, cells);
        return GridDensity::sample(g, [](std::span<const double> x) {
                   double s = 0.0;
                   for (double v : x) s += v * v;
                   return std::exp(-0.5 * s);
               }).normalized();
    };
    struct Case {
        int d;
        std::size_t cells;
        std::vector<std::size_t> Ns;
        int k;
    };
    const std::vector<Case> matrix{{1, 1024, {10, 200, 2000}, 4}, {2, 64, {10, 100, 400}, 2}, {3, 16, {1, 2, 4, 8, 30}, 1}};
    for (const auto& c : matrix) {
        const auto f = gaussian(c.d, c.cells);
        for (std::size_t N : c.Ns) {
            const auto rec = build_recovery(f, N, c.k);
            const auto grid = resolving_grid(rec.sea, f.grid());
            worst_gram = std::max(worst_gram, gram_deviation(rec.sea, grid));
            const double kinetic = sea_kinetic(rec.sea);
            worst_ho = std::min(worst_ho, hoffmann_ostenhof_gap(rec.sea, grid) / kinetic);
            ++seas;
        }
    }
    o.require(worst_gram <= 1e-8, "max Gram deviation " + fmt(worst_gram) + " over " + std::to_string(seas) + " seas");
    o.require(worst_ho >= -1e-6, "min HO gap / kinetic " + fmt(worst_ho));

    const auto f3 = gaussian(3, 16);
    const auto w = coulomb_kernel();
    double worst_lo = INFINITY;
    for (std::size_t N : {1, 2, 4, 8}) {
        for (int k : {1, 2}) {
            const auto rec = build_recovery(f3, N, k);
            const auto grid = resolving_grid(rec.sea, f3.grid());
            const auto rho = sea_density(rec.sea, grid);
            const double n = static_cast<double>(N);
            const double lhs = (slater_direct_interaction(rho, w, 1.0) + slater_exchange_interaction(rec.sea, grid, w, 1.0)) / (n * n);
            const double rhs = lieb_oxford_rhs(rho.scaled(1.0 / n), n);
            worst_lo = std::min(worst_lo, lhs - rhs);
        }
    }
    o.require(worst_lo >= 0.0, "min (direct + exchange - LO rhs) / N^2 = " + fmt(worst_lo));
    return o;
}

Outcome atom_oracle() {
    Outcome o;
    const auto report = run_experiment("tf-atom", Config::parse("charges = [1, 2, 4]\nspin = 2\nshoot_tol = 1e-9\n"), quiet());
    const double slope = report.summary.at("slope").get<double>();
    o.require(std::abs(slope - 1.588071) <= 1e-3, "slope " + fmt(slope));
    const auto& rows = report.tables.at(0).rows;  // charge, energy, ode_energy, relative_error, scaled_energy, ...
    o.require(std::abs(rows.at(0).at(3)) <= 0.01, "Z = 1 relative error " + fmt(rows.at(0).at(3)));
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : rows) {
        lo = std::min(lo, r.at(4));
        hi = std::max(hi, r.at(4));
    }
    const double spread = (hi - lo) / std::abs(hi);
    o.require(spread <= 0.005, "E/Z^(7/3) spread " + fmt(spread));
    return o;
}

Outcome gamma_pipeline() {
    Outcome o;
    const auto config = Config::parse(
        "dimension = 1\n"
        "density = {\"type\": \"gaussian\", \"sigma\": 1, \"radius\": 4}\n"
        "cells = 1024\n"
        "potential = {\"type\": \"harmonic\", \"strength\": 1}\n"
        "interaction = {\"type\": \"piecewise_constant_radial\", \"shells\": [{\"rMin\": 0, \"rMax\": 1, \"value\": 1}, "
        "{\"rMin\": 1, \"rMax\": 2, \"value\": 0.5}]}\n"
        "N_list = [200, 2000]\n"
        "ladder = {\"base\": 20, \"growth\": 2}\n");
    const auto g = run_gamma_experiment(config, quiet());
    o.require(!g.failure && g.rows.size() == 2, "both rows computed");
    if (g.rows.size() != 2) return o;
    const auto& a = g.rows[0];
    const auto& b = g.rows[1];
    const double rel = std::abs(b.gap) / std::abs(g.tf.total);
    o.require(rel <= 0.05, "N = 2000 (k = " + std::to_string(b.k) + ") relative gap " + fmt(rel));
    o.require(std::abs(b.gap) < std::abs(a.gap), "gap decreasing " + fmt(a.gap) + " -> " + fmt(b.gap));
    o.require(b.l1_distance < a.l1_distance && b.lp_distance < a.lp_distance, "density distances decreasing");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"box kinetic limit", 1.0, box_kinetic_limit},
        {"recovery density convergence", 10.0, recovery_density},
        {"harmonic ground-state energies", 30.0, harmonic_gse},
        {"Coulomb ball reconstruction", 1.0, coulomb_reconstruction},
        {"Weyl law", 60.0, weyl_law},
        {"Legendre duality", 10.0, legendre_duality},
        {"interaction channel limit", 60.0, interaction_channel_limit},
        {"inequality properties", 120.0, inequality_properties},
        {"TF atom", 120.0, atom_oracle},
        {"recovery upper-bound pipeline", 300.0, gamma_pipeline},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.budget_seconds) {
            o.pass = false;
            o.detail += "; FAILED runtime budget " + fmt(c.budget_seconds) + " s";
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] criterion %zu: %s (%s; %.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
