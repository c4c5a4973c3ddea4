#include "tfgamma/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "tfgamma/bounds.hpp"
#include "tfgamma/errors.hpp"
#include "tfgamma/fermi_box.hpp"
#include "tfgamma/parallel.hpp"
#include "tfgamma/spectral.hpp"

#ifndef TFGAMMA_VERSION
#define TFGAMMA_VERSION "0.0.0"
#endif

namespace tfgamma {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::size_t> particle_list(const Config& config) {
    const auto list = config.get<std::vector<std::size_t>>("N_list");
    if (list.empty()) throw ValidationError("N_list must not be empty");
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i] == 0) throw ValidationError("N_list entries must be >= 1");
        if (i > 0 && list[i] <= list[i - 1]) throw ValidationError("N_list must be increasing");
    }
    return list;
}

double positive(const Config& config, const std::string& key, double fallback) {
    const double v = config.get<double>(key, fallback);
    if (!(v > 0.0)) throw ValidationError("'" + key + "' must be positive");
    return v;
}

GridSpec grid_from_json(const nlohmann::json& spec, int dimension, double lo, double hi, std::size_t cells) {
    try {
        if (!spec.is_null()) {
            lo = spec.value("lo", lo);
            hi = spec.value("hi", hi);
            cells = spec.value("cells", cells);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed grid spec: ") + e.what());
    }
    if (!(hi > lo) || cells == 0) throw ValidationError("grid needs lo < hi and cells >= 1");
    return GridSpec::box(dimension, lo, hi, cells);
}

RadialGrid radial_grid_from_json(const nlohmann::json& spec, RadialGrid g) {
    try {
        if (!spec.is_null()) {
            g.r_min = spec.value("r_min", g.r_min);
            g.r_max = spec.value("r_max", g.r_max);
            g.points = spec.value("points", g.points);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed radial grid spec: ") + e.what());
    }
    if (!(g.r_min > 0.0) || !(g.r_max > g.r_min) || g.points < 16)
        throw ValidationError("radial grid needs 0 < r_min < r_max and >= 16 points");
    return g;
}

nlohmann::json optional(const Config& config, const std::string& key) {
    return config.has(key) ? config.at(key) : nlohmann::json();
}

std::string csv_of(const GridDensity& f) {
    std::ostringstream os;
    write_csv(os, f);
    return os.str();
}

// Lowest `count` eigenvalues of -h^2 d^2/dx^2 + V on the Dirichlet box grid.
std::vector<double> lowest_eigenvalues(const std::vector<double>& V, double spacing, double h, std::size_t count) {
    const double t = h * h / (spacing * spacing);
    std::vector<double> diag(V.size()), off(V.size() - 1, -t);
    double lo = kInfinity, hi = -kInfinity;
    for (std::size_t i = 0; i < V.size(); ++i) {
        diag[i] = 2.0 * t + V[i];
        lo = std::min(lo, diag[i] - 2.0 * t);
        hi = std::max(hi, diag[i] + 2.0 * t);
    }
    if (count > V.size()) throw SizeError("finite-difference grid has fewer nodes than particles");
    std::vector<double> out;
    double floor_bound = lo;
    for (std::size_t j = 0; j < count; ++j) {
        double a = floor_bound, b = hi;
        for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
             ++it) {
            const double mid = 0.5 * (a + b);
            if (sturm_count(diag, off, mid) > j)
                b = mid;
            else
                a = mid;
        }
        out.push_back(0.5 * (a + b));
        floor_bound = a;
    }
    return out;
}

GridDensity refine_to(const GridDensity& f, double spacing) {
    const double ratio = f.spacing() / spacing;
    const auto factor = static_cast<std::size_t>(std::llround(ratio));
    if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9 * ratio)
        throw ValidationError("grids are not nested");
    return factor == 1 ? f : refine(f, factor);
}

Table gamma_table(const GammaReport& g) {
    Table t{"gamma",
            {"N", "k", "cubes", "step_error", "kinetic", "external", "interaction", "total", "tf_energy", "gap",
             "l1_distance", "lp_distance", "h_scaling", "lambda_scaling"},
            {}};
    for (const auto& r : g.rows)
        t.rows.push_back({static_cast<double>(r.particles), static_cast<double>(r.k), static_cast<double>(r.cubes),
                          r.step_error, r.kinetic, r.external, r.interaction, r.total, r.tf_energy, r.gap,
                          r.l1_distance, r.lp_distance, r.h_scaling, r.lambda_scaling});
    return t;
}

Report gamma_report(const Config& config, const RunContext& ctx) {
    const auto g = run_gamma_experiment(config, ctx);
    Report r;
    r.experiment = "gamma";
    r.failure = g.failure;
    r.tables.push_back(gamma_table(g));
    r.summary["tf_energy"] = to_json(g.tf);
    if (!g.rows.empty()) {
        r.summary["final_gap"] = g.rows.back().gap;
        r.summary["final_relative_gap"] = g.rows.back().gap / std::abs(g.tf.total);
    }
    r.summary["rows"] = g.rows.size();
    r.notes.push_back("per-particle energies use h = N^(-1/d) and lambda = 1/N");
    return r;
}

Report gse_report(const Config& config, const RunContext& ctx) {
    const auto g = run_gse_experiment(config, ctx);
    Report r;
    r.experiment = "gse";
    Table t{"gse", {"N", "h", "quantum_per_particle", "tf_energy", "gap"}, {}};
    for (const auto& row : g.rows) t.rows.push_back({static_cast<double>(row.particles), row.h, row.quantum, row.tf, row.gap});
    r.tables.push_back(std::move(t));
    r.summary["method"] = g.method;
    r.summary["tf"] = {{"energy", to_json(g.tf.energy)},
                       {"mu", g.tf.mu},
                       {"iterations", g.tf.iterations},
                       {"residual", g.tf.residual},
                       {"density_ref", "tf_density.csv"}};
    r.files.emplace_back("tf_density.csv", csv_of(g.tf.density));
    r.notes.push_back("quantum reference restricted to non-interacting exactly solvable cases; "
                      "the interacting N-body ground state is not computed");
    return r;
}

Report tf_minimize_report(const Config& config, const RunContext& ctx) {
    config.require_only({"dimension", "spin", "potential", "interaction", "constraint", "grid", "tol", "damping",
                         "max_iterations"});
    TFProblem p;
    p.dimension = config.get<int>("dimension", 1);
    p.spin = config.get<int>("spin", 1);
    p.external = external_from_json(config.get<nlohmann::json>("potential", {{"type", "zero"}}), p.dimension);
    p.interaction = kernel_from_json(config.get<nlohmann::json>("interaction", {{"type", "zero"}}));
    p.constraint = constraint_from_json(optional(config, "constraint"));
    const auto grid = grid_from_json(optional(config, "grid"), p.dimension, -8.0, 8.0, p.dimension == 1 ? 1024 : 32);
    TFOptions opt;
    opt.damping = config.get<double>("damping", opt.damping);
    opt.max_iterations = config.get<std::size_t>("max_iterations", opt.max_iterations);
    ctx.info("tf-minimize on " + std::to_string(grid.size()) + " cells");
    const auto s = tf_minimize(p, grid, positive(config, "tol", 1e-10), opt);
    Report r;
    r.experiment = "tf-minimize";
    r.summary = {{"energy", to_json(s.energy)},
                 {"mu", s.mu},
                 {"iterations", s.iterations},
                 {"residual", s.residual},
                 {"mass", mass(s.density)},
                 {"unsaturated", s.unsaturated},
                 {"density_ref", "density.csv"}};
    if (s.unsaturated) r.notes.push_back("unsaturated constraint: the minimizer carries less than the allowed mass");
    r.files.emplace_back("density.csv", csv_of(s.density));
    return r;
}

Report tf_atom_report(const Config& config, const RunContext& ctx) {
    config.require_only({"shoot_tol", "shoot_step", "bracket", "charges", "spin", "radial_grid", "tol", "damping",
                         "max_iterations", "constraint"});
    ShootOptions so;
    so.step = positive(config, "shoot_step", so.step);
    if (config.has("bracket")) {
        const auto b = config.get<std::vector<double>>("bracket");
        if (b.size() != 2) throw ValidationError("bracket must hold two slopes");
        so.lower = b[0];
        so.upper = b[1];
    }
    const auto shot = tf_atom_shoot(positive(config, "shoot_tol", 1e-9), so);
    ctx.info("initial slope " + format_number(shot.slope));

    const auto charges = config.get<std::vector<double>>("charges", {1.0});
    const int spin = config.get<int>("spin", 2);
    const auto base = radial_grid_from_json(optional(config, "radial_grid"), RadialGrid{1e-6, 500.0, 4000});
    const std::string kind = config.get<std::string>("constraint", "at_most");
    if (kind != "at_most" && kind != "equal") throw ValidationError("constraint must be 'at_most' or 'equal'");
    TFOptions opt;
    opt.damping = config.get<double>("damping", opt.damping);
    opt.max_iterations = config.get<std::size_t>("max_iterations", opt.max_iterations);
    const double tol = positive(config, "tol", 1e-8);

    std::vector<std::vector<double>> rows(charges.size());
    parallel_for(charges.size(), ctx.workers, [&](std::size_t i) {
        const double Z = charges[i];
        AtomicProblem p;
        p.charge = Z;
        p.spin = spin;
        p.constraint = {kind == "equal" ? ConstraintKind::Equal : ConstraintKind::AtMost, Z};
        p.grid = base.scaled(std::pow(Z, -1.0 / 3.0));
        const auto s = tf_minimize_atomic(p, tol, opt);
        const double ode = atomic_energy_from_slope(Z, spin, shot.slope);
        rows[i] = {Z, s.energy.total, ode, (s.energy.total - ode) / std::abs(ode), s.energy.total / std::pow(Z, 7.0 / 3.0),
                   s.mu, static_cast<double>(s.iterations), s.residual};
    });
    Report r;
    r.experiment = "tf-atom";
    r.tables.push_back({"atoms",
                        {"charge", "energy", "ode_energy", "relative_error", "scaled_energy", "mu", "iterations", "residual"},
                        rows});
    Table screening{"screening", {"x", "phi"}, {}};
    for (std::size_t i = 0; i < shot.x.size(); ++i) screening.rows.push_back({shot.x[i], shot.phi[i]});
    r.tables.push_back(std::move(screening));
    double lo = kInfinity, hi = -kInfinity;
    for (const auto& row : rows) {
        lo = std::min(lo, row[4]);
        hi = std::max(hi, row[4]);
    }
    r.summary = {{"slope", shot.slope}, {"scaled_energy_spread", (hi - lo) / std::abs(hi)}};
    return r;
}

Report weyl_report(const Config& config, const RunContext& ctx) {
    config.require_only({"dimension", "well", "h_list", "resolution", "boundary_tol", "max_enlargements",
                         "max_nodes_2d"});
    const int d = config.get<int>("dimension", 1);
    const auto U = well_from_json(config.get<nlohmann::json>("well", {{"type", "parabolic"}}), d);
    const auto hs = config.get<std::vector<double>>("h_list");
    if (hs.empty()) throw ValidationError("h_list must not be empty");
    SpectralOptions opt;
    opt.resolution = positive(config, "resolution", opt.resolution);
    opt.boundary_tol = positive(config, "boundary_tol", opt.boundary_tol);
    opt.max_enlargements = config.get<int>("max_enlargements", opt.max_enlargements);
    opt.max_nodes_2d = config.get<std::size_t>("max_nodes_2d", opt.max_nodes_2d);
    const auto rows = weyl_convergence_table(U, hs, opt, ctx.workers);
    Report r;
    r.experiment = "weyl";
    Table t{"weyl", {"h", "negative_sum", "weyl", "ratio"}, {}};
    bool truncated = false;
    for (const auto& row : rows) {
        t.rows.push_back({row.h, row.negative_sum, row.weyl, row.ratio});
        truncated = truncated || row.truncated;
    }
    r.tables.push_back(std::move(t));
    r.summary = {{"weyl_term", weyl_term(U)}, {"final_ratio", rows.back().ratio}, {"truncation_warning", truncated}};
    if (truncated) {
        r.notes.push_back("domain truncation: lowest eigenfunction not negligible at the box boundary");
        ctx.info("warning: domain truncation in at least one row");
    }
    return r;
}

Report fdll_report(const Config& config, const RunContext&) {
    config.require_only({"family", "distances", "tol"});
    const auto family = config.get<std::string>("family", "coulomb3d");
    if (family != "coulomb3d") throw ValidationError("unknown chi family '" + family + "'");
    const auto chi = coulomb_chi(3);
    const auto distances = config.get<std::vector<double>>("distances", {0.1, 0.5, 1.0, 4.0, 10.0});
    const double tol = positive(config, "tol", 1e-10);
    Report r;
    r.experiment = "fdll-verify";
    Table t{"fdll", {"distance", "reconstructed", "exact", "relative_error"}, {}};
    double worst = 0.0;
    for (double x : distances) {
        const double v = fdll_reconstruct(chi, x, tol);
        const double err = std::abs(v - 1.0 / x) * x;
        worst = std::max(worst, err);
        t.rows.push_back({x, v, 1.0 / x, err});
    }
    r.tables.push_back(std::move(t));
    r.summary = {{"family", family}, {"max_relative_error", worst}};
    return r;
}

Report bounds_report(const Config& config, const RunContext& ctx) {
    config.require_only({"density", "radial_grid", "N_list", "r_tol", "march_young"});
    const auto grid = radial_grid_from_json(optional(config, "radial_grid"), RadialGrid{1e-4, 12.0, 3000});
    const auto f = radial_density_from_json(config.get<nlohmann::json>("density", {{"type", "gaussian"}}), grid);
    const auto Ns = particle_list(config);
    ChannelOptions opt;
    opt.r_tol = positive(config, "r_tol", opt.r_tol);
    const auto chi = coulomb_chi(3);
    const double hartree = hartree_direct(f);

    std::vector<ChannelResult> channels(Ns.size());
    parallel_for(Ns.size(), ctx.workers, [&](std::size_t i) {
        const double N = static_cast<double>(Ns[i]);
        channels[i] = interaction_channel(f, chi, N, 1.0 / N, opt);
    });
    Report r;
    r.experiment = "bounds";
    Table t{"channel", {"N", "channel", "hartree", "ratio", "lieb_oxford_rhs"}, {}};
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        const double N = static_cast<double>(Ns[i]);
        t.rows.push_back({N, channels[i].value, hartree, channels[i].value / hartree, lieb_oxford_rhs(f, N)});
    }
    r.tables.push_back(std::move(t));
    std::ostringstream samples;
    write_channel_csv(samples, channels.back());
    r.files.emplace_back("channel_samples.csv", samples.str());
    r.summary = {{"hartree_direct", hartree}, {"mass", f.mass()}, {"final_ratio", channels.back().value / hartree}};

    if (config.has("march_young")) {
        const auto& my = config.at("march_young");
        const auto f1 = density_from_json(my.value("density", nlohmann::json{{"type", "gaussian"}}), 1,
                                          my.value("cells", std::size_t{2000}));
        Table m{"march_young", {"N", "value", "kinetic_limit"}, {}};
        const double limit = march_young_upper(f1, 1e300);
        for (double N : my.value("N_list", std::vector<double>{10.0, 100.0, 1000.0}))
            m.rows.push_back({N, march_young_upper(f1, N), limit});
        r.tables.push_back(std::move(m));
    }
    return r;
}

}  // namespace

void RunContext::info(const std::string& message) const {
    if (!quiet) std::cerr << "[info] " << message << '\n';
}

void RunContext::debug(const std::string& message) const {
    if (!quiet && level == LogLevel::Debug) std::cerr << "[debug] " << message << '\n';
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

GridDensity density_from_json(const nlohmann::json& spec, int dimension, std::size_t cells) {
    if (dimension < 1) throw ValidationError("dimension must be >= 1");
    if (cells == 0) throw ValidationError("cells must be >= 1");
    try {
        const auto type = spec.at("type").get<std::string>();
        if (type == "indicator") {
            const double lo = spec.value("lo", 0.0), hi = spec.value("hi", 1.0);
            if (!(hi > lo)) throw ValidationError("indicator needs lo < hi");
            return GridDensity::sample(GridSpec::box(dimension, lo, hi, cells), [](std::span<const double>) {
                       return 1.0;
                   }).normalized();
        }
        if (type == "gaussian") {
            const double sigma = spec.value("sigma", 1.0);
            const double radius = spec.value("radius", 4.0 * sigma);
            if (!(sigma > 0.0) || !(radius > 0.0)) throw ValidationError("gaussian needs sigma > 0 and radius > 0");
            return GridDensity::sample(GridSpec::box(dimension, -radius, radius, cells), [sigma](std::span<const double> x) {
                       double r2 = 0.0;
                       for (double c : x) r2 += c * c;
                       return std::exp(-0.5 * r2 / (sigma * sigma));
                   }).normalized();
        }
        if (type == "semicircle") {
            if (dimension != 1) throw UnsupportedDimension("semicircle density is one-dimensional");
            const double a = std::sqrt(2.0);
            return GridDensity::sample(GridSpec::box(1, -a, a, cells), [](std::span<const double> x) {
                       const double t = 2.0 - x[0] * x[0];
                       return t > 0.0 ? std::sqrt(t) / kPi : 0.0;
                   }).normalized();
        }
        if (type == "csv") {
            const auto path = spec.at("path").get<std::string>();
            std::ifstream in(path);
            if (!in) throw ValidationError("cannot open density file " + path);
            auto f = read_grid_csv(in);
            if (f.dimension() != dimension) throw DimensionMismatch("density file dimension");
            return f.normalized();
        }
        throw ValidationError("unknown density type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed density spec: ") + e.what());
    }
}

RadialDensity radial_density_from_json(const nlohmann::json& spec, const RadialGrid& grid) {
    try {
        const auto type = spec.at("type").get<std::string>();
        if (type == "gaussian") {
            const double s = spec.value("sigma", 1.0);
            if (!(s > 0.0)) throw ValidationError("gaussian needs sigma > 0");
            const double c = std::pow(2.0 * kPi * s * s, -1.5);
            return RadialDensity::sample(grid, [=](double r) { return c * std::exp(-0.5 * r * r / (s * s)); });
        }
        if (type == "uniform_ball") {
            const double R = spec.value("radius", 1.0);
            if (!(R > 0.0)) throw ValidationError("uniform_ball needs radius > 0");
            const double c = 3.0 / (4.0 * kPi * R * R * R);
            return RadialDensity::sample(grid, [=](double r) { return r < R ? c : 0.0; });
        }
        throw ValidationError("unknown radial density type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed radial density spec: ") + e.what());
    }
}

MassConstraint constraint_from_json(const nlohmann::json& spec) {
    MassConstraint c;
    if (spec.is_null()) return c;
    try {
        const auto kind = spec.value("kind", std::string("equal"));
        if (kind == "equal")
            c.kind = ConstraintKind::Equal;
        else if (kind == "at_most")
            c.kind = ConstraintKind::AtMost;
        else
            throw ValidationError("constraint kind must be 'equal' or 'at_most'");
        c.mass = spec.value("mass", 1.0);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed constraint spec: ") + e.what());
    }
    if (!(c.mass > 0.0)) throw ValidationError("constraint mass must be positive");
    return c;
}

GammaReport run_gamma_experiment(const Config& config, const RunContext& ctx) {
    config.require_only({"dimension", "density", "cells", "potential", "interaction", "N_list", "ladder",
                         "cells_per_mode"});
    const int d = config.get<int>("dimension", 1);
    const std::size_t default_cells = d == 1 ? 1000 : (d == 2 ? 64 : 16);
    const auto f = density_from_json(config.at("density"), d, config.get<std::size_t>("cells", default_cells));
    const auto Ns = particle_list(config);
    Ladder ladder;
    if (config.has("ladder")) {
        const auto& l = config.at("ladder");
        ladder.base = l.value("base", ladder.base);
        ladder.growth = l.value("growth", ladder.growth);
    }
    (void)ladder.index_for(1);  // validates the ladder
    const auto cells_per_mode = config.get<std::size_t>("cells_per_mode", 4);
    if (cells_per_mode == 0) throw ValidationError("cells_per_mode must be >= 1");

    TFProblem problem;
    problem.dimension = d;
    problem.external = external_from_json(config.get<nlohmann::json>("potential", {{"type", "zero"}}), d);
    problem.interaction = kernel_from_json(config.get<nlohmann::json>("interaction", {{"type", "zero"}}));

    GammaReport report;
    report.tf = tf_energy(f, problem);
    ctx.info("TF energy of the target density " + format_number(report.tf.total));

    std::vector<GammaRow> rows(Ns.size());
    std::vector<std::exception_ptr> errors(Ns.size());
    parallel_for(Ns.size(), ctx.workers, [&](std::size_t i) {
        try {
            const std::size_t N = Ns[i];
            const double Nd = static_cast<double>(N);
            const int k = ladder.index_for(N);
            auto rec = build_recovery(step_approximate_to(f, k >= 1 ? 1.0 / k : kInfinity), N);
            const auto grid = resolving_grid(rec.sea, f.grid(), cells_per_mode);
            const auto rho = sea_density(rec.sea, grid);
            const double h = std::pow(Nd, -1.0 / d);
            const double lambda = 1.0 / Nd;

            GammaRow row;
            row.particles = N;
            row.k = k;
            row.cubes = rec.sea.cubes().size();
            row.step_error = rec.step.error();
            row.kinetic = h * h * sea_kinetic(rec.sea) / Nd;
            if (!problem.external.is_zero()) {
                const auto V = problem.external.sample(grid);
                double ext = 0.0;
                for (std::size_t c = 0; c < V.values.size(); ++c) ext += V.values[c] * rho.values()[c];
                row.external = ext * grid.cell_volume() / Nd;
            }
            row.interaction = slater_direct_interaction(rho, problem.interaction, lambda) / Nd;
            row.total = row.kinetic + row.external + row.interaction;
            row.tf_energy = report.tf.total;
            row.gap = row.total - row.tf_energy;
            const auto per_particle = rho.scaled(1.0 / Nd);
            const auto target = refine_to(f, grid.spacing);
            row.l1_distance = lp_distance(per_particle, target, 1.0);
            row.lp_distance = lp_distance(per_particle, target, 1.0 + 2.0 / d);
            row.h_scaling = h * std::pow(Nd, 1.0 / d);
            row.lambda_scaling = lambda * Nd;
            rows[i] = row;
            ctx.debug("N=" + std::to_string(N) + " k=" + std::to_string(k) + " cells=" + std::to_string(grid.size()) +
                      " total=" + format_number(row.total));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (errors[i]) {
            if (!report.failure) report.failure = errors[i];
            continue;
        }
        report.rows.push_back(rows[i]);
    }
    return report;
}

GseReport run_gse_experiment(const Config& config, const RunContext& ctx) {
    config.require_only({"dimension", "potential", "N_list", "grid", "tol", "fd_nodes"});
    const int d = config.get<int>("dimension", 1);
    const auto Ns = particle_list(config);
    const auto pot = config.get<nlohmann::json>("potential", {{"type", "harmonic"}});
    const double tol = positive(config, "tol", 1e-10);
    GseReport out;

    TFProblem problem;
    problem.dimension = d;
    std::string type;
    try {
        type = pot.at("type").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed potential spec: ") + e.what());
    }
    GridSpec grid;
    std::function<double(std::size_t, double)> quantum;  // (N, h) -> per-particle energy
    if (type == "box") {
        const double lo = pot.value("lo", 0.0), hi = pot.value("hi", 1.0);
        if (!(hi > lo)) throw ValidationError("box needs lo < hi");
        out.method = "box";
        grid = grid_from_json(optional(config, "grid"), d, lo, hi, d == 1 ? 256 : 16);
        if (grid.origin[0] != lo || std::abs(grid.upper(0) - hi) > 1e-12 * (hi - lo))
            throw ValidationError("box experiments need the grid to cover exactly the box");
        const Cube box{Point(d, lo), hi - lo};
        quantum = [box](std::size_t N, double h) {
            double s = 0.0;
            for (const auto& m : box_spectrum(box, N)) s += m.eigenvalue();
            return h * h * s / static_cast<double>(N);
        };
    } else if (type == "harmonic") {
        if (d != 1) throw UnsupportedDimension("exact harmonic filling is implemented for d = 1");
        const double strength = pot.value("strength", 1.0);
        if (!(strength > 0.0)) throw ValidationError("harmonic strength must be positive");
        out.method = "harmonic";
        problem.external = harmonic_potential(strength);
        grid = grid_from_json(optional(config, "grid"), d, -8.0, 8.0, 4096);
        quantum = [strength](std::size_t N, double h) {
            double s = 0.0;
            for (std::size_t k = 0; k < N; ++k) s += static_cast<double>(2 * k + 1) * h * std::sqrt(strength);
            return s / static_cast<double>(N);
        };
    } else {
        if (d != 1) throw UnsupportedDimension("finite-difference filling is implemented for d = 1");
        out.method = "finite_difference";
        problem.external = external_from_json(pot, d);
        grid = grid_from_json(optional(config, "grid"), d, -8.0, 8.0, 4096);
        const auto nodes = config.get<std::size_t>("fd_nodes", 4000);
        if (nodes < 16) throw ValidationError("fd_nodes must be >= 16");
        const double lo = grid.origin[0], hi = grid.upper(0);
        const double spacing = (hi - lo) / static_cast<double>(nodes + 1);
        std::vector<double> V(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            const double x[1] = {lo + static_cast<double>(i + 1) * spacing};
            V[i] = problem.external.function ? problem.external.function(x)
                                             : problem.external.radial.grid_value(std::abs(x[0] - problem.external.center[0]), spacing);
        }
        quantum = [V, spacing](std::size_t N, double h) {
            double s = 0.0;
            for (double e : lowest_eigenvalues(V, spacing, h, N)) s += e;
            return s / static_cast<double>(N);
        };
    }
    out.tf = tf_minimize(problem, grid, tol);
    ctx.info("TF minimum " + format_number(out.tf.energy.total) + " (" + out.method + ")");
    out.rows.resize(Ns.size());
    parallel_for(Ns.size(), ctx.workers, [&](std::size_t i) {
        const std::size_t N = Ns[i];
        const double h = std::pow(static_cast<double>(N), -1.0 / d);
        const double q = quantum(N, h);
        out.rows[i] = {N, h, q, out.tf.energy.total, q - out.tf.energy.total};
    });
    return out;
}

Report run_experiment(const std::string& name, const Config& config, const RunContext& context) {
    if (name == "gamma") return gamma_report(config, context);
    if (name == "gse") return gse_report(config, context);
    if (name == "tf-minimize") return tf_minimize_report(config, context);
    if (name == "tf-atom") return tf_atom_report(config, context);
    if (name == "weyl") return weyl_report(config, context);
    if (name == "fdll-verify") return fdll_report(config, context);
    if (name == "bounds") return bounds_report(config, context);
    throw ValidationError("unknown experiment '" + name + "'");
}

void emit(const Report& report, const Config& config, const std::filesystem::path& out, double wall_seconds,
          const RunContext& context) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw ValidationError("cannot create output directory " + out.string() + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        const auto path = out / name;
        std::ofstream os(path, std::ios::binary);
        os << content;
        if (!os) throw ValidationError("cannot write " + path.string());
    };

    nlohmann::json files = nlohmann::json::array();
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : report.tables) {
        std::ostringstream os;
        for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
            os << '\n';
        }
        write(t.name + ".csv", os.str());
        files.push_back(t.name + ".csv");
        tables.push_back({{"name", t.name}, {"file", t.name + ".csv"}, {"header", t.header}, {"rows", t.rows.size()}});
    }
    for (const auto& [name, content] : report.files) {
        write(name, content);
        files.push_back(name);
    }

    nlohmann::json rep = {{"experiment", report.experiment},
                          {"summary", report.summary},
                          {"tables", tables},
                          {"notes", report.notes},
                          {"complete", !report.failure}};
    write("report.json", rep.dump(2) + "\n");
    files.push_back("report.json");

    nlohmann::json manifest = {{"tool", "tfgamma"},
                               {"version", TFGAMMA_VERSION},
                               {"experiment", report.experiment},
                               {"config", config.values()},
                               {"workers", context.workers},
                               {"wall_seconds", wall_seconds},
                               {"compiler", __VERSION__},
                               {"files", files},
                               {"status", report.failure ? "partial" : "ok"}};
    write("manifest.json", manifest.dump(2) + "\n");
}

}  // namespace tfgamma
