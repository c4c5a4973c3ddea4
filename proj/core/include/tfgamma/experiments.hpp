#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfgamma/config.hpp"
#include "tfgamma/densities.hpp"
#include "tfgamma/tf.hpp"

namespace tfgamma {

enum class LogLevel { Info, Debug };

struct RunContext {
    unsigned workers = 1;
    LogLevel level = LogLevel::Info;
    /// Progress lines go to stderr unless quiet.
    bool quiet = false;

    void info(const std::string& message) const;
    void debug(const std::string& message) const;
};

/// Numeric table written as `<name>.csv`.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Report {
    std::string experiment;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<Table> tables;
    /// Extra CSV files (name -> content) such as densities.
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> notes;
    /// Set when a job failed after some rows were produced; the partial report is still emitted.
    std::exception_ptr failure;
};

/// Unit-mass grid density from {type:"indicator", lo, hi}, {type:"gaussian", sigma, radius},
/// {type:"semicircle"} (d = 1) or {type:"csv", path}; `cells` per axis.
GridDensity density_from_json(const nlohmann::json& spec, int dimension, std::size_t cells);

/// {type:"gaussian", sigma} or {type:"uniform_ball", radius} in R^3, unit mass.
RadialDensity radial_density_from_json(const nlohmann::json& spec, const RadialGrid& grid);

MassConstraint constraint_from_json(const nlohmann::json& spec);

struct GammaRow {
    std::size_t particles = 0;
    int k = 0;
    std::size_t cubes = 0;
    double step_error = 0.0;
    double kinetic = 0.0;      // h^2 sea_kinetic / N
    double external = 0.0;     // int V rho / N
    double interaction = 0.0;  // lambda direct / N
    double total = 0.0;
    double tf_energy = 0.0;
    double gap = 0.0;
    double l1_distance = 0.0;
    double lp_distance = 0.0;  // in L^{1+2/d}
    double h_scaling = 1.0;       // h N^{1/d}
    double lambda_scaling = 1.0;  // lambda N
};

struct GammaReport {
    TFEnergy tf;
    std::vector<GammaRow> rows;
    std::exception_ptr failure;
};

/// Recovery upper bound along N_list with canonical scaling h = N^{-1/d}, lambda = 1/N.
GammaReport run_gamma_experiment(const Config& config, const RunContext& context = {});

struct GseRow {
    std::size_t particles = 0;
    double h = 0.0;
    double quantum = 0.0;  // per particle
    double tf = 0.0;
    double gap = 0.0;
};

struct GseReport {
    std::string method;  // "harmonic", "box" or "finite_difference"
    TFSolution tf;
    std::vector<GseRow> rows;
};

/// Exact non-interacting N-fermion energies (h = N^{-1/d}) against the TF minimum.
GseReport run_gse_experiment(const Config& config, const RunContext& context = {});

/// Runs one CLI experiment: gamma, gse, tf-minimize, tf-atom, weyl, fdll-verify or bounds.
Report run_experiment(const std::string& name, const Config& config, const RunContext& context = {});

/// Writes manifest.json, report.json and one CSV per table into `out`.
void emit(const Report& report, const Config& config, const std::filesystem::path& out, double wall_seconds,
          const RunContext& context = {});

/// %.17g formatting used in every CSV.
std::string format_number(double v);

}  // namespace tfgamma
