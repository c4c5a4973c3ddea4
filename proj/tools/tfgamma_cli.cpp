#include <chrono>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tfgamma/errors.hpp"
#include "tfgamma/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct Options {
    std::string config;
    std::string out = "tfgamma-out";
    unsigned workers = 1;
    std::string log_level = "info";
};

int run(const std::string& name, const Options& opt) {
    tfgamma::RunContext ctx;
    ctx.workers = opt.workers;
    ctx.level = opt.log_level == "debug" ? tfgamma::LogLevel::Debug : tfgamma::LogLevel::Info;
    const auto config = tfgamma::Config::load(opt.config);
    const auto start = std::chrono::steady_clock::now();
    auto report = tfgamma::run_experiment(name, config, ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    tfgamma::emit(report, config, opt.out, wall, ctx);
    ctx.info("wrote " + opt.out + "/manifest.json");
    if (report.failure) std::rethrow_exception(report.failure);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thomas-Fermi limit experiments for Slater-determinant recovery sequences"};
    app.require_subcommand(1);
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"gamma", "recovery-sequence upper bound against the TF energy"},
        {"gse", "exact non-interacting ground-state energies against the TF minimum"},
        {"tf-minimize", "minimize the TF functional on a grid"},
        {"tf-atom", "TF atom: screening-function shooting and radial solver"},
        {"weyl", "sums of negative eigenvalues against the semiclassical term"},
        {"fdll-verify", "reconstruct the Coulomb kernel from its ball decomposition"},
        {"bounds", "interaction channel, Hartree and Lieb-Oxford values"},
    };
    Options opt;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "configuration file (key = json per line)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
        sub->add_option("--log-level", opt.log_level, "info or debug")
            ->check(CLI::IsMember({"info", "debug"}))
            ->capture_default_str();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return run(name, opt);
    } catch (const tfgamma::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const tfgamma::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
