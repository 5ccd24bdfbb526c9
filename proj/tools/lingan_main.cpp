// Command-line front end: seeded sweeps over (k, n_ps) grids for the linear
// generator experiments, verification suites for the supporting identities,
// finite-difference gradient checks, and figure-reproduction presets.

#include "lingan/config.hpp"
#include "lingan/experiments.hpp"
#include "lingan/losses.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace lingan;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerification = 4;

struct SweepArgs {
    std::string config_path;
    std::string out = "-";
    long trials = -1;
    std::int64_t seed = -1;
    int workers = -1;
    std::string variant;
};

struct VerifyArgs {
    std::string suite = "all";
    std::uint64_t seed = 12345;
    int cases = 100;
    long trials = 3;
};

struct GradArgs {
    std::uint64_t seed = 20240;
    int cases = 100;
    double h = 1e-5;
};

struct DemoArgs {
    std::string figure;
    std::string out;
    long trials = -1;
    int workers = -1;
    std::string k_grid;
    std::string n_ps;
};

void echo_config(const experiments::ExperimentConfig& cfg) {
    std::cerr << "resolved configuration:\n";
    std::istringstream text(config::render(cfg));
    std::string line;
    while (std::getline(text, line)) std::cerr << "  " << line << "\n";
}

void emit_csv(const std::vector<experiments::SweepRecord>& records, const std::string& out) {
    if (out == "-" || out.empty()) {
        experiments::write_csv(records, std::cout);
        std::cout.flush();
        if (!std::cout) throw IoError("write_csv: stdout write failed");
    } else {
        experiments::write_csv(records, out);
        std::cerr << "wrote " << records.size() << " rows to " << out << "\n";
    }
}

int cmd_sweep(const SweepArgs& args) {
    experiments::ExperimentConfig cfg;
    try {
        if (!args.config_path.empty()) cfg = config::parse_file(args.config_path);
        if (args.trials >= 0) cfg.trials = args.trials;
        if (args.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(args.seed);
        if (!args.variant.empty()) cfg.variant = experiments::sweep_variant_from_name(args.variant);
        config::apply_env_overrides(cfg);
        if (args.workers >= 0) cfg.workers = args.workers;
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    echo_config(cfg);
    emit_csv(experiments::run_sweep(cfg), args.out);
    return kExitOk;
}

int cmd_verify(const VerifyArgs& args) {
    const bool all = args.suite == "all";
    std::vector<experiments::VerifyReport> reports;
    if (all || args.suite == "theorem1") {
        experiments::ExperimentConfig cfg;
        cfg.base_seed = args.seed;
        reports.push_back(experiments::verify_theorem1(cfg, {20, 21, 40, 64, 127}, args.trials));
    }
    if (all || args.suite == "orthonormal")
        reports.push_back(experiments::verify_orthonormal_invariance(args.seed, args.cases));
    if (all || args.suite == "pseudometric")
        reports.push_back(experiments::verify_pseudometric(args.seed, args.cases));
    if (all || args.suite == "concentration")
        reports.push_back(experiments::verify_concentration(args.seed));
    if (reports.empty()) {
        std::cerr << "unknown suite '" << args.suite
                  << "' (expected theorem1|orthonormal|pseudometric|concentration|all)\n";
        return kExitConfig;
    }
    bool pass = true;
    for (const auto& report : reports) {
        for (const std::string& line : report.lines) std::cout << line << "\n";
        pass = pass && report.pass;
    }
    std::cout << (pass ? "verify: PASS" : "verify: FAIL") << "\n";
    return pass ? kExitOk : kExitVerification;
}

int cmd_check_gradients(const GradArgs& args) {
    const losses::GradientCheckReport report =
        losses::check_gradients(args.seed, args.cases, args.h);
    for (const std::string& line : report.lines) std::cout << line << "\n";
    return report.pass ? kExitOk : kExitVerification;
}

experiments::ExperimentConfig demo_preset(const std::string& figure) {
    experiments::ExperimentConfig cfg;
    cfg.trials = 20;
    if (figure == "spoon") {
        // Closed-form spectral fit: U-shaped test error with a flat plateau
        // past k = n.
        cfg.variant = experiments::SweepVariant::pca;
        cfg.k_grid = config::parse_index_list("1:1:40");
        cfg.n_ps_list = {0};
        cfg.trials = 200;
    } else if (figure == "supervised") {
        // True-latent supervision with more latent directions than samples:
        // double descent peaking at k = n.
        cfg.variant = experiments::SweepVariant::supervised;
        cfg.m = 40;
        cfg.allow_nonstandard_dims = true;
        cfg.k_grid = config::parse_index_list("1:1:40");
    } else if (figure == "ps_plain") {
        cfg.variant = experiments::SweepVariant::ps_plain;
    } else if (figure == "ps_regularized") {
        cfg.variant = experiments::SweepVariant::ps_regularized;
    } else if (figure == "ps_weighted") {
        cfg.variant = experiments::SweepVariant::ps_weighted;
        cfg.alpha = 0.98;
    } else if (figure == "ps_pinv") {
        cfg.variant = experiments::SweepVariant::ps_pinv;
    } else {
        throw ConfigError("demo: unknown figure '" + figure +
                          "' (expected spoon|supervised|ps_plain|ps_regularized|ps_weighted|"
                          "ps_pinv)");
    }
    return cfg;
}

int cmd_demo(const DemoArgs& args) {
    experiments::ExperimentConfig cfg;
    try {
        cfg = demo_preset(args.figure);
        if (args.trials >= 0) cfg.trials = args.trials;
        if (!args.k_grid.empty()) cfg.k_grid = config::parse_index_list(args.k_grid);
        if (!args.n_ps.empty()) cfg.n_ps_list = config::parse_index_list(args.n_ps);
        config::apply_env_overrides(cfg);
        if (args.workers >= 0) cfg.workers = args.workers;
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    echo_config(cfg);
    emit_csv(experiments::run_sweep(cfg), args.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear generator overparameterization experiments"};
    app.require_subcommand(1);

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "run a seeded (k, n_ps) grid sweep");
    sweep->add_option("--config", sweep_args.config_path, "key = value config file");
    sweep->add_option("--out", sweep_args.out, "output CSV path, '-' for stdout");
    sweep->add_option("--trials", sweep_args.trials, "override trial count");
    sweep->add_option("--seed", sweep_args.seed, "override base seed");
    sweep->add_option("--workers", sweep_args.workers, "override worker count (0 = default)");
    sweep->add_option("--variant", sweep_args.variant, "override sweep variant");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", verify_args.suite,
                       "theorem1|orthonormal|pseudometric|concentration|all");
    verify->add_option("--seed", verify_args.seed, "verification seed");
    verify->add_option("--cases", verify_args.cases, "random cases per suite")
        ->check(CLI::PositiveNumber);
    verify->add_option("--trials", verify_args.trials, "trials for theorem1")
        ->check(CLI::PositiveNumber);

    GradArgs grad_args;
    CLI::App* grad = app.add_subcommand("check-gradients",
                                        "compare analytic and finite-difference gradients");
    grad->add_option("--seed", grad_args.seed, "seed");
    grad->add_option("--cases", grad_args.cases, "cases per variant")
        ->check(CLI::PositiveNumber);
    grad->add_option("--fd-step", grad_args.h, "central-difference step")
        ->check(CLI::PositiveNumber);

    DemoArgs demo_args;
    CLI::App* demo = app.add_subcommand("demo", "figure-reproduction presets");
    demo->add_option("--figure", demo_args.figure,
                     "spoon|supervised|ps_plain|ps_regularized|ps_weighted|ps_pinv")
        ->required();
    demo->add_option("--out", demo_args.out, "output CSV path")->required();
    demo->add_option("--trials", demo_args.trials, "override preset trial count");
    demo->add_option("--workers", demo_args.workers, "override worker count");
    demo->add_option("--k-grid", demo_args.k_grid, "override k grid (list or start:step:end)");
    demo->add_option("--n-ps", demo_args.n_ps, "override n_ps list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (verify->parsed()) return cmd_verify(verify_args);
        if (grad->parsed()) return cmd_check_gradients(grad_args);
        if (demo->parsed()) return cmd_demo(demo_args);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
