// sburgers: run or validate one experiment config.
//
// Exit codes: 0 ok, 1 invariant violated, 2 bad config or usage, 3 runtime numeric failure.
// Failures print one line to stderr: status=<word> code=<n> reason=<text>

#include <omp.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sburgers/config.hpp"
#include "sburgers/experiments.hpp"

namespace {

enum Exit { kOk = 0, kInvariant = 1, kConfig = 2, kRuntime = 3 };

int report(Exit code, const std::string& status, std::string reason) {
    for (char& c : reason) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    std::cerr << "status=" << status << " code=" << code << " reason=" << reason << '\n';
    return code;
}

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
};

sburgers::config::ExperimentConfig load(const Options& o) {
    auto cfg = sburgers::config::load(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.source["seed"] = *o.seed;
    }
    return cfg;
}

int do_run(const Options& o) {
    sburgers::config::ExperimentConfig cfg;
    std::size_t workers = 1;
    try {
        cfg = load(o);
        workers = sburgers::config::resolve_workers(o.workers);
    } catch (const std::exception& e) {
        return report(kConfig, "config_error", e.what());
    }
    const std::filesystem::path out = o.out.empty() ? cfg.output_dir : std::filesystem::path(o.out);
    omp_set_num_threads(static_cast<int>(workers));

    sburgers::experiments::Outcome outcome;
    try {
        outcome = sburgers::experiments::run(cfg, out, workers);
        sburgers::experiments::write_manifest(cfg, outcome, out, workers);
    } catch (const sburgers::config::ConfigError& e) {
        return report(kConfig, "config_error", e.what());
    } catch (const std::exception& e) {
        return report(kRuntime, "runtime_error", e.what());
    }

    std::cout << "experiment=" << sburgers::config::to_string(cfg.kind) << " paths=" << cfg.n_paths
              << " seed=" << cfg.seed << " workers=" << workers << " manifest=" << (out / "manifest.json").string()
              << '\n';
    for (const auto& c : outcome.checks) {
        std::cout << (c.pass ? "  PASS " : "  FAIL ") << c.name << " value=" << c.value << " limit=" << c.limit
                  << '\n';
    }
    if (!outcome.pass()) return report(kInvariant, "invariant_violation", outcome.first_failure());
    return kOk;
}

int do_validate(const Options& o) {
    try {
        const auto cfg = load(o);
        std::cout << sburgers::experiments::validation_report(cfg).dump(2) << '\n';
    } catch (const std::exception& e) {
        return report(kConfig, "config_error", e.what());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic Burgers / transport-noise numerical lab"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&opts](CLI::App* sub) {
        sub->add_option("--config", opts.config, "experiment config (JSON)")->required();
        sub->add_option("--seed", opts.seed, "master seed, overrides the config");
    };
    CLI::App* run = app.add_subcommand("run", "run an experiment and write manifest + CSVs");
    add_common(run);
    run->add_option("--out", opts.out, "output directory, overrides the config");
    run->add_option("--workers", opts.workers, "worker threads (default: WORKERS env or all cores)")
        ->check(CLI::PositiveNumber);
    CLI::App* validate = app.add_subcommand("validate", "check a config and print the static report");
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(kConfig, "usage_error", e.what());
    }

    if (run->parsed()) return do_run(opts);
    return do_validate(opts);
}
