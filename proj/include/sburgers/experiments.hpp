#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sburgers/config.hpp"

namespace sburgers::experiments {

/// One invariant check reported in the manifest.
struct Check {
    std::string name;
    bool pass = true;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct Outcome {
    nlohmann::json summary = nlohmann::json::object();
    std::vector<Check> checks;
    std::vector<std::string> files;  // written CSVs, relative to the output directory

    bool pass() const;
    /// First failing check, formatted "name value=... limit=..."; empty if all pass.
    std::string first_failure() const;
};

/// Runs the configured experiment, writing CSVs into `out_dir`. Uses the OpenMP kernels when
/// workers > 1; the results do not depend on the worker count.
Outcome run(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::size_t workers);

/// manifest.json: code version, config hash, master seed, config echo, summary and checks.
void write_manifest(const config::ExperimentConfig& cfg, const Outcome& outcome, const std::filesystem::path& out_dir,
                    std::size_t workers);

/// Static report: noise assumption report, C, D, psi range, CFL estimate, grid facts.
nlohmann::json validation_report(const config::ExperimentConfig& cfg);

const char* code_version();

}  // namespace sburgers::experiments
