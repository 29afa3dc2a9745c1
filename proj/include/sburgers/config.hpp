#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sburgers/characteristics.hpp"
#include "sburgers/field.hpp"
#include "sburgers/noise.hpp"
#include "sburgers/paths.hpp"
#include "sburgers/profile.hpp"

namespace sburgers::config {

/// Invalid or unreadable configuration (CLI exit 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Spde, Characteristics, Crossing, SlopeMoments, ShockTrack, MaxPrinciple, BlowupCriterion };

const char* to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct CharacteristicsSection {
    std::vector<double> fan;  // initial positions (characteristics, crossing)
    double x0 = 0.0;          // slope-moments start point
    characteristics::Scheme scheme = characteristics::Scheme::Heun;
    std::size_t stride = 1;
    double cap = 1e6;
};

/// Noise for crossing runs is the single linear mode of the noise section.
struct CrossingSection {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> horizons;
    double min_agreement = 0.99;  // fraction of paths within 2 dt
};

struct ShockSection {
    double threshold = 0.3;
    std::size_t stride = 1;  // detect every `stride` steps
};

struct MaxPrincipleSection {
    double b0 = 0.0;  // constant zeroth-order coefficient, driven by mode 0
    double tol = 1e-6;
};

struct BlowupSection {
    std::vector<std::size_t> refinements;  // cell counts, ascending powers of two
    double h2_ratio = 1.5;
    double a_ratio = 1.2;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Spde;
    std::string name;
    std::shared_ptr<const noise::NoiseBasis> basis;
    std::optional<InitialProfile> u0;
    noise::Domain domain = noise::Torus{0.0, 1.0};
    std::size_t cells = 256;
    TimeGrid grid{0.0, 1.0, 1000};
    double nu = 0.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    StepParams step;
    std::size_t snapshot_stride = 0;
    double mass_tol = 1e-10;  // enforced for uniform noise only
    CharacteristicsSection chars;
    CrossingSection crossing;
    ShockSection shock;
    MaxPrincipleSection max_principle;
    BlowupSection blowup;

    nlohmann::json source;  // as parsed, for the manifest echo

    const noise::Torus& torus() const;  // throws ConfigError on a Line domain
};

/// Parses and validates. Relative file references resolve against `base_dir`.
ExperimentConfig parse(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
ExperimentConfig load(const std::filesystem::path& file);

/// Worker count: --workers if given, else the WORKERS environment variable, else available parallelism.
std::size_t resolve_workers(std::optional<std::size_t> flag);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
/// Hash of the canonical (sorted-key, compact) serialization.
std::uint64_t config_hash(const nlohmann::json& j);

}  // namespace sburgers::config
