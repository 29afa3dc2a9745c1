#include "sburgers/config.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>

namespace sburgers::config {

using nlohmann::json;

namespace {

struct KindName {
    ExperimentKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::Spde, "spde"},
    {ExperimentKind::Characteristics, "characteristics"},
    {ExperimentKind::Crossing, "crossing"},
    {ExperimentKind::SlopeMoments, "slope-moments"},
    {ExperimentKind::ShockTrack, "shock-track"},
    {ExperimentKind::MaxPrinciple, "max-principle"},
    {ExperimentKind::BlowupCriterion, "blowup-criterion"},
};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) fail(where + " must be a table");
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            fail("unknown key '" + key + "' in " + where);
        }
    }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where + "." + key + " must be finite");
    return x;
}

double required_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) fail("missing " + where + "." + key);
    return number(obj, key, 0.0, where);
}

std::uint64_t unsigned_int(const json& obj, const char* key, std::uint64_t fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    // values set from code rather than parsed text are stored signed
    if (v.is_number_integer()) {
        if (v.get<std::int64_t>() < 0) fail(where + "." + key + " must be >= 0");
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    fail(where + "." + key + " must be an integer");
}

std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) fail(where + "." + key + " must be a string");
    return obj.at(key).get<std::string>();
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array()) fail(where + "." + key + " must be a list of numbers");
    for (const auto& e : v) {
        if (!e.is_number()) fail(where + "." + key + " must be a list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::filesystem::path existing_file(const json& obj, const std::filesystem::path& base, const std::string& where) {
    const std::string f = text(obj, "file", "", where);
    if (f.empty()) fail("missing " + where + ".file");
    std::filesystem::path p(f);
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::is_regular_file(p)) fail("file not found: " + p.string());
    return p;
}

noise::Domain parse_domain(const json& j) {
    const std::string where = "domain";
    check_keys(j, {"kind", "origin", "length", "x_min", "x_max"}, where);
    const std::string kind = text(j, "kind", "torus", where);
    if (kind == "torus") {
        if (j.contains("x_min") || j.contains("x_max")) fail("domain: x_min/x_max apply to kind 'line' only");
        noise::Torus t{number(j, "origin", 0.0, where), number(j, "length", 1.0, where)};
        if (!(t.length > 0.0)) fail("domain.length must be > 0");
        return t;
    }
    if (kind == "line") {
        if (j.contains("origin") || j.contains("length")) fail("domain: origin/length apply to kind 'torus' only");
        noise::Line l;
        l.x_min = number(j, "x_min", l.x_min, where);
        l.x_max = number(j, "x_max", l.x_max, where);
        if (!(l.x_max > l.x_min)) fail("domain: x_min must be < x_max");
        return l;
    }
    fail("domain.kind must be 'torus' or 'line'");
}

double default_period(const noise::Domain& d) {
    if (const auto* t = std::get_if<noise::Torus>(&d)) return t->length;
    return 2.0 * std::numbers::pi;
}

std::vector<noise::NoiseMode> parse_noise(const json& j, const noise::Domain& domain,
                                          const std::filesystem::path& base) {
    check_keys(j, {"modes", "fourier_family"}, "noise");
    std::vector<noise::NoiseMode> modes;
    if (j.contains("modes")) {
        if (!j.at("modes").is_array()) fail("noise.modes must be a list");
        std::size_t i = 0;
        for (const json& m : j.at("modes")) {
            const std::string where = "noise.modes[" + std::to_string(i++) + "]";
            if (!m.is_object()) fail(where + " must be a table");
            const std::string kind = text(m, "kind", "", where);
            if (kind == "linear") {
                check_keys(m, {"kind", "alpha", "beta"}, where);
                modes.emplace_back(noise::Linear{number(m, "alpha", 0.0, where), number(m, "beta", 0.0, where)});
            } else if (kind == "sin" || kind == "cos") {
                check_keys(m, {"kind", "k", "amp", "period"}, where);
                const auto k = unsigned_int(m, "k", 0, where);
                if (k < 1) fail(where + ".k must be >= 1");
                const double amp = number(m, "amp", 1.0, where);
                const double period = number(m, "period", default_period(domain), where);
                if (!(period > 0.0)) fail(where + ".period must be > 0");
                if (kind == "sin") {
                    modes.emplace_back(noise::FourierSin{static_cast<int>(k), amp, period});
                } else {
                    modes.emplace_back(noise::FourierCos{static_cast<int>(k), amp, period});
                }
            } else if (kind == "tabulated") {
                check_keys(m, {"kind", "file"}, where);
                try {
                    modes.emplace_back(noise::load_tabulated_csv(existing_file(m, base, where)));
                } catch (const ConfigError&) {
                    throw;
                } catch (const std::exception& e) {
                    fail(where + ": " + e.what());
                }
            } else {
                fail(where + ".kind must be one of linear, sin, cos, tabulated");
            }
        }
    }
    if (j.contains("fourier_family")) {
        const json& f = j.at("fourier_family");
        check_keys(f, {"K", "amp", "decay"}, "noise.fourier_family");
        const auto K = unsigned_int(f, "K", 0, "noise.fourier_family");
        if (K < 1) fail("noise.fourier_family.K must be >= 1");
        const double amp = number(f, "amp", 1.0, "noise.fourier_family");
        const double decay = number(f, "decay", 2.0, "noise.fourier_family");
        const noise::Torus t{0.0, default_period(domain)};
        const auto fam = noise::fourier_family(static_cast<int>(K), amp, decay, t);
        modes.insert(modes.end(), fam.modes().begin(), fam.modes().end());
    }
    return modes;
}

InitialProfile parse_u0(const json& j, const noise::Domain& domain, const std::filesystem::path& base) {
    const std::string where = "u0";
    if (!j.is_object()) fail("u0 must be a table");
    const std::string kind = text(j, "kind", "", where);
    if (kind == "negative_line") {
        check_keys(j, {"kind", "sigma", "offset"}, where);
        return InitialProfile(profile::NegativeLine{number(j, "sigma", 1.0, where), number(j, "offset", 0.0, where)});
    }
    if (kind == "sine") {
        check_keys(j, {"kind", "amplitude", "wavenumber", "cycles", "offset"}, where);
        if (j.contains("wavenumber") && j.contains("cycles")) fail("u0: give wavenumber or cycles, not both");
        double m = number(j, "wavenumber", 0.0, where);
        if (j.contains("cycles")) m = 2.0 * std::numbers::pi * number(j, "cycles", 1.0, where) / default_period(domain);
        if (!j.contains("wavenumber") && !j.contains("cycles")) m = 2.0 * std::numbers::pi / default_period(domain);
        return InitialProfile(profile::SineWave{number(j, "amplitude", 1.0, where), m, number(j, "offset", 0.0, where)});
    }
    if (kind == "step") {
        check_keys(j, {"kind", "inside", "outside", "left", "right"}, where);
        profile::Step s{number(j, "inside", 1.0, where), number(j, "outside", 0.0, where),
                        required_number(j, "left", where), required_number(j, "right", where)};
        if (!(s.right > s.left)) fail("u0: left must be < right");
        return InitialProfile(s);
    }
    if (kind == "tabulated") {
        check_keys(j, {"kind", "file"}, where);
        try {
            return InitialProfile(profile::Tabulated{noise::load_tabulated_csv(existing_file(j, base, where)).spline});
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(std::string("u0: ") + e.what());
        }
    }
    fail("u0.kind must be one of negative_line, sine, step, tabulated");
}

TimeGrid parse_time(const json& j) {
    const std::string where = "time";
    check_keys(j, {"t0", "t_end", "dt", "n_steps"}, where);
    const double t0 = number(j, "t0", 0.0, where);
    const double t1 = required_number(j, "t_end", where);
    if (!(t1 > t0)) fail("time.t_end must be > time.t0");
    if (j.contains("dt") == j.contains("n_steps")) fail("time: give exactly one of dt, n_steps");
    std::uint64_t n = 0;
    if (j.contains("n_steps")) {
        n = unsigned_int(j, "n_steps", 0, where);
    } else {
        const double dt = number(j, "dt", 0.0, where);
        if (!(dt > 0.0)) fail("time.dt must be > 0");
        const double steps = (t1 - t0) / dt;
        n = static_cast<std::uint64_t>(std::llround(steps));
        if (std::abs(steps - static_cast<double>(n)) > 1e-6 * std::max(1.0, steps)) {
            fail("time: (t_end - t0) / dt must be an integer");
        }
    }
    if (n < 1) fail("time: need at least one step");
    return TimeGrid(t0, t1, static_cast<std::size_t>(n));
}

bool power_of_two(std::uint64_t n) { return n >= 4 && std::has_single_bit(n); }

bool is_field_kind(ExperimentKind k) {
    return k == ExperimentKind::Spde || k == ExperimentKind::ShockTrack || k == ExperimentKind::MaxPrinciple ||
           k == ExperimentKind::BlowupCriterion;
}

}  // namespace

const char* to_string(ExperimentKind k) {
    for (const auto& kn : kKinds) {
        if (kn.kind == k) return kn.name;
    }
    return "?";
}

ExperimentKind parse_kind(const std::string& s) {
    for (const auto& kn : kKinds) {
        if (s == kn.name) return kn.kind;
    }
    fail("unknown experiment '" + s +
         "' (spde, characteristics, crossing, slope-moments, shock-track, max-principle, blowup-criterion)");
}

const noise::Torus& ExperimentConfig::torus() const {
    const auto* t = std::get_if<noise::Torus>(&domain);
    if (!t) throw ConfigError(std::string(to_string(kind)) + " needs a torus domain");
    return *t;
}

ExperimentConfig parse(const json& j, const std::filesystem::path& base_dir) {
    check_keys(j,
               {"experiment", "name", "seed", "n_paths", "output_dir", "domain", "noise", "u0", "grid", "time", "nu",
                "solver", "output", "mass_tol", "characteristics", "crossing", "shock", "max_principle", "blowup"},
               "config");
    ExperimentConfig c;
    c.source = j;
    if (!j.contains("experiment")) fail("missing experiment");
    c.kind = parse_kind(text(j, "experiment", "", "config"));
    c.name = text(j, "name", to_string(c.kind), "config");
    c.seed = unsigned_int(j, "seed", 0, "config");
    if (j.contains("n_paths")) {
        const json& v = j.at("n_paths");
        if (!v.is_number_integer()) fail("n_paths must be an integer");
        if (v.get<std::int64_t>() < 1) fail("n_paths must be ≥ 1");
        c.n_paths = static_cast<std::size_t>(v.get<std::int64_t>());
    }
    c.output_dir = text(j, "output_dir", "out", "config");

    if (j.contains("domain")) c.domain = parse_domain(j.at("domain"));
    try {
        const auto modes = j.contains("noise") ? parse_noise(j.at("noise"), c.domain, base_dir)
                                               : std::vector<noise::NoiseMode>{};
        c.basis = std::make_shared<const noise::NoiseBasis>(modes, c.domain);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(std::string("noise: ") + e.what());
    }
    if (!j.contains("u0")) fail("missing u0");
    c.u0 = parse_u0(j.at("u0"), c.domain, base_dir);

    if (j.contains("grid")) {
        check_keys(j.at("grid"), {"cells"}, "grid");
        c.cells = unsigned_int(j.at("grid"), "cells", c.cells, "grid");
    }
    if (!j.contains("time")) fail("missing time");
    c.grid = parse_time(j.at("time"));
    c.nu = number(j, "nu", 0.0, "config");
    if (c.nu < 0.0) fail("nu must be >= 0");
    c.step.nu = c.nu;
    c.mass_tol = number(j, "mass_tol", c.mass_tol, "config");
    if (!(c.mass_tol > 0.0)) fail("mass_tol must be > 0");

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, {"cfl_max", "interpolation", "viscous"}, "solver");
        c.step.cfl_max = number(s, "cfl_max", c.step.cfl_max, "solver");
        if (!(c.step.cfl_max > 0.0 && c.step.cfl_max <= 1.0)) fail("solver.cfl_max must be in (0, 1]");
        const std::string interp = text(s, "interpolation", "monotone_cubic", "solver");
        if (interp == "monotone_cubic") {
            c.step.interp = Interpolation::MonotoneCubic;
        } else if (interp == "fourier") {
            c.step.interp = Interpolation::Fourier;
        } else {
            fail("solver.interpolation must be 'monotone_cubic' or 'fourier'");
        }
        const std::string visc = text(s, "viscous", "backward_euler", "solver");
        if (visc == "backward_euler") {
            c.step.viscous = ViscousMethod::BackwardEuler;
        } else if (visc == "spectral") {
            c.step.viscous = ViscousMethod::Spectral;
        } else {
            fail("solver.viscous must be 'backward_euler' or 'spectral'");
        }
    }
    if (j.contains("output")) {
        check_keys(j.at("output"), {"snapshot_stride"}, "output");
        c.snapshot_stride = unsigned_int(j.at("output"), "snapshot_stride", 0, "output");
    }
    if (j.contains("characteristics")) {
        const json& s = j.at("characteristics");
        const std::string where = "characteristics";
        check_keys(s, {"fan", "x0", "scheme", "stride", "cap"}, where);
        c.chars.fan = numbers(s, "fan", where);
        c.chars.x0 = number(s, "x0", 0.0, where);
        const std::string scheme = text(s, "scheme", "heun", where);
        if (scheme == "heun") {
            c.chars.scheme = characteristics::Scheme::Heun;
        } else if (scheme == "ito") {
            c.chars.scheme = characteristics::Scheme::Ito;
        } else {
            fail("characteristics.scheme must be 'heun' or 'ito'");
        }
        c.chars.stride = unsigned_int(s, "stride", 1, where);
        c.chars.cap = number(s, "cap", 1e6, where);
        if (c.chars.stride < 1) fail("characteristics.stride must be >= 1");
        if (!(c.chars.cap > 0.0)) fail("characteristics.cap must be > 0");
    }
    if (j.contains("crossing")) {
        const json& s = j.at("crossing");
        check_keys(s, {"horizons", "min_agreement"}, "crossing");
        c.crossing.horizons = numbers(s, "horizons", "crossing");
        c.crossing.min_agreement = number(s, "min_agreement", 0.99, "crossing");
    }
    if (j.contains("shock")) {
        const json& s = j.at("shock");
        check_keys(s, {"threshold", "stride"}, "shock");
        c.shock.threshold = number(s, "threshold", c.shock.threshold, "shock");
        c.shock.stride = unsigned_int(s, "stride", 1, "shock");
        if (!(c.shock.threshold > 0.0)) fail("shock.threshold must be > 0");
        if (c.shock.stride < 1) fail("shock.stride must be >= 1");
    }
    if (j.contains("max_principle")) {
        const json& s = j.at("max_principle");
        check_keys(s, {"b0", "tol"}, "max_principle");
        c.max_principle.b0 = number(s, "b0", 0.0, "max_principle");
        c.max_principle.tol = number(s, "tol", 1e-6, "max_principle");
    }
    if (j.contains("blowup")) {
        const json& s = j.at("blowup");
        check_keys(s, {"refinements", "h2_ratio", "a_ratio"}, "blowup");
        for (double v : numbers(s, "refinements", "blowup")) {
            if (!(v >= 1.0) || v != std::floor(v)) fail("blowup.refinements must be positive integers");
            c.blowup.refinements.push_back(static_cast<std::size_t>(v));
        }
        c.blowup.h2_ratio = number(s, "h2_ratio", c.blowup.h2_ratio, "blowup");
        c.blowup.a_ratio = number(s, "a_ratio", c.blowup.a_ratio, "blowup");
    }

    // Per-experiment requirements.
    if (is_field_kind(c.kind)) {
        c.torus();
        if (!power_of_two(c.cells)) fail("grid.cells must be a power of two >= 4");
    }
    if (c.kind == ExperimentKind::MaxPrinciple && !(c.nu > 0.0)) fail("max-principle needs nu > 0");
    if (c.max_principle.b0 != 0.0) {
        if (c.kind != ExperimentKind::MaxPrinciple) fail("max_principle.b0 applies to max-principle runs only");
        if (c.basis->empty()) fail("max_principle.b0 needs at least one noise mode to drive it");
        const double b0 = c.max_principle.b0;
        c.step.zeroth_order = [b0](double) { return b0; };
    }
    if (c.kind == ExperimentKind::BlowupCriterion) {
        if (c.blowup.refinements.empty()) c.blowup.refinements = {c.cells / 2, c.cells};
        if (c.blowup.refinements.size() < 2) fail("blowup.refinements needs at least two cell counts");
        for (std::size_t i = 0; i < c.blowup.refinements.size(); ++i) {
            if (!power_of_two(c.blowup.refinements[i])) fail("blowup.refinements must be powers of two >= 4");
            if (i > 0 && c.blowup.refinements[i] <= c.blowup.refinements[i - 1]) {
                fail("blowup.refinements must increase");
            }
        }
        if (!(c.blowup.h2_ratio > 1.0 && c.blowup.a_ratio > 1.0)) fail("blowup ratios must be > 1");
    }
    if (c.kind == ExperimentKind::Characteristics || c.kind == ExperimentKind::Crossing) {
        auto& fan = c.chars.fan;
        if (fan.size() < 2) fail("characteristics.fan needs at least two positions");
        for (std::size_t i = 1; i < fan.size(); ++i) {
            if (!(fan[i] > fan[i - 1])) fail("characteristics.fan must be strictly increasing");
        }
    }
    if (c.kind == ExperimentKind::Crossing) {
        const auto& modes = c.basis->modes();
        const auto* lin = modes.size() == 1 ? std::get_if<noise::Linear>(&modes[0]) : nullptr;
        if (!lin) fail("crossing needs exactly one noise mode of kind 'linear'");
        c.crossing.alpha = lin->slope;
        c.crossing.beta = lin->offset;
        if (c.crossing.horizons.empty()) c.crossing.horizons = {c.grid.t_end};
        for (std::size_t i = 0; i < c.crossing.horizons.size(); ++i) {
            const double h = c.crossing.horizons[i];
            if (!(h > c.grid.t0 && h <= c.grid.t_end)) fail("crossing.horizons must lie in (t0, t_end]");
            if (i > 0 && !(h > c.crossing.horizons[i - 1])) fail("crossing.horizons must increase");
        }
        if (!(c.crossing.min_agreement >= 0.0 && c.crossing.min_agreement <= 1.0)) {
            fail("crossing.min_agreement must be in [0, 1]");
        }
    }
    if (c.kind == ExperimentKind::SlopeMoments) c.basis->check_domain(c.chars.x0);
    return c;
}

ExperimentConfig load(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) fail("cannot read config " + file.string());
    json j;
    try {
        j = json::parse(is, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        fail(std::string("parse error: ") + e.what());
    }
    try {
        return parse(j, file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
    } catch (const DomainError& e) {
        fail(e.what());
    }
}

std::size_t resolve_workers(std::optional<std::size_t> flag) {
    if (flag) {
        if (*flag < 1) fail("--workers must be >= 1");
        return *flag;
    }
    if (const char* env = std::getenv("WORKERS"); env && *env) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (*end != '\0' || v < 1) fail(std::string("WORKERS must be a positive integer, got '") + env + "'");
        return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(std::max(1, omp_get_num_procs()));
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_hash(const json& j) { return fnv1a(j.dump()); }

}  // namespace sburgers::config
