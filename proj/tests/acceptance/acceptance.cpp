// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Criteria that have a shipped config (7, 9, 10, 11) go through experiments::run on that config,
// so the same code path as the CLI is exercised. The rest drive the library directly.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "sburgers/characteristics.hpp"
#include "sburgers/config.hpp"
#include "sburgers/experiments.hpp"
#include "sburgers/field.hpp"
#include "sburgers/mclab.hpp"

#ifndef SBURGERS_CONFIG_DIR
#error "SBURGERS_CONFIG_DIR must point at configs/"
#endif
#ifndef SBURGERS_WORK_DIR
#error "SBURGERS_WORK_DIR must be a scratch directory"
#endif

using namespace sburgers;
namespace fs = std::filesystem;

namespace {

const double kPi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string detail;
};

Verdict verdict(bool pass, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return {pass, buf};
}

fs::path work(const std::string& name) { return fs::path(SBURGERS_WORK_DIR) / name; }

config::ExperimentConfig load_config(const std::string& name) {
    return config::load(fs::path(SBURGERS_CONFIG_DIR) / name);
}

const experiments::Check* find_check(const experiments::Outcome& o, const std::string& name) {
    for (const auto& c : o.checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Every regular file under a and b, compared byte for byte.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
    files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const fs::path other = b / fs::relative(e.path(), a);
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
        ++files;
    }
    std::size_t in_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(b)) in_b += e.is_regular_file();
    return in_b == files;
}

experiments::Outcome run_config(const std::string& name, const fs::path& out) {
    const auto cfg = load_config(name);
    fs::remove_all(out);
    auto o = experiments::run(cfg, out, 1);
    experiments::write_manifest(cfg, o, out, 1);
    return o;
}

// ---------------------------------------------------------------------------------------------

Verdict c1_deterministic_shock() {
    const noise::Torus dom{0.0, 1.0};
    const InitialProfile u0{profile::SineWave{1.0, 2.0 * kPi, 0.0}};
    const auto field = GridField::from_profile(u0, dom, 1024);
    const noise::NoiseBasis none({}, dom);
    const auto path = sample_path(1, 0, TimeGrid(0.0, 0.25, 2500), 0);
    const auto r = run(field, none, path, StepParams{});
    const double t = gradient_blowup_time(r.diagnostics, field.dx());
    const double exact = 1.0 / (2.0 * kPi);
    const double rel = std::abs(t - exact) / exact;
    return verdict(rel < 0.02, "t*=%.6f exact=%.6f rel_err=%.4f limit=0.02", t, exact, rel);
}

Verdict c2_riccati_strong_order() {
    using namespace characteristics;
    const noise::NoiseBasis lin({noise::Linear{1.0, 0.0}}, noise::Line{});
    const InitialProfile u0{profile::NegativeLine{-1.0, 0.0}};  // Y0 = +1
    const double dts[3] = {1e-2, 1e-3, 1e-4};
    double sq[3] = {0, 0, 0};
    const std::size_t n_paths = 200;
    for (std::size_t p = 0; p < n_paths; ++p) {
        const auto p2 = sample_path(7, p, TimeGrid(0.0, 1.0, 100), 1);
        const auto p3 = refine(p2, 10), p4 = refine(p3, 10), fine = refine(p4, 10);
        // oracle on a grid 10x finer than the finest scheme grid
        const auto I = integrated_gbm(fine, 0, 1.0);
        const double oracle = riccati_slope(1.0, 1.0, fine, I).back();
        const BrownianPath* paths[3] = {&p2, &p3, &p4};
        for (int j = 0; j < 3; ++j) {
            const auto tr = integrate({make_state(u0, 0.0)}, lin, *paths[j], Scheme::Ito, paths[j]->steps());
            const double e = tr.snapshots.back()[0].Y - oracle;
            sq[j] += e * e;
        }
    }
    double rms[3];
    for (int j = 0; j < 3; ++j) rms[j] = std::sqrt(sq[j] / static_cast<double>(n_paths));
    const double slope = (std::log(rms[0]) - std::log(rms[2])) / (std::log(dts[0]) - std::log(dts[2]));
    return verdict(slope >= 0.35 && slope <= 0.65, "rms(1e-2,1e-3,1e-4)=%.3g,%.3g,%.3g order=%.3f range=[0.35,0.65]",
                   rms[0], rms[1], rms[2], slope);
}

mclab::CrossingProblem crossing_problem(double beta) {
    mclab::CrossingProblem cp;
    cp.alpha = 1.0;
    cp.beta = beta;
    cp.u0 = InitialProfile{profile::NegativeLine{1.0, 0.0}};
    cp.fan = {-1.0, -0.5, 0.0, 0.5, 1.0};
    cp.grid = TimeGrid(0.0, 8.0, 8000);
    cp.seed = 3;
    return cp;
}

Verdict c3_crossing_hitting() {
    const auto cp = crossing_problem(0.0);
    const double horizons[] = {1.0, 2.0, 4.0, 8.0};
    const auto r = mclab::crossing_time_experiment(cp, 1000, horizons);
    return verdict(r.within_two_dt >= 0.99, "paths_within_2dt=%.4f limit=0.99 max_gap=%.3g", r.within_two_dt,
                   r.max_discrepancy);
}

Verdict c4_beta_invariance() {
    const auto a = mclab::crossing_ensemble_omp(crossing_problem(0.0), 0, 1000);
    const auto b = mclab::crossing_ensemble_omp(crossing_problem(5.0), 0, 1000);
    const double dt = crossing_problem(0.0).grid.dt(), t_end = crossing_problem(0.0).grid.t_end;
    double worst = 0.0;
    std::size_t fired = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, mclab::passage_discrepancy(a[i].crossing, b[i].crossing, t_end));
        fired += !std::isnan(a[i].crossing);
    }
    return verdict(worst <= 2.0 * dt, "max|tau(beta=0)-tau(beta=5)|=%.3g limit=%.3g crossed=%zu/1000", worst, 2.0 * dt,
                   fired);
}

Verdict c5_expectation_bound() {
    // constant xi: slope dynamics carry no noise, mean is the Riccati solution
    mclab::SlopeProblem flat;
    flat.basis = std::make_shared<noise::NoiseBasis>(std::vector<noise::NoiseMode>{noise::Linear{0.0, 0.7}},
                                                     noise::Line{});
    flat.u0 = InitialProfile{profile::NegativeLine{2.0, 0.0}};
    flat.grid = TimeGrid(0.0, 0.45, 4500);
    flat.stride = 10;
    flat.seed = 3;
    const auto rf = mclab::expected_slope_experiment(flat, 200);
    double exact_err = 0.0;
    for (std::size_t i = 0; i < rf.ensemble.estimate.size(); ++i) {
        const double t = rf.ensemble.estimate.times[i];
        exact_err = std::max(exact_err, std::abs(rf.ensemble.estimate.mean(i) + 2.0 / (1.0 - 2.0 * t)));
    }

    const auto cfg = load_config("slope_linear.json");
    mclab::SlopeProblem lin;
    lin.basis = cfg.basis;
    lin.u0 = *cfg.u0;
    lin.x0 = cfg.chars.x0;
    lin.grid = cfg.grid;
    lin.stride = cfg.chars.stride;
    lin.seed = cfg.seed;
    lin.scheme = cfg.chars.scheme;
    const auto rl = mclab::expected_slope_experiment(lin, cfg.n_paths);
    const bool ok = rf.C == 0.0 && exact_err < 1e-6 && rl.check.pass && rl.check.checked > 0;
    return verdict(ok, "const-xi C=%.3g max|mean-exact|=%.3g limit=1e-6; linear C=%.3g times=%zu violations=%zu",
                   rf.C, exact_err, rl.C, rl.check.checked, rl.check.violations);
}

Verdict c6_no_blowup() {
    mclab::SlopeProblem sp;
    sp.basis = std::make_shared<noise::NoiseBasis>(noise::fourier_family(50, 1.0, 2.0, noise::Torus{0.0, 2.0 * kPi}));
    sp.u0 = InitialProfile{profile::NegativeLine{-1.0, 0.0}};  // Y0 = +1
    sp.x0 = 1.0;
    sp.grid = TimeGrid(0.0, 5.0, 5000);
    sp.stride = 50;
    sp.seed = 5;
    const auto r = mclab::expected_slope_experiment(sp, 1000);
    const bool ok = r.ensemble.blowups == 0 && r.ensemble.sign_flips == 0;
    return verdict(ok, "blowups=%zu sign_flips=%zu paths=1000 T=5", r.ensemble.blowups, r.ensemble.sign_flips);
}

Verdict c7_rankine_hugoniot() {
    const auto o = run_config("riemann_shock.json", work("c7"));
    const auto* srh = find_check(o, "stochastic_rankine_hugoniot");
    const auto* strip = find_check(o, "noise_stripped_speed");
    const auto* lax = find_check(o, "lax_entropy");
    if (!srh || !strip || !lax) return {false, "missing shock checks"};
    return verdict(srh->pass && strip->pass && lax->pass,
                   "srh_residual=%.3g limit=%.3g noise_stripped=%.3g limit=%.3g lax=%s", srh->value, srh->limit,
                   strip->value, strip->limit, lax->pass ? "ok" : "violated");
}

Verdict c8_advection() {
    using namespace characteristics;
    const noise::Torus dom{0.0, 1.0};
    const auto basis = noise::fourier_family(8, 0.1, 2.0, dom);
    const InitialProfile u0{profile::SineWave{1.0, 2.0 * kPi, 0.0}};
    std::vector<double> fan;
    for (int i = 1; i < 20; ++i) fan.push_back(i / 20.0);
    // shock near 0.159; stop at 0.08 and refine one common path
    const auto base = sample_path(21, 0, TimeGrid(0.0, 0.08, 200), basis.size());
    const std::size_t cells[3] = {256, 512, 1024}, factor[3] = {1, 2, 4};
    double res[3];
    for (int j = 0; j < 3; ++j) {
        const auto path = refine(base, factor[j]);
        RunOptions ro;
        ro.snapshot_stride = 10 * factor[j];
        const auto r = run(GridField::from_profile(u0, dom, cells[j]), basis, path, StepParams{}, ro);
        const auto tr = integrate(make_fan(u0, fan), basis, path, Scheme::Heun, 10 * factor[j]);
        res[j] = advection_residual(tr, r.snapshots);
    }
    const bool ok = res[2] < 1e-2 && res[1] < res[0] && res[2] < res[1];
    return verdict(ok, "residual(N=256,512,1024)=%.3g,%.3g,%.3g limit=1e-2 at N=1024, decreasing", res[0], res[1],
                   res[2]);
}

Verdict c9_max_principle() {
    const auto plain = run_config("max_principle.json", work("c9"));
    const auto envelope = run_config("max_principle_b0.json", work("c9_b0"));
    const auto* a = find_check(plain, "max_principle");
    const auto* b = find_check(envelope, "max_principle");
    if (!a || !b) return {false, "missing max_principle check"};
    return verdict(a->pass && b->pass, "worst sup|u_t|/bound: plain=%.9f b0=%.9f limit=1+1e-6 t", a->value, b->value);
}

Verdict c10_blowup_criterion() {
    const auto o = run_config("blowup_criterion.json", work("c10"));
    const auto* c = find_check(o, "h2_vs_A_classification");
    if (!c) return {false, "missing classification check"};
    return verdict(c->pass, "agreeing runs=%.0f of %.0f (deterministic + noisy paths)", c->value, c->limit);
}

Verdict c11_conservation_reproducibility() {
    // constant-xi runs: Riemann data (shock + rarefaction) and a sine wave through its shock
    double drift = 0.0;
    const noise::Torus dom{0.0, 1.0};
    const noise::NoiseBasis cst({noise::Linear{0.0, 1.0}}, dom);
    const InitialProfile data[2] = {InitialProfile{profile::Step{1.0, 0.0, 0.1, 0.5}},
                                    InitialProfile{profile::SineWave{1.0, 2.0 * kPi, 0.3}}};
    for (const auto& u0 : data) {
        for (std::uint64_t p = 0; p < 5; ++p) {
            const auto path = sample_path(13, p, TimeGrid(0.0, 0.4, 800), 1);
            const auto r = run(GridField::from_profile(u0, dom, 512), cst, path, StepParams{});
            for (double m : r.diagnostics.mass) drift = std::max(drift, std::abs(m - r.diagnostics.mass.front()));
        }
    }

    bool identical = true;
    std::size_t files = 0;
    for (const char* name : {"sine_shock.json", "riemann_shock.json", "crossing.json"}) {
        const std::string stem = fs::path(name).stem().string();
        run_config(name, work("c11_a_" + stem));
        run_config(name, work("c11_b_" + stem));
        std::size_t n = 0;
        identical = identical && same_tree(work("c11_a_" + stem), work("c11_b_" + stem), n);
        files += n;
    }
    return verdict(drift < 1e-10 && identical, "mass_drift=%.3g limit=1e-10; reruns byte-identical=%s (%zu files)",
                   drift, identical ? "yes" : "no", files);
}

}  // namespace

int main() {
    fs::create_directories(SBURGERS_WORK_DIR);
    omp_set_num_threads(1);  // single-worker, as the reproducibility criterion asks

    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"deterministic shock time", c1_deterministic_shock},
        {"Riccati slope strong order", c2_riccati_strong_order},
        {"crossing vs hitting time", c3_crossing_hitting},
        {"beta invariance of crossing", c4_beta_invariance},
        {"expectation bound", c5_expectation_bound},
        {"no blow-up for positive slope", c6_no_blowup},
        {"stochastic Rankine-Hugoniot", c7_rankine_hugoniot},
        {"advection along characteristics", c8_advection},
        {"maximum principle", c9_max_principle},
        {"blow-up criterion coupling", c10_blowup_criterion},
        {"conservation and reproducibility", c11_conservation_reproducibility},
    };

    int failed = 0, index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
