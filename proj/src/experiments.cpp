#include "sburgers/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sburgers/csv.hpp"
#include "sburgers/mclab.hpp"
#include "sburgers/shocks.hpp"

#ifndef SBURGERS_VERSION
#define SBURGERS_VERSION "unknown"
#endif

namespace sburgers::experiments {

using config::ExperimentConfig;
using config::ExperimentKind;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string path_tag(std::size_t p) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%05zu", p);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double max_abs_drift(const std::vector<double>& series) {
    double worst = 0.0;
    for (double m : series) worst = std::max(worst, std::abs(m - series.front()));
    return worst;
}

mclab::FieldProblem field_problem(const ExperimentConfig& cfg, std::size_t cells,
                                  std::shared_ptr<const noise::NoiseBasis> basis, std::size_t snapshot_stride) {
    mclab::FieldProblem p;
    p.initial = GridField::from_profile(*cfg.u0, cfg.torus(), cells);
    p.basis = std::move(basis);
    p.params = cfg.step;
    p.grid = cfg.grid;
    p.seed = cfg.seed;
    p.options.snapshot_stride = snapshot_stride;
    return p;
}

std::vector<RunResult> field_runs(const mclab::FieldProblem& p, std::size_t n, std::size_t workers) {
    return workers > 1 ? mclab::field_ensemble_omp(p, 0, n) : mclab::field_ensemble_serial(p, 0, n);
}

void write_diagnostics(Outcome& o, const fs::path& out, const std::string& rel, const Diagnostics& d) {
    auto os = csv::open(out / rel);
    write_diagnostics_csv(os, d);
    o.files.push_back(rel);
}

// ------------------------------------------------------------------ spde

Outcome run_spde(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    Outcome o;
    const auto fp = field_problem(cfg, cfg.cells, cfg.basis, cfg.snapshot_stride);
    const auto runs = field_runs(fp, cfg.n_paths, workers);
    const double dx = fp.initial.dx();

    auto table = csv::open(out / "paths.csv");
    table << "path_index,shock_time,mass_drift,final_sup\n";
    o.files.push_back("paths.csv");
    double mass_drift = 0.0, t_sum = 0.0;
    std::size_t t_count = 0;
    json per_path = json::array();
    for (std::size_t p = 0; p < runs.size(); ++p) {
        const Diagnostics& d = runs[p].diagnostics;
        write_diagnostics(o, out, "diagnostics/" + path_tag(p) + ".csv", d);
        const double ts = gradient_blowup_time(d, dx);
        const double drift = max_abs_drift(d.mass);
        mass_drift = std::max(mass_drift, drift);
        if (ts > 0.0) {
            t_sum += ts;
            ++t_count;
        }
        table << p << ',' << csv::fmt(ts > 0.0 ? ts : kNaN) << ',' << csv::fmt(drift) << ','
              << csv::fmt(d.sup.back()) << '\n';
        per_path.push_back(finite_or_null(ts > 0.0 ? ts : kNaN));
    }
    if (!runs.empty()) {
        for (std::size_t k = 0; k < runs[0].snapshots.size(); ++k) {
            char name[48];
            std::snprintf(name, sizeof name, "snapshots/%s_s%05zu.csv", path_tag(0).c_str(), k);
            auto os = csv::open(out / name);
            write_snapshot_csv(os, runs[0].snapshots[k]);
            o.files.push_back(name);
        }
    }

    const auto probe = noise::NoiseBasis({}, cfg.torus()).default_probe();
    const double theta = steepest_negative_slope(*cfg.u0, probe);
    o.summary["dx"] = dx;
    o.summary["shock_time_estimate"] = finite_or_null(t_count ? t_sum / static_cast<double>(t_count) : kNaN);
    o.summary["shock_time_per_path"] = per_path;
    o.summary["characteristic_shock_time"] = finite_or_null(theta > 0.0 ? 1.0 / theta : kNaN);
    o.summary["mass_drift_max"] = mass_drift;

    const bool conservative = cfg.basis->uniform() && !cfg.step.zeroth_order;
    if (conservative) {
        o.checks.push_back({"mass_conservation", mass_drift < cfg.mass_tol, mass_drift, cfg.mass_tol,
                            "max |mass(t) - mass(0)| over paths"});
    }
    if (cfg.nu > 0.0 && !cfg.step.zeroth_order) {
        double worst = 0.0;
        bool ok = true;
        for (const auto& r : runs) {
            const auto rep = max_principle_monitor(r.diagnostics, {0.0, 1e-6});
            worst = std::max(worst, rep.worst_ratio);
            ok = ok && !rep.violated;
        }
        o.checks.push_back({"max_principle", ok, worst, 1.0, "max_t sup|u_t| / sup|u_0|, tolerance 1e-6 per unit time"});
    }
    return o;
}

// ------------------------------------------------------------------ characteristics

Outcome run_characteristics(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    using namespace characteristics;
    Outcome o;
    std::vector<Trajectory> trajs(cfg.n_paths);
    const StepOptions opts{cfg.chars.cap};
    mclab::for_each_index(cfg.n_paths, workers > 1, [&](std::size_t p) {
        const BrownianPath path = sample_path(cfg.seed, p, cfg.grid, cfg.basis->size());
        trajs[p] = integrate(make_fan(*cfg.u0, cfg.chars.fan), *cfg.basis, path, cfg.chars.scheme, cfg.chars.stride,
                             opts);
    });

    auto os = csv::open(out / "trajectories.csv");
    o.files.push_back("trajectories.csv");
    std::size_t blowups = 0, flips = 0, barrier_breaks = 0;
    json ordering_lost = json::array();
    for (std::size_t p = 0; p < trajs.size(); ++p) {
        write_trajectory_csv(os, trajs[p], p, p == 0);
        double lost = kNaN;
        for (std::size_t i = 0; i < trajs[p].snapshots.size(); ++i) {
            const auto& snap = trajs[p].snapshots[i];
            if (!sign_barrier_holds(snap)) ++barrier_breaks;
            if (std::isnan(lost) && !ordering_holds(snap)) lost = trajs[p].times[i];
        }
        for (const State& s : trajs[p].snapshots.back()) {
            blowups += s.fate == Fate::BlowUp;
            flips += s.fate == Fate::SignFlip;
        }
        ordering_lost.push_back(finite_or_null(lost));
    }
    o.summary["blowups"] = blowups;
    o.summary["sign_flips"] = flips;
    o.summary["ordering_lost_at"] = ordering_lost;
    o.checks.push_back({"sign_barrier", flips == 0 && barrier_breaks == 0, static_cast<double>(flips + barrier_breaks),
                        0.0, "characteristics whose slope changed sign"});
    return o;
}

// ------------------------------------------------------------------ crossing

Outcome run_crossing(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    Outcome o;
    mclab::CrossingProblem cp;
    cp.alpha = cfg.crossing.alpha;
    cp.beta = cfg.crossing.beta;
    cp.u0 = *cfg.u0;
    cp.fan = cfg.chars.fan;
    cp.grid = cfg.grid;
    cp.seed = cfg.seed;
    const auto r = mclab::crossing_time_experiment(cp, cfg.n_paths, cfg.crossing.horizons, workers > 1);

    auto os = csv::open(out / "crossings.csv");
    os << "path_index,crossing_time,hitting_time,discrepancy\n";
    for (std::size_t p = 0; p < r.samples.size(); ++p) {
        const auto& s = r.samples[p];
        os << p << ',' << csv::fmt(s.crossing) << ',' << csv::fmt(s.hitting) << ','
           << csv::fmt(mclab::passage_discrepancy(s.crossing, s.hitting, cfg.grid.t_end)) << '\n';
    }
    auto cdf = csv::open(out / "crossed_fraction.csv");
    cdf << "horizon,crossed_fraction\n";
    for (std::size_t i = 0; i < r.horizons.size(); ++i) {
        cdf << csv::fmt(r.horizons[i]) << ',' << csv::fmt(r.crossed_fraction[i]) << '\n';
    }
    o.files = {"crossings.csv", "crossed_fraction.csv"};

    o.summary["theta"] = r.theta;
    o.summary["alpha"] = cp.alpha;
    o.summary["beta"] = cp.beta;
    o.summary["max_discrepancy"] = r.max_discrepancy;
    o.summary["within_two_dt"] = r.within_two_dt;
    o.summary["horizons"] = r.horizons;
    o.summary["crossed_fraction"] = r.crossed_fraction;
    o.checks.push_back({"crossing_hitting_agreement", r.within_two_dt >= cfg.crossing.min_agreement, r.within_two_dt,
                        cfg.crossing.min_agreement, "fraction of paths with |tau_cross - tau_hit| <= 2 dt"});
    const bool monotone = std::is_sorted(r.crossed_fraction.begin(), r.crossed_fraction.end());
    o.checks.push_back({"crossed_fraction_monotone", monotone, 0.0, 0.0, "crossed-by-T fraction nondecreasing in T"});
    return o;
}

// ------------------------------------------------------------------ slope moments

Outcome run_slope_moments(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    Outcome o;
    mclab::SlopeProblem sp;
    sp.basis = cfg.basis;
    sp.u0 = *cfg.u0;
    sp.x0 = cfg.chars.x0;
    sp.grid = cfg.grid;
    sp.stride = cfg.chars.stride;
    sp.seed = cfg.seed;
    sp.scheme = cfg.chars.scheme;
    sp.cap = cfg.chars.cap;
    // always the chunked kernel: its merge order is fixed, so the bits do not depend on `workers`
    (void)workers;
    const auto r = mclab::expected_slope_experiment(sp, cfg.n_paths, true);
    const auto& est = r.ensemble.estimate;

    auto os = csv::open(out / "slope_moments.csv");
    os << "t,mean,standard_error,n_alive,censored,lower_bound_mean,bound\n";
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double t = est.times[i] - cfg.grid.t0;
        const double bound = r.bound ? r.bound->value(t) : mclab::positive_ceiling(r.Y0, 0.5 * r.D, t);
        os << csv::fmt(est.times[i]) << ',' << csv::fmt(est.alive[i].n > 0 ? est.mean(i) : kNaN) << ','
           << csv::fmt(est.alive[i].n > 0 ? est.standard_error(i) : kNaN) << ','
           << static_cast<std::size_t>(est.alive[i].n) << ',' << est.censored[i] << ','
           << csv::fmt(est.lower_bound_mean(i)) << ',' << csv::fmt(bound) << '\n';
    }
    o.files.push_back("slope_moments.csv");

    o.summary["Y0"] = r.Y0;
    o.summary["C"] = r.C;
    o.summary["D"] = r.D;
    o.summary["predicted_blowup"] = finite_or_null(r.predicted_blowup);
    o.summary["empirical_divergence"] = finite_or_null(r.empirical_divergence);
    o.summary["blowups"] = r.ensemble.blowups;
    o.summary["sign_flips"] = r.ensemble.sign_flips;
    o.summary["bound_points_checked"] = r.check.checked;
    o.summary["bound_worst_excess_se"] = finite_or_null(r.check.worst_excess);
    o.checks.push_back({"expectation_bound", r.check.pass, static_cast<double>(r.check.violations), 0.0,
                        "output times with mean > bound + 3 SE"});
    o.checks.push_back({"sign_barrier", r.ensemble.sign_flips == 0, static_cast<double>(r.ensemble.sign_flips), 0.0,
                        "paths whose slope changed sign"});
    if (r.Y0 > 0.0) {
        o.checks.push_back({"no_blowup_positive_slope", r.ensemble.blowups == 0,
                            static_cast<double>(r.ensemble.blowups), 0.0, "blow-ups with Y0 > 0"});
    }
    return o;
}

// ------------------------------------------------------------------ shock tracking

struct ShockPathResult {
    shocks::ShockCurve detected;
    shocks::ShockCurve integrated;
    double residual = kNaN;
    double stripped_dev = kNaN;
    double mass_drift = 0.0;
    bool admissible = true;
};

Outcome run_shock_track(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    Outcome o;
    const auto fp = field_problem(cfg, cfg.cells, cfg.basis, cfg.shock.stride);
    const double dx = fp.initial.dx();
    const double L = cfg.torus().length;

    // Riemann reference line for step data under rigid-shift noise.
    const auto* step = std::get_if<profile::Step>(&cfg.u0->descriptor());
    const bool reference = cfg.basis->uniform() && step && step->inside > step->outside;
    const double speed = reference ? 0.5 * (step->inside + step->outside) : 0.0;
    const double catch_up =
        reference ? 2.0 * (step->right - step->left) / (step->inside - step->outside) : 0.0;  // rarefaction reaches shock

    std::vector<ShockPathResult> res(cfg.n_paths);
    mclab::for_each_index(cfg.n_paths, workers > 1, [&](std::size_t p) {
        const BrownianPath path = sample_path(cfg.seed, p, cfg.grid, cfg.basis->size());
        const RunResult run = sburgers::run(fp.initial, *cfg.basis, path, cfg.step, fp.options);
        ShockPathResult& r = res[p];
        r.mass_drift = max_abs_drift(run.diagnostics.mass);
        r.detected = shocks::detect_shock(run.snapshots, cfg.shock.threshold);
        if (r.detected.size() < 2) return;
        r.admissible = shocks::lax_admissible(r.detected);
        const auto& det = r.detected;
        const shocks::StateProvider states = [&det](double t, double) {
            const auto it = std::upper_bound(det.t.begin(), det.t.end(), t);
            const std::size_t i = it == det.t.begin() ? 0 : static_cast<std::size_t>(it - det.t.begin()) - 1;
            return std::pair{det.u_minus[i], det.u_plus[i]};
        };
        r.integrated = shocks::integrate_srh(det.s.front(), states, *cfg.basis, path);
        r.residual = shocks::srh_residual(det, r.integrated, L);
        if (reference) {
            // shift accumulated by the rigid noise at every step
            std::vector<double> shift(cfg.grid.n_steps + 1, 0.0);
            for (std::size_t n = 0; n < cfg.grid.n_steps; ++n) {
                shift[n + 1] = shift[n] + cfg.basis->displacement(0.0, path.increment(n));
            }
            r.stripped_dev = 0.0;
            for (std::size_t i = 0; i < det.size(); ++i) {
                const double t = det.t[i] - cfg.grid.t0;
                if (t >= catch_up) break;
                const auto n = static_cast<std::size_t>(std::llround(t / cfg.grid.dt()));
                double d = det.s[i] - shift[n] - (step->right + speed * t);
                d -= L * std::round(d / L);
                r.stripped_dev = std::max(r.stripped_dev, std::abs(d));
            }
        }
    });

    auto table = csv::open(out / "shock_paths.csv");
    table << "path_index,samples,srh_residual,stripped_deviation,lax_admissible\n";
    o.files.push_back("shock_paths.csv");
    double worst_res = 0.0, worst_strip = 0.0, worst_mass = 0.0;
    std::size_t missing = 0, inadmissible = 0;
    for (std::size_t p = 0; p < res.size(); ++p) {
        const auto& r = res[p];
        table << p << ',' << r.detected.size() << ',' << csv::fmt(r.residual) << ',' << csv::fmt(r.stripped_dev) << ','
              << (r.admissible ? 1 : 0) << '\n';
        {
            const std::string rel = "shocks/" + path_tag(p) + "_detected.csv";
            auto os = csv::open(out / rel);
            shocks::write_shock_csv(os, r.detected);
            o.files.push_back(rel);
        }
        {
            const std::string rel = "shocks/" + path_tag(p) + "_srh.csv";
            auto os = csv::open(out / rel);
            shocks::write_shock_csv(os, r.integrated);
            o.files.push_back(rel);
        }
        if (std::isnan(r.residual)) {
            ++missing;
        } else {
            worst_res = std::max(worst_res, r.residual);
        }
        if (!std::isnan(r.stripped_dev)) worst_strip = std::max(worst_strip, r.stripped_dev);
        worst_mass = std::max(worst_mass, r.mass_drift);
        inadmissible += !r.admissible;
    }
    o.summary["dx"] = dx;
    o.summary["srh_residual_max"] = worst_res;
    o.summary["paths_without_shock"] = missing;
    o.summary["mass_drift_max"] = worst_mass;
    if (reference) {
        o.summary["reference_speed"] = speed;
        o.summary["stripped_deviation_max"] = worst_strip;
    }
    o.checks.push_back({"shock_detected", missing == 0, static_cast<double>(missing), 0.0,
                        "paths with fewer than two shock samples"});
    o.checks.push_back({"stochastic_rankine_hugoniot", missing == 0 && worst_res < 3.0 * dx, worst_res, 3.0 * dx,
                        "max |s_detected - s_integrated| over paths"});
    o.checks.push_back({"lax_entropy", inadmissible == 0, static_cast<double>(inadmissible), 0.0,
                        "paths with u_- <= u_+ at some sample"});
    if (reference) {
        o.checks.push_back({"noise_stripped_speed", worst_strip < 2.0 * dx, worst_strip, 2.0 * dx,
                            "max |s - shift - (s0 + speed t)| before the rarefaction arrives"});
    }
    if (cfg.basis->uniform()) {
        o.checks.push_back({"mass_conservation", worst_mass < cfg.mass_tol, worst_mass, cfg.mass_tol,
                            "max |mass(t) - mass(0)| over paths"});
    }
    return o;
}

// ------------------------------------------------------------------ maximum principle

Outcome run_max_principle(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    Outcome o;
    const auto fp = field_problem(cfg, cfg.cells, cfg.basis, 0);
    const auto runs = field_runs(fp, cfg.n_paths, workers);
    const MaxPrincipleOptions mp{cfg.max_principle.b0, cfg.max_principle.tol};

    auto table = csv::open(out / "max_principle.csv");
    table << "path_index,worst_ratio,worst_time,violations\n";
    o.files.push_back("max_principle.csv");
    double worst = 0.0;
    std::size_t violated = 0;
    bool energy_ok = true;
    double energy_rise = 0.0;
    for (std::size_t p = 0; p < runs.size(); ++p) {
        const auto& d = runs[p].diagnostics;
        const auto rep = max_principle_monitor(d, mp);
        table << p << ',' << csv::fmt(rep.worst_ratio) << ',' << csv::fmt(rep.worst_time) << ',' << rep.violations
              << '\n';
        worst = std::max(worst, rep.worst_ratio);
        violated += rep.violated;
        for (std::size_t i = 1; i < d.size(); ++i) {
            const double rise = d.energy[i] - d.energy[i - 1];
            energy_rise = std::max(energy_rise, rise);
            if (rise > 1e-12 * d.energy[0]) energy_ok = false;
        }
    }
    if (!runs.empty()) write_diagnostics(o, out, "diagnostics/" + path_tag(0) + ".csv", runs[0].diagnostics);
    o.summary["envelope_rate_c"] = mp.c;
    o.summary["worst_ratio"] = worst;
    o.summary["paths_violated"] = violated;
    o.checks.push_back({"max_principle", violated == 0, worst, 1.0,
                        mp.c == 0.0 ? "sup|u_t| <= sup|u_0| (1 + tol t)" : "sup|u_t| <= e^{-c W_0(t)} sup|u_0| (1 + tol t)"});
    if (cfg.basis->empty()) {
        o.summary["energy_max_rise"] = energy_rise;
        o.checks.push_back({"energy_decay", energy_ok, energy_rise, 0.0, "per-step change of ||u||_2^2"});
    }
    return o;
}

// ------------------------------------------------------------------ blow-up criterion

Outcome run_blowup_criterion(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    Outcome o;
    const auto& Ns = cfg.blowup.refinements;
    const std::size_t coarse = Ns[Ns.size() - 2], fine = Ns.back();

    struct Case {
        std::string label;
        std::shared_ptr<const noise::NoiseBasis> basis;
        std::size_t paths;
    };
    std::vector<Case> cases;
    if (!cfg.basis->empty()) {
        cases.push_back({"deterministic", std::make_shared<const noise::NoiseBasis>(std::vector<noise::NoiseMode>{},
                                                                                    cfg.basis->domain()),
                         1});
    }
    cases.push_back({cfg.basis->empty() ? "deterministic" : "noisy", cfg.basis, cfg.n_paths});

    auto table = csv::open(out / "blowup.csv");
    table << "run,path_index,h2_ratio,a_ratio,h2_blowup,a_blowup,agree,t_h2,t_a\n";
    o.files.push_back("blowup.csv");
    std::size_t agree = 0, total = 0, blown = 0;
    for (const Case& c : cases) {
        const auto lo = field_runs(field_problem(cfg, coarse, c.basis, 0), c.paths, workers);
        const auto hi = field_runs(field_problem(cfg, fine, c.basis, 0), c.paths, workers);
        for (std::size_t p = 0; p < c.paths; ++p) {
            const auto k = classify_blowup(lo[p].diagnostics, hi[p].diagnostics, cfg.blowup.h2_ratio,
                                           cfg.blowup.a_ratio);
            table << c.label << ',' << p << ',' << csv::fmt(k.h2_ratio) << ',' << csv::fmt(k.a_ratio) << ','
                  << k.h2_blowup << ',' << k.a_blowup << ',' << k.agree() << ','
                  << csv::fmt(k.t_h2 >= 0.0 ? k.t_h2 : kNaN) << ',' << csv::fmt(k.t_a >= 0.0 ? k.t_a : kNaN) << '\n';
            agree += k.agree();
            blown += k.h2_blowup;
            ++total;
        }
        if (c.label == "deterministic") {
            write_diagnostics(o, out, "diagnostics/deterministic_N" + std::to_string(fine) + ".csv", hi[0].diagnostics);
            const double ts = gradient_blowup_time(hi[0].diagnostics, cfg.torus().length / static_cast<double>(fine));
            o.summary["deterministic_shock_time"] = finite_or_null(ts > 0.0 ? ts : kNaN);
        }
    }
    o.summary["runs"] = total;
    o.summary["agreeing_runs"] = agree;
    o.summary["runs_blown_up"] = blown;
    o.summary["coarse_cells"] = coarse;
    o.summary["fine_cells"] = fine;
    o.checks.push_back({"h2_vs_A_classification", agree == total, static_cast<double>(agree),
                        static_cast<double>(total), "runs where the H2 and A refinement tests agree"});
    return o;
}

}  // namespace

bool Outcome::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Outcome::first_failure() const {
    for (const Check& c : checks) {
        if (!c.pass) return c.name + " value=" + csv::fmt(c.value) + " limit=" + csv::fmt(c.limit);
    }
    return {};
}

const char* code_version() { return SBURGERS_VERSION; }

Outcome run(const ExperimentConfig& cfg, const fs::path& out_dir, std::size_t workers) {
    fs::create_directories(out_dir);
    switch (cfg.kind) {
        case ExperimentKind::Spde: return run_spde(cfg, out_dir, workers);
        case ExperimentKind::Characteristics: return run_characteristics(cfg, out_dir, workers);
        case ExperimentKind::Crossing: return run_crossing(cfg, out_dir, workers);
        case ExperimentKind::SlopeMoments: return run_slope_moments(cfg, out_dir, workers);
        case ExperimentKind::ShockTrack: return run_shock_track(cfg, out_dir, workers);
        case ExperimentKind::MaxPrinciple: return run_max_principle(cfg, out_dir, workers);
        case ExperimentKind::BlowupCriterion: return run_blowup_criterion(cfg, out_dir, workers);
    }
    throw std::logic_error("unhandled experiment kind");
}

void write_manifest(const ExperimentConfig& cfg, const Outcome& outcome, const fs::path& out_dir,
                    std::size_t workers) {
    json m;
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config::config_hash(cfg.source)));
    m["code_version"] = code_version();
    m["config_hash"] = hash;
    m["master_seed"] = cfg.seed;
    m["experiment"] = config::to_string(cfg.kind);
    m["name"] = cfg.name;
    m["workers"] = workers;
    m["config"] = cfg.source;
    m["summary"] = outcome.summary;
    json checks = json::array();
    for (const Check& c : outcome.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"value", finite_or_null(c.value)},
                          {"limit", finite_or_null(c.limit)},
                          {"detail", c.detail}});
    }
    m["checks"] = checks;
    m["pass"] = outcome.pass();
    m["files"] = outcome.files;
    auto os = csv::open(out_dir / "manifest.json");
    os << m.dump(2) << '\n';
}

json validation_report(const ExperimentConfig& cfg) {
    json r;
    r["experiment"] = config::to_string(cfg.kind);
    r["name"] = cfg.name;
    r["n_paths"] = cfg.n_paths;
    r["seed"] = cfg.seed;

    const auto& basis = *cfg.basis;
    const auto probe = basis.default_probe();
    const noise::CorrectionFields cf(cfg.basis, probe);
    const auto rep = noise::assumption_report(basis, probe);
    json nz;
    nz["modes"] = basis.size();
    json described = json::array();
    // large families: the first few are enough to recognize the config
    constexpr std::size_t kListed = 8;
    for (std::size_t i = 0; i < basis.size() && i < kListed; ++i) described.push_back(noise::describe(basis.modes()[i]));
    if (basis.size() > kListed) described.push_back("... " + std::to_string(basis.size() - kListed) + " more");
    nz["mode_list"] = described;
    nz["uniform"] = basis.uniform();
    nz["C"] = cf.psi_lower_bound();
    nz["D"] = cf.psi_upper_bound();
    nz["psi_min"] = cf.psi_min();
    nz["psi_max"] = cf.psi_max();
    nz["assumption"] = {{"lipschitz_sq_sum", rep.lipschitz_sq_sum},
                        {"growth_sq_sum", rep.growth_sq_sum},
                        {"phi_lipschitz", rep.phi_lipschitz},
                        {"phi_growth", rep.phi_growth},
                        {"pass", rep.pass}};
    r["noise"] = nz;

    const InitialProfile& u0 = *cfg.u0;
    double sup = 0.0, lo = std::numeric_limits<double>::infinity();
    for (double x : probe) {
        const double v = u0.u0(x);
        sup = std::max(sup, std::abs(v));
        lo = std::min(lo, v);
    }
    r["u0"] = {{"profile", u0.describe()},
               {"theta", steepest_negative_slope(u0, probe)},
               {"min", lo},
               {"sup", sup},
               {"positive", lo > 0.0}};

    const double dt = cfg.grid.dt();
    r["time"] = {{"t0", cfg.grid.t0}, {"t_end", cfg.grid.t_end}, {"dt", dt}, {"n_steps", cfg.grid.n_steps}};
    if (const auto* t = std::get_if<noise::Torus>(&cfg.domain)) {
        const double dx = t->length / static_cast<double>(cfg.cells);
        double noise_sq = 0.0;  // sum_k max xi_k^2 over the probe
        std::vector<noise::ModeValue> vals(basis.size());
        std::vector<double> peak(basis.size(), 0.0);
        for (double x : probe) {
            basis.evaluate(x, vals);
            for (std::size_t k = 0; k < vals.size(); ++k) peak[k] = std::max(peak[k], std::abs(vals[k].xi));
        }
        for (double p : peak) noise_sq += p * p;
        const double cfl = sup * dt / dx;
        r["grid"] = {{"cells", cfg.cells}, {"dx", dx}};
        r["cfl"] = {{"burgers", cfl},
                    {"cfl_max", cfg.step.cfl_max},
                    {"burgers_substeps", std::max(1.0, std::ceil(cfl / cfg.step.cfl_max))},
                    {"noise_shift_cells_rms", std::sqrt(noise_sq * dt) / dx}};
    }
    return r;
}

}  // namespace sburgers::experiments
