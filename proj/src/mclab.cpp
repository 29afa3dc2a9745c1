#include "sburgers/mclab.hpp"

#include <algorithm>
#include <cmath>

namespace sburgers::mclab {

void Moments::add(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
}

void Moments::merge(const Moments& other) {
    if (other.n == 0.0) return;
    if (n == 0.0) {
        *this = other;
        return;
    }
    const double total = n + other.n;
    const double delta = other.mean - mean;
    mean += delta * (other.n / total);
    m2 += other.m2 + delta * delta * (n * other.n / total);
    n = total;
}

McEstimate::McEstimate(std::vector<double> t)
    : times(std::move(t)), alive(times.size()), all(times.size()), censored(times.size(), 0) {}

double McEstimate::standard_error(std::size_t i) const {
    const double n = alive[i].n;
    return n > 0.0 ? std::sqrt(variance(i) / n) : std::numeric_limits<double>::infinity();
}

double McEstimate::censored_fraction(std::size_t i) const {
    return n_paths ? static_cast<double>(censored[i]) / static_cast<double>(n_paths) : 0.0;
}

void merge_into(McEstimate& into, const McEstimate& part) {
    if (into.times != part.times) throw std::invalid_argument("aggregate: time grids differ");
    for (std::size_t i = 0; i < into.size(); ++i) {
        into.alive[i].merge(part.alive[i]);
        into.all[i].merge(part.all[i]);
        into.censored[i] += part.censored[i];
    }
    into.n_paths += part.n_paths;
}

McEstimate aggregate(std::span<const McEstimate> parts) {
    if (parts.empty()) return {};
    McEstimate out(parts.front().times);
    for (const McEstimate& p : parts) merge_into(out, p);
    return out;
}

double BoundCurve::value(double t) const {
    if (C == 0.0) return 1.0 / (t - 1.0 / sigma);
    const double e = std::exp(0.5 * C * t);
    return -sigma * e / (1.0 - (2.0 * sigma / C) * (e - 1.0));
}

double BoundCurve::blowup_time() const {
    if (!blows_up()) return std::numeric_limits<double>::infinity();
    if (C == 0.0) return 1.0 / sigma;
    return (2.0 / C) * std::log1p(C / (2.0 * sigma));
}

double positive_ceiling(double Y0, double rate, double t) {
    if (rate == 0.0) return Y0 / (1.0 + Y0 * t);
    const double e = std::exp(rate * t);
    return rate * Y0 * e / (rate + Y0 * (e - 1.0));
}

std::vector<double> output_times(const TimeGrid& grid, std::size_t stride) {
    if (stride == 0) stride = 1;
    std::vector<double> t{grid.time(0)};
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        if ((n + 1) % stride == 0 || n + 1 == grid.n_steps) t.push_back(grid.time(n + 1));
    }
    return t;
}

SlopeExperimentResult expected_slope_experiment(const SlopeProblem& p, std::size_t n_paths, bool parallel) {
    if (!p.basis) throw std::invalid_argument("slope experiment needs a noise basis");
    SlopeExperimentResult r;
    const auto probe = p.basis->default_probe();
    const auto corr = noise::correction_fields(*p.basis, probe);
    r.C = corr.psi_lower_bound();
    r.D = corr.psi_upper_bound();
    r.Y0 = p.u0.du0(p.x0);
    r.ensemble = parallel ? slope_ensemble_omp(p, 0, n_paths) : slope_ensemble_serial(p, 0, n_paths);
    const McEstimate& est = r.ensemble.estimate;
    if (est.size() > 1 && est.alive[1].n == 0.0) {
        throw EmptyEstimateError("all paths died before the first output time");
    }

    for (std::size_t i = 0; i < est.size(); ++i) {
        if (est.lower_bound_mean(i) < -p.cap / 10.0) {
            r.empirical_divergence = est.times[i];
            break;
        }
    }

    if (r.Y0 < 0.0) {
        r.bound = BoundCurve{-r.Y0, r.C};
        r.predicted_blowup = r.bound->blowup_time();
    }
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double t = est.times[i] - p.grid.t0;
        if (est.alive[i].n < 2.0) break;
        double limit;
        if (r.bound) {
            if (t >= r.predicted_blowup || est.censored_fraction(i) > 0.01) break;
            limit = r.bound->value(t);
        } else {
            // the ceiling rate is max psi = D/2
            limit = positive_ceiling(r.Y0, 0.5 * r.D, t);
        }
        const double se = est.standard_error(i);
        const double excess = est.mean(i) - limit;
        ++r.check.checked;
        if (se > 0.0) {
            r.check.worst_excess = std::max(r.check.worst_excess, excess / se);
        } else if (excess > 0.0) {
            r.check.worst_excess = std::numeric_limits<double>::infinity();
        }
        // relative slack for rounding when the process is deterministic (SE = 0)
        if (excess > 3.0 * se + 1e-9 * std::abs(limit)) ++r.check.violations;
    }
    r.check.pass = r.check.violations == 0;
    return r;
}

double passage_discrepancy(double a, double b, double t_end) {
    const bool na = std::isnan(a), nb = std::isnan(b);
    if (na && nb) return 0.0;
    return std::abs((na ? t_end : a) - (nb ? t_end : b));
}

CrossingExperimentResult crossing_time_experiment(const CrossingProblem& p, std::size_t n_paths,
                                                  std::span<const double> horizons, bool parallel) {
    CrossingExperimentResult r;
    r.theta = steepest_negative_slope(p.u0, p.fan);
    r.samples = parallel ? crossing_ensemble_omp(p, 0, n_paths) : crossing_ensemble_serial(p, 0, n_paths);
    const double dt = p.grid.dt();
    std::size_t ok = 0;
    for (const auto& s : r.samples) {
        const double d = passage_discrepancy(s.crossing, s.hitting, p.grid.t_end);
        r.max_discrepancy = std::max(r.max_discrepancy, d);
        if (d <= 2.0 * dt) ++ok;
        if (!std::isnan(s.crossing)) r.sorted_crossings.push_back(s.crossing);
    }
    r.within_two_dt = n_paths ? static_cast<double>(ok) / static_cast<double>(n_paths) : 1.0;
    std::sort(r.sorted_crossings.begin(), r.sorted_crossings.end());
    r.horizons.assign(horizons.begin(), horizons.end());
    for (double T : horizons) {
        const auto crossed = std::upper_bound(r.sorted_crossings.begin(), r.sorted_crossings.end(), T) -
                             r.sorted_crossings.begin();
        r.crossed_fraction.push_back(n_paths ? static_cast<double>(crossed) / static_cast<double>(n_paths) : 0.0);
    }
    return r;
}

}  // namespace sburgers::mclab
