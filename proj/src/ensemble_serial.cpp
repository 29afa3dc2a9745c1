#include <cmath>

#include "ensemble_detail.hpp"

namespace sburgers::mclab {

namespace detail {

SlopeEnsemble empty_slope_ensemble(const SlopeProblem& p) {
    SlopeEnsemble e;
    e.estimate = McEstimate(output_times(p.grid, p.stride));
    return e;
}

void accumulate_slope_path(const SlopeProblem& p, std::uint64_t path_index, SlopeEnsemble& into) {
    const noise::NoiseBasis& basis = *p.basis;
    const BrownianPath path = sample_path(p.seed, path_index, p.grid, basis.size());
    characteristics::State s = characteristics::make_state(p.u0, p.x0);
    const double censor_value = std::copysign(p.cap, s.Y0);
    const characteristics::StepOptions opts{p.cap};
    McEstimate& est = into.estimate;
    const std::size_t stride = p.stride == 0 ? 1 : p.stride;

    auto record = [&](std::size_t j) {
        if (s.alive()) {
            est.alive[j].add(s.Y);
            est.all[j].add(s.Y);
        } else {
            ++est.censored[j];
            est.all[j].add(censor_value);
        }
    };
    record(0);
    std::size_t j = 1;
    for (std::size_t n = 0; n < p.grid.n_steps; ++n) {
        if (s.alive()) {
            std::span<characteristics::State> one(&s, 1);
            const double t = p.grid.time(n);
            if (p.scheme == characteristics::Scheme::Ito) {
                characteristics::step_ito(one, basis, path.increment(n), t, p.grid.dt(), opts);
            } else {
                characteristics::step_stratonovich_heun(one, basis, path.increment(n), t, p.grid.dt(), opts);
            }
        }
        if ((n + 1) % stride == 0 || n + 1 == p.grid.n_steps) record(j++);
    }
    est.n_paths += 1;
    if (s.fate == characteristics::Fate::BlowUp) {
        ++into.blowups;
        into.death_times.push_back(s.death_time);
    } else if (s.fate == characteristics::Fate::SignFlip) {
        ++into.sign_flips;
    }
}

double crossing_theta(const CrossingProblem& p) {
    return steepest_negative_slope(p.u0, p.fan);
}

CrossingSample crossing_path(const CrossingProblem& p, double theta, std::uint64_t path_index) {
    const noise::NoiseBasis basis({noise::Linear{p.alpha, p.beta}}, noise::Line{});
    const BrownianPath path = sample_path(p.seed, path_index, p.grid, 1);
    CrossingSample out;
    if (const auto c = characteristics::first_crossing(p.fan, p.u0, basis, path)) out.crossing = c->time;
    if (theta > 0.0) {
        const auto I = integrated_gbm(path, 0, p.alpha);
        const double hit = first_hitting_time(p.grid, I, 1.0 / theta);
        if (hit >= 0.0) out.hitting = hit;
    }
    return out;
}

RunResult field_path(const FieldProblem& p, std::uint64_t path_index) {
    const BrownianPath path = sample_path(p.seed, path_index, p.grid, p.basis->size());
    return run(p.initial, *p.basis, path, p.params, p.options);
}

}  // namespace detail

SlopeEnsemble slope_ensemble_serial(const SlopeProblem& p, std::uint64_t first, std::size_t count) {
    SlopeEnsemble e = detail::empty_slope_ensemble(p);
    for (std::size_t i = 0; i < count; ++i) detail::accumulate_slope_path(p, first + i, e);
    return e;
}

std::vector<CrossingSample> crossing_ensemble_serial(const CrossingProblem& p, std::uint64_t first,
                                                     std::size_t count) {
    const double theta = detail::crossing_theta(p);
    std::vector<CrossingSample> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = detail::crossing_path(p, theta, first + i);
    return out;
}

std::vector<RunResult> field_ensemble_serial(const FieldProblem& p, std::uint64_t first, std::size_t count) {
    std::vector<RunResult> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(detail::field_path(p, first + i));
    return out;
}

}  // namespace sburgers::mclab
