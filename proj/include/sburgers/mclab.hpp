#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sburgers/characteristics.hpp"
#include "sburgers/field.hpp"
#include "sburgers/noise.hpp"
#include "sburgers/paths.hpp"
#include "sburgers/profile.hpp"

namespace sburgers::mclab {

/// Every path died before the first output time.
class EmptyEstimateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pooled first and second moments (count, mean, sum of squared deviations).
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const Moments& other);
    double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
};

/// Monte Carlo mean of a scalar process on a time grid, with censoring.
///
/// `alive` pools only paths still alive at each time; `all` additionally counts every
/// censored path at `censor_value` (e.g. -cap for slopes), a conservative lower-bound mean.
struct McEstimate {
    std::vector<double> times;
    std::size_t n_paths = 0;
    std::vector<Moments> alive;
    std::vector<Moments> all;
    std::vector<std::size_t> censored;

    McEstimate() = default;
    explicit McEstimate(std::vector<double> t);

    std::size_t size() const { return times.size(); }
    double mean(std::size_t i) const { return alive[i].mean; }
    double variance(std::size_t i) const { return alive[i].variance(); }
    double standard_error(std::size_t i) const;
    double lower_bound_mean(std::size_t i) const { return all[i].mean; }
    double censored_fraction(std::size_t i) const;
};

/// Merges partial estimates on identical grids. Throws std::invalid_argument on grid mismatch.
McEstimate aggregate(std::span<const McEstimate> parts);
void merge_into(McEstimate& into, const McEstimate& part);

/// Upper bound on E[Y_t] for Y_0 = -sigma from dm/dt <= -m^2 + (C/2) m.
struct BoundCurve {
    double sigma = 1.0;
    double C = 0.0;

    double value(double t) const;
    /// Pole of the bound; +infinity when -sigma >= C/2.
    double blowup_time() const;
    bool blows_up() const { return -sigma < 0.5 * C; }
};

/// Ceiling for E[Y_t] with Y_0 > 0: solution of m' = -m^2 + rate m, m(0) = Y0.
double positive_ceiling(double Y0, double rate, double t);

// ---------------------------------------------------------------- slope ensembles

struct SlopeProblem {
    std::shared_ptr<const noise::NoiseBasis> basis;
    InitialProfile u0{profile::NegativeLine{}};
    double x0 = 0.0;
    TimeGrid grid;
    std::size_t stride = 1;  // output every `stride` steps
    std::uint64_t seed = 0;
    characteristics::Scheme scheme = characteristics::Scheme::Heun;
    double cap = 1e6;
};

struct SlopeEnsemble {
    McEstimate estimate;
    std::size_t blowups = 0;
    std::size_t sign_flips = 0;
    std::vector<double> death_times;  // blow-up times in path order
};

std::vector<double> output_times(const TimeGrid& grid, std::size_t stride);

/// Serial reference: one pass over paths [first, first + count).
SlopeEnsemble slope_ensemble_serial(const SlopeProblem& p, std::uint64_t first, std::size_t count);
/// OpenMP kernel: fixed-size chunks merged in chunk order, so the result does not depend on
/// the thread count.
SlopeEnsemble slope_ensemble_omp(const SlopeProblem& p, std::uint64_t first, std::size_t count,
                                 std::size_t chunk = 32);

struct BoundCheck {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();  // max (mean - bound) / SE
    bool pass = true;
};

struct SlopeExperimentResult {
    SlopeEnsemble ensemble;
    double C = 0.0;  // min 2 psi
    double D = 0.0;  // max 2 psi
    double Y0 = 0.0;
    std::optional<BoundCurve> bound;  // Y0 < 0 branch
    BoundCheck check;
    double predicted_blowup = std::numeric_limits<double>::infinity();
    double empirical_divergence = std::numeric_limits<double>::infinity();  // mean < -cap/10
};

/// Monte Carlo E[Y_t] against the bound: for Y0 < 0, mean <= B(t) + 3 SE while censoring
/// is at most 1% and t < t*; for Y0 >= 0, mean <= positive_ceiling + 3 SE.
SlopeExperimentResult expected_slope_experiment(const SlopeProblem& p, std::size_t n_paths, bool parallel = true);

// ---------------------------------------------------------------- crossing ensembles

struct CrossingProblem {
    double alpha = 1.0;
    double beta = 0.0;
    InitialProfile u0{profile::NegativeLine{}};
    std::vector<double> fan;  // sorted initial positions
    TimeGrid grid;
    std::uint64_t seed = 0;
};

struct CrossingSample {
    double crossing = std::numeric_limits<double>::quiet_NaN();  // NaN: none within horizon
    double hitting = std::numeric_limits<double>::quiet_NaN();
};

std::vector<CrossingSample> crossing_ensemble_serial(const CrossingProblem& p, std::uint64_t first,
                                                     std::size_t count);
std::vector<CrossingSample> crossing_ensemble_omp(const CrossingProblem& p, std::uint64_t first, std::size_t count);

struct CrossingExperimentResult {
    std::vector<CrossingSample> samples;
    double theta = 0.0;
    double max_discrepancy = 0.0;    // over paths where at least one estimator fired
    double within_two_dt = 0.0;      // fraction of paths with |tau - tau_hit| <= 2 dt (both none counts)
    std::vector<double> horizons;
    std::vector<double> crossed_fraction;  // by each horizon
    std::vector<double> sorted_crossings;  // empirical CDF support
};

CrossingExperimentResult crossing_time_experiment(const CrossingProblem& p, std::size_t n_paths,
                                                  std::span<const double> horizons, bool parallel = true);

/// |a - b| for two first-passage estimates where NaN means "not within the horizon" (taken as t_end).
double passage_discrepancy(double a, double b, double t_end);

// ---------------------------------------------------------------- field ensembles

struct FieldProblem {
    GridField initial{noise::Torus{0.0, 1.0}, 64};
    std::shared_ptr<const noise::NoiseBasis> basis;
    StepParams params;
    TimeGrid grid;
    std::uint64_t seed = 0;
    RunOptions options;
};

std::vector<RunResult> field_ensemble_serial(const FieldProblem& p, std::uint64_t first, std::size_t count);
std::vector<RunResult> field_ensemble_omp(const FieldProblem& p, std::uint64_t first, std::size_t count);

/// body(i) for i in [0, count): in order when serial, across OpenMP threads otherwise. The first
/// exception thrown by any body is rethrown after the loop.
void for_each_index(std::size_t count, bool parallel, const std::function<void(std::size_t)>& body);

}  // namespace sburgers::mclab
