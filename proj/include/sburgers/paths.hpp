#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace sburgers {

/// Uniform time grid t0 < t1 < ... < t_end.
struct TimeGrid {
    double t0 = 0.0;
    double t_end = 1.0;
    std::size_t n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double t0_, double t_end_, std::size_t n_steps_);

    double dt() const { return (t_end - t0) / static_cast<double>(n_steps); }
    double time(std::size_t i) const { return t0 + dt() * static_cast<double>(i); }
    bool operator==(const TimeGrid&) const = default;
};

/// Where a path's random numbers come from.
struct SeedLineage {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::uint64_t stream = 0;  // changes on every refinement
    bool operator==(const SeedLineage&) const = default;
};

/// Per-mode Wiener increments on a time grid, row-major [n_steps x K].
class BrownianPath {
public:
    BrownianPath(TimeGrid grid, std::size_t modes, SeedLineage lineage, std::vector<double> increments);

    const TimeGrid& grid() const { return grid_; }
    std::size_t modes() const { return modes_; }
    std::size_t steps() const { return grid_.n_steps; }
    const SeedLineage& lineage() const { return lineage_; }

    /// Increments of all modes over step `n`.
    std::span<const double> increment(std::size_t n) const {
        return {increments_.data() + n * modes_, modes_};
    }
    double increment(std::size_t n, std::size_t k) const { return increments_[n * modes_ + k]; }
    std::span<const double> data() const { return increments_; }

    /// W_k(t_n) for n = 0..n_steps, with W_k(t0) = 0.
    std::vector<double> cumulative(std::size_t k) const;

private:
    TimeGrid grid_;
    std::size_t modes_;
    SeedLineage lineage_;
    std::vector<double> increments_;
};

/// I.i.d. N(0, dt) increments for K modes, derived from (seed, path, mode, step).
BrownianPath sample_path(std::uint64_t master_seed, std::uint64_t path_index, const TimeGrid& grid,
                         std::size_t modes);

/// Brownian-bridge refinement inserting `factor - 1` points per step (factor 1 returns a copy).
/// Coarse increments are the sums of their refined increments.
BrownianPath refine(const BrownianPath& path, std::size_t factor);

/// Left-endpoint Riemann sum I_n = sum_{j<n} exp(-alpha W_k(t_j)) dt, n = 0..n_steps.
std::vector<double> integrated_gbm(const BrownianPath& path, std::size_t mode, double alpha);

/// First time a nondecreasing sampled series reaches `level`, linearly interpolated.
/// Returns a negative value if it never does.
double first_hitting_time(const TimeGrid& grid, std::span<const double> series, double level);

/// Raw dump for replay debugging. Header: magic, seed lineage, grid, K; body:
/// little-endian IEEE-754 doubles, row-major.
void write_path(const BrownianPath& path, const std::filesystem::path& file);
BrownianPath read_path(const std::filesystem::path& file);

}  // namespace sburgers
