#include "sburgers/paths.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "sburgers/rng.hpp"

namespace sburgers {

TimeGrid::TimeGrid(double t0_, double t_end_, std::size_t n_steps_) : t0(t0_), t_end(t_end_), n_steps(n_steps_) {
    if (n_steps == 0) throw std::invalid_argument("time grid needs at least one step");
    if (!(t_end > t0)) throw std::invalid_argument("time grid must be strictly increasing");
}

BrownianPath::BrownianPath(TimeGrid grid, std::size_t modes, SeedLineage lineage, std::vector<double> increments)
    : grid_(grid), modes_(modes), lineage_(lineage), increments_(std::move(increments)) {
    if (increments_.size() != grid_.n_steps * modes_) {
        throw std::invalid_argument("increment matrix does not match grid and mode count");
    }
}

std::vector<double> BrownianPath::cumulative(std::size_t k) const {
    std::vector<double> w(steps() + 1, 0.0);
    for (std::size_t n = 0; n < steps(); ++n) w[n + 1] = w[n] + increment(n, k);
    return w;
}

BrownianPath sample_path(std::uint64_t master_seed, std::uint64_t path_index, const TimeGrid& grid,
                         std::size_t modes) {
    const double sd = std::sqrt(grid.dt());
    std::vector<double> inc(grid.n_steps * modes);
    DrawIndex idx{master_seed, path_index, 0, 0, 0};
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        idx.step = n;
        for (std::size_t k = 0; k < modes; ++k) {
            idx.mode = static_cast<std::uint32_t>(k);
            inc[n * modes + k] = sd * counter_normal(idx);
        }
    }
    return BrownianPath(grid, modes, {master_seed, path_index, 0}, std::move(inc));
}

BrownianPath refine(const BrownianPath& path, std::size_t factor) {
    if (factor == 0) throw std::invalid_argument("refinement factor must be >= 1");
    if (factor == 1) return path;
    const TimeGrid& g = path.grid();
    const TimeGrid fine(g.t0, g.t_end, g.n_steps * factor);
    const double h = fine.dt();
    const std::size_t K = path.modes();
    SeedLineage lin = path.lineage();
    lin.stream = mix64(lin.stream ^ (0xA0761D6478BD642FULL * factor));

    std::vector<double> inc(fine.n_steps * K);
    DrawIndex idx{lin.master_seed, lin.path_index, lin.stream, 0, 0};
    for (std::size_t n = 0; n < g.n_steps; ++n) {
        for (std::size_t k = 0; k < K; ++k) {
            idx.mode = static_cast<std::uint32_t>(k);
            double remaining = path.increment(n, k);
            double used = 0.0;
            for (std::size_t j = 0; j + 1 < factor; ++j) {
                // Bridge: next piece given the remaining increment over the remaining time.
                const double r = h * static_cast<double>(factor - j);
                idx.step = n * factor + j;
                const double piece = remaining * h / r + std::sqrt(h * (r - h) / r) * counter_normal(idx);
                inc[(n * factor + j) * K + k] = piece;
                remaining -= piece;
                used += piece;
            }
            inc[(n * factor + factor - 1) * K + k] = path.increment(n, k) - used;
        }
    }
    return BrownianPath(fine, K, lin, std::move(inc));
}

std::vector<double> integrated_gbm(const BrownianPath& path, std::size_t mode, double alpha) {
    if (mode >= path.modes()) throw std::out_of_range("integrated_gbm: mode index out of range");
    const double dt = path.grid().dt();
    std::vector<double> out(path.steps() + 1, 0.0);
    double w = 0.0;
    for (std::size_t n = 0; n < path.steps(); ++n) {
        out[n + 1] = out[n] + std::exp(-alpha * w) * dt;
        w += path.increment(n, mode);
    }
    return out;
}

double first_hitting_time(const TimeGrid& grid, std::span<const double> series, double level) {
    if (series.empty()) return -1.0;
    if (series[0] >= level) return grid.t0;
    for (std::size_t n = 1; n < series.size(); ++n) {
        if (series[n] >= level) {
            const double frac = (level - series[n - 1]) / (series[n] - series[n - 1]);
            return grid.time(n - 1) + frac * grid.dt();
        }
    }
    return -1.0;
}

namespace {

constexpr char kMagic[8] = {'S', 'B', 'P', 'A', 'T', 'H', '0', '1'};

template <class T>
void put_le(std::ostream& os, T value) {
    std::uint64_t bits;
    if constexpr (std::is_same_v<T, double>) {
        bits = std::bit_cast<std::uint64_t>(value);
    } else {
        bits = static_cast<std::uint64_t>(value);
    }
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_le(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("path dump truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return bits;
}

}  // namespace

void write_path(const BrownianPath& path, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    os.write(kMagic, sizeof kMagic);
    put_le(os, path.lineage().master_seed);
    put_le(os, path.lineage().path_index);
    put_le(os, path.lineage().stream);
    put_le(os, path.grid().t0);
    put_le(os, path.grid().t_end);
    put_le(os, static_cast<std::uint64_t>(path.grid().n_steps));
    put_le(os, static_cast<std::uint64_t>(path.modes()));
    for (double v : path.data()) put_le(os, v);
}

BrownianPath read_path(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a path dump");
    SeedLineage lin;
    lin.master_seed = get_le(is);
    lin.path_index = get_le(is);
    lin.stream = get_le(is);
    const double t0 = std::bit_cast<double>(get_le(is));
    const double t1 = std::bit_cast<double>(get_le(is));
    const auto n = static_cast<std::size_t>(get_le(is));
    const auto K = static_cast<std::size_t>(get_le(is));
    std::vector<double> inc(n * K);
    for (double& v : inc) v = std::bit_cast<double>(get_le(is));
    return BrownianPath(TimeGrid(t0, t1, n), K, lin, std::move(inc));
}

}  // namespace sburgers
