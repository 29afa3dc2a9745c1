#include <omp.h>

#include <exception>
#include <mutex>
#include <optional>

#include "ensemble_detail.hpp"

namespace sburgers::mclab {

namespace {

// Exceptions must not escape an OpenMP region; keep the first and rethrow after the join.
class FirstError {
public:
    template <class F>
    void guard(F&& f) {
        try {
            f();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
};

}  // namespace

SlopeEnsemble slope_ensemble_omp(const SlopeProblem& p, std::uint64_t first, std::size_t count, std::size_t chunk) {
    if (chunk == 0) chunk = 1;
    const std::size_t n_chunks = (count + chunk - 1) / chunk;
    std::vector<SlopeEnsemble> parts(n_chunks);
    FirstError errors;

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * chunk;
        const std::size_t len = std::min(chunk, count - begin);
        errors.guard([&] { parts[c] = slope_ensemble_serial(p, first + begin, len); });
    }
    errors.rethrow();

    SlopeEnsemble out = detail::empty_slope_ensemble(p);
    for (const SlopeEnsemble& part : parts) {
        merge_into(out.estimate, part.estimate);
        out.blowups += part.blowups;
        out.sign_flips += part.sign_flips;
        out.death_times.insert(out.death_times.end(), part.death_times.begin(), part.death_times.end());
    }
    return out;
}

std::vector<CrossingSample> crossing_ensemble_omp(const CrossingProblem& p, std::uint64_t first, std::size_t count) {
    const double theta = detail::crossing_theta(p);
    std::vector<CrossingSample> out(count);
    FirstError errors;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        errors.guard([&] { out[i] = detail::crossing_path(p, theta, first + static_cast<std::uint64_t>(i)); });
    }
    errors.rethrow();
    return out;
}

std::vector<RunResult> field_ensemble_omp(const FieldProblem& p, std::uint64_t first, std::size_t count) {
    std::vector<std::optional<RunResult>> slots(count);
    FirstError errors;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        errors.guard([&] { slots[i] = detail::field_path(p, first + static_cast<std::uint64_t>(i)); });
    }
    errors.rethrow();
    std::vector<RunResult> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

void for_each_index(std::size_t count, bool parallel, const std::function<void(std::size_t)>& body) {
    if (!parallel) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    FirstError errors;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        errors.guard([&] { body(static_cast<std::size_t>(i)); });
    }
    errors.rethrow();
}

}  // namespace sburgers::mclab
