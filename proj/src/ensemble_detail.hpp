#pragma once

#include "sburgers/mclab.hpp"

namespace sburgers::mclab::detail {

// Per-path bodies shared by the serial and OpenMP kernels.
void accumulate_slope_path(const SlopeProblem& p, std::uint64_t path_index, SlopeEnsemble& into);
CrossingSample crossing_path(const CrossingProblem& p, double theta, std::uint64_t path_index);
RunResult field_path(const FieldProblem& p, std::uint64_t path_index);
SlopeEnsemble empty_slope_ensemble(const SlopeProblem& p);
double crossing_theta(const CrossingProblem& p);

}  // namespace sburgers::mclab::detail
