#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "sburgers/field.hpp"
#include "sburgers/noise.hpp"
#include "sburgers/paths.hpp"

namespace sburgers::shocks {

/// Shock position s(t) (unwrapped, continuous) with left/right states u_-(t) > u_+(t).
struct ShockCurve {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<double> u_minus;
    std::vector<double> u_plus;

    std::size_t size() const { return t.size(); }
    void push(double time, double pos, double um, double up);
};

struct ShockSample {
    double s = 0.0;
    double u_minus = 0.0;
    double u_plus = 0.0;
};

/// Locates the steepest negative jump u_{i+1} - u_i < -threshold. The sub-cell position makes the
/// sharp step between the plateau states carry the same mass as the cells around the jump; the
/// plateau states are read 3 cells either side. Nullopt when no jump is steep enough.
std::optional<ShockSample> detect_shock(const GridField& field, double threshold);

/// Applies detect_shock to each snapshot, skipping snapshots without a shock, and unwraps the
/// positions so consecutive samples differ by less than half a period.
ShockCurve detect_shock(std::span<const GridField> snapshots, double threshold);

/// u_- and u_+ at (t, s).
using StateProvider = std::function<std::pair<double, double>(double t, double s)>;

/// Heun integration of ds = (u_- + u_+)/2 dt + sum xi_k(s) o dW_k along `path`, sampled every step.
ShockCurve integrate_srh(double s0, const StateProvider& states, const noise::NoiseBasis& basis,
                         const BrownianPath& path);

/// sup_t |s_detected - s_integrated| modulo `period`, with the integrated curve linearly
/// resampled at the detected times. Throws if the time ranges do not overlap.
double srh_residual(const ShockCurve& detected, const ShockCurve& integrated, double period);

/// Entropy (Lax) admissibility u_- > u_+ at every sample.
bool lax_admissible(const ShockCurve& curve);

/// CSV columns: t,s,u_minus,u_plus
void write_shock_csv(std::ostream& os, const ShockCurve& curve);

}  // namespace sburgers::shocks
