#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sburgers/spline.hpp"

namespace sburgers {

namespace profile {

/// u0(x) = -sigma x + offset.
struct NegativeLine {
    double sigma = 1.0;
    double offset = 0.0;
};

/// u0(x) = offset + amplitude sin(wavenumber x).
struct SineWave {
    double amplitude = 1.0;
    double wavenumber = 1.0;
    double offset = 0.0;
};

/// Riemann-type data: `inside` on [left, right), `outside` elsewhere (one period when periodic).
struct Step {
    double inside = 1.0;
    double outside = 0.0;
    double left = 0.0;
    double right = 0.5;
};

struct Tabulated {
    std::shared_ptr<const PeriodicSpline> spline;
};

}  // namespace profile

/// Initial velocity u0 with its exact derivative.
class InitialProfile {
public:
    using Descriptor = std::variant<profile::NegativeLine, profile::SineWave, profile::Step, profile::Tabulated>;

    InitialProfile(Descriptor d) : desc_(std::move(d)) {}  // NOLINT(google-explicit-constructor)

    double u0(double x) const;
    double du0(double x) const;
    /// Mean of u0 over [a, b]; exact for the closed-form descriptors.
    double cell_average(double a, double b) const;

    const Descriptor& descriptor() const { return desc_; }
    std::string describe() const;

private:
    Descriptor desc_;
};

/// theta(u0): steepest negative slope, sup over probed pairs of -(u0(b)-u0(a))/(b-a), clamped at 0.
/// Adjacent probe pairs bound the sup for piecewise-monotone profiles; the exact derivative at every
/// probe point is folded in as well.
double steepest_negative_slope(const InitialProfile& u0, std::span<const double> probe);

/// Positivity of u0, reported rather than enforced.
struct PositivityReport {
    double min_value = 0.0;
    bool positive = false;
};
PositivityReport check_positive(const InitialProfile& u0, std::span<const double> probe);

/// Largest |du0 - centered difference of u0| over the probe grid.
double derivative_consistency(const InitialProfile& u0, std::span<const double> probe, double h = 1e-5);

}  // namespace sburgers
