#include "sburgers/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sburgers {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Gauss-Legendre, 4 points on [-1, 1]
constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

}  // namespace

double InitialProfile::u0(double x) const {
    return std::visit(overloaded{
                          [&](const profile::NegativeLine& p) { return -p.sigma * x + p.offset; },
                          [&](const profile::SineWave& p) { return p.offset + p.amplitude * std::sin(p.wavenumber * x); },
                          [&](const profile::Step& p) { return (x >= p.left && x < p.right) ? p.inside : p.outside; },
                          [&](const profile::Tabulated& p) { return p.spline->eval(x, 0); },
                      },
                      desc_);
}

double InitialProfile::du0(double x) const {
    return std::visit(overloaded{
                          [&](const profile::NegativeLine& p) { return -p.sigma; },
                          [&](const profile::SineWave& p) {
                              return p.amplitude * p.wavenumber * std::cos(p.wavenumber * x);
                          },
                          [&](const profile::Step&) { return 0.0; },
                          [&](const profile::Tabulated& p) { return p.spline->eval(x, 1); },
                      },
                      desc_);
}

double InitialProfile::cell_average(double a, double b) const {
    if (!(b > a)) throw std::invalid_argument("cell_average needs a < b");
    const double w = b - a;
    return std::visit(overloaded{
                          [&](const profile::NegativeLine& p) { return -p.sigma * 0.5 * (a + b) + p.offset; },
                          [&](const profile::SineWave& p) {
                              if (p.wavenumber == 0.0) return p.offset;
                              return p.offset + p.amplitude *
                                                    (std::cos(p.wavenumber * a) - std::cos(p.wavenumber * b)) /
                                                    (p.wavenumber * w);
                          },
                          [&](const profile::Step& p) {
                              const double lo = std::max(a, p.left), hi = std::min(b, p.right);
                              const double overlap = std::max(0.0, hi - lo);
                              return (overlap * p.inside + (w - overlap) * p.outside) / w;
                          },
                          [&](const profile::Tabulated& p) {
                              double s = 0.0;
                              for (int q = 0; q < 4; ++q) {
                                  s += kGaussW[q] * p.spline->eval(0.5 * (a + b) + 0.5 * w * kGaussX[q], 0);
                              }
                              return 0.5 * s;
                          },
                      },
                      desc_);
}

std::string InitialProfile::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const profile::NegativeLine& p) {
                       os << "negative_line(sigma=" << p.sigma << ",offset=" << p.offset << ")";
                   },
                   [&](const profile::SineWave& p) {
                       os << "sine(amplitude=" << p.amplitude << ",wavenumber=" << p.wavenumber
                          << ",offset=" << p.offset << ")";
                   },
                   [&](const profile::Step& p) {
                       os << "step(inside=" << p.inside << ",outside=" << p.outside << ",left=" << p.left
                          << ",right=" << p.right << ")";
                   },
                   [&](const profile::Tabulated& p) { os << "tabulated(n=" << p.spline->size() << ")"; },
               },
               desc_);
    return os.str();
}

double steepest_negative_slope(const InitialProfile& u0, std::span<const double> probe) {
    double theta = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        theta = std::max(theta, -u0.du0(probe[i]));
        if (i + 1 < probe.size() && probe[i + 1] != probe[i]) {
            const double q = (u0.u0(probe[i + 1]) - u0.u0(probe[i])) / (probe[i + 1] - probe[i]);
            theta = std::max(theta, -q);
        }
    }
    return theta;
}

PositivityReport check_positive(const InitialProfile& u0, std::span<const double> probe) {
    PositivityReport r{std::numeric_limits<double>::infinity(), true};
    for (double x : probe) r.min_value = std::min(r.min_value, u0.u0(x));
    r.positive = r.min_value > 0.0;
    return r;
}

double derivative_consistency(const InitialProfile& u0, std::span<const double> probe, double h) {
    double worst = 0.0;
    for (double x : probe) {
        const double fd = (u0.u0(x + h) - u0.u0(x - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - u0.du0(x)));
    }
    return worst;
}

}  // namespace sburgers
