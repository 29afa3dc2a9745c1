#include "sburgers/shocks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace sburgers::shocks {

void ShockCurve::push(double time, double pos, double um, double up) {
    t.push_back(time);
    s.push_back(pos);
    u_minus.push_back(um);
    u_plus.push_back(up);
}

std::optional<ShockSample> detect_shock(const GridField& field, double threshold) {
    const auto u = field.values();
    const std::size_t n = u.size();
    const auto at = [&](std::ptrdiff_t i) {
        const auto m = static_cast<std::ptrdiff_t>(n);
        return u[static_cast<std::size_t>(((i % m) + m) % m)];
    };
    std::ptrdiff_t best = -1;
    double steepest = -threshold;
    for (std::size_t i = 0; i < n; ++i) {
        const double jump = u[(i + 1) % n] - u[i];
        if (jump < steepest) {
            steepest = jump;
            best = static_cast<std::ptrdiff_t>(i);
        }
    }
    if (best < 0) return std::nullopt;

    ShockSample out;
    out.u_minus = 0.5 * (at(best - 3) + at(best - 2));
    out.u_plus = 0.5 * (at(best + 3) + at(best + 4));
    if (!(out.u_minus > out.u_plus)) return std::nullopt;

    // Cells best-1 .. best+2 hold the numerical shock layer.
    const double h = field.dx();
    const double xa = field.center(0) - 0.5 * h + h * static_cast<double>(best - 1);
    const double xb = xa + 4.0 * h;
    double mass = 0.0;
    for (std::ptrdiff_t j = best - 1; j <= best + 2; ++j) mass += at(j) * h;
    double s = (mass - out.u_plus * xb + out.u_minus * xa) / (out.u_minus - out.u_plus);
    s = std::clamp(s, xa, xb);
    const auto& dom = field.domain();
    s = dom.origin + std::fmod(std::fmod(s - dom.origin, dom.length) + dom.length, dom.length);
    out.s = s;
    return out;
}

ShockCurve detect_shock(std::span<const GridField> snapshots, double threshold) {
    ShockCurve curve;
    for (const GridField& f : snapshots) {
        const auto hit = detect_shock(f, threshold);
        if (!hit) continue;
        double s = hit->s;
        if (!curve.s.empty()) {
            const double L = f.domain().length;
            s += L * std::round((curve.s.back() - s) / L);
        }
        curve.push(f.t(), s, hit->u_minus, hit->u_plus);
    }
    return curve;
}

ShockCurve integrate_srh(double s0, const StateProvider& states, const noise::NoiseBasis& basis,
                         const BrownianPath& path) {
    if (path.modes() != basis.size()) throw std::invalid_argument("path mode count does not match basis");
    const TimeGrid& g = path.grid();
    const double dt = g.dt();
    ShockCurve curve;
    double s = s0;
    auto [um, up] = states(g.t0, s);
    curve.push(g.t0, s, um, up);
    for (std::size_t n = 0; n < g.n_steps; ++n) {
        const double t = g.time(n);
        const auto dW = path.increment(n);
        const auto [a_m, a_p] = states(t, s);
        const double speed0 = 0.5 * (a_m + a_p);
        const double d0 = basis.empty() ? 0.0 : basis.displacement(s, dW);
        const double sp = s + speed0 * dt + d0;
        const auto [b_m, b_p] = states(t + dt, sp);
        const double speed1 = 0.5 * (b_m + b_p);
        const double d1 = basis.empty() ? 0.0 : basis.displacement(sp, dW);
        s += 0.5 * (speed0 + speed1) * dt + 0.5 * (d0 + d1);
        const auto [c_m, c_p] = states(t + dt, s);
        curve.push(t + dt, s, c_m, c_p);
    }
    return curve;
}

double srh_residual(const ShockCurve& detected, const ShockCurve& integrated, double period) {
    if (detected.size() == 0 || integrated.size() == 0) throw std::invalid_argument("srh_residual: empty curve");
    const double lo = std::max(detected.t.front(), integrated.t.front());
    const double hi = std::min(detected.t.back(), integrated.t.back());
    if (lo > hi) throw std::invalid_argument("srh_residual: curves have disjoint time ranges");
    double worst = 0.0;
    const double eps = 1e-12 * std::max(1.0, std::abs(hi));
    for (std::size_t i = 0; i < detected.size(); ++i) {
        const double t = detected.t[i];
        if (t < lo - eps || t > hi + eps) continue;
        auto it = std::lower_bound(integrated.t.begin(), integrated.t.end(), t - eps);
        std::size_t j = static_cast<std::size_t>(it - integrated.t.begin());
        double s;
        if (j < integrated.size() && std::abs(integrated.t[j] - t) <= eps) {
            s = integrated.s[j];
        } else {
            j = std::clamp<std::size_t>(j, 1, integrated.size() - 1);
            const double w = (t - integrated.t[j - 1]) / (integrated.t[j] - integrated.t[j - 1]);
            s = (1.0 - w) * integrated.s[j - 1] + w * integrated.s[j];
        }
        double d = std::fmod(std::abs(detected.s[i] - s), period);
        d = std::min(d, period - d);
        worst = std::max(worst, d);
    }
    return worst;
}

bool lax_admissible(const ShockCurve& curve) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!(curve.u_minus[i] > curve.u_plus[i])) return false;
    }
    return true;
}

void write_shock_csv(std::ostream& os, const ShockCurve& curve) {
    os << "t,s,u_minus,u_plus\n" << std::setprecision(17);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        os << curve.t[i] << ',' << curve.s[i] << ',' << curve.u_minus[i] << ',' << curve.u_plus[i] << '\n';
    }
}

}  // namespace sburgers::shocks
