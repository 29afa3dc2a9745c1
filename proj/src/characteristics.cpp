#include "sburgers/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "sburgers/field.hpp"
#include "sburgers/rng.hpp"

namespace sburgers::characteristics {

namespace {

using noise::ModeValue;
using noise::NoiseBasis;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Noise {
    double disp = 0.0;   // sum xi_k dW_k
    double slope = 0.0;  // sum xi_k' dW_k
    double phi = 0.0;
    double psi = 0.0;
};

Noise noise_at(const NoiseBasis& basis, double x, std::span<const double> dW, bool with_corrections) {
    Noise n;
    if (basis.empty()) return n;
    thread_local std::vector<ModeValue> v;
    v.resize(basis.size());
    basis.evaluate(x, v);
    for (std::size_t k = 0; k < v.size(); ++k) {
        n.disp += v[k].xi * dW[k];
        n.slope += v[k].dxi * dW[k];
    }
    if (with_corrections) {
        n.phi = noise::CorrectionFields::phi(v);
        n.psi = noise::CorrectionFields::psi(v);
    }
    return n;
}

// Exact increment of the Riccati flow y' = -y^2 over dt, or nullopt-like signal when the
// flow leaves through -infinity within the step (1 + y dt <= 0).
bool riccati_increment(double Y, double dt, double& inc) {
    const double denom = 1.0 + Y * dt;
    if (denom <= 0.0) return false;
    inc = -Y * Y * dt / denom;
    return true;
}

void kill_by_riccati(State& s, double t) {
    s.fate = Fate::BlowUp;
    s.death_time = t - 1.0 / s.Y;  // 1/Y reaches 0 exactly here
    s.Y = -kInf;
}

// Classifies the new slope; blow-up time from the zero of 1/Y, linear in t.
void settle(State& s, double Y_prev, double Y_new, double t, double dt, double cap) {
    if (!std::isfinite(Y_new) || std::abs(Y_new) > cap) {
        const double r0 = 1.0 / Y_prev;
        const double r1 = (std::isfinite(Y_new) && Y_new * Y_prev > 0.0) ? 1.0 / Y_new : 0.0;
        const double frac = (r0 != r1) ? r0 / (r0 - r1) : 1.0;
        s.fate = Fate::BlowUp;
        s.death_time = t + frac * dt;
        s.Y = Y_new;
        return;
    }
    if (Y_new * s.Y0 < 0.0) {
        s.fate = Fate::SignFlip;
        s.death_time = t + dt;
    }
    s.Y = Y_new;
}

}  // namespace

const char* to_string(Fate f) {
    switch (f) {
        case Fate::Alive: return "alive";
        case Fate::BlowUp: return "blow-up";
        case Fate::SignFlip: return "sign-flip";
    }
    return "?";
}

State make_state(const InitialProfile& u0, double x0) {
    State s;
    s.X = x0;
    s.Y = s.Y0 = u0.du0(x0);
    s.u_val = u0.u0(x0);
    return s;
}

std::vector<State> make_fan(const InitialProfile& u0, std::span<const double> x0) {
    std::vector<State> out;
    out.reserve(x0.size());
    for (double x : x0) out.push_back(make_state(u0, x));
    return out;
}

void step_ito(std::span<State> states, const NoiseBasis& basis, std::span<const double> dW, double t, double dt,
              const StepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_ito: dt must be positive");
    for (State& s : states) {
        if (!s.alive()) continue;
        const Noise n = noise_at(basis, s.X, dW, true);
        double drift;
        if (!riccati_increment(s.Y, dt, drift)) {
            s.X += (s.u_val + n.phi) * dt + n.disp;
            kill_by_riccati(s, t);
            continue;
        }
        const double Y_new = s.Y + drift + (n.psi * s.Y * dt - n.slope * s.Y);
        s.X += (s.u_val + n.phi) * dt + n.disp;
        settle(s, s.Y, Y_new, t, dt, opts.cap);
    }
}

void step_stratonovich_heun(std::span<State> states, const NoiseBasis& basis, std::span<const double> dW, double t,
                            double dt, const StepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_stratonovich_heun: dt must be positive");
    for (State& s : states) {
        if (!s.alive()) continue;
        const Noise n0 = noise_at(basis, s.X, dW, false);
        double drift;
        if (!riccati_increment(s.Y, dt, drift)) {
            const double Xp = s.X + s.u_val * dt + n0.disp;
            const Noise n1 = noise_at(basis, Xp, dW, false);
            s.X += s.u_val * dt + 0.5 * (n0.disp + n1.disp);
            kill_by_riccati(s, t);
            continue;
        }
        const double Xp = s.X + s.u_val * dt + n0.disp;
        const double Yp = s.Y + drift - n0.slope * s.Y;
        const Noise n1 = basis.empty() ? Noise{} : noise_at(basis, Xp, dW, false);
        const double Y_new = s.Y + drift - 0.5 * (n0.slope * s.Y + n1.slope * Yp);
        s.X += s.u_val * dt + 0.5 * (n0.disp + n1.disp);
        settle(s, s.Y, Y_new, t, dt, opts.cap);
    }
}

Trajectory integrate(std::vector<State> states, const NoiseBasis& basis, const BrownianPath& path, Scheme scheme,
                     std::size_t stride, const StepOptions& opts) {
    if (path.modes() != basis.size()) throw std::invalid_argument("path mode count does not match basis");
    if (stride == 0) stride = 1;
    const TimeGrid& g = path.grid();
    Trajectory traj;
    traj.times.push_back(g.t0);
    traj.snapshots.push_back(states);
    for (std::size_t n = 0; n < g.n_steps; ++n) {
        const double t = g.time(n);
        if (scheme == Scheme::Ito) {
            step_ito(states, basis, path.increment(n), t, g.dt(), opts);
        } else {
            step_stratonovich_heun(states, basis, path.increment(n), t, g.dt(), opts);
        }
        if ((n + 1) % stride == 0 || n + 1 == g.n_steps) {
            traj.times.push_back(g.time(n + 1));
            traj.snapshots.push_back(states);
        }
    }
    return traj;
}

std::vector<double> exact_linear_solution(double gamma, const InitialProfile& u0, double alpha, double beta,
                                          const BrownianPath& path) {
    if (path.modes() < 1) throw std::invalid_argument("exact_linear_solution needs one Brownian mode");
    const std::vector<double> W = path.cumulative(0);
    const std::vector<double> I = integrated_gbm(path, 0, alpha);
    const double u = u0.u0(gamma);
    std::vector<double> X(W.size());
    double J = 0.0;
    X[0] = gamma;
    for (std::size_t n = 0; n < path.steps(); ++n) {
        J += 0.5 * (std::exp(-alpha * W[n]) + std::exp(-alpha * W[n + 1])) * path.increment(n, 0);
        X[n + 1] = std::exp(alpha * W[n + 1]) * (gamma + u * I[n + 1] + beta * J);
    }
    return X;
}

std::vector<double> riccati_slope(double Y0, double alpha, const BrownianPath& path, std::span<const double> I) {
    const std::vector<double> W = path.cumulative(0);
    std::vector<double> Y(W.size());
    bool dead = false;
    for (std::size_t n = 0; n < W.size(); ++n) {
        const double denom = 1.0 / Y0 + I[n];
        if (dead || denom * (1.0 / Y0) <= 0.0) {
            dead = true;
            Y[n] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        Y[n] = std::exp(-alpha * W[n]) / denom;
    }
    return Y;
}

namespace {

// Heun step of positions only; slopes do not influence where characteristics go.
// Lie splitting: straight drift, then the flow of x' = sum xi_k(x) dW_k over unit pseudo-time
// (RK4). For linear noise the positions then carry the left-endpoint sum of e^{-alpha W}; a Heun
// noise step would leave an O(dW^4) bias in the multiplier that accumulates near tangential hits.
void advance_positions(std::span<double> X, std::span<const double> u, const NoiseBasis& basis,
                       std::span<const double> dW, double dt) {
    for (std::size_t i = 0; i < X.size(); ++i) {
        X[i] += u[i] * dt;
        if (basis.empty()) continue;
        const double k1 = basis.displacement(X[i], dW);
        const double k2 = basis.displacement(X[i] + 0.5 * k1, dW);
        const double k3 = basis.displacement(X[i] + 0.5 * k2, dW);
        const double k4 = basis.displacement(X[i] + k3, dW);
        X[i] += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
}

std::optional<std::size_t> first_flip(std::span<const double> X) {
    for (std::size_t i = 0; i + 1 < X.size(); ++i) {
        if (!(X[i + 1] > X[i])) return i;
    }
    return std::nullopt;
}

}  // namespace

std::optional<Crossing> first_crossing(std::span<const double> x0, const InitialProfile& u0, const NoiseBasis& basis,
                                       const BrownianPath& path) {
    if (x0.size() < 2) throw std::invalid_argument("first_crossing needs at least two characteristics");
    for (std::size_t i = 0; i + 1 < x0.size(); ++i) {
        if (!(x0[i + 1] > x0[i])) throw std::invalid_argument("first_crossing: initial positions must increase");
    }
    if (path.modes() != basis.size()) throw std::invalid_argument("path mode count does not match basis");

    const TimeGrid& g = path.grid();
    const double dt = g.dt();
    const std::size_t K = basis.size();
    std::vector<double> X(x0.begin(), x0.end()), u(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) u[i] = u0.u0(x0[i]);

    std::vector<double> prev;
    for (std::size_t n = 0; n < g.n_steps; ++n) {
        prev = X;
        advance_positions(X, u, basis, path.increment(n), dt);
        if (!first_flip(X)) continue;

        // Bisect [t_n, t_n + dt] with bridge midpoints.
        double ta = g.time(n), h = dt;
        std::vector<double> Xa = prev, Xb = X;
        std::vector<double> inc(path.increment(n).begin(), path.increment(n).end());
        std::vector<double> first(K), Xm;
        const std::uint64_t stream = mix64(path.lineage().stream ^ 0xC2B2AE3D27D4EB4FULL);
        for (std::uint64_t level = 0; h > dt / 10.0; ++level) {
            for (std::size_t k = 0; k < K; ++k) {
                const DrawIndex idx{path.lineage().master_seed, path.lineage().path_index, stream,
                                    static_cast<std::uint32_t>(k), n * 64 + level};
                first[k] = 0.5 * inc[k] + std::sqrt(h / 4.0) * counter_normal(idx);
            }
            Xm = Xa;
            advance_positions(Xm, u, basis, first, h / 2.0);
            if (first_flip(Xm)) {
                Xb = Xm;
                inc = first;
            } else {
                Xa = Xm;
                for (std::size_t k = 0; k < K; ++k) inc[k] -= first[k];
                ta += h / 2.0;
                Xb = Xa;
                advance_positions(Xb, u, basis, inc, h / 2.0);
                if (!first_flip(Xb)) {
                    // the two half steps disagree with the full step; the flip sits at the bracket end
                    return Crossing{ta + h / 2.0, *first_flip(X)};
                }
            }
            h /= 2.0;
        }
        // Linear interpolation of the closing gap inside the final bracket.
        const std::size_t pair = *first_flip(Xb);
        double best = ta + h;
        for (std::size_t i = 0; i + 1 < Xa.size(); ++i) {
            const double ga = Xa[i + 1] - Xa[i], gb = Xb[i + 1] - Xb[i];
            if (gb <= 0.0 && ga > 0.0) best = std::min(best, ta + h * ga / (ga - gb));
        }
        return Crossing{best, pair};
    }
    return std::nullopt;
}

double advection_residual(const Trajectory& traj, std::span<const GridField> fields) {
    if (fields.size() != traj.snapshots.size()) {
        throw std::invalid_argument("advection_residual: field and trajectory snapshots differ in count");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (const State& s : traj.snapshots[i]) {
            if (!s.alive()) continue;
            worst = std::max(worst, std::abs(fields[i].sample(s.X) - s.u_val));
        }
    }
    return worst;
}

bool sign_barrier_holds(std::span<const State> states) {
    return std::all_of(states.begin(), states.end(), [](const State& s) { return !s.alive() || s.Y * s.Y0 >= 0.0; });
}

bool ordering_holds(std::span<const State> states) {
    const State* last = nullptr;
    for (const State& s : states) {
        if (!s.alive()) continue;
        if (last && !(s.X > last->X)) return false;
        last = &s;
    }
    return true;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t path_index, bool header) {
    if (header) os << "t,path_index,char_index,X,Y,u_val,alive\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& snap = traj.snapshots[i];
        for (std::size_t c = 0; c < snap.size(); ++c) {
            os << traj.times[i] << ',' << path_index << ',' << c << ',' << snap[c].X << ',' << snap[c].Y << ','
               << snap[c].u_val << ',' << (snap[c].alive() ? 1 : 0) << '\n';
        }
    }
}

}  // namespace sburgers::characteristics
