#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "sburgers/noise.hpp"
#include "sburgers/paths.hpp"
#include "sburgers/profile.hpp"

namespace sburgers {

class GridField;

namespace characteristics {

enum class Fate { Alive, BlowUp, SignFlip };

const char* to_string(Fate f);

/// One characteristic X_t carrying its slope Y_t = du/dx(t, X_t) and the conserved value u(0, X_0).
struct State {
    double X = 0.0;
    double Y = 0.0;
    double u_val = 0.0;
    double Y0 = 0.0;
    Fate fate = Fate::Alive;
    double death_time = std::numeric_limits<double>::quiet_NaN();

    bool alive() const { return fate == Fate::Alive; }
};

State make_state(const InitialProfile& u0, double x0);
std::vector<State> make_fan(const InitialProfile& u0, std::span<const double> x0);

struct StepOptions {
    double cap = 1e6;  // |Y| above this is declared blow-up
};

/// Euler-Maruyama step of the Ito system
///   dX = (u + phi(X)) dt + sum xi_k(X) dW_k
///   dY = (-Y^2 + psi(X) Y) dt - sum xi_k'(X) Y dW_k.
/// `t` is the time at the start of the step (used to timestamp blow-up).
void step_ito(std::span<State> states, const noise::NoiseBasis& basis, std::span<const double> dW, double t, double dt,
              const StepOptions& opts = {});

/// Stochastic Heun (predictor-corrector) step of the Stratonovich system
///   dX = u dt + sum xi_k(X) o dW_k,   dY = -Y^2 dt - sum xi_k'(X) Y o dW_k.
void step_stratonovich_heun(std::span<State> states, const noise::NoiseBasis& basis, std::span<const double> dW,
                            double t, double dt, const StepOptions& opts = {});

enum class Scheme { Ito, Heun };

/// Runs `states` over the whole path, recording a snapshot every `stride` steps (and at t0 and t_end).
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<State>> snapshots;
};
Trajectory integrate(std::vector<State> states, const noise::NoiseBasis& basis, const BrownianPath& path,
                     Scheme scheme, std::size_t stride = 1, const StepOptions& opts = {});

/// Closed form for xi = alpha x + beta (single mode 0 of `path`):
///   X_t = e^{alpha W_t} (gamma + u0(gamma) I_t + beta J_t),
///   I_t = int e^{-alpha W} ds (left endpoint),  J_t = int e^{-alpha W} o dW (midpoint rule).
std::vector<double> exact_linear_solution(double gamma, const InitialProfile& u0, double alpha, double beta,
                                          const BrownianPath& path);

/// Riccati slope oracle for xi = alpha x: Y_t = e^{-alpha W_t} / (1/Y_0 + I_t); NaN after blow-up.
std::vector<double> riccati_slope(double Y0, double alpha, const BrownianPath& path, std::span<const double> I);

struct Crossing {
    double time = 0.0;
    std::size_t pair = 0;  // characteristics `pair` and `pair + 1` met
};

/// Earliest time two initially adjacent characteristics of the sorted fan `x0` meet, with every
/// characteristic driven by `path` (drift step, then an RK4 step of the frozen-increment noise flow). The step containing the first ordering flip is bisected
/// with Brownian-bridge midpoints until the bracket is below dt/10.
std::optional<Crossing> first_crossing(std::span<const double> x0, const InitialProfile& u0,
                                       const noise::NoiseBasis& basis, const BrownianPath& path);

/// max |u(t, X_t) - u(0, X_0)| over all snapshots, with u(t, .) interpolated from `fields[i]`
/// (same times as `traj.snapshots[i]`). Only alive characteristics contribute.
double advection_residual(const Trajectory& traj, std::span<const GridField> fields);

/// Y_t * Y_0 >= 0 for all alive states.
bool sign_barrier_holds(std::span<const State> states);

/// Strict ordering of X among alive states (fan given in increasing order).
bool ordering_holds(std::span<const State> states);

/// CSV columns: t,path_index,char_index,X,Y,u_val,alive
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t path_index, bool header = true);

}  // namespace characteristics
}  // namespace sburgers
