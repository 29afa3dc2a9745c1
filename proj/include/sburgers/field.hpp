#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "sburgers/noise.hpp"
#include "sburgers/paths.hpp"
#include "sburgers/profile.hpp"

namespace sburgers {

/// Time step exceeds the Burgers CFL limit; callers subcycle.
class CflError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values appeared in a field.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cell averages of u on a periodic grid of N cells (N a power of two).
class GridField {
public:
    GridField(noise::Torus domain, std::size_t cells, double t = 0.0);
    GridField(noise::Torus domain, std::vector<double> values, double t = 0.0);

    static GridField from_profile(const InitialProfile& u0, noise::Torus domain, std::size_t cells);

    const noise::Torus& domain() const { return domain_; }
    std::size_t size() const { return u_.size(); }
    double dx() const { return domain_.length / static_cast<double>(u_.size()); }
    double center(std::size_t i) const { return domain_.origin + (static_cast<double>(i) + 0.5) * dx(); }
    double t() const { return t_; }
    void set_time(double t) { t_ = t; }

    std::span<double> values() { return u_; }
    std::span<const double> values() const { return u_; }
    double operator[](std::size_t i) const { return u_[i]; }

    /// Periodic 4-point cubic interpolation of the cell values at x.
    double sample(double x) const;

    double mass() const;
    double sup_norm() const;
    double grad_sup() const;    // max |u_{i+1} - u_i| / dx
    /// Like grad_sup, but each interface counts only the smallest of its own and its two
    /// neighbours' differences, so single-interface glitches (Godunov at a sonic face) drop out.
    double resolved_grad() const;
    double h2_norm() const;     // sqrt(sum (u^2 + (D+ u)^2 + (D+D- u)^2) dx)
    double l2_norm_sq() const;  // sum u^2 dx

    /// Index of the cell containing x (periodic) and the fractional offset from its center.
    void locate(double x, std::size_t& cell, double& frac) const;

private:
    noise::Torus domain_;
    std::vector<double> u_;
    double t_ = 0.0;
};

/// One Godunov finite-volume step of u_t + (u^2/2)_x = 0. Throws CflError if dt max|u| / dx > cfl_max.
void burgers_substep(GridField& field, double dt, double cfl_max = 0.5);

enum class Interpolation {
    MonotoneCubic,  // clipped cubic at the feet; conservative limited PPM remap for rigid shifts
    Fourier,        // trigonometric interpolant (exact for rigid shifts of band-limited data)
};

/// Semi-Lagrangian solve of u_tau + (sum xi_k(x) dW_k / dt) u_x = 0 over one step,
/// with feet traced back by RK4 through the frozen velocity field.
void transport_substep(GridField& field, const noise::NoiseBasis& basis, std::span<const double> dW,
                       Interpolation interp = Interpolation::MonotoneCubic);

enum class ViscousMethod { BackwardEuler, Spectral };

/// Heat step u_t = nu u_xx: backward Euler (periodic tridiagonal) or the exact spectral multiplier.
void viscous_substep(GridField& field, double nu, double dt, ViscousMethod method = ViscousMethod::BackwardEuler);

/// u <- u exp(-b(x) dW): zeroth-order part of the noise operator a u_x + b u.
void zeroth_order_substep(GridField& field, const std::function<double(double)>& b, double dW);

struct StepParams {
    double nu = 0.0;
    double cfl_max = 0.5;
    Interpolation interp = Interpolation::MonotoneCubic;
    ViscousMethod viscous = ViscousMethod::BackwardEuler;
    std::function<double(double)> zeroth_order;  // b(x), driven by mode 0; empty for pure transport
};

/// viscous (if nu > 0), then Burgers (subcycled to the CFL limit), then transport, then b-term.
void step(GridField& field, const noise::NoiseBasis& basis, std::span<const double> dW, double dt,
          const StepParams& params);

/// Time series of field functionals, one entry per recorded step.
struct Diagnostics {
    std::vector<double> t;
    std::vector<double> sup;
    std::vector<double> grad_sup;
    std::vector<double> resolved_grad;
    std::vector<double> A;  // int_0^t grad_sup ds (trapezoid)
    std::vector<double> h2;
    std::vector<double> mass;
    std::vector<double> energy;  // ||u||_{L2}^2
    std::vector<double> w0;      // W_0(t) of the driving path (0 without noise)

    void record(const GridField& field, double w0_value);
    std::size_t size() const { return t.size(); }
};

struct RunOptions {
    std::size_t snapshot_stride = 0;  // 0: no snapshots besides the final one
    bool keep_initial_snapshot = true;
};

struct RunResult {
    Diagnostics diagnostics;
    std::vector<GridField> snapshots;
    GridField final_field;
};

/// Steps `field` along every increment of `path`, recording diagnostics at each step.
RunResult run(GridField field, const noise::NoiseBasis& basis, const BrownianPath& path, const StepParams& params,
              const RunOptions& opts = {});

struct MaxPrincipleOptions {
    double c = 0.0;     // envelope rate: bound is e^{-c W_0(t)} ||u0||
    double tol = 1e-6;  // allowed overshoot per unit time
};

struct MaxPrincipleReport {
    bool violated = false;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max_t ||u_t|| / (e^{-c W_t} ||u_0||)
    double worst_time = 0.0;
};

MaxPrincipleReport max_principle_monitor(const Diagnostics& d, const MaxPrincipleOptions& opts = {});

/// Estimated gradient blow-up time: root of a least-squares line through 1 / resolved_grad(t),
/// fitted while the gradient is below `resolved_fraction` of its grid-resolvable maximum.
double gradient_blowup_time(const Diagnostics& d, double dx, double resolved_fraction = 0.02);

/// Refinement test for the blow-up criterion on one path run at two resolutions (same time grid).
/// A smooth solution gives ratios near 1; a jump makes H2 grow like N^{3/2} and A like N.
struct BlowupClassification {
    double h2_ratio = 1.0;  // H2_fine / H2_coarse at the horizon
    double a_ratio = 1.0;   // A_fine / A_coarse at the horizon
    bool h2_blowup = false;
    bool a_blowup = false;
    double t_h2 = -1.0;  // first time the H2 ratio exceeds its threshold; negative if never
    double t_a = -1.0;
    bool agree() const { return h2_blowup == a_blowup; }
};

/// Throws std::invalid_argument if the two runs were not recorded on the same times.
BlowupClassification classify_blowup(const Diagnostics& coarse, const Diagnostics& fine, double h2_threshold = 1.5,
                                     double a_threshold = 1.2);

/// First recorded time at which `series` exceeds `threshold`; negative if never.
double first_exceedance(std::span<const double> t, std::span<const double> series, double threshold);

/// CSV writers. Snapshot columns: x,u; diagnostics columns: t,sup,grad_sup,A,H2,mass.
void write_snapshot_csv(std::ostream& os, const GridField& field);
void write_diagnostics_csv(std::ostream& os, const Diagnostics& d);

}  // namespace sburgers
