#include "sburgers/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iomanip>
#include <mutex>
#include <numbers>

namespace sburgers {

namespace {

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n), real_(fftw_alloc_real(n)), spec_(fftw_alloc_complex(n / 2 + 1)) {
        std::lock_guard lock(fftw_planner_mutex());
        const int ni = static_cast<int>(n);
        fwd_ = fftw_plan_dft_r2c_1d(ni, real_, spec_, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r_1d(ni, spec_, real_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(real_);
        fftw_free(spec_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::vector<std::complex<double>> forward(std::span<const double> u) {
        std::copy(u.begin(), u.end(), real_);
        fftw_execute(fwd_);
        std::vector<std::complex<double>> c(n_ / 2 + 1);
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = {spec_[j][0], spec_[j][1]};
        return c;
    }
    void inverse(std::span<const std::complex<double>> c, std::span<double> u) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            spec_[j][0] = c[j].real();
            spec_[j][1] = c[j].imag();
        }
        fftw_execute(inv_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) u[i] = real_[i] * scale;
    }

private:
    std::size_t n_;
    double* real_;
    fftw_complex* spec_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

double cubic_weights_eval(double um1, double u0, double u1, double u2, double s) {
    // Lagrange cubic through nodes -1, 0, 1, 2 evaluated at s in [0, 1)
    const double wm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double w0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double w1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double w2 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return wm1 * um1 + w0 * u0 + w1 * u1 + w2 * u2;
}

double godunov_flux(double ul, double ur) {
    const double a = std::max(ul, 0.0), b = std::min(ur, 0.0);
    return std::max(0.5 * a * a, 0.5 * b * b);
}

}  // namespace

GridField::GridField(noise::Torus domain, std::size_t cells, double t) : domain_(domain), u_(cells, 0.0), t_(t) {
    if (cells < 4 || !std::has_single_bit(cells)) throw std::invalid_argument("cell count must be a power of two >= 4");
    if (!(domain.length > 0.0)) throw std::invalid_argument("torus length must be positive");
}

GridField::GridField(noise::Torus domain, std::vector<double> values, double t)
    : GridField(domain, values.size(), t) {
    u_ = std::move(values);
}

GridField GridField::from_profile(const InitialProfile& u0, noise::Torus domain, std::size_t cells) {
    GridField f(domain, cells);
    const double h = f.dx();
    for (std::size_t i = 0; i < cells; ++i) {
        const double a = domain.origin + h * static_cast<double>(i);
        f.u_[i] = u0.cell_average(a, a + h);
    }
    return f;
}

void GridField::locate(double x, std::size_t& cell, double& frac) const {
    const double s = (x - domain_.origin) / dx() - 0.5;
    const double fl = std::floor(s);
    frac = s - fl;
    cell = wrap(static_cast<std::ptrdiff_t>(fl), u_.size());
}

double GridField::sample(double x) const {
    std::size_t j;
    double s;
    locate(x, j, s);
    const std::size_t n = u_.size();
    return cubic_weights_eval(u_[wrap(static_cast<std::ptrdiff_t>(j) - 1, n)], u_[j], u_[(j + 1) % n],
                              u_[(j + 2) % n], s);
}

double GridField::mass() const {
    double s = 0.0;
    for (double v : u_) s += v;
    return s * dx();
}

double GridField::sup_norm() const {
    double m = 0.0;
    for (double v : u_) m = std::max(m, std::abs(v));
    return m;
}

double GridField::grad_sup() const {
    const std::size_t n = u_.size();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(u_[(i + 1) % n] - u_[i]));
    return m / dx();
}

double GridField::resolved_grad() const {
    const std::size_t n = u_.size();
    auto d = [&](std::size_t i) { return std::abs(u_[(i + 1) % n] - u_[i % n]); };
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::min({d(i + n - 1), d(i), d(i + 1)}));
    return m / dx();
}

double GridField::h2_norm() const {
    const std::size_t n = u_.size();
    const double h = dx();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double up = u_[(i + 1) % n], um = u_[wrap(static_cast<std::ptrdiff_t>(i) - 1, n)];
        const double d1 = (up - u_[i]) / h;
        const double d2 = (up - 2.0 * u_[i] + um) / (h * h);
        s += u_[i] * u_[i] + d1 * d1 + d2 * d2;
    }
    return std::sqrt(s * h);
}

double GridField::l2_norm_sq() const {
    double s = 0.0;
    for (double v : u_) s += v * v;
    return s * dx();
}

void burgers_substep(GridField& field, double dt, double cfl_max) {
    const double h = field.dx();
    const double cfl = dt * field.sup_norm() / h;
    if (cfl > cfl_max) {
        throw CflError("Burgers step violates CFL: " + std::to_string(cfl) + " > " + std::to_string(cfl_max));
    }
    auto u = field.values();
    const std::size_t n = u.size();
    std::vector<double> flux(n);  // flux[i] at interface i + 1/2
    for (std::size_t i = 0; i < n; ++i) flux[i] = godunov_flux(u[i], u[(i + 1) % n]);
    const double r = dt / h;
    for (std::size_t i = 0; i < n; ++i) u[i] -= r * (flux[i] - flux[(i + n - 1) % n]);
}

namespace {

// Conservative, monotone shift by `cells` (any real) using a limited PPM reconstruction.
void ppm_shift(std::span<double> u, double cells) {
    const std::size_t n = u.size();
    const double whole = std::floor(cells);
    const double f = cells - whole;
    std::vector<double> v(n);
    const auto m = static_cast<std::ptrdiff_t>(whole);
    for (std::size_t i = 0; i < n; ++i) v[i] = u[wrap(static_cast<std::ptrdiff_t>(i) - m, n)];
    if (f == 0.0) {
        std::copy(v.begin(), v.end(), u.begin());
        return;
    }
    auto at = [&](std::ptrdiff_t i) { return v[wrap(i, n)]; };
    std::vector<double> edge(n);  // value at interface i + 1/2
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        double e = 7.0 / 12.0 * (at(ii) + at(ii + 1)) - 1.0 / 12.0 * (at(ii - 1) + at(ii + 2));
        e = std::clamp(e, std::min(at(ii), at(ii + 1)), std::max(at(ii), at(ii + 1)));
        edge[i] = e;
    }
    std::vector<double> flux(n);  // mass leaving cell i through its right edge, in cell units
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = v[i];
        double uL = edge[wrap(static_cast<std::ptrdiff_t>(i) - 1, n)], uR = edge[i];
        if ((uR - ui) * (ui - uL) <= 0.0) {
            uL = uR = ui;
        } else {
            const double du = uR - uL, mid = ui - 0.5 * (uL + uR);
            if (du * mid > du * du / 6.0) {
                uL = 3.0 * ui - 2.0 * uR;
            } else if (-du * du / 6.0 > du * mid) {
                uR = 3.0 * ui - 2.0 * uL;
            }
        }
        const double du = uR - uL;
        const double u6 = 6.0 * (ui - 0.5 * (uL + uR));
        flux[i] = f * (uR - 0.5 * f * (du - (1.0 - 2.0 / 3.0 * f) * u6));
    }
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] - (flux[i] - flux[wrap(static_cast<std::ptrdiff_t>(i) - 1, n)]);
}

void fourier_shift(std::span<double> u, double shift, double length) {
    const std::size_t n = u.size();
    RealFft fft(n);
    auto c = fft.forward(u);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / length;
        if (2 * j == n) {
            c[j] *= std::cos(kappa * shift);
        } else {
            c[j] *= std::polar(1.0, -kappa * shift);
        }
    }
    fft.inverse(c, u);
}

std::vector<double> fourier_evaluate(std::span<const double> u, const noise::Torus& dom, std::span<const double> xs) {
    const std::size_t n = u.size();
    RealFft fft(n);
    const auto c = fft.forward(u);
    const double h = dom.length / static_cast<double>(n);
    std::vector<double> out(xs.size());
    for (std::size_t q = 0; q < xs.size(); ++q) {
        // samples sit at cell centers
        const double s = xs[q] - dom.origin - 0.5 * h;
        double acc = c[0].real();
        for (std::size_t j = 1; j < c.size(); ++j) {
            const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / dom.length;
            const double re = c[j].real() * std::cos(kappa * s) - c[j].imag() * std::sin(kappa * s);
            acc += (2 * j == n) ? re : 2.0 * re;
        }
        out[q] = acc / static_cast<double>(n);
    }
    return out;
}

}  // namespace

void transport_substep(GridField& field, const noise::NoiseBasis& basis, std::span<const double> dW,
                       Interpolation interp) {
    if (basis.empty()) return;
    if (dW.size() != basis.size()) throw std::invalid_argument("transport_substep: increment size mismatch");
    if (std::all_of(dW.begin(), dW.end(), [](double w) { return w == 0.0; })) return;
    auto u = field.values();
    const std::size_t n = u.size();
    const double h = field.dx();

    if (basis.uniform()) {
        const double shift = basis.displacement(field.center(0), dW);
        if (interp == Interpolation::Fourier) {
            fourier_shift(u, shift, field.domain().length);
        } else {
            ppm_shift(u, shift / h);
        }
        return;
    }

    // Feet of characteristics: integrate dx/ds = -V(x), V = sum xi_k dW_k, over s in [0, 1].
    const noise::FrozenVelocity V(basis, dW);
    std::vector<double> feet(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = field.center(i);
        // RK4 flow-map error scales with (ds |V'|)^5; keep ds |V'| below 1/8
        const double dv = (V(x + h) - V(x - h)) / (2.0 * h);
        const int sub = 1 + static_cast<int>(8.0 * std::abs(dv));
        const double ds = 1.0 / sub;
        for (int q = 0; q < sub; ++q) {
            const double k1 = -V(x);
            const double k2 = -V(x + 0.5 * ds * k1);
            const double k3 = -V(x + 0.5 * ds * k2);
            const double k4 = -V(x + ds * k3);
            x += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!std::isfinite(x)) throw NumericError("non-finite departure point");
        feet[i] = x;
    }

    if (interp == Interpolation::Fourier) {
        const auto vals = fourier_evaluate(u, field.domain(), feet);
        std::copy(vals.begin(), vals.end(), u.begin());
        return;
    }

    const std::vector<double> old(u.begin(), u.end());
    const GridField& src = field;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j;
        double s;
        src.locate(feet[i], j, s);
        const double a = old[j], b = old[(j + 1) % n];
        const double c = cubic_weights_eval(old[wrap(static_cast<std::ptrdiff_t>(j) - 1, n)], a, b, old[(j + 2) % n], s);
        u[i] = std::clamp(c, std::min(a, b), std::max(a, b));
    }
}

void viscous_substep(GridField& field, double nu, double dt, ViscousMethod method) {
    if (!(nu > 0.0)) throw std::invalid_argument("viscous_substep: nu must be positive");
    auto u = field.values();
    const double h = field.dx();
    if (method == ViscousMethod::BackwardEuler) {
        const double r = nu * dt / (h * h);
        solve_cyclic_tridiagonal(1.0 + 2.0 * r, -r, u);
        return;
    }
    RealFft fft(u.size());
    auto c = fft.forward(u);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double kappa = 2.0 * std::numbers::pi * static_cast<double>(j) / field.domain().length;
        c[j] *= std::exp(-nu * kappa * kappa * dt);
    }
    fft.inverse(c, u);
}

void zeroth_order_substep(GridField& field, const std::function<double(double)>& b, double dW) {
    auto u = field.values();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(-b(field.center(i)) * dW);
}

void step(GridField& field, const noise::NoiseBasis& basis, std::span<const double> dW, double dt,
          const StepParams& params) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    if (params.nu > 0.0) viscous_substep(field, params.nu, dt, params.viscous);

    const double cfl = dt * field.sup_norm() / field.dx();
    constexpr double kMaxSubsteps = 1e6;
    if (!(cfl / params.cfl_max <= kMaxSubsteps)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "Burgers CFL number %.3g at t=%.6g needs more than 1e6 substeps", cfl, field.t());
        throw NumericError(buf);
    }
    const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(cfl / params.cfl_max)));
    const double h = dt / static_cast<double>(sub);
    for (std::size_t q = 0; q < sub; ++q) {
        try {
            burgers_substep(field, h, params.cfl_max);
        } catch (const CflError&) {
            // sup norm can only fall during Godunov steps, so one retry with a safety margin suffices
            const double h2 = 0.5 * h;
            burgers_substep(field, h2, params.cfl_max);
            burgers_substep(field, h2, params.cfl_max);
        }
    }
    transport_substep(field, basis, dW, params.interp);
    if (params.zeroth_order) {
        if (dW.empty()) throw std::invalid_argument("zeroth-order noise needs at least one Brownian mode");
        zeroth_order_substep(field, params.zeroth_order, dW[0]);
    }
    field.set_time(field.t() + dt);
    for (double v : field.values()) {
        if (!std::isfinite(v)) throw NumericError("field became non-finite at t=" + std::to_string(field.t()));
    }
}

void Diagnostics::record(const GridField& field, double w0_value) {
    const double g = field.grad_sup();
    if (t.empty()) {
        A.push_back(0.0);
    } else {
        A.push_back(A.back() + 0.5 * (grad_sup.back() + g) * (field.t() - t.back()));
    }
    t.push_back(field.t());
    sup.push_back(field.sup_norm());
    grad_sup.push_back(g);
    resolved_grad.push_back(field.resolved_grad());
    h2.push_back(field.h2_norm());
    mass.push_back(field.mass());
    energy.push_back(field.l2_norm_sq());
    w0.push_back(w0_value);
}

RunResult run(GridField field, const noise::NoiseBasis& basis, const BrownianPath& path, const StepParams& params,
              const RunOptions& opts) {
    if (path.modes() != basis.size()) throw std::invalid_argument("path mode count does not match basis");
    const TimeGrid& g = path.grid();
    field.set_time(g.t0);
    RunResult res{Diagnostics{}, {}, field};
    double w0 = 0.0;
    res.diagnostics.record(field, w0);
    if (opts.snapshot_stride > 0 && opts.keep_initial_snapshot) res.snapshots.push_back(field);
    for (std::size_t n = 0; n < g.n_steps; ++n) {
        const auto dW = path.increment(n);
        step(field, basis, dW, g.dt(), params);
        field.set_time(g.time(n + 1));
        if (!dW.empty()) w0 += dW[0];
        res.diagnostics.record(field, w0);
        if (opts.snapshot_stride > 0 && (n + 1) % opts.snapshot_stride == 0) res.snapshots.push_back(field);
    }
    res.final_field = std::move(field);
    return res;
}

MaxPrincipleReport max_principle_monitor(const Diagnostics& d, const MaxPrincipleOptions& opts) {
    MaxPrincipleReport r;
    if (d.size() == 0) return r;
    const double u0 = d.sup.front();
    if (u0 == 0.0) return r;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double envelope = std::exp(-opts.c * d.w0[i]) * u0;
        const double ratio = d.sup[i] / envelope;
        const double elapsed = d.t[i] - d.t.front();
        if (ratio > r.worst_ratio) {
            r.worst_ratio = ratio;
            r.worst_time = d.t[i];
        }
        if (ratio > 1.0 + opts.tol * elapsed) {
            r.violated = true;
            ++r.violations;
        }
    }
    return r;
}

double gradient_blowup_time(const Diagnostics& d, double dx, double resolved_fraction) {
    if (d.size() < 3) return -1.0;
    // Largest gradient a grid can hold for this amplitude: the full oscillation in one cell.
    const double limit = resolved_fraction * 2.0 * d.sup.front() / dx;
    double st = 0, sy = 0, stt = 0, sty = 0, peak = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.resolved_grad[i] > limit) break;
        peak = std::max(peak, d.resolved_grad[i]);
        if (d.resolved_grad[i] < 0.5 * peak) break;  // the steep layer collapsed into a shock
        const double y = 1.0 / d.resolved_grad[i];
        st += d.t[i];
        sy += y;
        stt += d.t[i] * d.t[i];
        sty += d.t[i] * y;
        ++m;
    }
    if (m < 3) return -1.0;
    const double mm = static_cast<double>(m);
    const double slope = (mm * sty - st * sy) / (mm * stt - st * st);
    const double icept = (sy - slope * st) / mm;
    if (!(slope < 0.0)) return -1.0;
    return -icept / slope;
}

BlowupClassification classify_blowup(const Diagnostics& coarse, const Diagnostics& fine, double h2_threshold,
                                     double a_threshold) {
    if (coarse.size() != fine.size() || coarse.size() == 0) {
        throw std::invalid_argument("classify_blowup: runs differ in length");
    }
    BlowupClassification c;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        if (std::abs(coarse.t[i] - fine.t[i]) > 1e-9 * std::max(1.0, std::abs(coarse.t[i]))) {
            throw std::invalid_argument("classify_blowup: runs recorded at different times");
        }
        const double rh = fine.h2[i] / coarse.h2[i];
        if (c.t_h2 < 0.0 && coarse.h2[i] > 0.0 && rh > h2_threshold) c.t_h2 = coarse.t[i];
        if (c.t_a < 0.0 && coarse.A[i] > 0.0 && fine.A[i] / coarse.A[i] > a_threshold) c.t_a = coarse.t[i];
    }
    c.h2_ratio = coarse.h2.back() > 0.0 ? fine.h2.back() / coarse.h2.back() : 1.0;
    c.a_ratio = coarse.A.back() > 0.0 ? fine.A.back() / coarse.A.back() : 1.0;
    c.h2_blowup = c.h2_ratio > h2_threshold;
    c.a_blowup = c.a_ratio > a_threshold;
    return c;
}

double first_exceedance(std::span<const double> t, std::span<const double> series, double threshold) {
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i] > threshold) return t[i];
    }
    return -1.0;
}

void write_snapshot_csv(std::ostream& os, const GridField& field) {
    os << "x,u\n" << std::setprecision(17);
    for (std::size_t i = 0; i < field.size(); ++i) os << field.center(i) << ',' << field[i] << '\n';
}

void write_diagnostics_csv(std::ostream& os, const Diagnostics& d) {
    os << "t,sup,grad_sup,A,H2,mass\n" << std::setprecision(17);
    for (std::size_t i = 0; i < d.size(); ++i) {
        os << d.t[i] << ',' << d.sup[i] << ',' << d.grad_sup[i] << ',' << d.A[i] << ',' << d.h2[i] << ',' << d.mass[i]
           << '\n';
    }
}

}  // namespace sburgers
