#pragma once

#include <span>
#include <vector>

namespace sburgers {

/// Periodic cubic spline through equispaced samples y_i = f(x0 + i h), i = 0..n-1,
/// with period n h. C2 everywhere, so second derivatives are continuous.
class PeriodicSpline {
public:
    PeriodicSpline(double x0, double h, std::vector<double> values);

    double x0() const { return x0_; }
    double spacing() const { return h_; }
    double period() const { return h_ * static_cast<double>(y_.size()); }
    std::size_t size() const { return y_.size(); }

    /// Derivative of order 0, 1 or 2 at x (x taken modulo the period).
    double eval(double x, int order = 0) const;

private:
    double x0_;
    double h_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the knots
};

/// Solves the cyclic tridiagonal system with constant diagonals
/// (sub = super = `off`, diagonal = `diag`) in place. Requires |diag| > 2|off|.
void solve_cyclic_tridiagonal(double diag, double off, std::span<double> rhs);

}  // namespace sburgers
