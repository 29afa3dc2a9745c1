#include "sburgers/spline.hpp"

#include <cmath>
#include <stdexcept>

namespace sburgers {

void solve_cyclic_tridiagonal(double diag, double off, std::span<double> rhs) {
    const std::size_t n = rhs.size();
    if (n == 0) return;
    if (n == 1) {
        rhs[0] /= diag + 2.0 * off;
        return;
    }
    if (n == 2) {
        // [[d, 2o], [2o, d]]
        const double a = diag, b = 2.0 * off, det = a * a - b * b;
        const double r0 = rhs[0], r1 = rhs[1];
        rhs[0] = (a * r0 - b * r1) / det;
        rhs[1] = (a * r1 - b * r0) / det;
        return;
    }
    // Sherman-Morrison on top of the Thomas algorithm.
    const double gamma = -diag;
    std::vector<double> bdiag(n, diag);
    bdiag[0] = diag - gamma;
    bdiag[n - 1] = diag - off * off / gamma;

    auto thomas = [&](std::vector<double>& x) {
        std::vector<double> c(n);
        c[0] = off / bdiag[0];
        x[0] /= bdiag[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = bdiag[i] - off * c[i - 1];
            c[i] = off / m;
            x[i] = (x[i] - off * x[i - 1]) / m;
        }
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    };

    std::vector<double> x(rhs.begin(), rhs.end());
    thomas(x);
    std::vector<double> z(n, 0.0);
    z[0] = gamma;
    z[n - 1] = off;
    thomas(z);
    const double fact = (x[0] + off * x[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = x[i] - fact * z[i];
}

PeriodicSpline::PeriodicSpline(double x0, double h, std::vector<double> values)
    : x0_(x0), h_(h), y_(std::move(values)) {
    if (y_.size() < 3) throw std::invalid_argument("periodic spline needs at least 3 samples");
    if (!(h_ > 0.0)) throw std::invalid_argument("periodic spline spacing must be positive");
    const std::size_t n = y_.size();
    m_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double yp = y_[(i + 1) % n], ym = y_[(i + n - 1) % n];
        m_[i] = 6.0 * (yp - 2.0 * y_[i] + ym) / (h_ * h_);
    }
    solve_cyclic_tridiagonal(4.0, 1.0, m_);
}

double PeriodicSpline::eval(double x, int order) const {
    const double period = this->period();
    double s = std::fmod(x - x0_, period);
    if (s < 0.0) s += period;
    const auto n = y_.size();
    auto i = static_cast<std::size_t>(s / h_);
    if (i >= n) i = n - 1;
    const std::size_t j = (i + 1) % n;
    const double a = (static_cast<double>(i + 1) * h_ - s) / h_;  // weight of knot i
    const double b = 1.0 - a;
    switch (order) {
        case 0:
            return a * y_[i] + b * y_[j] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[j]) * h_ * h_ / 6.0;
        case 1:
            return (y_[j] - y_[i]) / h_ - (3.0 * a * a - 1.0) / 6.0 * h_ * m_[i] + (3.0 * b * b - 1.0) / 6.0 * h_ * m_[j];
        case 2:
            return a * m_[i] + b * m_[j];
        default:
            throw std::invalid_argument("spline derivative order must be 0, 1 or 2");
    }
}

}  // namespace sburgers
