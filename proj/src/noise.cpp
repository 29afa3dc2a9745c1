#include "sburgers/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

namespace sburgers::noise {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

ModeValue fourier_value(bool is_sin, double amp, double kappa, double s, double c) {
    if (is_sin) return {amp * s, amp * kappa * c, -amp * kappa * kappa * s};
    return {amp * c, -amp * kappa * s, -amp * kappa * kappa * c};
}

}  // namespace

Tabulated make_tabulated(double x0, double spacing, std::vector<double> values) {
    return Tabulated{std::make_shared<const PeriodicSpline>(x0, spacing, std::move(values))};
}

Tabulated load_tabulated_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open tabulated mode file " + file.string());
    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y;
        if (!(ss >> x >> y)) continue;  // header row
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.size() < 3) throw std::runtime_error("tabulated mode needs at least 3 rows: " + file.string());
    const double h = xs[1] - xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw std::runtime_error("tabulated mode samples must be equispaced: " + file.string());
        }
    }
    return make_tabulated(xs[0], h, std::move(ys));
}

ModeValue eval_mode_all(const NoiseMode& mode, double x) {
    return std::visit(
        overloaded{
            [&](const Linear& m) { return ModeValue{m.slope * x + m.offset, m.slope, 0.0}; },
            [&](const FourierSin& m) {
                const double kappa = 2.0 * std::numbers::pi * m.k / m.period;
                return fourier_value(true, m.amp, kappa, std::sin(kappa * x), std::cos(kappa * x));
            },
            [&](const FourierCos& m) {
                const double kappa = 2.0 * std::numbers::pi * m.k / m.period;
                return fourier_value(false, m.amp, kappa, std::sin(kappa * x), std::cos(kappa * x));
            },
            [&](const Tabulated& m) {
                return ModeValue{m.spline->eval(x, 0), m.spline->eval(x, 1), m.spline->eval(x, 2)};
            },
        },
        mode);
}

double eval_mode(const NoiseMode& mode, double x, int order) {
    if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
    const ModeValue v = eval_mode_all(mode, x);
    return order == 0 ? v.xi : order == 1 ? v.dxi : v.ddxi;
}

bool is_uniform(const NoiseMode& mode) {
    if (const auto* lin = std::get_if<Linear>(&mode)) return lin->slope == 0.0;
    if (const auto* fs = std::get_if<FourierSin>(&mode)) return fs->amp == 0.0;
    if (const auto* fc = std::get_if<FourierCos>(&mode)) return fc->amp == 0.0;
    return false;
}

std::string describe(const NoiseMode& mode) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Linear& m) { os << "linear(alpha=" << m.slope << ",beta=" << m.offset << ")"; },
                   [&](const FourierSin& m) { os << "fourier_sin(k=" << m.k << ",amp=" << m.amp << ")"; },
                   [&](const FourierCos& m) { os << "fourier_cos(k=" << m.k << ",amp=" << m.amp << ")"; },
                   [&](const Tabulated& m) { os << "tabulated(n=" << m.spline->size() << ")"; },
               },
               mode);
    return os.str();
}

NoiseBasis::NoiseBasis(std::vector<NoiseMode> modes, Domain domain) : modes_(std::move(modes)), domain_(domain) {
    if (const auto* line = std::get_if<Line>(&domain_); line && !(line->x_max > line->x_min)) {
        throw std::invalid_argument("line domain needs x_min < x_max");
    }
    if (const auto* torus = std::get_if<Torus>(&domain_); torus && !(torus->length > 0.0)) {
        throw std::invalid_argument("torus length must be positive");
    }
    uniform_ = std::all_of(modes_.begin(), modes_.end(), [](const NoiseMode& m) { return is_uniform(m); });

    all_fourier_same_period_ = true;
    bool any = false;
    for (const auto& m : modes_) {
        double period = 0.0;
        int k = 0;
        if (const auto* fs = std::get_if<FourierSin>(&m)) {
            period = fs->period;
            k = fs->k;
        } else if (const auto* fc = std::get_if<FourierCos>(&m)) {
            period = fc->period;
            k = fc->k;
        } else {
            continue;
        }
        if (k < 1) throw std::invalid_argument("Fourier mode wavenumber must be positive");
        if (any && period != fourier_period_) all_fourier_same_period_ = false;
        fourier_period_ = period;
        any = true;
        max_harmonic_ = std::max(max_harmonic_, k);
    }
    if (!any) all_fourier_same_period_ = false;
}

void NoiseBasis::check_domain(double x) const {
    if (const auto* line = std::get_if<Line>(&domain_)) {
        if (!(x >= line->x_min && x <= line->x_max)) {
            throw DomainError("position " + std::to_string(x) + " outside noise domain");
        }
    } else if (!std::isfinite(x)) {
        throw DomainError("non-finite position");
    }
}

void NoiseBasis::evaluate(double x, std::span<ModeValue> out) const {
    check_domain(x);
    if (!all_fourier_same_period_) {
        for (std::size_t k = 0; k < modes_.size(); ++k) out[k] = eval_mode_all(modes_[k], x);
        return;
    }
    // cos(j theta), sin(j theta) by complex recurrence, j = 1..max harmonic
    thread_local std::vector<std::complex<double>> table;
    table.resize(static_cast<std::size_t>(max_harmonic_) + 1);
    const double theta = 2.0 * std::numbers::pi * x / fourier_period_;
    const std::complex<double> base(std::cos(theta), std::sin(theta));
    table[0] = 1.0;
    for (int j = 1; j <= max_harmonic_; ++j) {
        // re-anchor every 64 harmonics to bound accumulated rounding
        table[j] = (j % 64 == 0) ? std::polar(1.0, theta * j) : table[j - 1] * base;
    }
    const double kappa0 = 2.0 * std::numbers::pi / fourier_period_;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const auto& m = modes_[k];
        if (const auto* fs = std::get_if<FourierSin>(&m)) {
            const auto z = table[fs->k];
            out[k] = fourier_value(true, fs->amp, kappa0 * fs->k, z.imag(), z.real());
        } else if (const auto* fc = std::get_if<FourierCos>(&m)) {
            const auto z = table[fc->k];
            out[k] = fourier_value(false, fc->amp, kappa0 * fc->k, z.imag(), z.real());
        } else {
            out[k] = eval_mode_all(m, x);
        }
    }
}

double NoiseBasis::displacement(double x, std::span<const double> dW) const {
    double disp = 0.0, slope = 0.0;
    displacement_and_slope(x, dW, disp, slope);
    return disp;
}

void NoiseBasis::displacement_and_slope(double x, std::span<const double> dW, double& disp, double& slope) const {
    disp = 0.0;
    slope = 0.0;
    if (modes_.empty()) return;
    thread_local std::vector<ModeValue> values;
    values.resize(modes_.size());
    evaluate(x, values);
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        disp += values[k].xi * dW[k];
        slope += values[k].dxi * dW[k];
    }
}

std::vector<double> NoiseBasis::default_probe(std::size_t n) const {
    std::vector<double> probe(n);
    double a = -10.0, b = 10.0;
    bool periodic = false;
    if (const auto* t = std::get_if<Torus>(&domain_)) {
        a = t->origin;
        b = t->origin + t->length;
        periodic = true;
    } else {
        const auto& l = std::get<Line>(domain_);
        if (std::isfinite(l.x_min)) a = l.x_min;
        if (std::isfinite(l.x_max)) b = l.x_max;
    }
    const double h = (b - a) / static_cast<double>(periodic ? n : n - 1);
    for (std::size_t i = 0; i < n; ++i) probe[i] = a + h * static_cast<double>(i);
    return probe;
}

FrozenVelocity::FrozenVelocity(const NoiseBasis& basis, std::span<const double> dW)
    : basis_(&basis), dW_(dW.begin(), dW.end()) {
    if (dW.size() != basis.size()) throw std::invalid_argument("FrozenVelocity: increment size mismatch");
    const double period = basis.shared_fourier_period();
    if (period > 0.0) {
        kappa0_ = 2.0 * std::numbers::pi / period;
        cos_c_.assign(static_cast<std::size_t>(basis.max_harmonic()) + 1, 0.0);
        sin_c_ = cos_c_;
    }
    const auto& modes = basis.modes();
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (period > 0.0) {
            if (const auto* fs = std::get_if<FourierSin>(&modes[k])) {
                sin_c_[static_cast<std::size_t>(fs->k)] += fs->amp * dW[k];
                continue;
            }
            if (const auto* fc = std::get_if<FourierCos>(&modes[k])) {
                cos_c_[static_cast<std::size_t>(fc->k)] += fc->amp * dW[k];
                continue;
            }
        }
        rest_.push_back(k);
    }
}

double FrozenVelocity::operator()(double x) const {
    basis_->check_domain(x);
    double v = 0.0;
    if (!cos_c_.empty()) {
        const double theta = kappa0_ * x;
        const std::complex<double> base(std::cos(theta), std::sin(theta));
        std::complex<double> z = 1.0;
        for (std::size_t j = 1; j < cos_c_.size(); ++j) {
            z = (j % 64 == 0) ? std::polar(1.0, theta * static_cast<double>(j)) : z * base;
            v += cos_c_[j] * z.real() + sin_c_[j] * z.imag();
        }
    }
    for (std::size_t k : rest_) v += eval_mode(basis_->modes()[k], x, 0) * dW_[k];
    return v;
}

NoiseBasis fourier_family(int K, double amp_scale, double decay, Torus domain) {
    std::vector<NoiseMode> modes;
    modes.reserve(2 * static_cast<std::size_t>(std::max(K, 0)));
    for (int k = 1; k <= K; ++k) {
        const double amp = amp_scale / std::pow(static_cast<double>(k), decay);
        modes.emplace_back(FourierSin{k, amp, domain.length});
        modes.emplace_back(FourierCos{k, amp, domain.length});
    }
    return NoiseBasis(std::move(modes), domain);
}

double CorrectionFields::phi(std::span<const ModeValue> values) {
    double s = 0.0;
    for (const auto& v : values) s += v.xi * v.dxi;
    return 0.5 * s;
}

double CorrectionFields::psi(std::span<const ModeValue> values) {
    double s = 0.0;
    for (const auto& v : values) s += v.dxi * v.dxi - v.xi * v.ddxi;
    return 0.5 * s;
}

CorrectionFields::CorrectionFields(std::shared_ptr<const NoiseBasis> basis, std::span<const double> probe)
    : basis_(std::move(basis)) {
    if (probe.empty()) throw std::invalid_argument("correction fields need a non-empty probe grid");
    psi_min_ = std::numeric_limits<double>::infinity();
    psi_max_ = -std::numeric_limits<double>::infinity();
    for (double x : probe) {
        const double p = psi(x);
        psi_min_ = std::min(psi_min_, p);
        psi_max_ = std::max(psi_max_, p);
    }
    lower_ = 2.0 * psi_min_;
    upper_ = 2.0 * psi_max_;
}

double CorrectionFields::phi(double x) const {
    std::vector<ModeValue> v(basis_->size());
    basis_->evaluate(x, v);
    return phi(v);
}

double CorrectionFields::psi(double x) const {
    std::vector<ModeValue> v(basis_->size());
    basis_->evaluate(x, v);
    return psi(v);
}

CorrectionFields correction_fields(const NoiseBasis& basis, std::span<const double> probe) {
    return CorrectionFields(std::make_shared<const NoiseBasis>(basis), probe);
}

AssumptionReport assumption_report(const NoiseBasis& basis, std::span<const double> probe) {
    if (probe.size() < 2) throw std::invalid_argument("assumption report needs at least two probe points");
    AssumptionReport r;
    const std::size_t K = basis.size();
    r.lipschitz.assign(K, 0.0);
    r.growth.assign(K, 0.0);
    std::vector<ModeValue> v(K);
    for (double x : probe) {
        basis.evaluate(x, v);
        double phi = 0.0, dphi = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            r.lipschitz[k] = std::max(r.lipschitz[k], std::abs(v[k].dxi));
            r.growth[k] = std::max(r.growth[k], std::abs(v[k].xi) / (1.0 + std::abs(x)));
            phi += 0.5 * v[k].xi * v[k].dxi;
            dphi += 0.5 * (v[k].dxi * v[k].dxi + v[k].xi * v[k].ddxi);
        }
        r.phi_lipschitz = std::max(r.phi_lipschitz, std::abs(dphi));
        r.phi_growth = std::max(r.phi_growth, std::abs(phi) / (1.0 + std::abs(x)));
    }
    for (std::size_t k = 0; k < K; ++k) {
        r.lipschitz_sq_sum += r.lipschitz[k] * r.lipschitz[k];
        r.growth_sq_sum += r.growth[k] * r.growth[k];
    }
    r.pass = std::isfinite(r.lipschitz_sq_sum) && std::isfinite(r.growth_sq_sum) && std::isfinite(r.phi_lipschitz) &&
             std::isfinite(r.phi_growth);
    return r;
}

}  // namespace sburgers::noise
