#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sburgers/spline.hpp"

namespace sburgers {

/// Raised when a position lies outside the region where a field is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace noise {

/// xi(x) = slope * x + offset.
struct Linear {
    double slope = 0.0;
    double offset = 0.0;
};

/// xi(x) = amp * sin(2 pi k x / period). With period = 2 pi this is amp * sin(k x).
struct FourierSin {
    int k = 1;
    double amp = 1.0;
    double period = 2.0 * std::numbers::pi;
};

struct FourierCos {
    int k = 1;
    double amp = 1.0;
    double period = 2.0 * std::numbers::pi;
};

/// Equispaced samples of xi on one period, differentiated through a periodic spline.
struct Tabulated {
    std::shared_ptr<const PeriodicSpline> spline;
};

using NoiseMode = std::variant<Linear, FourierSin, FourierCos, Tabulated>;

Tabulated make_tabulated(double x0, double spacing, std::vector<double> values);

/// Loads a two-column CSV (x, xi) with equispaced x; the last row is not repeated.
Tabulated load_tabulated_csv(const std::filesystem::path& file);

struct Torus {
    double origin = 0.0;
    double length = 2.0 * std::numbers::pi;
};

struct Line {
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
};

using Domain = std::variant<Torus, Line>;

/// Value and first two derivatives of one mode at one point.
struct ModeValue {
    double xi = 0.0;
    double dxi = 0.0;
    double ddxi = 0.0;
};

/// xi_k, d/dx xi_k or d2/dx2 xi_k at x. `order` must be 0, 1 or 2.
double eval_mode(const NoiseMode& mode, double x, int order);
ModeValue eval_mode_all(const NoiseMode& mode, double x);

/// True if the mode's derivative vanishes identically (pure translation).
bool is_uniform(const NoiseMode& mode);

std::string describe(const NoiseMode& mode);

/// Truncated family {xi_k}, k = 1..K, on a torus or the line.
class NoiseBasis {
public:
    NoiseBasis() = default;
    NoiseBasis(std::vector<NoiseMode> modes, Domain domain);

    std::size_t size() const { return modes_.size(); }
    bool empty() const { return modes_.empty(); }
    const std::vector<NoiseMode>& modes() const { return modes_; }
    const Domain& domain() const { return domain_; }

    /// Every mode has zero derivative; the noise is a rigid translation.
    bool uniform() const { return uniform_; }

    /// Throws DomainError when x is outside a Line domain's bounding box.
    void check_domain(double x) const;

    /// Writes all K mode values at x into `out` (size K).
    void evaluate(double x, std::span<ModeValue> out) const;

    /// sum_k xi_k(x) dW_k.
    double displacement(double x, std::span<const double> dW) const;

    /// sum_k xi_k(x) dW_k and sum_k xi_k'(x) dW_k together.
    void displacement_and_slope(double x, std::span<const double> dW, double& disp, double& slope) const;

    /// Equispaced probe points covering the domain (4096 by default).
    std::vector<double> default_probe(std::size_t n = 4096) const;

    /// Common period of the Fourier modes, or 0 if there are none or their periods differ.
    double shared_fourier_period() const { return all_fourier_same_period_ ? fourier_period_ : 0.0; }
    int max_harmonic() const { return max_harmonic_; }

private:
    std::vector<NoiseMode> modes_;
    Domain domain_ = Line{};
    bool uniform_ = true;
    // Fourier modes share one angle table per evaluation point.
    int max_harmonic_ = 0;
    bool all_fourier_same_period_ = false;
    double fourier_period_ = 0.0;
};

/// x -> sum_k xi_k(x) dW_k for fixed increments. Fourier modes sharing a period are collapsed
/// into one trigonometric polynomial, so each evaluation costs one recurrence over harmonics.
class FrozenVelocity {
public:
    FrozenVelocity(const NoiseBasis& basis, std::span<const double> dW);
    double operator()(double x) const;

private:
    const NoiseBasis* basis_;
    std::vector<double> dW_;
    double kappa0_ = 0.0;
    std::vector<double> cos_c_, sin_c_;  // by harmonic
    std::vector<std::size_t> rest_;      // modes evaluated one by one
};

/// The standard family {amp_k sin(kx), amp_k cos(kx)}, k = 1..K, amp_k = amp_scale / k^decay,
/// with x measured in units of `period` / (2 pi).
NoiseBasis fourier_family(int K, double amp_scale, double decay, Torus domain);

/// phi = 1/2 sum xi xi' (Stratonovich-to-Ito drift) and psi = 1/2 sum (xi'^2 - xi xi'').
/// C = min 2 psi and D = max 2 psi over the probe grid.
class CorrectionFields {
public:
    CorrectionFields(std::shared_ptr<const NoiseBasis> basis, std::span<const double> probe);

    double phi(double x) const;
    double psi(double x) const;
    /// phi and psi from already-evaluated mode values.
    static double phi(std::span<const ModeValue> values);
    static double psi(std::span<const ModeValue> values);

    double psi_lower_bound() const { return lower_; }
    double psi_upper_bound() const { return upper_; }
    double psi_min() const { return psi_min_; }
    double psi_max() const { return psi_max_; }
    const NoiseBasis& basis() const { return *basis_; }

private:
    std::shared_ptr<const NoiseBasis> basis_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    double psi_min_ = 0.0;
    double psi_max_ = 0.0;
};

CorrectionFields correction_fields(const NoiseBasis& basis, std::span<const double> probe);

struct AssumptionReport {
    std::vector<double> lipschitz;  // C_k
    std::vector<double> growth;     // D_k
    double lipschitz_sq_sum = 0.0;  // sum C_k^2
    double growth_sq_sum = 0.0;     // sum D_k^2
    double phi_lipschitz = 0.0;     // C_0
    double phi_growth = 0.0;        // D_0
    bool pass = false;
};

AssumptionReport assumption_report(const NoiseBasis& basis, std::span<const double> probe);

}  // namespace noise
}  // namespace sburgers
