#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "sburgers/noise.hpp"
#include "sburgers/spline.hpp"

using namespace sburgers;
using namespace sburgers::noise;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("cyclic tridiagonal solve") {
    std::vector<double> x = {1.0, -2.0, 0.5, 3.0, 4.0};
    const double d = 4.0, o = 1.0;
    std::vector<double> b(5);
    for (std::size_t i = 0; i < 5; ++i) b[i] = d * x[i] + o * (x[(i + 4) % 5] + x[(i + 1) % 5]);
    solve_cyclic_tridiagonal(d, o, b);
    for (std::size_t i = 0; i < 5; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("periodic spline reproduces a trig function and its derivatives") {
    const std::size_t n = 256;
    const double h = 2.0 * kPi / n;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(h * static_cast<double>(i));
    const PeriodicSpline s(0.0, h, y);
    CHECK(s.period() == doctest::Approx(2.0 * kPi));
    for (double x : {0.1, 1.3, 4.0, -2.0, 7.5}) {
        CHECK(s.eval(x, 0) == doctest::Approx(std::sin(x)).epsilon(1e-6));
        CHECK(s.eval(x, 1) == doctest::Approx(std::cos(x)).epsilon(1e-4));
        CHECK(s.eval(x, 2) == doctest::Approx(-std::sin(x)).epsilon(2e-3));
    }
    // knots are interpolated exactly
    CHECK(s.eval(h * 17, 0) == doctest::Approx(y[17]).epsilon(1e-14));
}

TEST_CASE("mode evaluation") {
    const ModeValue lin = eval_mode_all(Linear{2.0, 0.5}, 3.0);
    CHECK(lin.xi == 6.5);
    CHECK(lin.dxi == 2.0);
    CHECK(lin.ddxi == 0.0);
    const FourierSin s{3, 0.5, 1.0};  // 0.5 sin(6 pi x)
    const double x = 0.13, k = 6.0 * kPi;
    CHECK(eval_mode(s, x, 0) == doctest::Approx(0.5 * std::sin(k * x)));
    CHECK(eval_mode(s, x, 1) == doctest::Approx(0.5 * k * std::cos(k * x)));
    CHECK(eval_mode(s, x, 2) == doctest::Approx(-0.5 * k * k * std::sin(k * x)));
    CHECK(eval_mode(FourierCos{1, 1.0}, 0.0, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(eval_mode(s, x, 3), std::invalid_argument);
    CHECK(is_uniform(Linear{0.0, 1.0}));
    CHECK_FALSE(is_uniform(Linear{1.0, 0.0}));
    CHECK_FALSE(is_uniform(FourierSin{}));
}

TEST_CASE("basis construction and domain checks") {
    CHECK_THROWS_AS(NoiseBasis({}, Line{1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(NoiseBasis({}, Torus{0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(NoiseBasis({FourierSin{0, 1.0}}, Torus{}), std::invalid_argument);
    const NoiseBasis b({Linear{1.0, 0.0}}, Line{-1.0, 1.0});
    CHECK_NOTHROW(b.check_domain(0.5));
    CHECK_THROWS_AS(b.check_domain(1.5), DomainError);
    CHECK_THROWS_AS(b.displacement(2.0, std::vector<double>{1.0}), DomainError);
    const NoiseBasis t({FourierSin{1, 1.0}}, Torus{});
    CHECK_THROWS_AS(t.check_domain(NAN), DomainError);
    CHECK(NoiseBasis({Linear{0.0, 3.0}}, Torus{}).uniform());
    CHECK(NoiseBasis({}, Torus{}).empty());
}

TEST_CASE("displacement and slope sum the modes") {
    const NoiseBasis b({Linear{2.0, 1.0}, FourierCos{2, 0.5}}, Line{});
    const std::vector<double> dW = {0.1, -0.3};
    const double x = 0.4;
    double disp, slope;
    b.displacement_and_slope(x, dW, disp, slope);
    CHECK(disp == doctest::Approx(0.1 * 1.8 - 0.3 * 0.5 * std::cos(2 * x)));
    CHECK(slope == doctest::Approx(0.1 * 2.0 + 0.3 * 0.5 * 2 * std::sin(2 * x)));
    CHECK(b.displacement(x, dW) == doctest::Approx(disp));
}

TEST_CASE("frozen velocity matches direct summation") {
    const Torus dom{0.0, 1.0};
    auto modes = fourier_family(150, 1.0, 1.0, dom).modes();  // crosses the 64-step re-anchor
    modes.emplace_back(Linear{0.0, 0.7});
    modes.emplace_back(FourierSin{3, 0.2, 0.5});  // different period: evaluated separately
    const NoiseBasis b(modes, dom);
    std::vector<double> dW(b.size());
    for (std::size_t k = 0; k < dW.size(); ++k) dW[k] = std::sin(1.0 + static_cast<double>(k));
    const FrozenVelocity v(b, dW);
    for (double x : {0.0, 0.137, 0.5, 0.91, 3.3}) CHECK(v(x) == doctest::Approx(b.displacement(x, dW)).epsilon(1e-10));
    CHECK_THROWS_AS(FrozenVelocity(b, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("linear noise: C = D = alpha^2, phi = alpha^2 x / 2") {
    auto b = std::make_shared<const NoiseBasis>(std::vector<NoiseMode>{Linear{0.7, 0.0}}, Line{});
    const CorrectionFields cf(b, b->default_probe());
    CHECK(cf.psi_lower_bound() == doctest::Approx(0.49));
    CHECK(cf.psi_upper_bound() == doctest::Approx(0.49));
    CHECK(cf.phi(2.0) == doctest::Approx(0.49));
    CHECK(cf.psi(-3.0) == doctest::Approx(0.245));
}

TEST_CASE("constant noise: phi = psi = 0") {
    const auto cf = correction_fields(NoiseBasis({Linear{0.0, 2.0}}, Line{}), std::vector<double>{-1, 0, 1});
    CHECK(cf.psi_lower_bound() == 0.0);
    CHECK(cf.psi_upper_bound() == 0.0);
    CHECK(cf.phi(0.3) == 0.0);
}

TEST_CASE("fourier family: psi is constant and equals sum_k (amp k^(1-decay))^2 kappa0^2") {
    const auto b = fourier_family(100, 1.0, 2.0, Torus{0.0, 2.0 * kPi});
    CHECK(b.size() == 200);
    CHECK(b.max_harmonic() == 100);
    CHECK(b.shared_fourier_period() == doctest::Approx(2.0 * kPi));
    double partial = 0.0;
    for (int k = 1; k <= 100; ++k) partial += 1.0 / (k * k);
    const auto cf = correction_fields(b, b.default_probe());
    CHECK(cf.psi_min() == doctest::Approx(partial).epsilon(1e-10));
    CHECK(cf.psi_max() == doctest::Approx(partial).epsilon(1e-10));
    CHECK(std::abs(partial - kPi * kPi / 6.0) < 0.011);  // tail ~ 1/K
    CHECK(std::abs(cf.phi(1.234)) < 1e-12);
    // unit torus: wavenumbers scale by 2 pi
    const auto u = fourier_family(3, 1.0, 2.0, Torus{0.0, 1.0});
    const auto cu = correction_fields(u, u.default_probe());
    CHECK(cu.psi_min() == doctest::Approx(4.0 * kPi * kPi * (1.0 + 0.25 + 1.0 / 9.0)));
}

TEST_CASE("assumption report") {
    const NoiseBasis b({Linear{2.0, 1.0}, FourierSin{1, 0.5}}, Line{-5.0, 5.0});
    const auto rep = assumption_report(b, b.default_probe());
    CHECK(rep.pass);
    CHECK(rep.lipschitz[0] == doctest::Approx(2.0));
    CHECK(rep.lipschitz[1] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rep.lipschitz_sq_sum == doctest::Approx(4.25).epsilon(1e-3));
    CHECK_THROWS_AS(assumption_report(b, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("tabulated mode from csv") {
    const auto file = std::filesystem::temp_directory_path() / "sburgers_tab.csv";
    {
        std::ofstream os(file);
        os << "x,xi\n";
        for (int i = 0; i < 64; ++i) os << i / 64.0 << ',' << std::cos(2 * kPi * i / 64.0) << '\n';
    }
    const auto tab = load_tabulated_csv(file);
    CHECK(eval_mode(tab, 0.3, 0) == doctest::Approx(std::cos(2 * kPi * 0.3)).epsilon(1e-4));
    CHECK(eval_mode(tab, 1.3, 1) == doctest::Approx(-2 * kPi * std::sin(2 * kPi * 0.3)).epsilon(1e-3));
    {
        std::ofstream os(file);
        os << "0,1\n0.1,2\n0.3,3\n";
    }
    CHECK_THROWS(load_tabulated_csv(file));
    std::filesystem::remove(file);
    CHECK_THROWS(load_tabulated_csv(file));
}
