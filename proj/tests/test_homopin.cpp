#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polylab/homopin.hpp"

using namespace polylab;
using namespace polylab::homopin;

namespace {

double srw_closed(double z) { return z <= 0.0 ? 0.0 : 0.5 * (z - std::log(2.0 - std::exp(-z))); }
double srw_closed_prime(double z) {
    return z <= 0.0 ? 0.0 : 0.5 * (1.0 - std::exp(-z) / (2.0 - std::exp(-z)));
}

const PinningSpec& srw_pin() {
    static const PinningSpec s = PinningSpec::srw_pinned();
    return s;
}

}  // namespace

TEST_CASE("phi_gf examples") {
    const auto& R = srw_pin().R;
    CHECK(phi_gf(R, 0.0) == 0.0);
    CHECK(phi_gf(R, 0.5) == doctest::Approx(1.0 - std::sqrt(0.75)).epsilon(1e-13));
    CHECK(std::abs(phi_gf(R, 1.0) - 1.0) < 1e-12);
    double prev = -1.0;
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        const double v = phi_gf(R, x);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(phi_gf(R, 1.5), ConfigError);
}

TEST_CASE("SRW pinning free energy matches the closed form") {
    CHECK(free_energy(srw_pin(), -1.0) == 0.0);
    CHECK(free_energy(srw_pin(), 0.0) == 0.0);
    // ½[1 - log(2 - 1/e)]; the 0.255021 figure quoted elsewhere is off in the fifth digit
    CHECK(free_energy(srw_pin(), 1.0) == doctest::Approx(0.255059937177625).epsilon(1e-12));
    double worst = 0.0;
    for (double z : linspace(0.01, 5.0, 500))
        worst = std::max(worst, std::abs(free_energy(srw_pin(), z) - srw_closed(z)));
    CHECK(worst < 1e-10);
}

TEST_CASE("wetting shift identity") {
    const auto wet = PinningSpec::srw_wetting();
    CHECK(wet.zeta_c() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(free_energy(wet, 0.5) == 0.0);
    double worst = 0.0;
    for (double z : linspace(0.01, 5.0, 500))
        worst = std::max(worst,
                         std::abs(free_energy(wet, z) - free_energy(srw_pin(), z - std::log(2.0))));
    CHECK(worst < 1e-10);
}

TEST_CASE("free energy properties") {
    const auto zs = linspace(-1.0, 4.0, 501);
    std::vector<double> f;
    for (double z : zs) f.push_back(free_energy(srw_pin(), z));
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(f[i] >= 0.0);
        if (zs[i] <= 0.0) CHECK(f[i] == 0.0);
    }
    for (std::size_t i = 1; i + 1 < f.size(); ++i) CHECK(f[i + 1] - 2 * f[i] + f[i - 1] >= -1e-9);
    double prev = 0.0;
    for (double z : zs) {
        const double c = contact_fraction(srw_pin(), z);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
}

TEST_CASE("contact fraction") {
    CHECK(contact_fraction(srw_pin(), -0.5) == 0.0);
    CHECK(contact_fraction(srw_pin(), 40.0) == doctest::Approx(0.5).epsilon(1e-12));
    for (double z : {0.05, 0.3, 1.0, 2.5})
        CHECK(std::abs(contact_fraction(srw_pin(), z) - srw_closed_prime(z)) < 1e-9);
    SampledCurve c;
    c.xs = linspace(0.9, 1.1, 201);
    for (double z : c.xs) c.ys.push_back(free_energy(srw_pin(), z));
    const auto d = central_diff(c);
    CHECK(std::abs(d.ys[100] - contact_fraction(srw_pin(), 1.0)) < 1e-6);
    // f' on a 1e-3 step against the closed form
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < d.size(); ++i)
        worst = std::max(worst, std::abs(d.ys[i] - srw_closed_prime(d.xs[i])));
    CHECK(worst < 1e-6);
}

TEST_CASE("constrained partition") {
    const double z = 1.0;
    CHECK(constrained_partition(srw_pin(), z, 1) == -INFINITY);
    const auto pm = PinningSpec::pinned(TailedLaw::point_mass(1));
    CHECK(constrained_partition(pm, 0.7, 1) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(constrained_partition(pm, 0.7, 500) == doctest::Approx(350.0).epsilon(1e-13));
    const auto geo = PinningSpec::pinned(TailedLaw::geometric_half());
    CHECK(constrained_partition(geo, 0.3, 1) == doctest::Approx(0.3 + std::log(0.5)).epsilon(1e-14));

    // brute force over all 2^n paths: Z*_n = E[e^{zeta L_n} 1{S_n = 0}]
    const int n = 14;
    double brute = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        int s = 0, L = 0;
        for (int i = 0; i < n; ++i) {
            s += (mask >> i & 1u) ? 1 : -1;
            if (s == 0) ++L;
        }
        if (s == 0) brute += std::exp(z * L) * std::ldexp(1.0, -n);
    }
    CHECK(constrained_partition(srw_pin(), z, n) == doctest::Approx(std::log(brute)).epsilon(1e-13));

    // renewal limit along even n; M by direct summation of the SRW return law
    const double r = free_energy(srw_pin(), z);
    double M = 0.0, Rm = 0.5;
    for (int m = 1; m < 400; ++m) {
        M += 2.0 * m * std::exp(z - r * 2.0 * m) * Rm;
        Rm *= (2.0 * m - 1.0) / (2.0 * (m + 1.0));
    }
    CHECK(renewal_limit(srw_pin(), z) == doctest::Approx(2.0 / M).epsilon(1e-12));
    const std::size_t N = 10000;
    const double scaled = std::exp(constrained_partition(srw_pin(), z, N) - r * double(N));
    CHECK(std::abs(scaled - 2.0 / M) < 1e-6);
}

TEST_CASE("critical exponent fits") {
    const auto f2 = critical_exponent_fit(TailedLaw::zeta_law(2.0));
    CHECK(f2.exponent == doctest::Approx(1.0).epsilon(0.02));
    const double Etau = (std::numbers::pi * std::numbers::pi / 6.0) / 1.2020569031595942;
    CHECK(f2.reference_amplitude == doctest::Approx(1.0 / Etau).epsilon(1e-10));
    CHECK(f2.amplitude == doctest::Approx(f2.reference_amplitude).epsilon(0.05));

    const auto fh = critical_exponent_fit(TailedLaw::zeta_law(0.5));
    CHECK(std::abs(fh.exponent - 2.0) < 0.05);
    const double c = 1.0 / 2.6123753486854883;  // 1/zeta(3/2)
    const double ref = std::pow(0.5 / (c * std::sqrt(std::numbers::pi)), 2.0);
    CHECK(fh.reference_amplitude == doctest::Approx(ref).epsilon(1e-12));
    CHECK(fh.amplitude == doctest::Approx(ref).epsilon(0.05));
}

TEST_CASE("lazy walk occupation and return law") {
    for (double p : {0.5, 2.0 / 3.0, 0.8, 1.0}) {
        const auto u = lazy_occupation({p}, 400);
        // three-term recurrence for the central coefficient of (1-p + p cosh t)^n
        std::vector<double> v(401);
        v[0] = 1.0;
        v[1] = 1.0 - p;
        const double d = (1.0 - p) * (1.0 - p) - p * p;
        for (int n = 2; n <= 400; ++n)
            v[n] = ((2.0 * n - 1.0) * (1.0 - p) * v[n - 1] - (n - 1.0) * d * v[n - 2]) / n;
        for (int n = 0; n <= 400; ++n) CHECK(u[n] == doctest::Approx(v[n]).epsilon(1e-11));
    }
    const auto R = lazy_return_law({0.8});
    CHECK(R.pmf(1) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(std::abs(R.mass() - 1.0) < 1e-10);
    // R(n) ~ sigma / sqrt(2 pi) n^{-3/2} with sigma^2 = p
    CHECK(R.tail()->c == doctest::Approx(std::sqrt(0.8 / (2.0 * std::numbers::pi))).epsilon(5e-3));
    const auto R1 = lazy_return_law({1.0}, 2000);
    CHECK(R1.period() == 2);
    CHECK(R1.pmf(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(R1.pmf(3) == 0.0);
}

TEST_CASE("pulled free energy") {
    const PulledModel m1({1.0}, 2000);
    for (double x : {0.1, 1.0, 5.0, 30.0, 400.0})
        CHECK(m1.g(x) == doctest::Approx(x < 300 ? std::log(std::cosh(x)) : x - std::log(2.0))
                             .epsilon(1e-13));
    CHECK(m1.pulled_free_energy(-1.0, 1e-9) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m1.g_inv(m1.g(3.0)) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(m1.g_inv(150.0) == doctest::Approx(150.0 + std::log(2.0)).epsilon(1e-13));

    const PulledModel m({2.0 / 3.0});
    const double f1 = m.f(1.0);
    const double pc = m.phi_c(1.0);
    CHECK(f1 > 0.0);
    for (double x : linspace(0.01, pc * 0.999, 50)) CHECK(m.pulled_free_energy(1.0, x) == f1);
    double prev = f1;
    for (double x : linspace(pc * 1.001, pc * 3.0, 50)) {
        const double v = m.pulled_free_energy(1.0, x);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(pulled_free_energy({0.5}, 1.0, 0.0), ConfigError);
}

TEST_CASE("re-entrance") {
    CHECK(reentrance_detect(LazyWalkSpec{0.8}));
    CHECK_FALSE(reentrance_detect(LazyWalkSpec{0.5}));
    CHECK_FALSE(reentrance_detect(LazyWalkSpec{2.0 / 3.0}));

    const auto c = force_temperature_curve(LazyWalkSpec{0.5}, linspace(0.01, 5.0, 500));
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.ys[i] >= c.ys[i - 1] - 1e-12);
    SampledCurve dip;
    dip.xs = {1, 2, 3};
    dip.ys = {1.0, 0.5, 1.0};
    CHECK(reentrance_detect(dip));
    dip.ys = {1.0, 0.5, 0.4};
    CHECK_FALSE(reentrance_detect(dip));
}
