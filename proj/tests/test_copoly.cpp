#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polylab/copoly.hpp"

using namespace polylab;
using namespace polylab::copoly;

namespace {

long double direct_logZstar(const TailedLaw& R, double b, double h, const std::vector<double>& w, std::size_t n) {
    const auto t = R.table(n);
    std::vector<long double> Z(n + 1, 0.0L), T(n + 1, 0.0L);
    Z[0] = 1.0L;
    for (std::size_t i = 1; i <= n; ++i) T[i] = T[i - 1] + w[i - 1] + h;
    for (std::size_t m = 1; m <= n; ++m) {
        long double s = 0.0L;
        for (std::size_t k = 1; k <= m; ++k)
            s += t[k] * 0.5L * (1.0L + std::exp(-2.0L * b * (T[m] - T[m - k]))) * Z[m - k];
        Z[m] = s;
    }
    return std::log(Z[n]);
}

std::vector<double> seq(std::size_t n, std::uint64_t seed) {
    Stream s = SeedSpec{seed}.stream(0);
    return randpin::disorder_sequence(DisorderLaw::bernoulli(), n, s);
}

}  // namespace

TEST_CASE("critical-curve bounds") {
    const auto b1 = hc_bounds(1.0);
    CHECK(b1.lower == doctest::Approx(0.75 * std::log(std::cosh(4.0 / 3.0))).epsilon(1e-14));
    CHECK(b1.upper == doctest::Approx(0.5 * std::log(std::cosh(2.0))).epsilon(1e-14));
    CHECK(std::abs(b1.lower - 0.530521) < 1e-6);
    CHECK(std::abs(b1.upper - 0.662501) < 1e-6);
    for (double b : {1e-3, 0.01, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 40.0}) {
        const auto bd = hc_bounds(b);
        CHECK(bd.lower < bd.upper);
        CHECK(bd.upper < 1.0);
    }
    CHECK(hc_bounds(1e-4).lower / 1e-4 == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(hc_bounds(1e-4).upper / 1e-4 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hc_bounds(200.0).lower > 0.99);
    const auto g = hc_bounds(1.0, DisorderLaw::gaussian());
    CHECK(g.lower == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(g.upper == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Cramer rate and Legendre duality") {
    const auto bern = DisorderLaw::bernoulli(), gauss = DisorderLaw::gaussian();
    CHECK(cramer_rate(bern, 0.0) == 0.0);
    // relative entropy of Bernoulli((1 - delta) / 2) against the fair coin
    auto kl = [](double d) { return 0.5 * (1 + d) * std::log1p(d) + 0.5 * (1 - d) * std::log1p(-d); };
    for (double d : {0.1, 0.5, 0.9}) CHECK(cramer_rate(bern, d) == doctest::Approx(kl(d)).epsilon(1e-10));
    CHECK(std::abs(cramer_rate(bern, 0.5) - 0.130812) < 1e-6);
    for (double d : {0.1, 0.5, 2.0}) CHECK(std::abs(cramer_rate(gauss, d) - 0.5 * d * d) < 1e-9);
    double prev = 0.0, prev_slope = 0.0;
    for (double d = 0.05; d < 0.96; d += 0.05) {
        const double s = cramer_rate(bern, d);
        CHECK(s > prev);
        CHECK(s - prev >= prev_slope - 1e-12);
        prev_slope = s - prev;
        prev = s;
    }
    for (double b : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        CHECK(duality_check(bern, b) < 1e-8);
        CHECK(duality_check(gauss, b) < 1e-8);
    }
}

TEST_CASE("rare-stretch strategy") {
    CopolySpec spec;
    CHECK(srw_excursion_constant(10000) >= 0.3);
    const auto pl = RareStretchPlan::make(spec.mu0, 400, 0.5);
    CHECK(std::abs(std::log(pl.q) / 400 + cramer_rate(spec.mu0, 0.5)) < 2e-2);
    CHECK(pl.p == doctest::Approx(pl.q / (1 + pl.q) / 400).epsilon(1e-14));
    // brute-force tail for a short block
    const auto small = RareStretchPlan::make(spec.mu0, 10, 0.4);
    int hits = 0;
    for (int bits = 0; bits < 1024; ++bits) hits += 2 * __builtin_popcount(bits) - 10 <= -4;
    CHECK(small.q == doctest::Approx(hits / 1024.0).epsilon(1e-13));
    CHECK(RareStretchPlan::make(DisorderLaw::gaussian(), 16, 0.5).q == doctest::Approx(0.5 * std::erfc(2.0 / std::sqrt(2.0))).epsilon(1e-14));

    CHECK(rare_stretch_value(spec, 1.0, 0.3, 200, 0.6) > 0.0);
    for (int l : {100, 200, 400}) CHECK(rare_stretch_value(spec, 1.0, 0.7, l, 0.6) < 0.0);
    CHECK_THROWS_AS(RareStretchPlan::make(spec.mu0, 7, 0.5), ConfigError);
    CHECK_THROWS_AS(RareStretchPlan::make(spec.mu0, 8, 0.0), ConfigError);
}

TEST_CASE("tilted recursion against the quadratic sum") {
    const auto w = seq(2500, 4);
    for (const auto& R : {TailedLaw::srw(256), TailedLaw::zeta_law(0.5, 60)})
        for (double b : {0.5, 1.0, 3.0})
            for (double h : {0.0, 0.3, 0.9}) {
                const double d = double(direct_logZstar(R, b, h, w, 2500));
                CHECK(std::abs(tilted_logZ(R, b, h, w, 2500).logZstar[2500] - d) <= 1e-10 * std::max(1.0, std::abs(d)));
            }
    // beta = 0, h = 0 is the renewal mass itself, bit for bit while the tail is idle
    const auto R = TailedLaw::srw(256);
    const auto u = renewal_mass(R, 250);
    const auto tp = tilted_logZ(R, 0.0, 0.0, w, 250);
    for (std::size_t m = 0; m <= 250; m += 2) CHECK(std::exp(tp.logZstar[m]) == doctest::Approx(u[m]).epsilon(1e-15));
}

TEST_CASE("brute force over simple random walk paths") {
    const std::size_t n = 14;
    const auto w = seq(n, 8);
    const double beta = 0.9, h = 0.2;
    long double Zs = 0.0L, Z = 0.0L;
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        int s = 0;
        double H = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const int next = s + ((bits >> (i - 1)) & 1u ? 1 : -1);
            // the step from S_{i-1} to S_i lies below when either end is negative
            if (s < 0 || next < 0) H += -2.0 * beta * (w[i - 1] + h);
            s = next;
        }
        const long double e = std::exp((long double)H) / (long double)(1u << n);
        Z += e;
        if (s == 0) Zs += e;
    }
    const auto tp = tilted_logZ(TailedLaw::srw(256), beta, h, w, n);
    CHECK(tp.logZstar[n] == doctest::Approx(double(std::log(Zs))).epsilon(1e-12));
    CHECK(tp.logZ == doctest::Approx(double(std::log(Z))).epsilon(1e-12));
}

TEST_CASE("quenched free energy") {
    CopolySpec spec;
    const auto loc = quenched_g(spec, 1.0, 0.30, 20000, 16, 42, 2);
    CHECK(loc.localized);
    CHECK(loc.nonneg_ok);
    const auto del = quenched_g(spec, 1.0, 0.75, 20000, 16, 42, 2);
    CHECK(std::abs(del.est.mean) < 3.0 * del.est.stderr_ + 1e-3);
    CHECK(del.nonneg_ok);
    CHECK_FALSE(del.localized);
    // beta = 0: every excursion weighs one, Z* is the renewal mass
    const auto zero = quenched_g(spec, 0.0, 0.0, 2000, 16, 1, 1);
    CHECK(zero.est.stderr_ == 0.0);
    CHECK(std::abs(zero.est.mean) < 1e-12);

    const auto a = quenched_g(spec, 1.0, 0.4, 4000, 16, 5, 1), b = quenched_g(spec, 1.0, 0.4, 4000, 16, 5, 3);
    CHECK(a.per_replica == b.per_replica);

    double prev = HUGE_VAL, prev_se = 0.0;
    for (double h : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        const auto q = quenched_g(spec, 1.0, h, 10000, 16, 9, 2);
        CHECK(q.est.mean <= prev + 3.0 * (q.est.stderr_ + prev_se));
        prev = q.est.mean;
        prev_se = q.est.stderr_;
    }
    // convex in beta on a grid (same disorder for every beta)
    std::vector<double> gs;
    for (double b : {0.6, 0.8, 1.0, 1.2, 1.4}) gs.push_back(quenched_g(spec, b, 0.3, 10000, 16, 9, 2).est.mean);
    for (std::size_t i = 1; i + 1 < gs.size(); ++i) CHECK(gs[i + 1] - 2 * gs[i] + gs[i - 1] >= -1e-4);
    CHECK_THROWS_AS(quenched_g(spec, 1.0, 1.5, 1000, 16), ConfigError);
}

TEST_CASE("weak-coupling slope") {
    CopolySpec spec;
    for (double b : {0.01, 0.05, 0.1}) {
        const auto bd = hc_bounds(b);
        CHECK(bd.lower / b > 0.66);
        CHECK(bd.upper / b < 1.0);
    }
    for (double b = 0.05; b <= 1.0; b += 0.05) {
        const double approx = slope_approximation(b);
        CHECK(approx >= hc_bounds(b).lower);
        CHECK(approx <= hc_bounds(b).upper);
    }
    const auto rows = slope_estimate(spec, {0.25}, 20000, 16, 3, 2, 4);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].contained);
    CHECK(rows[0].mc_lo_over_beta >= 0.6);
    CHECK(rows[0].mc_hi_over_beta <= 1.05);
    CHECK_THROWS_AS(slope_estimate(spec, {0.8}, 1000, 16), ConfigError);
}

TEST_CASE("smoothing envelope") {
    const auto g = smoothing_bound(DisorderLaw::gaussian(), {0.0, 0.1, 0.2, 0.3});
    CHECK(g.envelope[0] == 0.0);
    for (std::size_t i = 0; i < g.delta.size(); ++i) {
        CHECK(g.three_halves_sigma[i] == doctest::Approx(0.75 * g.delta[i] * g.delta[i]).epsilon(1e-9));
        CHECK(g.envelope[i] == g.quarter_delta2[i]);
    }
    const auto b = smoothing_bound(DisorderLaw::bernoulli(), {0.1});
    CopolySpec spec;
    const auto q = quenched_g(spec, 1.0, hc_bounds(1.0).upper - 0.1, 20000, 16, 21, 2);
    CHECK(q.est.mean <= b.envelope[0] + 3.0 * q.est.stderr_);
    CHECK_THROWS_AS(smoothing_bound(DisorderLaw::bernoulli(), {0.5}), ConfigError);
}
