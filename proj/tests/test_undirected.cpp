#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "polylab/undirected.hpp"

using namespace polylab;
using namespace polylab::undirected;

namespace {

// direct double loops over time pairs
std::pair<long, long> brute_IJ2d(const LatticePath& w) {
    std::vector<std::array<int, 3>> s(w.n() + 1, {0, 0, 0});
    for (std::size_t i = 0; i < w.n(); ++i) {
        s[i + 1] = s[i];
        s[i + 1][w.steps[i] / 2] += (w.steps[i] % 2 == 0) ? 1 : -1;
    }
    long I = 0, J = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            int dist = 0;
            for (int a = 0; a < 3; ++a) dist += std::abs(s[i][a] - s[j][a]);
            if (dist == 0) ++I;
            if (dist == 1) ++J;
        }
    return {I, J - long(w.n())};
}

}  // namespace

TEST_CASE("path statistics examples") {
    const auto st = path_stats(LatticePath::straight(2, 7));
    CHECK(st.I == 0);
    CHECK(st.J2d == 0);
    CHECK(st.range == 7);
    CHECK(st.end_to_end2 == 49);

    const auto back = path_stats(LatticePath{1, {0, 1}});
    CHECK(back.I == 1);
    CHECK(back.J2d == 0);

    // unit square loop: the two chords (0,3) and (1,4) are adjacent, non-consecutive
    const auto sq = path_stats(LatticePath{2, {0, 2, 1, 3}});
    CHECK(sq.I == 1);
    CHECK(sq.J2d == 2);
    CHECK(sq.J == 0.5);
}

TEST_CASE("path statistics against direct pair loops") {
    Stream rng = SeedSpec{7}.stream(0);
    for (int d = 1; d <= 3; ++d)
        for (int k = 0; k < 200; ++k) {
            const auto w = LatticePath::random(d, 1 + rng.below(60), rng);
            const auto st = path_stats(w);
            const auto [I, J2d] = brute_IJ2d(w);
            CHECK(st.I == I);
            CHECK(st.J2d == J2d);
        }
    CHECK_THROWS_AS((LatticePath{2, {4}}.validate()), ConfigError);
}

TEST_CASE("local-time identity") {
    const auto c1 = local_time_identity_check(LatticePath::straight(1, 1));
    CHECK(c1.lhs == 0.0);
    CHECK(c1.rhs == 0.0);
    CHECK(c1.printed_rhs_unordered == -0.75);
    CHECK(c1.printed_rhs_ordered == -0.5);
    CHECK(local_time_identity_check(LatticePath::straight(2, 5)).residual4d == 0);

    Stream rng = SeedSpec{11}.stream(1);
    for (int d = 1; d <= 3; ++d) {
        long bad = 0;
        for (int k = 0; k < 10000; ++k) {
            const auto c = local_time_identity_check(LatticePath::random(d, 100, rng));
            bad += c.residual4d != 0;
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("exact small-n Gibbs sums") {
    for (int d = 1; d <= 2; ++d) {
        const auto g = exact_gibbs_small(0.0, 0.0, 8, d);
        CHECK(std::abs(g.logZ) < 1e-12);
        CHECK(g.mean_end2 == doctest::Approx(8.0).epsilon(1e-12));
        double s = 0.0;
        for (double p : g.endpoint_law) s += p;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    // d log Z / d gamma = <J>
    const double h = 1e-5;
    const auto gp = exact_gibbs_small(0.4, 0.7 + h, 9, 2), gm = exact_gibbs_small(0.4, 0.7 - h, 9, 2);
    CHECK((gp.logZ - gm.logZ) / (2 * h) == doctest::Approx(exact_gibbs_small(0.4, 0.7, 9, 2).mean_J).epsilon(1e-7));
    // localized regime keeps the range well below n
    CHECK(exact_gibbs_small(0.5, 3.0, 10, 1).mean_range < 10.0 / 3.0);
    CHECK_THROWS_AS(exact_gibbs_small(0.0, 0.0, 13, 2), ConfigError);
}

TEST_CASE("Metropolis agrees with exact enumeration") {
    for (auto [beta, gamma] : {std::pair{0.5, 0.5}, std::pair{1.0, 2.0}, std::pair{2.0, 1.0}}) {
        McConfig c;
        c.beta = beta;
        c.gamma = gamma;
        c.n = 10;
        c.d = 1;
        c.sweeps = 40000;
        const auto mc = metropolis_sample(c);
        const auto ex = exact_gibbs_small(beta, gamma, 10, 1);
        CHECK(std::abs(mc.end2.mean - ex.mean_end2) < 4.0 * mc.end2.stderr_ + 1e-3);
        CHECK(std::abs(mc.I.mean - ex.mean_I) < 4.0 * mc.I.stderr_ + 1e-3);
        CHECK(std::abs(mc.range.mean - ex.mean_range) < 4.0 * mc.range.stderr_ + 1e-3);
    }
    McConfig c;
    c.beta = 0.7;
    c.gamma = 1.1;
    c.n = 6;
    c.d = 2;
    c.sweeps = 60000;
    const auto mc = metropolis_sample(c);
    const auto ex = exact_gibbs_small(0.7, 1.1, 6, 2);
    CHECK(std::abs(mc.J.mean - ex.mean_J) < 4.0 * mc.J.stderr_ + 1e-3);
    // stationary endpoint marginal
    double tv = 0.0;
    for (std::size_t k = 0; k < ex.endpoint_law.size(); ++k) tv += std::abs(mc.endpoint_hist[k] - ex.endpoint_law[k]);
    CHECK(0.5 * tv < 0.02);
}

TEST_CASE("Metropolis determinism and regimes") {
    McConfig c;
    c.beta = 2.0;
    c.gamma = 1.0;
    c.sweeps = 4000;
    c.n = 60;
    const auto a = metropolis_sample(c), b = metropolis_sample(c);
    CHECK(a.end2.mean == b.end2.mean);
    // repulsion dominates: range linear in n
    const auto ball = scaling_fit(c, {50, 100, 200, 400}, 4);
    CHECK(std::abs(ball.range_slope - 1.0) < 0.1);
    for (const auto& dg : ball.diag) CHECK(dg.range.mean > 0.5 * double(ball.ns[&dg - ball.diag.data()]));
    // attraction dominates: range saturates
    c.beta = 1.0;
    c.gamma = 2.0;
    const auto loc = scaling_fit(c, {50, 100, 200, 400}, 4);
    CHECK(std::abs(loc.range_slope) < 0.1);
    CHECK(loc.diag.back().range.mean < 10.0);
    CHECK(loc.diag.back().inside.mean == 1.0);
    c.sweeps = 5;
    CHECK_THROWS_AS(metropolis_sample(c), ConfigError);
}
