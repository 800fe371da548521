#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include "polylab/collapse.hpp"

using namespace polylab;
using namespace polylab::collapse;

namespace {

const TouchTable& table20() {
    static const TouchTable t = enumerate(20, 4);
    return t;
}

// every step word of length n, filtered, touches counted pairwise
std::vector<std::vector<std::uint64_t>> brute_table(int n_max) {
    std::vector<std::vector<std::uint64_t>> c(n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        c[n].assign(n, 0);
        std::uint64_t words = 1;
        for (int i = 1; i < n; ++i) words *= 3;
        for (std::uint64_t w = 0; w < words; ++w) {
            std::vector<std::pair<int, int>> s{{0, 0}, {1, 0}};
            std::uint64_t v = w;
            int last = 0;
            bool ok = true;
            for (int i = 1; i < n && ok; ++i) {
                const int d = int(v % 3);
                v /= 3;
                if ((last == 1 && d == 2) || (last == 2 && d == 1)) ok = false;
                auto p = s.back();
                if (d == 0) ++p.first;
                if (d == 1) ++p.second;
                if (d == 2) --p.second;
                s.push_back(p);
                last = d;
            }
            if (!ok) continue;
            std::set<std::pair<int, int>> seen(s.begin(), s.end());
            REQUIRE(seen.size() == s.size());
            int m = 0;
            for (int i = 0; i <= n; ++i)
                for (int j = i + 2; j <= n; ++j)
                    if (std::abs(s[i].first - s[j].first) + std::abs(s[i].second - s[j].second) == 1)
                        ++m;
            ++c[n][m];
        }
    }
    return c;
}

double closed_on_hyperbola(double y) {
    return -1.0 + std::sqrt((1.0 - y) / (1.0 - 3.0 * y - y * y - y * y * y));
}

}  // namespace

TEST_CASE("enumeration examples and brute-force oracle") {
    const auto t = enumerate(11);
    CHECK(t.at(1, 0) == 1);
    CHECK(t.at(2, 0) == 3);
    CHECK(t.total(3) == 7);
    CHECK(t.at(3, 0) == 7);
    const auto b = brute_table(11);
    for (int n = 1; n <= 11; ++n) CHECK(t.c[n] == b[n]);
    // frozen after the oracle agreed
    CHECK(t.c[10] == std::vector<std::uint64_t>{1727, 1038, 460, 114, 24, 0, 0, 0, 0, 0});
}

TEST_CASE("enumeration invariants") {
    const auto& t = table20();
    std::uint64_t p3 = 1;
    for (int n = 1; n <= 20; ++n) {
        p3 *= 3;
        CHECK(t.total(n) <= p3);
        CHECK(t.c[n].size() == std::size_t(n));
        if (n >= 3) CHECK(t.total(n) == 2 * t.total(n - 1) + t.total(n - 2));
    }
    CHECK(t.total(20) == 22619537ULL);
    const auto a = enumerate(14, 1, 0);
    const auto b = enumerate(14, 3, 0x9e3779b97f4a7c15ULL);
    CHECK(a.c == b.c);
    CHECK_THROWS_AS(enumerate(21), ConfigError);
}

TEST_CASE("growth constant by the ratio method") {
    const auto est = estimate_radius(table20().coefficients(1.0));
    CHECK(std::abs(est.radius - 1.0 / (1.0 + std::sqrt(2.0))) < 1e-3);
    const auto z = y_c_series(table20(), 0.0);
    CHECK(std::abs(z.radius - 0.453397) < 1e-3);
}

TEST_CASE("normalization arbitration") {
    const auto n = arbitrate_normalization(table20());
    CHECK(n.kappa == 2);
    CHECK_FALSE(n.counts_empty);
}

TEST_CASE("q-series coefficients match the enumeration") {
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
        const auto g = genfun_coefficients(x, 12);
        CHECK(g[0] == 0.0);
        for (int n = 1; n <= 12; ++n) {
            const double z = table20().Z(n, x);
            CHECK(std::abs(g[n] - z) <= 1e-9 * z);
        }
    }
    // same check at a non-special x via the evaluated function: small y sums
    const double x = 1.7, y = 0.05;
    double s = 0.0, yn = 1.0;
    for (int n = 1; n <= 20; ++n) s += table20().Z(n, x) * (yn *= y);
    CHECK(genfun_qseries(x, y).value == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("generating function on and near the hyperbola") {
    CHECK(genfun(5.0, 0.2) == doctest::Approx(0.50756).epsilon(1e-5));
    for (double y : {0.1, 0.2, 0.25})
        CHECK(genfun(1.0 / y, y) == doctest::Approx(closed_on_hyperbola(y)).epsilon(1e-12));
    CHECK(R_continued_fraction(2.0, 0.3) == doctest::Approx(0.345866753751715).epsilon(1e-13));
    // both routes agree where both converge
    for (double x : {1.5, 2.0, 3.0})
        for (double y : {0.1, 0.2, 0.25})
            CHECK(genfun(x, y) == doctest::Approx(genfun_qseries(x, y).value).epsilon(1e-11));
    CHECK_THROWS_AS(genfun_qseries(4.0, 0.25), NumericError);
    CHECK_THROWS_AS(genfun_qseries(5.0, 0.3), NumericError);
}

TEST_CASE("truncation stability") {
    for (double x : {0.0, 0.3, 1.0, 1.6, 2.5, 5.0, 12.0})
        for (double y = 0.01; y < 0.3; y += 0.02) {
            if (x * y >= 0.5) continue;
            const auto a = genfun_qseries(x, y, 40), b = genfun_qseries(x, y, 80);
            CHECK(std::abs(a.value - b.value) < 1e-10);
            CHECK(std::isfinite(a.trunc_err));
            CHECK(b.trunc_err <= a.trunc_err);
        }
}

TEST_CASE("critical curve") {
    CHECK(std::abs(y_c_singular(0.0) - 0.453397) < 1e-3);
    // root of y^3 + 2y - 1, the touch-free paths
    CHECK(y_c_singular(0.0) == doctest::Approx(0.45339765151640377).epsilon(1e-12));
    CHECK(y_c_singular(1.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    const double xc = collapse_point().x_c;
    CHECK(std::abs(y_c_singular(xc) - 1.0 / xc) < 2e-2);
    CHECK(std::abs(y_c_series(table20(), xc).radius - 1.0 / xc) < 2e-2);
    bool hyp = false;
    CHECK(y_c_singular(4.0, nullptr, &hyp) == 0.25);
    CHECK(hyp);

    const auto pts = critical_points(linspace(0.5, 3.0, 11), table20(), 2);
    for (const auto& p : pts) {
        CHECK(p.spread <= p.unc_series + p.unc_singular);
        CHECK(p.y < 1.0 / p.x);
        CHECK_FALSE(p.on_hyperbola);
    }
    const auto c = critical_curve(linspace(0.5, 5.0, 10), table20(), 2);
    CHECK(c.meta.at("normalization") == "kappa=2y^2;G starts at n=1");
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c.ys[i] < c.ys[i - 1]);
}

TEST_CASE("collapse point") {
    const auto cp = collapse_point();
    CHECK(std::abs(cp.x_c - 3.382975) < 1e-6);
    CHECK(std::abs(((cp.x_c - 3.0) * cp.x_c - 1.0) * cp.x_c - 1.0) < 1e-8);
    CHECK(cp.gamma_c == doctest::Approx(1.21877).epsilon(1e-5));
}

TEST_CASE("free energy and touch density") {
    const auto far = free_energy_curve({-12.0}, 1);
    CHECK(std::abs(far.ys[0] - std::log(1.0 / 0.453397)) < 1e-2);

    const auto grid = linspace(-3.0, 3.0, 121);
    const auto f = free_energy_curve(grid, 4);
    const auto d = touch_density(grid, 4);
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
        CHECK(f.ys[i + 1] - 2.0 * f.ys[i] + f.ys[i - 1] >= -1e-9);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d.ys[i] >= d.ys[i - 1] - 1e-9);
    CHECK(d.ys.front() > 0.0);
    CHECK(d.ys.front() < 0.1);
    CHECK(d.ys.back() == doctest::Approx(1.0).epsilon(1e-9));
    // collapsed phase: y_c = 1/x, so f = gamma
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] > collapse_point().gamma_c + 0.05) CHECK(f.ys[i] == doctest::Approx(grid[i]).epsilon(1e-12));
}
