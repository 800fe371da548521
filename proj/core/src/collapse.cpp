#include "polylab/collapse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace polylab::collapse {

std::uint64_t TouchTable::at(int n, int m) const {
    if (n < 0 || n > n_max || m < 0 || m >= static_cast<int>(c[n].size())) return 0;
    return c[n][m];
}

std::uint64_t TouchTable::total(int n) const {
    std::uint64_t s = 0;
    for (auto v : c.at(n)) s += v;
    return s;
}

double TouchTable::Z(int n, double x) const {
    // Horner from the top touch count
    double s = 0.0;
    const auto& row = c.at(n);
    for (std::size_t m = row.size(); m-- > 0;) s = s * x + double(row[m]);
    return s;
}

std::vector<double> TouchTable::coefficients(double x) const {
    std::vector<double> z;
    for (int n = 1; n <= n_max; ++n) z.push_back(Z(n, x));
    return z;
}

namespace {

// Linear-probing site set. Removals happen in LIFO order during the DFS, so
// clearing the slot restores the exact earlier layout.
class SiteSet {
public:
    SiteSet(int n_max, std::uint64_t salt) : salt_(salt) {
        std::size_t cap = 16;
        while (cap < 4 * std::size_t(n_max + 2)) cap <<= 1;
        keys_.assign(cap, 0);
        mask_ = cap - 1;
    }
    static std::uint64_t key(int col, int h) {
        return (std::uint64_t(std::uint32_t(col)) << 32 | std::uint32_t(h + (1 << 20))) + 1;
    }
    bool contains(std::uint64_t k) const {
        for (std::size_t i = slot(k);; i = (i + 1) & mask_) {
            if (keys_[i] == k) return true;
            if (keys_[i] == 0) return false;
        }
    }
    std::size_t insert(std::uint64_t k) {
        std::size_t i = slot(k);
        while (keys_[i] != 0) i = (i + 1) & mask_;
        keys_[i] = k;
        return i;
    }
    void erase_last(std::size_t i) { keys_[i] = 0; }

private:
    std::size_t slot(std::uint64_t k) const { return splitmix64(k ^ salt_) & mask_; }
    std::vector<std::uint64_t> keys_;
    std::size_t mask_ = 0;
    std::uint64_t salt_;
};

enum Dir : int { East = 0, Up = 1, Down = 2 };
constexpr int kDc[3] = {1, 0, 0};
constexpr int kDh[3] = {0, 1, -1};

struct Walker {
    int n_max;
    SiteSet sites;
    std::vector<std::vector<std::uint64_t>>& counts;
    int min_depth;

    int touches(int col, int h, int pc, int ph) const {
        static constexpr int nc[4] = {1, -1, 0, 0};
        static constexpr int nh[4] = {0, 0, 1, -1};
        int t = 0;
        for (int i = 0; i < 4; ++i) {
            const int a = col + nc[i], b = h + nh[i];
            if (a == pc && b == ph) continue;
            if (sites.contains(SiteSet::key(a, b))) ++t;
        }
        return t;
    }
    static bool reversal(int last, int d) {
        return (last == Up && d == Down) || (last == Down && d == Up);
    }
    void dfs(int col, int h, int last, int depth, int m) {
        if (depth >= min_depth) ++counts[depth][m];
        if (depth == n_max) return;
        for (int d = 0; d < 3; ++d) {
            if (reversal(last, d)) continue;
            const int c2 = col + kDc[d], h2 = h + kDh[d];
            const int m2 = m + touches(c2, h2, col, h);
            const std::size_t s = sites.insert(SiteSet::key(c2, h2));
            dfs(c2, h2, d, depth + 1, m2);
            sites.erase_last(s);
        }
    }
};

}  // namespace

TouchTable enumerate(int n_max, int threads, std::uint64_t hash_salt) {
    if (n_max < 1 || n_max > 20) throw ConfigError("bad-argument", "enumerate needs 1 <= n_max <= 20");
    auto fresh = [&] {
        std::vector<std::vector<std::uint64_t>> t(n_max + 1);
        for (int n = 1; n <= n_max; ++n) t[n].assign(n, 0);
        return t;
    };
    TouchTable out;
    out.n_max = n_max;
    out.c = fresh();
    out.c[0].clear();

    // depths 1 and 2 sequentially, deeper levels split over the 7 prefixes of
    // two free steps
    {
        Walker w{std::min(n_max, 2), SiteSet(n_max, hash_salt), out.c, 1};
        w.sites.insert(SiteSet::key(0, 0));
        w.sites.insert(SiteSet::key(1, 0));
        w.dfs(1, 0, East, 1, 0);
    }
    if (n_max < 3) return out;

    std::vector<std::array<int, 2>> prefixes;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (!Walker::reversal(a, b)) prefixes.push_back({a, b});
    std::vector<std::vector<std::vector<std::uint64_t>>> parts(prefixes.size());
    parallel_for(prefixes.size(), threads, [&](std::size_t i) {
        parts[i] = fresh();
        Walker w{n_max, SiteSet(n_max, hash_salt), parts[i], 3};
        w.sites.insert(SiteSet::key(0, 0));
        w.sites.insert(SiteSet::key(1, 0));
        int col = 1, h = 0, m = 0;
        for (int d : prefixes[i]) {
            const int c2 = col + kDc[d], h2 = h + kDh[d];
            m += w.touches(c2, h2, col, h);
            w.sites.insert(SiteSet::key(c2, h2));
            col = c2;
            h = h2;
        }
        w.dfs(col, h, prefixes[i][1], 3, m);
    });
    for (const auto& p : parts)
        for (int n = 3; n <= n_max; ++n)
            for (int m = 0; m < n; ++m) out.c[n][m] += p[n][m];
    return out;
}

namespace {

struct ESum {
    double value = 0.0;
    double err = 0.0;
};

// e_r = (s_r - 1)/(1 - x), where s_r is the q-series of the lemma. Factoring
// out (1 - x) keeps the evaluation regular at x = 1.
ESum e_series(int r, double x, double y, int K) {
    const double q = x * y;
    ESum out;
    double t = 0.0;
    double ratio_next = 0.0;
    for (int k = 1; k <= K + 1; ++k) {
        const double den = (std::pow(q, k) - 1.0) * (y * std::pow(q, k - 1) - 1.0);
        if (std::abs(den) < 1e-14)
            throw NumericError("q-singular", "q-series denominator vanishes");
        const double num = (k == 1) ? y * y * std::pow(q, r)
                                    : (1.0 - x) * y * y * std::pow(q, k + r - 1);
        if (k == K + 1) {
            ratio_next = std::abs(num / den);
            break;
        }
        t = (k == 1) ? num / den : t * num / den;
        out.value += t;
    }
    // ratios shrink with k for 0 <= q, y < 1, so the remainder is geometric
    out.err = (ratio_next < 1.0 && y < 1.0) ? std::abs(t) * ratio_next / (1.0 - ratio_next)
                                            : std::numeric_limits<double>::infinity();
    return out;
}

double G_from_e(double x, double y, double e0, double e1) {
    const double A = 2.0 + (1.0 - x) * y, B = (1.0 + x) + (1.0 - x) * y;
    return -(y + A * e0 - 2.0 * e1) / (-(1.0 - y) + B * e0 - 2.0 * e1);
}

using Series = std::vector<double>;

Series ser_mul(const Series& a, const Series& b, std::size_t L) {
    Series r(L + 1, 0.0);
    for (std::size_t i = 0; i < a.size() && i <= L; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size() && i + j <= L; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

Series ser_inv(const Series& a, std::size_t L) {
    if (a.empty() || a[0] == 0.0) throw NumericError("series", "series not invertible");
    Series r(L + 1, 0.0);
    r[0] = 1.0 / a[0];
    for (std::size_t n = 1; n <= L; ++n) {
        double s = 0.0;
        for (std::size_t k = 1; k <= n && k < a.size(); ++k) s += a[k] * r[n - k];
        r[n] = -s / a[0];
    }
    return r;
}

// series of e_r in y, up to y^L
Series e_power_series(int r, double x, std::size_t L) {
    Series sum(L + 1, 0.0), t;
    std::size_t order = 0;
    for (int k = 1;; ++k) {
        // factors (x^k y^k - 1)(x^{k-1} y^k - 1)
        Series f1(k + 1, 0.0), f2(k + 1, 0.0);
        f1[0] = -1.0;
        f1[k] = std::pow(x, k);
        f2[0] = -1.0;
        f2[k] = std::pow(x, k - 1);
        const Series inv = ser_inv(ser_mul(f1, f2, L), L);
        const std::size_t p = (k == 1) ? std::size_t(2 + r) : std::size_t(k + r + 1);
        order += p;
        if (order > L) break;
        const double coef = (k == 1) ? std::pow(x, r) : (1.0 - x) * std::pow(x, k + r - 1);
        Series mono(p + 1, 0.0);
        mono[p] = coef;
        t = (k == 1) ? ser_mul(mono, inv, L) : ser_mul(ser_mul(t, mono, L), inv, L);
        for (std::size_t i = 0; i <= L; ++i) sum[i] += t[i];
    }
    return sum;
}

}  // namespace

QSeriesEval genfun_qseries(double x, double y, int K) {
    if (K < 1) throw ConfigError("bad-argument", "K must be positive");
    if (!(x >= 0.0 && y > 0.0)) throw ConfigError("bad-argument", "need x >= 0 and y > 0");
    QSeriesEval out{x, y, x * y, K, 0.0, 0.0};
    if (!(out.q < 1.0)) throw NumericError("q-singular", "q-series needs q = xy < 1");
    const ESum e0 = e_series(0, x, y, K), e1 = e_series(1, x, y, K);
    out.value = G_from_e(x, y, e0.value, e1.value);
    double worst = 0.0;
    for (int s0 : {-1, 1})
        for (int s1 : {-1, 1})
            worst = std::max(worst, std::abs(G_from_e(x, y, e0.value + s0 * e0.err,
                                                      e1.value + s1 * e1.err) - out.value));
    out.trunc_err = worst;
    if (!std::isfinite(out.value)) throw NumericError("q-singular", "generating function diverges");
    return out;
}

double R_continued_fraction(double x, double y) {
    if (!(x > 0.0 && y > 0.0)) throw ConfigError("bad-argument", "need x > 0 and y > 0");
    const double q = x * y;
    if (q > 1.0 + 1e-15) throw NumericError("q-singular", "continued fraction needs q <= 1");
    if (q >= 1.0 - 1e-15) {
        const double B = (1.0 + x) * y + (1.0 - x) * y * y;
        const double disc = B * B - 4.0 * x * y * y;
        if (disc < 0.0) throw NumericError("q-singular", "no real fixed point at q = 1");
        return 2.0 * x * y * y / (B + std::sqrt(disc));
    }
    // start deep enough that q^r is negligible; the fixed point there is y
    const double depth = std::log(1e-18) / std::log(q) + 60.0;
    if (depth > 5e8) throw NumericError("q-singular", "continued fraction too close to q = 1");
    const long r0 = std::max(60L, static_cast<long>(depth));
    double rho = y;
    double qr = std::pow(q, double(r0));
    for (long r = r0; r >= 1; --r) {
        if ((r & 1023) == 0) qr = std::pow(q, double(r));
        const double B = (1.0 + x) * y + (1.0 - x) * y * y * qr;
        rho = x * y * y / (B - rho);
        qr /= q;
    }
    return rho;
}

double genfun(double x, double y) {
    if (x <= 1.0) {
        const auto ev = genfun_qseries(x, y, 400);
        return ev.value;
    }
    const double b = y * y * (1.0 + x + y - x * y);
    const double R = R_continued_fraction(x, y);
    return y * y * (x - 1.0) / (b - 2.0 * y * R) - 1.0;
}

double inverse_full_genfun(double x, double y) {
    if (x <= 1.0) {
        const ESum e0 = e_series(0, x, y, 400), e1 = e_series(1, x, y, 400);
        const double B = (1.0 + x) + (1.0 - x) * y;
        const double s0 = 1.0 + (1.0 - x) * e0.value;
        return (1.0 - y - B * e0.value + 2.0 * e1.value) / s0;
    }
    const double b = y * y * (1.0 + x + y - x * y);
    return (b - 2.0 * y * R_continued_fraction(x, y)) / (y * y * (x - 1.0));
}

std::vector<double> genfun_coefficients(double x, int n_max) {
    if (n_max < 1) throw ConfigError("bad-argument", "n_max must be positive");
    const std::size_t L = std::size_t(n_max) + 2;
    const Series e0 = e_power_series(0, x, L), e1 = e_power_series(1, x, L);
    // numerator y + A e0 - 2 e1 and denominator -(1-y) + B e0 - 2 e1, A and B linear in y
    Series num(L + 1, 0.0), den(L + 1, 0.0);
    num[1] += 1.0;
    den[0] -= 1.0;
    den[1] += 1.0;
    const Series A{2.0, 1.0 - x}, B{1.0 + x, 1.0 - x};
    const Series Ae = ser_mul(A, e0, L), Be = ser_mul(B, e0, L);
    for (std::size_t i = 0; i <= L; ++i) {
        num[i] += Ae[i] - 2.0 * e1[i];
        den[i] += Be[i] - 2.0 * e1[i];
    }
    Series G = ser_mul(num, ser_inv(den, L), L);
    G.resize(std::size_t(n_max) + 1);
    for (double& g : G) g = -g;
    return G;
}

std::string Normalization::describe() const {
    return std::string("kappa=") + (kappa == 2 ? "2y^2" : "y^2") +
           (counts_empty ? ";G includes n=0" : ";G starts at n=1");
}

Normalization arbitrate_normalization(const TouchTable& oracle) {
    if (oracle.n_max < 2) throw ConfigError("bad-argument", "oracle needs n_max >= 2");
    const double x = 2.0;
    const std::size_t L = 4;
    // generic form with s_r = 1 + (1 - x) e_r; away from x = 1 nothing cancels
    Series s0 = e_power_series(0, x, L), s1 = e_power_series(1, x, L);
    for (std::size_t i = 0; i <= L; ++i) s0[i] *= (1.0 - x), s1[i] *= (1.0 - x);
    s0[0] += 1.0;
    s1[0] += 1.0;
    const double target[3] = {0.0, oracle.Z(1, x), oracle.Z(2, x)};
    std::vector<Normalization> hits;
    for (int kappa : {1, 2}) {
        const Series A{2.0, 1.0 - x}, B{1.0 + x, 1.0 - x};
        const Series As = ser_mul(A, s0, L), Bs = ser_mul(B, s0, L);
        Series num(L + 1), den(L + 1);
        for (std::size_t i = 0; i <= L; ++i) {
            num[i] = As[i] - kappa * s1[i];
            den[i] = Bs[i] - kappa * s1[i];
        }
        const Series G = ser_mul(num, ser_inv(den, L), L);
        for (bool empty : {false, true}) {
            // candidate: shift - N/D, compared with the paths of length >= 1
            const double shift = empty ? 1.0 : 0.0;
            bool ok = true;
            for (int n = 0; n < 3; ++n) {
                const double g = (n == 0 ? shift : 0.0) - G[n];
                if (std::abs(g - target[n]) > 1e-12 * std::max(1.0, std::abs(target[n]))) ok = false;
            }
            if (ok) hits.push_back({kappa, empty});
        }
    }
    if (hits.size() != 1)
        throw NumericError("normalization", "enumeration does not single out one normalization");
    return hits.front();
}

double y_c_singular(double x, double* uncertainty, bool* on_hyperbola) {
    if (!(x >= 0.0)) throw ConfigError("bad-argument", "x must be nonnegative");
    auto P = [x](double y) { return inverse_full_genfun(x, y); };
    auto report = [&](double y, double u, bool hyp) {
        if (uncertainty) *uncertainty = u;
        if (on_hyperbola) *on_hyperbola = hyp;
        return y;
    };
    const double hi = x > 1.0 ? 1.0 / x : 0.999;
    if (x > 1.0) {
        // on the hyperbola the q = 1 fixed point exists and P is still positive
        const double B = (1.0 + x) * hi + (1.0 - x) * hi * hi;
        if (B * B - 4.0 * x * hi * hi >= 0.0 && P(hi) > 0.0) return report(hi, 0.0, true);
    }
    // P decreases on (0, y_c). Past y_c it alternates between zeros and
    // poles, so a sample that is nonpositive or larger than its predecessor
    // means y_c has been passed.
    auto passed = [](double p, double p_prev) { return p <= 0.0 || p >= p_prev; };
    auto narrow = [&](double lo, double plo, double up) {
        while (up - lo > 1e-13 * up) {
            const int m = 16;
            double a = lo, pa = plo, b = up;
            for (int j = 1; j < m; ++j) {
                const double s = lo + (up - lo) * j / m;
                const double ps = P(s);
                if (passed(ps, pa)) {
                    b = s;
                    break;
                }
                a = s;
                pa = ps;
            }
            lo = a;
            plo = pa;
            up = b;
        }
        return report(0.5 * (lo + up), 0.5 * (up - lo), false);
    };

    double prev = 0.01, pprev = P(prev);
    if (!(pprev > 0.0)) throw NumericError("no-singularity", "P not positive at small y");
    const double eps_min = 1e-5;  // closest approach to q = 1; the continued fraction cost grows like 1/(1 - q)
    // uniform steps in y, then geometric steps in 1 - q once the hyperbola is near
    bool geometric = false;
    double eps = 0.05;
    for (;;) {
        double y;
        if (!geometric) {
            y = prev + 1e-3;
            if (x > 1.0 && 1.0 - x * y <= 0.05) {
                y = (1.0 - eps) / x;
                geometric = true;
            }
            if (x <= 1.0 && y > hi) break;
        } else {
            eps *= 0.95;
            if (eps < eps_min) break;
            y = (1.0 - eps) / x;
        }
        if (!(y > prev)) continue;
        const double p = P(y);
        if (passed(p, pprev)) return narrow(prev, pprev, y);
        prev = y;
        pprev = p;
    }
    if (x <= 1.0) throw NumericError("no-singularity", "no zero of P below y = 1");
    // zero squeezed against the hyperbola, closer than the continued fraction can resolve
    const double cap = (1.0 - eps_min) / x;
    return report(0.5 * (cap + hi), 0.5 * (hi - cap), false);
}

RadiusEstimate y_c_series(const TouchTable& table, double x) {
    return estimate_radius(table.coefficients(x));
}

std::vector<CriticalPoint> critical_points(const std::vector<double>& x_grid,
                                           const TouchTable& table, int threads) {
    std::vector<CriticalPoint> out(x_grid.size());
    parallel_for(x_grid.size(), threads, [&](std::size_t i) {
        CriticalPoint& p = out[i];
        p.x = x_grid[i];
        const auto s = y_c_series(table, p.x);
        p.y_series = s.radius;
        p.unc_series = s.uncertainty;
        p.y_singular = y_c_singular(p.x, &p.unc_singular, &p.on_hyperbola);
        p.y = p.y_singular;
        p.spread = std::abs(p.y_series - p.y_singular);
    });
    return out;
}

SampledCurve critical_curve(const std::vector<double>& x_grid, const TouchTable& table,
                            int threads) {
    SampledCurve c;
    for (const auto& p : critical_points(x_grid, table, threads)) {
        c.xs.push_back(p.x);
        c.ys.push_back(p.y);
    }
    c.meta["normalization"] = arbitrate_normalization(table).describe();
    c.meta["series_n_max"] = std::to_string(table.n_max);
    return c;
}

CollapsePoint collapse_point() {
    const double xc =
        solve_monotone([](double x) { return ((x - 3.0) * x - 1.0) * x - 1.0; }, 0.0, 3.0, 4.0, 1e-15);
    return {xc, std::log(xc)};
}

SampledCurve free_energy_curve(const std::vector<double>& gamma_grid, int threads) {
    SampledCurve c;
    c.xs = gamma_grid;
    c.ys.assign(gamma_grid.size(), 0.0);
    for (double g : gamma_grid)
        if (!std::isfinite(g)) throw ConfigError("bad-grid", "gamma grid must be finite");
    parallel_for(gamma_grid.size(), threads,
                 [&](std::size_t i) { c.ys[i] = -std::log(y_c_singular(std::exp(gamma_grid[i]))); });
    c.meta["quantity"] = "f";
    return c;
}

SampledCurve touch_density(const std::vector<double>& gamma_grid, int threads) {
    auto d = central_diff(free_energy_curve(gamma_grid, threads));
    d.meta["quantity"] = "f_prime";
    return d;
}

}  // namespace polylab::collapse
