#include "polylab/copoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polylab::copoly {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double x, double y) {
    if (x == -kInf) return y;
    if (y == -kInf) return x;
    const double m = std::max(x, y);
    return m + std::log1p(std::exp(-std::abs(x - y)));
}

void need_beta(double beta) {
    if (!(beta > 0.0)) throw ConfigError("bad-argument", "beta must be > 0");
}
}  // namespace

HcBounds hc_bounds(double beta, const DisorderLaw& mu0) {
    need_beta(beta);
    return {0.75 / beta * mu0.logM(4.0 * beta / 3.0), 0.5 / beta * mu0.logM(2.0 * beta)};
}

double cramer_rate(const DisorderLaw& mu0, double delta) {
    if (!(delta >= 0.0) || delta > mu0.sup_neg())
        throw ConfigError("bad-argument", "delta outside [0, ess sup(-omega)]");
    if (delta == 0.0) return 0.0;
    return legendre_sup([&](double l) { return mu0.logM(-l); }, delta, 0.0, 50.0, 1e-12);
}

double duality_check(const DisorderLaw& mu0, double beta) {
    need_beta(beta);
    auto g = [&](double d) { return 0.75 * cramer_rate(mu0, d); };
    double hi = std::min(1.0, mu0.sup_neg());
    if (std::isinf(mu0.sup_neg())) {
        // widen until the objective turns down
        double d = 1.0;
        while (g(2.0 * d) - g(d) < beta * d && d < 1e3) d *= 2.0;
        hi = 2.0 * d;
    }
    const double rhs = legendre_sup(g, beta, 0.0, hi, 1e-12);
    return std::abs(0.75 * mu0.logM(4.0 * beta / 3.0) - rhs);
}

RareStretchPlan RareStretchPlan::make(const DisorderLaw& mu0, int l, double delta) {
    if (l < 2 || l % 2 != 0) throw ConfigError("bad-argument", "block length must be even and >= 2");
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("bad-argument", "delta must lie in (0, 1]");
    RareStretchPlan p;
    p.l = l;
    p.delta = delta;
    switch (mu0.kind()) {
        case DisorderLaw::Kind::BernoulliPM1: {
            // block sum 2K - l with K ~ Bin(l, 1/2)
            const int kmax = int(std::floor(0.5 * l * (1.0 - delta) + 1e-9));
            double lq = -kInf;
            for (int k = 0; k <= kmax; ++k)
                lq = log_add(lq, std::lgamma(l + 1.0) - std::lgamma(k + 1.0) - std::lgamma(l - k + 1.0));
            p.q = std::exp(lq - l * M_LN2);
            break;
        }
        case DisorderLaw::Kind::StdGaussian:
            p.q = 0.5 * std::erfc(delta * std::sqrt(double(l)) / M_SQRT2);
            break;
        default: throw ConfigError("unsupported-law", "block tail needs Bernoulli or Gaussian disorder");
    }
    p.p = p.q / (1.0 + p.q) / double(l);
    return p;
}

double rare_stretch_value(const CopolySpec& spec, double beta, double h, int l, double delta, double C) {
    need_beta(beta);
    const auto plan = RareStretchPlan::make(spec.mu0, l, delta);
    if (plan.q <= 0.0) return 0.0;
    const double L = double(l);
    // 1/p - l = l / q, kept in logs for tiny q
    const double log_gap = std::log(L) - std::log(plan.q);
    return plan.p * (2.0 * std::log(C) - 1.5 * log_gap - 1.5 * std::log(L) + 2.0 * beta * (delta - h) * L);
}

double srw_excursion_constant(std::size_t n_max) {
    double r = 0.25;  // one-sided R1(2)
    double best = kInf;
    for (std::size_t m = 1; 2 * m <= n_max; ++m) {
        best = std::min(best, r * std::pow(2.0 * m, 1.5));
        r *= (2.0 * m - 1.0) / (2.0 * (m + 1.0));
    }
    return best;
}

TiltedPartition tilted_logZ(const TailedLaw& R, double beta, double h,
                            const std::vector<double>& omega, std::size_t n) {
    if (omega.size() < n) throw ConfigError("bad-argument", "disorder sequence shorter than n");
    if (!R.recurrent()) throw ConfigError("invalid-law", "copolymer needs a recurrent R");
    const std::size_t H = R.head_size();
    const std::size_t p = std::size_t(R.period());
    const std::size_t K1 = (H / p + 1) * p;

    std::vector<std::pair<std::size_t, double>> head;
    for (std::size_t k = 1; k <= H; ++k)
        if (R.head()[k - 1] > 0.0) head.emplace_back(k, R.head()[k - 1]);
    std::vector<double> decay_p, decay_K1;
    if (R.tail() && R.tail()->c > 0.0 && n >= K1) {
        const auto es = randpin::power_as_exp_sum(R.tail()->a, double(K1), double(std::max(n, K1 + 1)));
        for (std::size_t j = 0; j < es.rate.size(); ++j) {
            decay_p.push_back(std::exp(-es.rate[j] * double(p)));
            decay_K1.push_back(R.tail()->c * es.weight[j] * std::exp(-es.rate[j] * double(K1)));
        }
    }
    const std::size_t J = decay_p.size();

    // T_j = sum_{i<=j} (omega_i + h). The below-interface weight of an
    // excursion (j, m] is e^{-2beta(T_m - T_j)}, so it factors into a per-m
    // scalar and a per-j sequence F_j = e^{2beta T_j} Z*_j.
    std::vector<double> T(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) T[i] = T[i - 1] + omega[i - 1] + h;

    struct Track {
        std::vector<double> v;                // scaled sequence
        std::vector<std::vector<double>> acc;  // tail accumulators per residue
        double G = 0.0;                       // log scale
        void rescale(double shift, std::size_t from, std::size_t to) {
            const double f = std::exp(-shift);
            for (std::size_t j = from; j <= to; ++j) v[j] *= f;
            for (auto& a : acc)
                for (auto& x : a) x *= f;
            G += shift;
        }
    };
    Track V{std::vector<double>(n + 1, 0.0), std::vector<std::vector<double>>(p, std::vector<double>(J, 0.0)), 0.0};
    Track F = V;
    auto conv = [&](Track& t, std::size_t m) {
        double z = 0.0;
        for (const auto& [k, r] : head) {
            if (k > m) break;
            z += r * t.v[m - k];
        }
        if (J && m >= K1) {
            auto& A = t.acc[m % p];
            const double wn = t.v[m - K1];
            for (std::size_t j = 0; j < J; ++j) {
                A[j] = decay_p[j] * A[j] + decay_K1[j] * wn;
                z += A[j];
            }
        }
        return z;
    };

    TiltedPartition out;
    out.logZstar.assign(n + 1, -kInf);
    out.logZstar[0] = 0.0;
    V.v[0] = 1.0;
    F.v[0] = 1.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const std::size_t from = m > K1 + p ? m - K1 - p : 0;
        const double s1 = conv(V, m);
        const double s2 = conv(F, m);
        // z = (s1 e^{G1} + s2 e^{G2 - 2beta T_m}) / 2, kept in the V scale
        double e = F.G - V.G - 2.0 * beta * T[m];
        double z;
        if (s2 == 0.0) {
            z = 0.5 * s1;
        } else if (e > 600.0) {
            V.rescale(e, from, m - 1);
            z = 0.5 * (s1 * std::exp(-e) + s2);
        } else {
            z = 0.5 * (s1 + s2 * std::exp(e));
        }
        if (z > 1e150 || (z > 0.0 && z < 1e-150)) {
            const double sh = std::log(z);
            V.rescale(sh, from, m - 1);
            z *= std::exp(-sh);
        }
        V.v[m] = z;
        if (z > 0.0) out.logZstar[m] = std::log(z) + V.G;
        // F_m = Z*_m e^{2beta T_m}, stored in the F scale
        double x = V.G - F.G + 2.0 * beta * T[m];
        if (z > 0.0 && std::abs(x + std::log(z)) > 300.0) {
            const double sh = x + std::log(z);
            F.rescale(sh, from, m - 1);
            x -= sh;
        }
        F.v[m] = z > 0.0 ? z * std::exp(x) : 0.0;
    }

    // open last excursion: survives n - j steps, on either side
    const auto S = R.survival_table(n);
    double lz = out.logZstar[n];
    for (std::size_t j = 0; j < n; ++j) {
        if (out.logZstar[j] == -kInf || S[n - j] <= 0.0) continue;
        const double below = -2.0 * beta * (T[n] - T[j]);
        lz = log_add(lz, out.logZstar[j] + std::log(S[n - j]) - M_LN2 + log_add(0.0, below));
    }
    out.logZ = lz;
    return out;
}

QuenchedG quenched_g(const CopolySpec& spec, double beta, double h, std::size_t n, int replicas,
                     std::uint64_t seed, int threads) {
    if (!(h >= 0.0 && h <= 1.0)) throw ConfigError("bad-argument", "h must lie in [0, 1]");
    if (!(beta >= 0.0)) throw ConfigError("bad-argument", "beta must be >= 0");
    if (replicas < 16) throw ConfigError("bad-argument", "need at least 16 replicas");
    if (n < 8) throw ConfigError("bad-argument", "need n >= 8");
    const SeedSpec ss{seed};
    std::vector<double> g(static_cast<std::size_t>(replicas)), gc(g.size());
    parallel_for(g.size(), threads, [&](std::size_t r) {
        Stream rng = ss.stream(r);
        const auto omega = randpin::disorder_sequence(spec.mu0, n, rng);
        const auto tp = tilted_logZ(spec.R, beta, h, omega, n);
        g[r] = tp.logZ / double(n);
        gc[r] = tp.logZstar[n] / double(n);
    });
    QuenchedG out;
    const auto m = mean_stderr(g);
    out.est = randpin::QuenchedEstimate{m.mean, m.stderr_, replicas, n, ss};
    out.per_replica = g;
    out.constrained_mean = mean_stderr(gc).mean;
    out.min_g = *std::min_element(g.begin(), g.end());
    out.finite_size_floor = std::min(0.0, std::log(0.5 * spec.R.survival(std::int64_t(n))) / double(n));
    out.nonneg_ok = out.min_g >= out.finite_size_floor - 1e-9;
    out.localized = m.mean > 3.0 * m.stderr_;
    return out;
}

std::vector<SlopeRow> slope_estimate(const CopolySpec& spec, const std::vector<double>& beta_grid,
                                     std::size_t n, int replicas, std::uint64_t seed, int threads,
                                     int steps) {
    std::vector<SlopeRow> rows;
    for (double b : beta_grid) {
        if (!(b > 0.0 && b <= 0.5)) throw ConfigError("bad-grid", "slope grid must lie in (0, 0.5]");
        const auto bd = hc_bounds(b, spec.mu0);
        double lo = bd.lower, hi = bd.upper;
        for (int s = 0; s < steps; ++s) {
            const double mid = 0.5 * (lo + hi);
            (quenched_g(spec, b, mid, n, replicas, seed, threads).localized ? lo : hi) = mid;
        }
        SlopeRow r;
        r.beta = b;
        r.lower_over_beta = bd.lower / b;
        r.upper_over_beta = bd.upper / b;
        r.mc_lo_over_beta = lo / b;
        r.mc_hi_over_beta = hi / b;
        r.contained = r.mc_lo_over_beta >= 2.0 / 3.0 * 0.95 && r.mc_hi_over_beta <= 1.05;
        rows.push_back(r);
    }
    return rows;
}

double slope_approximation(double beta, double K) {
    need_beta(beta);
    const double x = 2.0 * K * beta;
    return (x + std::log1p(std::exp(-2.0 * x)) - M_LN2) / x;
}

SmoothingCurves smoothing_bound(const DisorderLaw& mu0, const std::vector<double>& delta_grid) {
    SmoothingCurves c;
    for (double d : delta_grid) {
        if (!(d >= 0.0 && d <= 0.3)) throw ConfigError("bad-grid", "delta grid must lie in [0, 0.3]");
        const double a = 1.5 * cramer_rate(mu0, d), b = 0.25 * d * d;
        c.delta.push_back(d);
        c.three_halves_sigma.push_back(a);
        c.quarter_delta2.push_back(b);
        c.envelope.push_back(std::min(a, b));
    }
    return c;
}

}  // namespace polylab::copoly
