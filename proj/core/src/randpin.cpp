#include "polylab/randpin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polylab/homopin.hpp"

namespace polylab::randpin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double x, double y) {
    if (x == -kInf) return y;
    if (y == -kInf) return x;
    const double m = std::max(x, y);
    return m + std::log1p(std::exp(-std::abs(x - y)));
}
}  // namespace

RandomPinningSpec RandomPinningSpec::make(TailedLaw R, DisorderLaw mu0) {
    RandomPinningSpec s{std::move(R), std::move(mu0), 0.0};
    s.a = s.R.tail() ? s.R.tail()->a : kInf;
    s.validate();
    return s;
}

void RandomPinningSpec::validate() const {
    if (!R.recurrent()) throw ConfigError("invalid-law", "random pinning needs a recurrent R");
    if (!(a >= 0.0)) throw ConfigError("bad-argument", "tail exponent must be >= 0");
}

double annealed_hc(const DisorderLaw& mu0, double beta) {
    if (!(beta >= 0.0)) throw ConfigError("bad-argument", "beta must be >= 0");
    return mu0.logM(beta);
}

double ExpSum::eval(double n) const {
    double s = 0.0;
    for (std::size_t j = 0; j < rate.size(); ++j) s += weight[j] * std::exp(-rate[j] * n);
    return s;
}

// n^-(1+a) Gamma(1+a) = int e^{(1+a)s - n e^s} ds, trapezoid in s
ExpSum power_as_exp_sum(double a, double n_lo, double n_hi) {
    if (!(a > 0.0) || !(n_lo >= 1.0) || !(n_hi >= n_lo))
        throw ConfigError("bad-argument", "need a > 0 and 1 <= n_lo <= n_hi");
    const double al = 1.0 + a, step = 0.25;
    const double s_hi = std::log(60.0 / n_lo);
    const double s_lo = -std::log(n_hi) - 36.0 / al;
    const double g = std::tgamma(al);
    ExpSum e;
    for (double s = s_lo; s <= s_hi; s += step) {
        e.rate.push_back(std::exp(s));
        e.weight.push_back(step * std::exp(al * s) / g);
    }
    for (int i = 0; i <= 400; ++i) {
        const double n = std::round(n_lo * std::pow(n_hi / n_lo, i / 400.0));
        const double want = std::pow(n, -al);
        e.max_rel_err = std::max(e.max_rel_err, std::abs(e.eval(n) - want) / want);
    }
    if (e.max_rel_err > 1e-10) throw NumericError("fit-failed", "exponential sum misses the power tail");
    return e;
}

std::vector<double> disorder_sequence(const DisorderLaw& mu0, std::size_t n, Stream& rng) {
    std::vector<double> w(n);
    for (auto& x : w) x = mu0.sample(rng);
    return w;
}

QuenchedPartition quenched_logZ(const TailedLaw& R, double beta, double h,
                                const std::vector<double>& omega, std::size_t n) {
    if (omega.size() < n) throw ConfigError("bad-argument", "disorder sequence shorter than n");
    if (!R.recurrent()) throw ConfigError("invalid-law", "random pinning needs a recurrent R");
    const std::size_t H = R.head_size();
    const std::size_t p = std::size_t(R.period());
    const bool has_tail = R.tail() && R.tail()->c > 0.0;
    // first tail index: smallest multiple of the period beyond the head
    const std::size_t K1 = (H / p + 1) * p;

    std::vector<std::pair<std::size_t, double>> head;
    for (std::size_t k = 1; k <= H; ++k)
        if (R.head()[k - 1] > 0.0) head.emplace_back(k, R.head()[k - 1]);

    ExpSum es;
    std::vector<double> decay_p, decay_K1;
    if (has_tail && n >= K1) {
        es = power_as_exp_sum(R.tail()->a, double(K1), double(std::max(n, K1 + 1)));
        for (std::size_t j = 0; j < es.rate.size(); ++j) {
            decay_p.push_back(std::exp(-es.rate[j] * double(p)));
            decay_K1.push_back(R.tail()->c * es.weight[j] * std::exp(-es.rate[j] * double(K1)));
        }
    }
    const std::size_t J = decay_p.size();
    // acc[r][j]: tail accumulator for m = r mod p
    std::vector<std::vector<double>> acc(p, std::vector<double>(J, 0.0));

    QuenchedPartition out;
    out.logZstar.assign(n + 1, -kInf);
    std::vector<double> W(n + 1, 0.0);  // w_j Z*_j e^{-G}
    double G = 0.0;
    auto weight = [&](std::size_t j) { return std::exp(beta * omega[j] - h); };
    out.logZstar[0] = 0.0;
    if (n > 0) W[0] = weight(0);

    for (std::size_t m = 1; m <= n; ++m) {
        double z = 0.0;
        for (const auto& [k, r] : head) {
            if (k > m) break;
            z += r * W[m - k];
        }
        if (J) {
            auto& A = acc[m % p];
            if (m >= K1) {
                const double wn = W[m - K1];
                for (std::size_t j = 0; j < J; ++j) A[j] = decay_p[j] * A[j] + decay_K1[j] * wn;
            }
            if (m >= K1)
                for (std::size_t j = 0; j < J; ++j) z += A[j];
        }
        if (z > 0.0) out.logZstar[m] = std::log(z) + G;
        if (m < n) W[m] = z * weight(m);
        // rescale the live window when the scaled values drift
        const double v = m < n ? std::max(W[m], z) : z;
        if (v > 1e150 || (v > 0.0 && v < 1e-150)) {
            const double shift = std::log(v);
            const double f = std::exp(-shift);
            const std::size_t from = m > K1 + p ? m - K1 - p : 0;
            for (std::size_t j = from; j <= m; ++j) W[j] *= f;
            for (auto& A : acc)
                for (auto& x : A) x *= f;
            G += shift;
        }
    }
    out.logZ = free_logZ_at(R, beta, h, omega, out, n);
    return out;
}

double free_logZ_at(const TailedLaw& R, double beta, double h, const std::vector<double>& omega,
                    const QuenchedPartition& qp, std::size_t at) {
    if (at >= qp.logZstar.size()) throw ConfigError("bad-argument", "index beyond the computed range");
    // last contact at j < at, then no return before `at`
    const auto S = R.survival_table(at);
    double lz = qp.logZstar[at];
    for (std::size_t j = 0; j < at; ++j) {
        if (qp.logZstar[j] == -kInf || S[at - j] <= 0.0) continue;
        lz = log_add(lz, qp.logZstar[j] + beta * omega[j] - h + std::log(S[at - j]));
    }
    return lz;
}

QuenchedResult quenched_f(const RandomPinningSpec& spec, double beta, double h, std::size_t n,
                          int replicas, std::uint64_t seed, int threads) {
    spec.validate();
    if (replicas < 16) throw ConfigError("bad-argument", "need at least 16 replicas");
    if (n < 8) throw ConfigError("bad-argument", "need n >= 8");
    const std::size_t p = std::size_t(spec.R.period());
    const std::size_t half = (n / 2) / p * p;
    const SeedSpec ss{seed};
    struct Rep {
        double f_full, f_half, lzs_full, lzs_half, floor;
    };
    std::vector<Rep> reps(static_cast<std::size_t>(replicas));
    const double logS = std::log(spec.R.survival(std::int64_t(n)));
    parallel_for(reps.size(), threads, [&](std::size_t r) {
        Stream rng = ss.stream(r);
        const auto omega = disorder_sequence(spec.mu0, n, rng);
        const auto qp = quenched_logZ(spec.R, beta, h, omega, n);
        Rep& o = reps[r];
        o.f_full = qp.logZ / double(n);
        o.f_half = free_logZ_at(spec.R, beta, h, omega, qp, half) / double(half);
        o.lzs_full = qp.logZstar[2 * half];
        o.lzs_half = qp.logZstar[half];
        o.floor = std::min(0.0, (beta * omega[0] - h + logS) / double(n));
    });

    QuenchedResult res;
    std::vector<double> ff, fh, gap;
    for (const auto& o : reps) {
        ff.push_back(o.f_full);
        fh.push_back(o.f_half);
        gap.push_back(o.lzs_full - 2.0 * o.lzs_half);
    }
    const auto mf = mean_stderr(ff), mh = mean_stderr(fh), mg = mean_stderr(gap);
    res.per_replica = ff;
    res.est = QuenchedEstimate{mf.mean, mf.stderr_, replicas, n, ss};
    auto& d = res.diag;
    d.sd_full = mf.stdev;
    d.sd_half = mh.stdev;
    d.concentration_ok = d.sd_full <= d.sd_half;
    d.half = half;
    d.superadd_gap = mg.mean;
    d.superadd_err = mg.stderr_;
    d.superadd_ok = mg.mean >= -3.0 * mg.stderr_;
    d.min_f = *std::min_element(ff.begin(), ff.end());
    d.finite_size_floor = 0.0;
    d.nonneg_ok = true;
    for (const auto& o : reps) {
        d.finite_size_floor = std::min(d.finite_size_floor, o.floor);
        d.nonneg_ok = d.nonneg_ok && o.f_full >= o.floor - 1e-9;
    }
    d.annealed = homopin::free_energy(homopin::PinningSpec::pinned(spec.R), spec.mu0.logM(beta) - h);
    d.jensen_ok = mf.mean <= d.annealed + 3.0 * mf.stderr_;
    return res;
}

HcInterval hc_que_interval(const RandomPinningSpec& spec, double beta, std::size_t n, int replicas,
                           std::uint64_t seed, int threads, int steps) {
    // f^ann vanishes from log M(beta) on, so the localized side lies below it
    HcInterval iv{0.0, annealed_hc(spec.mu0, beta), 0};
    auto localized = [&](double h) {
        const auto q = quenched_f(spec, beta, h, n, replicas, seed, threads);
        return q.est.mean > 3.0 * q.est.stderr_;
    };
    if (!localized(iv.lo)) throw NumericError("no-bracket", "f-hat not certified positive at h = 0");
    for (int s = 0; s < steps; ++s, ++iv.steps) {
        const double mid = 0.5 * (iv.lo + iv.hi);
        (localized(mid) ? iv.lo : iv.hi) = mid;
    }
    return iv;
}

Chi chi(const TailedLaw& R, std::size_t n_max) {
    Chi c;
    c.n_max = n_max;
    if (!R.recurrent()) throw ConfigError("invalid-law", "chi needs a recurrent R");
    if (!R.tail() || R.tail()->c == 0.0) {
        c.divergent = true;
        c.value = kInf;
        c.tail_bound = kInf;
        c.reason = "finite mean: P(S_n = *) tends to a positive limit";
        return c;
    }
    const double a = R.tail()->a;
    if (a >= 0.5) {
        c.divergent = true;
        c.value = kInf;
        c.tail_bound = kInf;
        c.reason = "tail exponent a >= 1/2: P(S_n = *)^2 is not summable";
        return c;
    }
    if (n_max < 64) throw ConfigError("bad-argument", "chi needs n_max >= 64");
    const auto u = renewal_mass(R, n_max);
    double s = 0.0;
    for (std::size_t k = 1; k <= n_max; ++k) s += u[k] * u[k];
    // u(n) ~ C n^{a-1}: bound the rest with the largest C seen on the last half
    double C2 = 0.0, C2_quarter = 0.0;
    for (std::size_t k = n_max / 2; k <= n_max; ++k)
        C2 = std::max(C2, u[k] * u[k] * std::pow(double(k), 2.0 - 2.0 * a));
    for (std::size_t k = n_max / 4; k <= n_max / 2; ++k)
        C2_quarter = std::max(C2_quarter, u[k] * u[k] * std::pow(double(k), 2.0 - 2.0 * a));
    // margin for the remaining drift of C, measured between the last two halves
    const double drift = std::max(0.0, C2 - C2_quarter) / std::max(C2, 1e-300);
    const double tail_int = std::pow(double(n_max), 2.0 * a - 1.0) / (1.0 - 2.0 * a);
    c.value = s;
    c.tail_bound = (1.0 + 4.0 * drift + 1e-3) * C2 * tail_int / double(R.period());
    return c;
}

RelevanceBounds relevance_bounds(const RandomPinningSpec& spec, std::size_t chi_n_max) {
    spec.validate();
    RelevanceBounds b;
    const auto& mu = spec.mu0;
    if (spec.a == 0.0) {
        b.beta_c_star = kInf;
        b.beta_c_star_star = kInf;
        b.chi = kInf;
        b.note = "a = 0: beta_c is infinite for every disorder law";
        return b;
    }
    const Chi c = chi(spec.R, chi_n_max);
    b.chi = c.divergent ? kInf : c.value + c.tail_bound;
    auto ratio = [&](double beta) { return mu.logM(2.0 * beta) - 2.0 * mu.logM(beta); };
    if (c.divergent) {
        b.beta_c_star = 0.0;
        b.note = "chi diverges: no second-moment bound, beta_c* set to 0";
    } else {
        // chi with its tail bound is an over-estimate, so beta_c* stays a lower bound
        const double target = std::log1p(1.0 / b.chi);
        double hi = 1.0;
        while (ratio(hi) < target && hi < 1e3) hi *= 2.0;
        b.beta_c_star = ratio(hi) < target ? kInf : solve_monotone(ratio, target, 0.0, hi, 1e-13);
    }
    b.h_R = spec.R.entropy();
    auto rel_entropy = [&](double beta) { return beta * mu.dlogM(beta) - mu.logM(beta); };
    double hi = 1.0;
    while (rel_entropy(hi) <= b.h_R && hi < 1e3) hi *= 2.0;
    b.beta_c_star_star = rel_entropy(hi) <= b.h_R ? kInf : solve_monotone(rel_entropy, b.h_R, 0.0, hi, 1e-13);
    return b;
}

std::string to_string(Harris h) {
    switch (h) {
        case Harris::irrelevant_small_beta: return "irrelevant_small_beta";
        case Harris::relevant_all_beta: return "relevant_all_beta";
        default: return "marginal";
    }
}

Harris harris_classify(const RandomPinningSpec& spec) {
    if (spec.a == 0.5) return Harris::marginal;
    if (spec.a > 0.5) return Harris::relevant_all_beta;
    return Harris::irrelevant_small_beta;
}

}  // namespace polylab::randpin
