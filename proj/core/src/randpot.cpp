#include "polylab/randpot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polylab/error.hpp"

namespace polylab::randpot {

Deltas deltas(const DisorderLaw& mu0, double beta) {
    if (!(beta >= 0.0)) throw ConfigError("domain", "beta must be >= 0");
    if (beta == 0.0) return {0.0, 0.0};
    const double L = mu0.logM(beta);
    return {mu0.logM(2.0 * beta) - 2.0 * L, beta * mu0.dlogM(beta) - L};
}

PiEstimate pi_d(int d, std::int64_t horizon, std::int64_t replicas, std::uint64_t seed, int threads) {
    if (d < 1 || d > 8) throw ConfigError("domain", "pi_d needs 1 <= d <= 8");
    PiEstimate out;
    out.d = d;
    out.horizon = horizon;
    out.replicas = replicas;
    if (d <= 2) {
        out.exact = true;
        return out;
    }
    if (horizon < 100) throw ConfigError("domain", "horizon must be >= 100");
    if (replicas < 100) throw ConfigError("domain", "replicas must be >= 100");

    // Least-squares intercept of F(t) = pi - c t^{-(d-2)/2} over t in [H/10, H].
    // The intercept is linear in the indicators 1{T <= t}, so each replica
    // contributes phi(T) = sum_{t >= T} a_t and the estimate is a plain mean.
    const std::int64_t H = horizon, t0 = std::max<std::int64_t>(1, H / 10);
    const double ex = 0.5 * (d - 2);
    const std::size_t npts = std::size_t(H - t0 + 1);
    double xbar = 0.0;
    for (std::int64_t t = t0; t <= H; ++t) xbar += std::pow(double(t), -ex);
    xbar /= double(npts);
    double sxx = 0.0;
    for (std::int64_t t = t0; t <= H; ++t) sxx += std::pow(std::pow(double(t), -ex) - xbar, 2);
    std::vector<double> phi(std::size_t(H) + 2, 0.0);  // phi[T], T = H + 1 means no meeting
    for (std::int64_t t = H; t >= 1; --t) {
        double a = 0.0;
        if (t >= t0) a = 1.0 / double(npts) - xbar * (std::pow(double(t), -ex) - xbar) / sxx;
        phi[std::size_t(t)] = phi[std::size_t(t) + 1] + a;
    }

    // difference walk: each time step adds e - e' for independent uniform unit vectors
    const int k2 = 2 * d, combos = k2 * k2;
    std::vector<std::array<int, 4>> moves(static_cast<std::size_t>(combos));  // (axis, sign, axis', sign')
    for (int c = 0; c < combos; ++c) {
        const int e = c / k2, f = c % k2;
        moves[std::size_t(c)] = {e / 2, (e % 2) ? 1 : -1, f / 2, (f % 2) ? -1 : 1};
    }
    std::vector<std::int64_t> T(static_cast<std::size_t>(replicas));
    const SeedSpec ss{seed};
    parallel_for(std::size_t(replicas), threads, [&](std::size_t r) {
        Stream s = ss.stream(r);
        std::array<int, 8> D{};
        int nnz = 0;
        auto bump = [&](int k, int v) {
            const int old = D[std::size_t(k)];
            D[std::size_t(k)] = old + v;
            nnz += (old == 0) - (old + v == 0);
        };
        std::uint64_t word = 0;
        int left = 0;
        std::int64_t hit = H + 1;
        for (std::int64_t t = 1; t <= H; ++t) {
            if (left == 0) {
                word = s();
                left = 2;
            }
            const std::uint64_t half = word & 0xFFFFFFFFULL;
            word >>= 32;
            --left;
            const auto& m = moves[std::size_t((half * std::uint64_t(combos)) >> 32)];
            bump(m[0], m[1]);
            bump(m[2], m[3]);
            if (nnz == 0) {
                hit = t;
                break;
            }
        }
        T[r] = hit;
    });
    std::vector<double> vals(T.size());
    std::int64_t met = 0;
    for (std::size_t r = 0; r < T.size(); ++r) {
        vals[r] = phi[std::size_t(T[r])];
        met += T[r] <= H;
    }
    const auto me = mean_stderr(vals);
    out.estimate = me.mean;
    out.stderr_ = me.stderr_;
    out.lo = std::clamp(me.mean - 3.0 * me.stderr_, 0.0, 1.0);
    out.hi = std::clamp(me.mean + 3.0 * me.stderr_, 0.0, 1.0);
    out.raw = double(met) / double(replicas);
    return out;
}

namespace {

// beta at which an increasing curve crosses target; +inf if it never does
double crossing(const std::function<double(double)>& f, double target) {
    double hi = 1.0;
    while (f(hi) <= target) {
        hi *= 2.0;
        if (hi > 1e4) return HUGE_VAL;
    }
    return solve_monotone(f, target, 0.0, hi, 1e-13);
}

}  // namespace

BetaBounds beta_bounds(const DisorderLaw& mu0, int d, const PiEstimate& pi) {
    if (d < 1) throw ConfigError("domain", "d must be >= 1");
    BetaBounds b;
    b.pi = pi;
    if (d <= 2) return b;
    if (pi.d != d || pi.exact || !(pi.estimate > 0.0 && pi.estimate < 1.0))
        throw ConfigError("domain", "beta_bounds needs a Monte Carlo pi_d estimate for this d");
    auto d1 = [&](double x) { return deltas(mu0, x).delta1; };
    auto d2 = [&](double x) { return deltas(mu0, x).delta2; };
    b.beta_c1 = crossing(d1, std::log(1.0 / pi.estimate));
    b.beta_c1_lo = pi.hi < 1.0 ? crossing(d1, std::log(1.0 / pi.hi)) : 0.0;
    b.beta_c1_hi = pi.lo > 0.0 ? crossing(d1, std::log(1.0 / pi.lo)) : HUGE_VAL;
    b.beta_c2 = crossing(d2, std::log(2.0 * d));
    return b;
}

namespace {

struct Grid {
    int d, n, L, o;
    std::size_t s0, s1, s2;
    Grid(int d_, int n_) : d(d_), n(n_), L(2 * n_ + 3), o(n_ + 1) {
        s2 = d >= 3 ? 1 : 0;
        s1 = d >= 3 ? std::size_t(L) : (d == 2 ? 1 : 0);
        s0 = d >= 3 ? std::size_t(L) * L : (d == 2 ? std::size_t(L) : 1);
    }
    std::size_t size() const { return std::size_t(std::pow(double(L), d)); }
    std::size_t idx(int a, int b, int c) const {
        return std::size_t(a + o) * s0 + (d >= 2 ? std::size_t(b + o) * s1 : 0) + (d >= 3 ? std::size_t(c + o) : 0);
    }
    // sites with |x|_1 <= i and parity i
    template <class F>
    void diamond(int i, F&& f) const {
        if (d == 1) {
            for (int a = -i; a <= i; a += 2) f(a, 0, 0);
        } else if (d == 2) {
            for (int a = -i; a <= i; ++a) {
                const int r = i - std::abs(a);
                for (int b = -r; b <= r; b += 2) f(a, b, 0);
            }
        } else {
            for (int a = -i; a <= i; ++a) {
                const int r0 = i - std::abs(a);
                for (int b = -r0; b <= r0; ++b) {
                    const int r1 = r0 - std::abs(b);
                    for (int c = -r1; c <= r1; c += 2) f(a, b, c);
                }
            }
        }
    }
};

void check_size(int d, int n) {
    if (d < 1 || d > 3) throw ConfigError("domain", "exact_Y supports d in {1, 2, 3}");
    if (n < 1) throw ConfigError("domain", "n must be >= 1");
    if (std::pow(2.0 * n + 1.0, d) * n > 1e9)
        throw ConfigError("size-exceeded", "(2n+1)^d n = " + std::to_string(std::pow(2.0 * n + 1.0, d) * n) + " > 1e9");
}

}  // namespace

ReplicaTrace trace_replica(const EnvSlab& env, double beta) {
    check_size(env.d, env.n);
    const Grid g(env.d, env.n);
    // parity-i sites are written from parity-(i-1) sites, so one array holds both
    std::vector<double> w(g.size(), 0.0);
    w[g.idx(0, 0, 0)] = 1.0;
    ReplicaTrace tr;
    tr.logY.assign(std::size_t(env.n) + 1, 0.0);
    tr.maxend.assign(std::size_t(env.n) + 1, 1.0);
    tr.msd.assign(std::size_t(env.n) + 1, 0.0);

    const double logM = env.mu0.logM(beta);
    const bool bern = env.mu0.kind() == DisorderLaw::Kind::BernoulliPM1;
    const double wp = std::exp(beta - logM), wm = std::exp(-beta - logM);
    const std::size_t nb = std::size_t(2 * env.d);
    double prev_total = 1.0;
    for (int i = 1; i <= env.n; ++i) {
        const std::uint64_t hm = EnvSlab::slab_hash(env.slab_master(i));
        std::uint64_t group = ~0ULL, bits = 0;
        const double c = 1.0 / (double(nb) * prev_total);
        double total = 0.0, mx = 0.0, m2 = 0.0;
        g.diamond(i, [&](int a, int b, int cc) {
            const std::size_t k = g.idx(a, b, cc);
            double s = w[k - g.s0] + w[k + g.s0];
            if (env.d >= 2) s += w[k - g.s1] + w[k + g.s1];
            if (env.d >= 3) s += w[k - g.s2] + w[k + g.s2];
            double f;
            const std::uint64_t key = EnvSlab::key(i, {a, b, cc});
            if (bern) {
                if ((key >> 6) != group) {
                    group = key >> 6;
                    bits = EnvSlab::word(hm, group);
                }
                f = (bits >> (key & 63)) & 1 ? wp : wm;
            } else {
                f = std::exp(beta * env.mu0.from_bits(EnvSlab::word(hm, 2 * key), EnvSlab::word(hm, 2 * key + 1)) - logM);
            }
            const double v = c * s * f;
            w[k] = v;
            total += v;
            mx = std::max(mx, v);
            m2 += v * double(a * a + b * b + cc * cc);
        });
        if (!(total > 0.0) || !std::isfinite(total))
            throw NumericError("underflow", "slab total left the double range at i = " + std::to_string(i));
        tr.logY[std::size_t(i)] = tr.logY[std::size_t(i) - 1] + std::log(total);
        tr.maxend[std::size_t(i)] = mx / total;
        tr.msd[std::size_t(i)] = m2 / total;
        prev_total = total;
    }
    return tr;
}

namespace {

std::vector<ReplicaTrace> run_replicas(const DisorderLaw& mu0, double beta, int d, int n, int replicas,
                                       std::uint64_t seed, int threads) {
    check_size(d, n);
    if (replicas < 2) throw ConfigError("domain", "need at least 2 replicas");
    if (!(beta >= 0.0)) throw ConfigError("domain", "beta must be >= 0");
    std::vector<ReplicaTrace> out(static_cast<std::size_t>(replicas));
    const SeedSpec ss{seed};
    parallel_for(out.size(), threads, [&](std::size_t r) {
        EnvSlab env;
        env.d = d;
        env.n = n;
        env.mu0 = mu0;
        env.master = ss.stream(r)();
        out[r] = trace_replica(env, beta);
    });
    return out;
}

double median(std::vector<double> v) {
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(m), v.end());
    if (v.size() % 2) return v[m];
    const double hi = v[m];
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + std::ptrdiff_t(m)));
}

}  // namespace

YStats exact_Y(const DisorderLaw& mu0, double beta, int d, int n, int replicas, std::uint64_t seed,
               int threads) {
    const auto reps = run_replicas(mu0, beta, d, n, replicas, seed, threads);
    YStats st;
    st.d = d;
    st.n = n;
    st.beta = beta;
    std::vector<double> col(reps.size()), me(reps.size()), ms(reps.size());
    for (int t = 0; t <= n; ++t) {
        for (std::size_t r = 0; r < reps.size(); ++r) {
            col[r] = std::exp(reps[r].logY[std::size_t(t)]);
            me[r] = reps[r].maxend[std::size_t(t)];
            ms[r] = reps[r].msd[std::size_t(t)];
        }
        const auto m = mean_stderr(col);
        st.meanY.push_back(m.mean);
        st.stderrY.push_back(m.stderr_);
        st.medianY.push_back(median(col));
        st.maxend.push_back(mean_stderr(me).mean);
        st.msd_over_n.push_back(t == 0 ? 0.0 : mean_stderr(ms).mean / t);
    }
    st.final_Y = col;
    for (double y : col) {
        st.frac_below_half += y < 0.5;
        st.frac_below_tenth += y < 0.1;
    }
    st.frac_below_half /= double(col.size());
    st.frac_below_tenth /= double(col.size());
    return st;
}

EndpointStats endpoint_stats(const DisorderLaw& mu0, double beta, int d, const std::vector<int>& n_grid,
                             int replicas, std::uint64_t seed, int threads) {
    if (n_grid.empty()) throw ConfigError("domain", "empty n grid");
    for (std::size_t k = 0; k < n_grid.size(); ++k)
        if (n_grid[k] < 1 || (k > 0 && n_grid[k] <= n_grid[k - 1]))
            throw ConfigError("domain", "n grid must be positive and increasing");
    const auto reps = run_replicas(mu0, beta, d, n_grid.back(), replicas, seed, threads);
    EndpointStats es;
    es.n_grid = n_grid;
    std::vector<double> me(reps.size()), ms(reps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int t : n_grid) {
        for (std::size_t r = 0; r < reps.size(); ++r) {
            me[r] = reps[r].maxend[std::size_t(t)];
            ms[r] = reps[r].msd[std::size_t(t)];
        }
        const auto a = mean_stderr(me), b = mean_stderr(ms);
        es.maxend.push_back(a.mean);
        es.maxend_stderr.push_back(a.stderr_);
        es.msd_over_n.push_back(b.mean / t);
        const double x = std::log(double(t)), y = std::log(b.mean);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = double(n_grid.size());
    es.nu = k > 1 ? 0.5 * (k * sxy - sx * sy) / (k * sxx - sx * sx) : 0.5;
    return es;
}

}  // namespace polylab::randpot
