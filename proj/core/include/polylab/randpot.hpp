#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "polylab/core.hpp"
#include "polylab/rng.hpp"

namespace polylab::randpot {

// Lazily generated environment omega(i, x) on the slab 1 <= i <= n, |x|_1 <= i.
// Each site is a pure function of (master, i, x). Slabs after `resample_after`
// are drawn from `resample_master` instead, which lets a test redraw the last
// slabs while keeping the earlier ones.
struct EnvSlab {
    int d = 1;
    int n = 0;
    DisorderLaw mu0 = DisorderLaw::bernoulli();
    std::uint64_t master = 42;
    int resample_after = std::numeric_limits<int>::max();
    std::uint64_t resample_master = 0;

    static std::uint64_t key(int i, const std::array<int, 3>& x) {
        // 16 bits per coordinate, offset to stay positive
        return (std::uint64_t(std::uint16_t(i)) << 48) | (std::uint64_t(std::uint16_t(x[0] + 32768)) << 32) |
               (std::uint64_t(std::uint16_t(x[1] + 32768)) << 16) | std::uint64_t(std::uint16_t(x[2] + 32768));
    }
    static std::uint64_t slab_hash(std::uint64_t m) { return splitmix64(m + 0x2545F4914F6CDD1DULL); }
    static std::uint64_t word(std::uint64_t hm, std::uint64_t k) {
        return splitmix64(hm + k * 0x9E3779B97F4A7C15ULL);
    }
    std::uint64_t slab_master(int i) const { return i > resample_after ? resample_master : master; }
    // Bernoulli sites take one bit each from a word shared by 64 neighbours along the last axis
    double omega(int i, const std::array<int, 3>& x) const {
        const std::uint64_t hm = slab_hash(slab_master(i)), k = key(i, x);
        if (mu0.kind() == DisorderLaw::Kind::BernoulliPM1) return (word(hm, k >> 6) >> (k & 63)) & 1 ? 1.0 : -1.0;
        return mu0.from_bits(word(hm, 2 * k), word(hm, 2 * k + 1));
    }
};

struct Deltas {
    double delta1 = 0.0;  // log M(2 beta) - 2 log M(beta)
    double delta2 = 0.0;  // beta (log M)'(beta) - log M(beta)
};
Deltas deltas(const DisorderLaw& mu0, double beta);

struct PiEstimate {
    double estimate = 1.0;
    double stderr_ = 0.0;
    double lo = 1.0, hi = 1.0;  // estimate -/+ 3 stderr, clipped to [0, 1]
    double raw = 1.0;           // fraction of pairs that met by the horizon
    int d = 1;
    std::int64_t horizon = 0;
    std::int64_t replicas = 0;
    bool exact = false;  // recurrence shortcut for d = 1, 2
};
// Probability that two independent directed walks ever meet. For d >= 3 the
// meeting-time cdf is fitted as pi - c t^{-1/2} over the last decade of t.
PiEstimate pi_d(int d, std::int64_t horizon, std::int64_t replicas, std::uint64_t seed = 42,
                int threads = 1);

struct BetaBounds {
    double beta_c1 = 0.0, beta_c1_lo = 0.0, beta_c1_hi = 0.0;
    double beta_c2 = 0.0;  // +inf when sup Delta2 <= log 2d
    PiEstimate pi;
};
// d = 1, 2 gives (0, 0), strong disorder at every beta > 0; pi is ignored there
BetaBounds beta_bounds(const DisorderLaw& mu0, int d, const PiEstimate& pi = {});

// One replica of the normalised forward recursion.
struct ReplicaTrace {
    std::vector<double> logY;    // 0..n
    std::vector<double> maxend;  // max_x P_i(S_i = x)
    std::vector<double> msd;     // E_i |S_i|^2
};
ReplicaTrace trace_replica(const EnvSlab& env, double beta);

struct YStats {
    int d = 1;
    int n = 0;
    double beta = 0.0;
    std::vector<double> meanY, stderrY, medianY;  // per time 0..n
    std::vector<double> maxend, msd_over_n;       // replica averages
    std::vector<double> final_Y;                  // Y_n per replica
    double frac_below_half = 0.0, frac_below_tenth = 0.0;  // at time n
};
// Throws ConfigError(size-exceeded) when (2n+1)^d n > 1e9.
YStats exact_Y(const DisorderLaw& mu0, double beta, int d, int n, int replicas,
               std::uint64_t seed = 42, int threads = 1);

struct EndpointStats {
    std::vector<int> n_grid;
    std::vector<double> maxend, maxend_stderr;
    std::vector<double> msd_over_n;
    double nu = 0.0;  // fitted from E|S_n|^2 ~ n^{2 nu}
};
EndpointStats endpoint_stats(const DisorderLaw& mu0, double beta, int d, const std::vector<int>& n_grid,
                             int replicas, std::uint64_t seed = 42, int threads = 1);

}  // namespace polylab::randpot
