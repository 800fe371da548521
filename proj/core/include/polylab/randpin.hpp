#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polylab/core.hpp"

namespace polylab::randpin {

struct RandomPinningSpec {
    TailedLaw R;
    DisorderLaw mu0 = DisorderLaw::bernoulli();
    // tail exponent; +inf for laws without a power tail. May be overridden
    // for laws the class cannot represent (a = 0, log tails).
    double a = 0.0;

    static RandomPinningSpec make(TailedLaw R, DisorderLaw mu0);
    void validate() const;
};

// log M(beta)
double annealed_hc(const DisorderLaw& mu0, double beta);

// n^-(1+a) ~ sum_j weight_j e^{-rate_j n} for n in [n_lo, n_hi]
struct ExpSum {
    std::vector<double> rate, weight;
    double max_rel_err = 0.0;
    double eval(double n) const;
};
ExpSum power_as_exp_sum(double a, double n_lo, double n_hi);

struct QuenchedPartition {
    std::vector<double> logZstar;  // log Z*_m, m = 0..n; -inf off the lattice of the period
    double logZ = 0.0;             // endpoint-free log Z_n
};
// Hamiltonian sum_{i=0}^{n-1} (beta w_i - h) 1{S_i = *}; omega needs n letters
QuenchedPartition quenched_logZ(const TailedLaw& R, double beta, double h,
                                const std::vector<double>& omega, std::size_t n);
// endpoint-free log Z_m for m = at, from a computed partition
double free_logZ_at(const TailedLaw& R, double beta, double h, const std::vector<double>& omega,
                    const QuenchedPartition& qp, std::size_t at);

std::vector<double> disorder_sequence(const DisorderLaw& mu0, std::size_t n, Stream& rng);

struct QuenchedEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    int replicas = 0;
    std::size_t n = 0;
    SeedSpec seed;
};

struct QuenchedDiagnostics {
    // across-replica spread of log Z_m / m at m = n/2 and m = n
    double sd_half = 0.0, sd_full = 0.0;
    bool concentration_ok = false;
    // E log Z*_{2m} - 2 E log Z*_m with its standard error
    std::size_t half = 0;
    double superadd_gap = 0.0, superadd_err = 0.0;
    bool superadd_ok = false;
    double min_f = 0.0;
    // f-hat of each replica stays above min(0, (beta w_0 - h + log P(tau > n)) / n)
    double finite_size_floor = 0.0;
    bool nonneg_ok = false;
    double annealed = 0.0;
    bool jensen_ok = false;
};

struct QuenchedResult {
    QuenchedEstimate est;
    QuenchedDiagnostics diag;
    std::vector<double> per_replica;
};
QuenchedResult quenched_f(const RandomPinningSpec& spec, double beta, double h, std::size_t n,
                          int replicas, std::uint64_t seed = 42, int threads = 1);

// h_c^que bracket: lo is certified localized (f-hat > 3 stderr), hi is not
struct HcInterval {
    double lo = 0.0, hi = 0.0;
    int steps = 0;
};
HcInterval hc_que_interval(const RandomPinningSpec& spec, double beta, std::size_t n, int replicas,
                           std::uint64_t seed = 42, int threads = 1, int steps = 8);

struct Chi {
    double value = 0.0;       // head sum up to n_max, +inf when divergent
    double tail_bound = 0.0;  // over-estimate of the neglected sum
    bool divergent = false;
    std::string reason;
    std::size_t n_max = 0;
};
Chi chi(const TailedLaw& R, std::size_t n_max);

struct RelevanceBounds {
    double beta_c_star = 0.0;       // +inf when the ratio never reaches 1 + 1/chi
    double beta_c_star_star = 0.0;  // +inf when the entropy never exceeds h(R)
    double chi = 0.0;
    double h_R = 0.0;
    std::string note;
};
RelevanceBounds relevance_bounds(const RandomPinningSpec& spec, std::size_t chi_n_max = 1 << 13);

enum class Harris { irrelevant_small_beta, relevant_all_beta, marginal };
std::string to_string(Harris h);
Harris harris_classify(const RandomPinningSpec& spec);

}  // namespace polylab::randpin
