#pragma once

#include <cstdint>
#include <vector>

#include "polylab/core.hpp"
#include "polylab/randpin.hpp"

namespace polylab::copoly {

struct CopolySpec {
    DisorderLaw mu0 = DisorderLaw::bernoulli();
    // two-sided return law; each excursion lies above or below with probability 1/2
    TailedLaw R = TailedLaw::srw(256);
};

struct HcBounds {
    double lower = 0.0;  // rare-stretch bound (3/4beta) log M(4beta/3)
    double upper = 0.0;  // annealed bound (1/2beta) log M(2beta)
};
HcBounds hc_bounds(double beta, const DisorderLaw& mu0 = DisorderLaw::bernoulli());

// Sigma(delta) = sup_{lambda > 0} [lambda delta - log M(-lambda)], lambda in [0, 50]
double cramer_rate(const DisorderLaw& mu0, double delta);
// |3/4 log M(4beta/3) - sup_delta [beta delta - 3/4 Sigma(delta)]|
double duality_check(const DisorderLaw& mu0, double beta);

struct RareStretchPlan {
    int l = 2;
    double delta = 1.0;
    double q = 0.0;  // P(block sum <= -delta l)
    double p = 0.0;  // (1/l) q / (1 + q)
    static RareStretchPlan make(const DisorderLaw& mu0, int l, double delta);
};
// p [2 log C - 3/2 log(1/p - l) - 3/2 log l + 2 beta (delta - h) l]
double rare_stretch_value(const CopolySpec& spec, double beta, double h, int l, double delta,
                          double C = 0.3);
// min over even n <= n_max of R1(n) n^{3/2}, R1 the one-sided SRW excursion law
double srw_excursion_constant(std::size_t n_max);

struct TiltedPartition {
    std::vector<double> logZstar;  // m = 0..n
    double logZ = 0.0;             // last excursion left open
};
// omega[i - 1] holds omega_i
TiltedPartition tilted_logZ(const TailedLaw& R, double beta, double h,
                            const std::vector<double>& omega, std::size_t n);

struct QuenchedG {
    randpin::QuenchedEstimate est;
    std::vector<double> per_replica;
    double constrained_mean = 0.0;
    double min_g = 0.0;
    // each replica stays above min(0, log(P(tau > n) / 2) / n)
    double finite_size_floor = 0.0;
    bool nonneg_ok = false;
    bool localized = false;  // mean > 3 stderr
};
QuenchedG quenched_g(const CopolySpec& spec, double beta, double h, std::size_t n, int replicas,
                     std::uint64_t seed = 42, int threads = 1);

struct SlopeRow {
    double beta = 0.0;
    double lower_over_beta = 0.0, upper_over_beta = 0.0;
    double mc_lo_over_beta = 0.0, mc_hi_over_beta = 0.0;
    bool contained = false;  // MC interval inside [2/3 * 0.95, 1.05]
};
// bisection on [lower, upper] with the 3-stderr rule
std::vector<SlopeRow> slope_estimate(const CopolySpec& spec, const std::vector<double>& beta_grid,
                                     std::size_t n, int replicas, std::uint64_t seed = 42,
                                     int threads = 1, int steps = 6);
// (1/(2 K beta)) log cosh(2 K beta)
double slope_approximation(double beta, double K = 0.83);

struct SmoothingCurves {
    std::vector<double> delta;
    std::vector<double> three_halves_sigma;  // 3/2 Sigma(delta)
    std::vector<double> quarter_delta2;      // delta^2 / 4
    std::vector<double> envelope;            // pointwise min
};
SmoothingCurves smoothing_bound(const DisorderLaw& mu0, const std::vector<double>& delta_grid);

}  // namespace polylab::copoly
