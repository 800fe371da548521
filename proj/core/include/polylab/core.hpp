#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polylab/error.hpp"
#include "polylab/rng.hpp"

namespace polylab {

// p(n) = c * n^-(1+a) beyond the head
struct PowerTail {
    double c = 0.0;
    double a = 0.0;
};

// Probability law on {1, 2, ...} with an explicit head p(1..N) and an
// optional pure power tail. Laws of period 2 only charge even integers.
class TailedLaw {
public:
    TailedLaw() = default;
    // `recurrent` asks for total mass 1 (checked to 1e-12); otherwise mass <= 1.
    TailedLaw(std::vector<double> head, std::optional<PowerTail> tail, int period = 1,
              bool recurrent = true);

    // Tail amplitude chosen so that the total mass is exactly `mass`.
    static TailedLaw with_fitted_tail(std::vector<double> head, double a, int period,
                                      double mass = 1.0);
    // First return law of simple random walk to 0 (period 2, a = 1/2).
    static TailedLaw srw(std::size_t n_head = 20000);
    // p(n) = n^-(1+a) / zeta(1+a)
    static TailedLaw zeta_law(double a, std::size_t n_head = 10000);
    static TailedLaw point_mass(std::size_t k);
    static TailedLaw geometric_half(std::size_t n_head = 1100);

    double pmf(std::int64_t n) const;
    // p(1..n_max), index 0 unused
    std::vector<double> table(std::size_t n_max) const;

    const std::vector<double>& head() const { return head_; }
    std::size_t head_size() const { return head_.size(); }
    const std::optional<PowerTail>& tail() const { return tail_; }
    int period() const { return period_; }
    bool recurrent() const { return recurrent_; }

    double mass() const { return head_mass_ + tail_mass_; }
    double head_mass() const { return head_mass_; }
    double tail_mass() const { return tail_mass_; }
    // estimate of the neglected Euler-Maclaurin remainder in tail sums
    double tail_error() const { return tail_err_; }

    // sum_n p(n) (1 - e^{-r n}), accurate for tiny r
    double one_minus_phi(double r) const;
    // phi(e^{-r}) = sum_n p(n) e^{-r n}
    double phi_exp(double r) const;
    double log_phi_exp(double r) const;
    // sum_n n p(n) e^{-r n}; +inf for r = 0 when the mean is infinite
    double first_moment_exp(double r) const;
    double mean() const { return first_moment_exp(0.0); }
    // -sum p log p
    double entropy() const;
    // P(tau > n) = mass - sum_{k<=n} p(k)
    double survival(std::int64_t n) const;
    std::vector<double> survival_table(std::size_t n_max) const;

    TailedLaw scaled(double s) const;

private:
    void finalize();
    std::int64_t first_tail_k() const;  // tail covers n = period * k, k >= this

    std::vector<double> head_;
    std::optional<PowerTail> tail_;
    int period_ = 1;
    bool recurrent_ = true;
    double head_mass_ = 0.0;
    double tail_mass_ = 0.0;
    double tail_err_ = 0.0;
};

// Upper incomplete gamma Gamma(s, x) for any real s and x > 0.
double upper_gamma(double s, double x);

// Mean 0, variance 1 disorder letters.
class DisorderLaw {
public:
    enum class Kind { BernoulliPM1, StdGaussian, FiniteTable };

    static DisorderLaw bernoulli() { return DisorderLaw(Kind::BernoulliPM1); }
    static DisorderLaw gaussian() { return DisorderLaw(Kind::StdGaussian); }
    static DisorderLaw table(std::vector<double> values, std::vector<double> probs);
    static DisorderLaw from_name(const std::string& name);

    Kind kind() const { return kind_; }
    std::string name() const;
    double logM(double beta) const;
    double dlogM(double beta) const;
    double sample(Stream& s) const;
    // map one uniform 64-bit word to a letter (inverse cdf); Gaussian uses two words
    double from_bits(std::uint64_t w0, std::uint64_t w1) const;
    // essential sup of -omega (+inf when unbounded)
    double sup_neg() const;
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probs() const { return probs_; }

private:
    explicit DisorderLaw(Kind k) : kind_(k) {}
    Kind kind_;
    std::vector<double> values_;
    std::vector<double> probs_;
};

struct SampledCurve {
    std::vector<double> xs;
    std::vector<double> ys;
    std::map<std::string, std::string> meta;

    std::size_t size() const { return xs.size(); }
    void validate() const;
};

// Evenly spaced grid including both endpoints.
std::vector<double> linspace(double start, double stop, std::size_t count);

// Root of a nondecreasing f at `target` inside [lo, hi]. Bisection with
// Illinois secant steps, stops when the bracket is narrower than tol.
double solve_monotone(const std::function<double(double)>& f, double target, double lo,
                      double hi, double tol = 1e-12);

// u(0) = 1, u(n) = sum_k R(k) u(n-k)
std::vector<double> renewal_mass(const TailedLaw& R, std::size_t n_max);
std::vector<double> renewal_mass(const std::vector<double>& Rtab, std::size_t n_max);

// Inverse of renewal_mass. Returns R(0..N) with R(0) = 0.
std::vector<double> first_return_from_occupation(const std::vector<double>& u);

struct RadiusEstimate {
    double radius = 0.0;
    double uncertainty = 0.0;
    std::vector<double> extrapolants;  // growth-rate estimates mu_n
};
// coeffs[0] is z_1
RadiusEstimate estimate_radius(const std::vector<double>& coeffs);

// sup_{x in [lo, hi]} [s x - f(x)] for convex f
double legendre_sup(const std::function<double(double)>& f, double s, double lo, double hi,
                    double tol = 1e-10);

SampledCurve central_diff(const SampledCurve& curve);

// Ordered parallel map: results land at their own index so the output does
// not depend on the number of workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);
int default_threads();

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0;
    double stdev = 0.0;
};
MeanErr mean_stderr(const std::vector<double>& v);

}  // namespace polylab
