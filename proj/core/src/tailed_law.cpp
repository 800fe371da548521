#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "polylab/core.hpp"

namespace polylab {

namespace {

constexpr std::int64_t kExplicitUntil = 1000;

// sum_{k >= K0} f(k): explicit up to kExplicitUntil, then midpoint
// Euler-Maclaurin with one derivative correction.
template <class F, class I, class D>
double em_tail(std::int64_t K0, F f, I integral, D deriv) {
    const std::int64_t Kx = std::max<std::int64_t>(K0, kExplicitUntil);
    double s = 0.0;
    for (std::int64_t k = K0; k < Kx; ++k) s += f(static_cast<double>(k));
    const double U = static_cast<double>(Kx) - 0.5;
    return s + integral(U) + deriv(U) / 24.0;
}

bool is_integer(double a) { return std::abs(a - std::round(a)) < 1e-14; }

// J(V) = int_V^inf u^{-1-a} (1 - e^{-u}) du
double J_int(double a, double V) {
    if (V >= 1.0) return std::pow(V, -a) / a - upper_gamma(-a, V);
    double s = 1.0 / a - upper_gamma(-a, 1.0);
    const double logV = std::log(V);
    double fact = 1.0;
    for (int j = 1; j < 60; ++j) {
        fact *= j;
        const double e = j - a;
        const double piece = std::abs(e) < 1e-14 ? -logV : -std::expm1(e * logV) / e;
        const double term = ((j % 2) ? 1.0 : -1.0) * piece / fact;
        s += term;
        if (std::abs(term) < 1e-18 * std::abs(s) && j > 2) break;
    }
    return s;
}

// sum over the tail indices of n^-(1+a), i.e. the tail mass for c = 1
double unit_tail_mass(std::size_t head_size, double a, int period) {
    const double al = 1.0 + a;
    const std::int64_t K0 = static_cast<std::int64_t>(head_size) / period + 1;
    return std::pow(double(period), -al) *
           em_tail(
               K0, [&](double k) { return std::pow(k, -al); },
               [&](double U) { return std::pow(U, -a) / a; },
               [&](double U) { return -al * std::pow(U, -al - 1.0); });
}

}  // namespace

double upper_gamma(double s, double x) {
    if (!(x > 0.0)) throw NumericError("domain", "upper_gamma needs x > 0");
    if (s > 0.0) return boost::math::tgamma(s, x);
    // climb to a positive (or zero) order, then recur downward
    int m = 0;
    double base = s;
    if (is_integer(s)) {
        m = static_cast<int>(std::llround(-s));
        base = 0.0;
    } else {
        m = static_cast<int>(std::ceil(-s));
        base = s + m;
    }
    double g = base == 0.0 ? boost::math::expint(1, x) : boost::math::tgamma(base, x);
    const double lx = std::log(x);
    for (int i = 0; i < m; ++i) {
        const double t = base - 1.0 - i;  // Gamma(t) from Gamma(t+1)
        g = (g - std::exp(t * lx - x)) / t;
    }
    return g;
}

TailedLaw::TailedLaw(std::vector<double> head, std::optional<PowerTail> tail, int period,
                     bool recurrent)
    : head_(std::move(head)), tail_(tail), period_(period), recurrent_(recurrent) {
    if (period_ < 1) throw ConfigError("invalid-law", "period must be >= 1");
    for (std::size_t i = 0; i < head_.size(); ++i) {
        const double p = head_[i];
        if (!(p >= 0.0) || !std::isfinite(p))
            throw ConfigError("invalid-law", "negative or non-finite probability");
        if ((i + 1) % period_ != 0 && p != 0.0)
            throw ConfigError("invalid-law", "mass on an index excluded by the period");
    }
    if (tail_ && (!(tail_->a > 0.0) || !(tail_->c >= 0.0)))
        throw ConfigError("invalid-law", "tail needs a > 0 and c >= 0");
    finalize();
    if (recurrent_ && std::abs(mass() - 1.0) > 1e-12)
        throw ConfigError("invalid-law", "recurrent law must have mass 1");
    if (!recurrent_ && mass() > 1.0 + 1e-12)
        throw ConfigError("invalid-law", "mass exceeds 1");
}

std::int64_t TailedLaw::first_tail_k() const {
    return static_cast<std::int64_t>(head_.size()) / period_ + 1;
}

void TailedLaw::finalize() {
    head_mass_ = 0.0;
    for (double p : head_) head_mass_ += p;
    tail_mass_ = 0.0;
    tail_err_ = 0.0;
    if (!tail_) return;
    const double al = 1.0 + tail_->a;
    const double a = tail_->a;
    const double pref = tail_->c * std::pow(static_cast<double>(period_), -al);
    tail_mass_ = pref * em_tail(
                            first_tail_k(), [&](double k) { return std::pow(k, -al); },
                            [&](double U) { return std::pow(U, -a) / a; },
                            [&](double U) { return -al * std::pow(U, -al - 1.0); });
    const double U = std::max<double>(first_tail_k(), kExplicitUntil) - 0.5;
    tail_err_ = pref * 7.0 / 5760.0 * al * (al + 1.0) * (al + 2.0) * std::pow(U, -al - 3.0);
}

TailedLaw TailedLaw::with_fitted_tail(std::vector<double> head, double a, int period,
                                      double mass) {
    double head_mass = 0.0;
    for (double p : head) head_mass += p;
    const double c = (mass - head_mass) / unit_tail_mass(head.size(), a, period);
    if (!(c >= 0.0)) throw NumericError("invalid-law", "head mass exceeds the requested mass");
    TailedLaw out(std::move(head), PowerTail{c, a}, period, false);
    out.recurrent_ = std::abs(mass - 1.0) < 1e-15;
    if (out.recurrent_ && std::abs(out.mass() - 1.0) > 1e-12)
        throw NumericError("invalid-law", "fitted tail failed to normalize");
    return out;
}

TailedLaw TailedLaw::srw(std::size_t n_head) {
    n_head -= n_head % 2;
    std::vector<double> h(n_head, 0.0);
    double r = 0.5;  // R(2)
    for (std::size_t m = 1; 2 * m <= n_head; ++m) {
        h[2 * m - 1] = r;
        r *= (2.0 * m - 1.0) / (2.0 * (m + 1.0));
    }
    return with_fitted_tail(std::move(h), 0.5, 2, 1.0);
}

TailedLaw TailedLaw::zeta_law(double a, std::size_t n_head) {
    const double z = boost::math::zeta(1.0 + a);
    std::vector<double> h(n_head);
    for (std::size_t n = 1; n <= n_head; ++n) h[n - 1] = std::pow(double(n), -1.0 - a) / z;
    TailedLaw out(std::move(h), PowerTail{1.0 / z, a}, 1, false);
    out.recurrent_ = true;
    if (std::abs(out.mass() - 1.0) > 1e-12)
        throw NumericError("invalid-law", "zeta law does not sum to 1");
    return out;
}

TailedLaw TailedLaw::point_mass(std::size_t k) {
    std::vector<double> h(k, 0.0);
    h[k - 1] = 1.0;
    return TailedLaw(std::move(h), std::nullopt, 1, true);
}

TailedLaw TailedLaw::geometric_half(std::size_t n_head) {
    std::vector<double> h(n_head);
    for (std::size_t n = 1; n <= n_head; ++n) h[n - 1] = std::ldexp(1.0, -static_cast<int>(n));
    return TailedLaw(std::move(h), std::nullopt, 1, true);
}

double TailedLaw::pmf(std::int64_t n) const {
    if (n < 1) return 0.0;
    if (n <= static_cast<std::int64_t>(head_.size())) return head_[n - 1];
    if (!tail_ || n % period_ != 0) return 0.0;
    return tail_->c * std::pow(static_cast<double>(n), -1.0 - tail_->a);
}

std::vector<double> TailedLaw::table(std::size_t n_max) const {
    std::vector<double> t(n_max + 1, 0.0);
    for (std::size_t n = 1; n <= n_max; ++n) t[n] = pmf(static_cast<std::int64_t>(n));
    return t;
}

double TailedLaw::one_minus_phi(double r) const {
    if (r <= 0.0) return 0.0;
    const std::size_t N = head_.size();
    // far from r = 0 there is no cancellation to fear and phi is cheap
    if (r * double(N) > 60.0) return mass() - phi_exp(r);
    double s = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const double p = head_[n - 1];
        if (p != 0.0) s += p * -std::expm1(-r * double(n));
    }
    if (!tail_) return s;
    const double a = tail_->a, al = 1.0 + a;
    const double sp = r * period_;
    const double pref = tail_->c * std::pow(static_cast<double>(period_), -al);
    const double t = em_tail(
        first_tail_k(), [&](double k) { return std::pow(k, -al) * -std::expm1(-sp * k); },
        [&](double U) { return std::pow(sp, a) * J_int(a, sp * U); },
        [&](double U) {
            const double e = std::exp(-sp * U);
            return -al * std::pow(U, -al - 1.0) * -std::expm1(-sp * U) + std::pow(U, -al) * sp * e;
        });
    return s + pref * t;
}

double TailedLaw::phi_exp(double r) const {
    if (r <= 0.0) return mass();
    const std::size_t N = head_.size();
    double s = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const double x = r * double(n);
        if (x > 745.0) break;
        const double p = head_[n - 1];
        if (p != 0.0) s += p * std::exp(-x);
    }
    if (!tail_) return s;
    const double a = tail_->a, al = 1.0 + a;
    const double sp = r * period_;
    const std::int64_t K0 = first_tail_k();
    if (sp * double(K0) > 745.0) return s;
    const double pref = tail_->c * std::pow(static_cast<double>(period_), -al);
    const double t = em_tail(
        K0, [&](double k) { return std::pow(k, -al) * std::exp(-sp * k); },
        [&](double U) { return std::pow(sp, a) * upper_gamma(-a, sp * U); },
        [&](double U) {
            const double e = std::exp(-sp * U);
            return -al * std::pow(U, -al - 1.0) * e - sp * std::pow(U, -al) * e;
        });
    return s + pref * t;
}

double TailedLaw::log_phi_exp(double r) const {
    std::size_t n0 = 0;
    while (n0 < head_.size() && head_[n0] == 0.0) ++n0;
    const double lead = r * double(n0 + 1);
    if (lead < 600.0 || n0 == head_.size()) return std::log(phi_exp(r));
    // huge r: factor out the leading term, the tail is far below it
    double s = 0.0;
    for (std::size_t n = n0 + 1; n <= head_.size(); ++n) {
        const double x = r * double(n) - lead;
        if (x > 745.0) break;
        if (head_[n - 1] != 0.0) s += head_[n - 1] * std::exp(-x);
    }
    return std::log(s) - lead;
}

double TailedLaw::first_moment_exp(double r) const {
    const std::size_t N = head_.size();
    double s = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const double x = r * double(n);
        if (x > 745.0) break;
        const double p = head_[n - 1];
        if (p != 0.0) s += double(n) * p * std::exp(-x);
    }
    if (!tail_) return s;
    const double a = tail_->a, al = 1.0 + a;
    const double sp = r * period_;
    const std::int64_t K0 = first_tail_k();
    if (sp * double(K0) > 745.0) return s;
    if (r <= 0.0 && a <= 1.0) return std::numeric_limits<double>::infinity();
    const double pref = tail_->c * std::pow(static_cast<double>(period_), 1.0 - al);
    const double t = em_tail(
        K0, [&](double k) { return std::pow(k, 1.0 - al) * std::exp(-sp * k); },
        [&](double U) {
            if (sp == 0.0) return std::pow(U, 1.0 - a) / (a - 1.0);
            return std::pow(sp, a - 1.0) * upper_gamma(1.0 - a, sp * U);
        },
        [&](double U) {
            const double e = std::exp(-sp * U);
            return (1.0 - al) * std::pow(U, -al) * e - sp * std::pow(U, 1.0 - al) * e;
        });
    return s + pref * t;
}

double TailedLaw::entropy() const {
    double s = 0.0;
    for (double p : head_)
        if (p > 0.0) s -= p * std::log(p);
    if (!tail_ || tail_->c == 0.0) return s;
    const double a = tail_->a, al = 1.0 + a;
    const double P = period_;
    const double pref = tail_->c * std::pow(P, -al);
    const double S0 = em_tail(
        first_tail_k(), [&](double k) { return std::pow(k, -al); },
        [&](double U) { return std::pow(U, -a) / a; },
        [&](double U) { return -al * std::pow(U, -al - 1.0); });
    const double S1 = em_tail(
        first_tail_k(), [&](double k) { return std::pow(k, -al) * std::log(k); },
        [&](double U) { return std::pow(U, -a) * (std::log(U) / a + 1.0 / (a * a)); },
        [&](double U) { return std::pow(U, -al - 1.0) * (1.0 - al * std::log(U)); });
    return s + pref * ((al * std::log(P) - std::log(tail_->c)) * S0 + al * S1);
}

double TailedLaw::survival(std::int64_t n) const {
    if (n < 0) return mass();
    const std::int64_t N = static_cast<std::int64_t>(head_.size());
    if (n < N) {
        double s = 0.0;
        for (std::int64_t k = N; k > n; --k) s += head_[k - 1];
        return s + tail_mass_;
    }
    if (!tail_) return 0.0;
    const double a = tail_->a, al = 1.0 + a;
    const std::int64_t K0 = n / period_ + 1;
    const double pref = tail_->c * std::pow(static_cast<double>(period_), -al);
    return pref * em_tail(
                      K0, [&](double k) { return std::pow(k, -al); },
                      [&](double U) { return std::pow(U, -a) / a; },
                      [&](double U) { return -al * std::pow(U, -al - 1.0); });
}

std::vector<double> TailedLaw::survival_table(std::size_t n_max) const {
    std::vector<double> out(n_max + 1, 0.0);
    const std::size_t N = head_.size();
    // suffix sums over the head, accumulated from the far end
    std::vector<double> suffix(N + 1, 0.0);
    for (std::size_t k = N; k >= 1; --k) suffix[k - 1] = suffix[k] + head_[k - 1];
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n < N)
            out[n] = suffix[n] + tail_mass_;
        else if (!tail_)
            out[n] = 0.0;
        else if (n > N && n % period_ != 0 && n > 0)
            out[n] = out[n - 1];
        else
            out[n] = survival(static_cast<std::int64_t>(n));
    }
    return out;
}

TailedLaw TailedLaw::scaled(double s) const {
    std::vector<double> h = head_;
    for (double& p : h) p *= s;
    std::optional<PowerTail> t = tail_;
    if (t) t->c *= s;
    return TailedLaw(std::move(h), t, period_, s == 1.0 && recurrent_);
}

}  // namespace polylab
