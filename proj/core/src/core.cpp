#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "polylab/core.hpp"

namespace polylab {

DisorderLaw DisorderLaw::table(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw ConfigError("invalid-disorder", "values and probs must have equal nonzero length");
    double m0 = 0, m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(probs[i] >= 0.0)) throw ConfigError("invalid-disorder", "negative probability");
        m0 += probs[i];
        m1 += probs[i] * values[i];
        m2 += probs[i] * values[i] * values[i];
    }
    if (std::abs(m0 - 1) > 1e-12 || std::abs(m1) > 1e-12 || std::abs(m2 - 1) > 1e-12)
        throw ConfigError("invalid-disorder", "table law must have mass 1, mean 0, variance 1");
    DisorderLaw d(Kind::FiniteTable);
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    return d;
}

DisorderLaw DisorderLaw::from_name(const std::string& name) {
    if (name == "bernoulli" || name == "BernoulliPM1") return bernoulli();
    if (name == "gaussian" || name == "StdGaussian") return gaussian();
    throw ConfigError("invalid-disorder", "unknown disorder law '" + name + "'");
}

std::string DisorderLaw::name() const {
    switch (kind_) {
        case Kind::BernoulliPM1: return "bernoulli";
        case Kind::StdGaussian: return "gaussian";
        default: return "table";
    }
}

double DisorderLaw::logM(double beta) const {
    switch (kind_) {
        case Kind::BernoulliPM1: {
            const double b = std::abs(beta);
            return b + std::log1p(std::exp(-2 * b)) - M_LN2;
        }
        case Kind::StdGaussian: return 0.5 * beta * beta;
        default: {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < values_.size(); ++i)
                if (probs_[i] > 0) mx = std::max(mx, beta * values_[i]);
            double s = 0;
            for (std::size_t i = 0; i < values_.size(); ++i)
                s += probs_[i] * std::exp(beta * values_[i] - mx);
            return mx + std::log(s);
        }
    }
}

double DisorderLaw::dlogM(double beta) const {
    switch (kind_) {
        case Kind::BernoulliPM1: return std::tanh(beta);
        case Kind::StdGaussian: return beta;
        default: {
            const double L = logM(beta);
            double s = 0;
            for (std::size_t i = 0; i < values_.size(); ++i)
                s += probs_[i] * values_[i] * std::exp(beta * values_[i] - L);
            return s;
        }
    }
}

double DisorderLaw::sample(Stream& s) const {
    switch (kind_) {
        case Kind::BernoulliPM1: return (s() >> 63) ? 1.0 : -1.0;
        case Kind::StdGaussian: return s.normal();
        default: {
            const double u = s.uniform();
            double acc = 0;
            for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
                acc += probs_[i];
                if (u < acc) return values_[i];
            }
            return values_.back();
        }
    }
}

double DisorderLaw::from_bits(std::uint64_t w0, std::uint64_t w1) const {
    switch (kind_) {
        case Kind::BernoulliPM1: return (w0 >> 63) ? 1.0 : -1.0;
        case Kind::StdGaussian: {
            const double u1 = (static_cast<double>(w0 >> 11) + 1.0) * 0x1.0p-53;
            const double u2 = u64_to_unit(w1);
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
        default: {
            const double u = u64_to_unit(w0);
            double acc = 0;
            for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
                acc += probs_[i];
                if (u < acc) return values_[i];
            }
            return values_.back();
        }
    }
}

double DisorderLaw::sup_neg() const {
    switch (kind_) {
        case Kind::BernoulliPM1: return 1.0;
        case Kind::StdGaussian: return std::numeric_limits<double>::infinity();
        default: {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < values_.size(); ++i)
                if (probs_[i] > 0) m = std::max(m, -values_[i]);
            return m;
        }
    }
}

void SampledCurve::validate() const {
    if (xs.size() != ys.size()) throw NumericError("invalid-curve", "length mismatch");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw NumericError("invalid-curve", "xs not increasing");
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
    if (count == 0) throw ConfigError("invalid-grid", "grid count must be >= 1");
    if (start > stop) throw ConfigError("invalid-grid", "grid start exceeds stop");
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = start;
        return g;
    }
    const double h = (stop - start) / double(count - 1);
    for (std::size_t i = 0; i < count; ++i) g[i] = start + h * double(i);
    g.back() = stop;
    return g;
}

double solve_monotone(const std::function<double(double)>& f, double target, double lo,
                      double hi, double tol) {
    if (!(tol > 0.0)) throw ConfigError("invalid-tolerance", "tol must be positive");
    if (!(lo <= hi)) throw NumericError("bracket-invalid", "lo > hi");
    double flo = f(lo) - target, fhi = f(hi) - target;
    if (std::isnan(flo) || std::isnan(fhi)) throw NumericError("bracket-invalid", "NaN at bracket");
    if (flo > 0.0 || fhi < 0.0)
        throw NumericError("bracket-invalid", "f(lo) <= target <= f(hi) violated");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    int side = 0;  // which end was retained last time (Illinois bookkeeping)
    int iter = 0;
    double ref_width = hi - lo;
    while (hi - lo > tol) {
        bool bisect = iter >= 200;
        if (iter > 0 && iter % 3 == 0) {
            // secant steps must at least halve the bracket every third step
            if (hi - lo > 0.5 * ref_width) bisect = true;
            ref_width = hi - lo;
        }
        double x = 0.5 * (lo + hi);
        if (!bisect) {
            const double xs = hi - fhi * (hi - lo) / (fhi - flo);
            if (xs > lo && xs < hi) x = xs;
        }
        if (x <= lo || x >= hi) break;  // bracket is down to adjacent doubles
        const double fx = f(x) - target;
        if (std::isnan(fx)) throw NumericError("nan", "objective returned NaN");
        if (fx == 0.0) return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
        ++iter;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> renewal_mass(const std::vector<double>& Rtab, std::size_t n_max) {
    std::vector<double> u(n_max + 1, 0.0);
    u[0] = 1.0;
    const std::size_t K = Rtab.empty() ? 0 : Rtab.size() - 1;
    for (std::size_t n = 1; n <= n_max; ++n) {
        double s = 0.0;
        const std::size_t kmax = std::min(n, K);
        for (std::size_t k = 1; k <= kmax; ++k) s += Rtab[k] * u[n - k];
        u[n] = s;
    }
    return u;
}

std::vector<double> renewal_mass(const TailedLaw& R, std::size_t n_max) {
    return renewal_mass(R.table(n_max), n_max);
}

std::vector<double> first_return_from_occupation(const std::vector<double>& u) {
    if (u.empty() || std::abs(u[0] - 1.0) > 1e-15)
        throw NumericError("invalid-occupation", "u(0) must be 1");
    const std::size_t N = u.size() - 1;
    std::vector<double> R(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        if (!(u[n] >= 0.0 && u[n] <= 1.0))
            throw NumericError("invalid-occupation", "u(n) outside [0,1]");
        double s = u[n];
        for (std::size_t k = 1; k < n; ++k) s -= R[k] * u[n - k];
        if (s < 0.0) {
            if (s < -1e-12) throw NumericError("negative-R", "occupation sequence is not a renewal");
            s = 0.0;
        }
        R[n] = s;
    }
    return R;
}

RadiusEstimate estimate_radius(const std::vector<double>& z) {
    const std::size_t N = z.size();
    if (N < 8) throw NumericError("insufficient-terms", "need at least 8 coefficients");
    for (double v : z)
        if (!(v > 0.0)) throw NumericError("invalid-series", "coefficients must be positive");
    // ratios r_n = z_{n+1}/z_n with n the 1-based index of z_n
    std::vector<double> r(N + 1, 0.0);
    for (std::size_t n = 1; n < N; ++n) r[n] = z[n] / z[n - 1];
    RadiusEstimate out;
    for (std::size_t n = 2; n < N; ++n)
        out.extrapolants.push_back(double(n) * r[n] - double(n - 1) * r[n - 1]);
    const std::size_t m = out.extrapolants.size();
    out.radius = 1.0 / out.extrapolants[m - 1];
    double lo = out.radius, hi = out.radius;
    for (std::size_t i = m - 3; i < m; ++i) {
        lo = std::min(lo, 1.0 / out.extrapolants[i]);
        hi = std::max(hi, 1.0 / out.extrapolants[i]);
    }
    out.uncertainty = hi - lo;
    return out;
}

double legendre_sup(const std::function<double(double)>& f, double s, double lo, double hi,
                    double tol) {
    auto obj = [&](double x) { return s * x - f(x); };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = obj(c), fd = obj(d);
    for (int it = 0; it < 300 && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = obj(d);
        }
    }
    double best = std::max(fc, fd);
    best = std::max(best, obj(lo));
    best = std::max(best, obj(hi));
    return best;
}

SampledCurve central_diff(const SampledCurve& c) {
    c.validate();
    const std::size_t n = c.size();
    if (n < 3) throw NumericError("insufficient-points", "central_diff needs >= 3 points");
    SampledCurve d;
    d.xs = c.xs;
    d.ys.resize(n);
    d.meta = c.meta;
    const auto& x = c.xs;
    const auto& y = c.ys;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        d.ys[i] = (h0 * h0 * y[i + 1] - h1 * h1 * y[i - 1] + (h1 * h1 - h0 * h0) * y[i]) /
                  (h0 * h1 * (h0 + h1));
    }
    {
        const double h0 = x[1] - x[0], h1 = x[2] - x[1];
        d.ys[0] = -(2 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
                  h0 / (h1 * (h0 + h1)) * y[2];
    }
    {
        const double h0 = x[n - 1] - x[n - 2], h1 = x[n - 2] - x[n - 3];
        d.ys[n - 1] = (2 * h0 + h1) / (h0 * (h0 + h1)) * y[n - 1] -
                      (h0 + h1) / (h0 * h1) * y[n - 2] + h0 / (h1 * (h0 + h1)) * y[n - 3];
    }
    d.meta["derivative"] = "central";
    return d;
}

int default_threads() {
    if (const char* e = std::getenv("POLYLAB_THREADS")) {
        const int t = std::atoi(e);
        if (t > 0) return t;
    }
    const unsigned h = std::thread::hardware_concurrency();
    return h ? static_cast<int>(h) : 1;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t err_index = count;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    const std::size_t nt = std::min<std::size_t>(count, static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

MeanErr mean_stderr(const std::vector<double>& v) {
    MeanErr m;
    if (v.empty()) return m;
    double s = 0;
    for (double x : v) s += x;
    m.mean = s / double(v.size());
    if (v.size() < 2) return m;
    double q = 0;
    for (double x : v) q += (x - m.mean) * (x - m.mean);
    m.stdev = std::sqrt(q / double(v.size() - 1));
    m.stderr_ = m.stdev / std::sqrt(double(v.size()));
    return m;
}

}  // namespace polylab
