#include "polylab/homopin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

namespace polylab::homopin {

PinningSpec PinningSpec::pinned(TailedLaw R) {
    if (!R.recurrent()) throw ConfigError("invalid-law", "pinned mode needs a recurrent law");
    PinningSpec s{std::move(R), Mode::pinned, std::nullopt};
    return s;
}

PinningSpec PinningSpec::wetting(TailedLaw R, TailedLaw Rplus) {
    const double m = Rplus.mass();
    if (!(m > 0.0 && m < 1.0)) throw ConfigError("invalid-law", "R+ must be defective");
    PinningSpec s{std::move(R), Mode::wetting, std::move(Rplus)};
    return s;
}

PinningSpec PinningSpec::srw_pinned(std::size_t n_head) {
    return pinned(TailedLaw::srw(n_head));
}

PinningSpec PinningSpec::srw_wetting(std::size_t n_head) {
    auto R = TailedLaw::srw(n_head);
    auto Rp = R.scaled(0.5);
    return wetting(std::move(R), std::move(Rp));
}

double PinningSpec::zeta_c() const {
    return mode == Mode::pinned ? 0.0 : -std::log(Rplus->mass());
}

double phi_gf(const TailedLaw& R, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("bad-argument", "phi_gf needs x in [0,1]");
    if (x == 0.0) return 0.0;
    return R.phi_exp(-std::log(x));
}

double free_energy(const PinningSpec& spec, double zeta) {
    const TailedLaw& L = spec.active();
    const double z0 = spec.zeta_c();
    if (!(zeta > z0)) return 0.0;
    const double mass = L.mass();
    const double target = mass * -std::expm1(-(zeta - z0));
    const double tol = 1e-15 * std::max(zeta, 1e-3);
    // root lies in [0, zeta] since phi(e^-r) <= mass e^-r
    if (target < 0.5 * mass)
        return solve_monotone([&](double r) { return L.one_minus_phi(r); }, target, 0.0, zeta,
                              tol);
    return solve_monotone([&](double r) { return -L.log_phi_exp(r); }, zeta, 0.0, zeta, tol);
}

double contact_fraction(const PinningSpec& spec, double zeta) {
    const double r = free_energy(spec, zeta);
    if (r <= 0.0) return 0.0;
    // implicit differentiation of phi(e^-r) = e^-zeta
    const double m1 = spec.active().first_moment_exp(r);
    return std::exp(-zeta) / m1;
}

double constrained_partition(const PinningSpec& spec, double zeta, std::size_t n) {
    if (n < 1) throw ConfigError("bad-argument", "constrained_partition needs n >= 1");
    const TailedLaw& L = spec.active();
    const double r = free_energy(spec, zeta);
    // Y(m) = e^{-r m} Z*(m) stays O(1) when r is the free energy; if zeta is
    // subcritical Y decays and we rescale to keep it representable
    std::vector<double> K = L.table(n);
    for (std::size_t k = 1; k <= n; ++k)
        if (K[k] != 0.0) K[k] *= std::exp(zeta - r * double(k));
    std::vector<double> Y(n + 1, 0.0);
    std::vector<double> logscale(n + 1, 0.0);  // Y(m) true value = Y[m] * e^{logscale[m]}
    Y[0] = 1.0;
    double cur = 0.0;  // common scale of recent entries
    for (std::size_t m = 1; m <= n; ++m) {
        double s = 0.0;
        for (std::size_t k = 1; k <= m; ++k) {
            if (K[k] == 0.0 || Y[m - k] == 0.0) continue;
            s += K[k] * Y[m - k] * std::exp(logscale[m - k] - cur);
        }
        Y[m] = s;
        logscale[m] = cur;
        if (s > 0.0 && std::abs(std::log(s)) > 300.0) {
            const double l = std::log(s);
            cur += l;
            Y[m] = 1.0;
            logscale[m] = cur;
        }
    }
    if (Y[n] <= 0.0) return -std::numeric_limits<double>::infinity();
    return r * double(n) + std::log(Y[n]) + logscale[n];
}

double renewal_limit(const PinningSpec& spec, double zeta) {
    const double r = free_energy(spec, zeta);
    const TailedLaw& L = spec.active();
    const double M = std::exp(zeta) * L.first_moment_exp(r);
    return double(L.period()) / M;
}

ExponentFit critical_exponent_fit(const TailedLaw& R, double zeta_lo, double zeta_hi,
                                  std::size_t points) {
    if (!R.recurrent()) throw ConfigError("invalid-law", "exponent fit needs a recurrent law");
    if (!(zeta_lo > 0.0 && zeta_hi > zeta_lo) || points < 3)
        throw ConfigError("bad-grid", "exponent fit needs 0 < lo < hi and >= 3 points");
    const PinningSpec spec = PinningSpec::pinned(R);
    std::vector<double> lx(points), ly(points);
    const double l0 = std::log(zeta_lo), l1 = std::log(zeta_hi);
    for (std::size_t i = 0; i < points; ++i) {
        lx[i] = l0 + (l1 - l0) * double(i) / double(points - 1);
        ly[i] = std::log(free_energy(spec, std::exp(lx[i])));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < points; ++i) mx += lx[i], my += ly[i];
    mx /= double(points);
    my /= double(points);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    ExponentFit out;
    out.exponent = sxy / sxx;
    out.a = R.tail() ? R.tail()->a : std::numeric_limits<double>::infinity();
    const double theory = 1.0 / std::min(1.0, out.a);
    out.amplitude = std::exp(ly[0] - theory * lx[0]);
    out.reference_amplitude = std::numeric_limits<double>::quiet_NaN();
    if (out.a > 1.0) {
        out.reference_amplitude = 1.0 / R.mean();
    } else if (out.a < 1.0 && R.tail()) {
        const double c = R.tail()->c;
        out.reference_amplitude =
            std::pow(out.a / (c * boost::math::tgamma(1.0 - out.a)), 1.0 / out.a);
    }
    return out;
}

std::vector<double> lazy_occupation(const LazyWalkSpec& walk, std::size_t N) {
    const double p = walk.p;
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("bad-argument", "lazy walk needs p in (0,1]");
    // positions beyond N - n can no longer return by time N
    const std::size_t W = N / 2 + 1;
    std::vector<double> cur(2 * W + 3, 0.0), nxt(2 * W + 3, 0.0);
    const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(W) + 1;
    cur[o] = 1.0;
    std::vector<double> u(N + 1, 0.0);
    u[0] = 1.0;
    const double stay = 1.0 - p, hop = 0.5 * p;
    for (std::size_t n = 1; n <= N; ++n) {
        const std::ptrdiff_t reach =
            static_cast<std::ptrdiff_t>(std::min({n, N - n, static_cast<std::size_t>(W)}));
        for (std::ptrdiff_t x = -reach; x <= reach; ++x)
            nxt[o + x] = stay * cur[o + x] + hop * (cur[o + x - 1] + cur[o + x + 1]);
        std::fill(nxt.begin(), nxt.begin() + (o - reach), 0.0);
        std::fill(nxt.begin() + (o + reach + 1), nxt.end(), 0.0);
        std::swap(cur, nxt);
        u[n] = cur[o];
    }
    return u;
}

TailedLaw lazy_return_law(const LazyWalkSpec& walk, std::size_t N) {
    const int period = walk.p == 1.0 ? 2 : 1;
    if (period == 2) N -= N % 2;
    auto R = first_return_from_occupation(lazy_occupation(walk, N));
    std::vector<double> head(R.begin() + 1, R.end());
    return TailedLaw::with_fitted_tail(std::move(head), 0.5, period, 1.0);
}

PulledModel::PulledModel(LazyWalkSpec walk, std::size_t n_head)
    : walk_(walk), spec_(PinningSpec::pinned(lazy_return_law(walk, n_head))) {}

double PulledModel::g(double force) const {
    const double p = walk_.p;
    const double a = std::abs(force);
    // log(p cosh a + 1 - p) without overflow
    if (a < 20.0) return std::log(p * std::cosh(a) + 1.0 - p);
    return a + std::log(0.5 * p * (1.0 + std::exp(-2.0 * a)) + (1.0 - p) * std::exp(-a));
}

double PulledModel::g_inv(double y) const {
    if (y <= 0.0) return 0.0;
    // g(x) >= x + log(p/2), so this upper end always brackets the root
    const double hi = std::max(50.0, y - std::log(0.5 * walk_.p) + 1.0);
    return solve_monotone([this](double x) { return g(x); }, y, 0.0, hi,
                          1e-14 * std::max(1.0, y));
}

double PulledModel::pulled_free_energy(double zeta, double force) const {
    return std::max(f(zeta), g(force));
}

double PulledModel::phi_c(double zeta) const { return g_inv(f(zeta)); }

double PulledModel::F_c(double T) const {
    if (!(T > 0.0)) throw ConfigError("bad-grid", "temperatures must be positive");
    return T * phi_c(1.0 / T);
}

double pulled_free_energy(const LazyWalkSpec& walk, double zeta, double force) {
    if (!(force > 0.0)) throw ConfigError("bad-argument", "force must be positive");
    return PulledModel(walk).pulled_free_energy(zeta, force);
}

SampledCurve force_temperature_curve(const PulledModel& model, const std::vector<double>& T_grid,
                                     int threads) {
    SampledCurve c;
    c.xs = T_grid;
    c.ys.assign(T_grid.size(), 0.0);
    for (double T : T_grid)
        if (!(T > 0.0)) throw ConfigError("bad-grid", "temperatures must be positive");
    parallel_for(T_grid.size(), threads, [&](std::size_t i) { c.ys[i] = model.F_c(T_grid[i]); });
    c.meta["p"] = std::to_string(model.walk().p);
    return c;
}

SampledCurve force_temperature_curve(const LazyWalkSpec& walk, const std::vector<double>& T_grid) {
    return force_temperature_curve(PulledModel(walk), T_grid, default_threads());
}

bool reentrance_detect(const SampledCurve& Fc, double tol) {
    const std::size_t n = Fc.size();
    if (n < 3) return false;
    const auto it = std::min_element(Fc.ys.begin(), Fc.ys.end());
    const std::size_t i = static_cast<std::size_t>(it - Fc.ys.begin());
    if (i == 0 || i == n - 1) return false;
    return *it < std::min(Fc.ys.front(), Fc.ys.back()) - tol;
}

bool reentrance_detect(const LazyWalkSpec& walk) {
    return reentrance_detect(force_temperature_curve(walk, linspace(0.01, 5.0, 500)));
}

}  // namespace polylab::homopin
