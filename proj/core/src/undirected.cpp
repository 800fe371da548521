#include "polylab/undirected.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace polylab::undirected {

namespace {

constexpr int kBits = 21;
constexpr std::int64_t kOff = std::int64_t(1) << 20;

using Site = std::array<std::int64_t, 3>;

std::uint64_t pack(const Site& s) {
    return std::uint64_t(s[0] + kOff) | std::uint64_t(s[1] + kOff) << kBits |
           std::uint64_t(s[2] + kOff) << (2 * kBits);
}

Site step_vec(int s) {
    Site v{0, 0, 0};
    v[s / 2] = (s % 2 == 0) ? 1 : -1;
    return v;
}

Site add(Site a, const Site& b) {
    for (int k = 0; k < 3; ++k) a[k] += b[k];
    return a;
}

std::vector<Site> sites_of(const LatticePath& w) {
    std::vector<Site> s(w.n() + 1, Site{0, 0, 0});
    for (std::size_t i = 0; i < w.n(); ++i) s[i + 1] = add(s[i], step_vec(w.steps[i]));
    return s;
}

using LocalTime = std::unordered_map<std::uint64_t, std::int64_t>;

LocalTime local_times(const std::vector<Site>& s) {
    LocalTime l;
    l.reserve(2 * s.size());
    for (const auto& x : s) ++l[pack(x)];
    return l;
}

std::int64_t lt(const LocalTime& l, const Site& x) {
    const auto it = l.find(pack(x));
    return it == l.end() ? 0 : it->second;
}

// I and P = sum over unordered neighbour pairs of l_x l_y
std::pair<std::int64_t, std::int64_t> IP_of(const LocalTime& l, const std::vector<Site>& s, int d) {
    std::int64_t I = 0, P = 0;
    for (const auto& [k, v] : l) I += v * (v - 1) / 2;
    // each unordered pair seen from its smaller key
    LocalTime seen;
    for (const auto& x : s) {
        const std::uint64_t kx = pack(x);
        if (!seen.emplace(kx, 1).second) continue;
        const std::int64_t lx = l.at(kx);
        for (int a = 0; a < d; ++a) {
            Site y = x;
            ++y[a];
            P += lx * lt(l, y);
        }
    }
    return {I, P};
}

}  // namespace

void LatticePath::validate() const {
    if (d < 1 || d > 3) throw ConfigError("bad-argument", "dimension must be 1, 2 or 3");
    for (auto s : steps)
        if (s >= 2 * d) throw ConfigError("bad-argument", "step code out of range");
}

LatticePath LatticePath::straight(int d, std::size_t n) {
    LatticePath w{d, std::vector<std::uint8_t>(n, 0)};
    w.validate();
    return w;
}

LatticePath LatticePath::random(int d, std::size_t n, Stream& rng) {
    LatticePath w{d, std::vector<std::uint8_t>(n)};
    for (auto& s : w.steps) s = static_cast<std::uint8_t>(rng.below(std::uint64_t(2 * d)));
    w.validate();
    return w;
}

PathStats path_stats(const LatticePath& w) {
    w.validate();
    const auto s = sites_of(w);
    const auto l = local_times(s);
    const auto [I, P] = IP_of(l, s, w.d);
    PathStats out;
    out.I = I;
    out.J2d = P - std::int64_t(w.n());
    out.J = double(out.J2d) / (2.0 * w.d);
    for (int a = 0; a < w.d; ++a) {
        std::int64_t lo = 0, hi = 0;
        for (const auto& x : s) lo = std::min(lo, x[a]), hi = std::max(hi, x[a]);
        out.range = std::max(out.range, hi - lo);
    }
    for (int a = 0; a < 3; ++a) out.end_to_end2 += s.back()[a] * s.back()[a];
    return out;
}

IdentityCheck local_time_identity_check(const LatticePath& w) {
    w.validate();
    const int d = w.d;
    const auto n = std::int64_t(w.n());
    const auto s = sites_of(w);
    const auto l = local_times(s);
    const auto [I, P] = IP_of(l, s, d);
    // sum over pairs touching the support: inner pairs once, boundary pairs once
    std::int64_t g2 = 0;
    for (const auto& [kx, lx] : l) {
        for (int a = 0; a < d; ++a)
            for (int sgn : {-1, 1}) {
                const std::uint64_t ky = kx + std::uint64_t(sgn) * (std::uint64_t(1) << (kBits * a));
                const auto it = l.find(ky);
                if (it == l.end()) g2 += lx * lx;
                else if (kx < ky) g2 += (lx - it->second) * (lx - it->second);
            }
    }
    IdentityCheck c;
    const std::int64_t J2d = P - n;
    c.lhs4d = 4 * d * I - 2 * J2d;
    c.rhs4d = -2 * d * (n + 1) + 2 * n + g2;
    c.residual4d = c.lhs4d - c.rhs4d;
    c.grad2 = g2;
    c.lhs = double(c.lhs4d) / (4.0 * d);
    c.rhs = double(c.rhs4d) / (4.0 * d);
    c.printed_rhs_unordered = -0.5 * double(n + 1) + double(g2) / (8.0 * d);
    c.printed_rhs_ordered = -0.5 * double(n + 1) + double(2 * g2) / (8.0 * d);
    return c;
}

GibbsSmall exact_gibbs_small(double beta, double gamma, int n, int d) {
    if (d < 1 || d > 3 || n < 1) throw ConfigError("bad-argument", "need n >= 1 and d in 1..3");
    if (double(n) * std::log(2.0 * d) > std::log(2e7))
        throw ConfigError("size-exceeded", "(2d)^n exceeds 2e7 paths");
    const int side = 2 * n + 3;
    std::vector<int> stride(3, 0);
    stride[0] = 1;
    stride[1] = side;
    stride[2] = side * side;
    std::size_t cells = 1;
    for (int a = 0; a < d; ++a) cells *= std::size_t(side);
    std::vector<std::int32_t> ell(cells, 0);
    std::array<int, 3> pos{n + 1, n + 1, n + 1};
    auto index = [&](const std::array<int, 3>& p) {
        std::size_t ix = 0;
        for (int a = 0; a < d; ++a) ix += std::size_t(p[a]) * std::size_t(stride[a]);
        return ix;
    };
    auto nbr_sum = [&](std::size_t ix) {
        std::int64_t t = 0;
        for (int a = 0; a < d; ++a) t += ell[ix + stride[a]] + ell[ix - stride[a]];
        return t;
    };
    long double Z = 0, sI = 0, sJ = 0, sE = 0, sR = 0;
    std::vector<long double> endp(2 * n + 1, 0.0L);
    std::array<int, 3> lo = pos, hi = pos;
    const double inv2d = 1.0 / (2.0 * d);

    auto rec = [&](auto&& self, int depth, std::int64_t I, std::int64_t P) -> void {
        if (depth == n) {
            const double J = double(P - n) * inv2d;
            const long double wgt = std::exp(-beta * double(I) + gamma * J);
            std::int64_t e2 = 0;
            int range = 0;
            for (int a = 0; a < d; ++a) {
                const int c = pos[a] - (n + 1);
                e2 += std::int64_t(c) * c;
                range = std::max(range, hi[a] - lo[a]);
            }
            Z += wgt;
            sI += wgt * I;
            sJ += wgt * J;
            sE += wgt * e2;
            sR += wgt * range;
            endp[pos[0] - 1] += wgt;
            return;
        }
        for (int s = 0; s < 2 * d; ++s) {
            const int a = s / 2, sg = (s % 2 == 0) ? 1 : -1;
            pos[a] += sg;
            const int plo = lo[a], phi = hi[a];
            lo[a] = std::min(lo[a], pos[a]);
            hi[a] = std::max(hi[a], pos[a]);
            const std::size_t ix = index(pos);
            const std::int64_t dI = ell[ix], dP = nbr_sum(ix);
            ++ell[ix];
            self(self, depth + 1, I + dI, P + dP);
            --ell[ix];
            lo[a] = plo;
            hi[a] = phi;
            pos[a] -= sg;
        }
    };
    ell[index(pos)] = 1;
    rec(rec, 0, 0, 0);

    GibbsSmall g;
    g.logZ = double(std::log(Z)) - n * std::log(2.0 * d);
    g.mean_I = double(sI / Z);
    g.mean_J = double(sJ / Z);
    g.mean_end2 = double(sE / Z);
    g.mean_range = double(sR / Z);
    g.endpoint_law.resize(endp.size());
    for (std::size_t k = 0; k < endp.size(); ++k) g.endpoint_law[k] = double(endp[k] / Z);
    return g;
}

namespace {

class Chain {
public:
    Chain(const McConfig& cfg, Stream rng) : cfg_(cfg), rng_(rng), d_(cfg.d) {
        LatticePath w = cfg.straight_start ? LatticePath::straight(d_, std::size_t(cfg.n))
                                           : LatticePath::random(d_, std::size_t(cfg.n), rng_);
        s_ = sites_of(w);
        rebuild();
    }

    void sweep() {
        const std::size_t n = s_.size() - 1;
        for (std::size_t t = 0; t <= n; ++t) local_move();
        pivot_move();
    }

    const std::vector<Site>& sites() const { return s_; }
    std::int64_t I() const { return I_; }
    std::int64_t J2d() const { return P_ - std::int64_t(s_.size() - 1); }

    std::size_t local_tried = 0, local_acc = 0, pivot_tried = 0, pivot_acc = 0;

private:
    double H(std::int64_t I, std::int64_t P) const {
        const double J = double(P - std::int64_t(s_.size() - 1)) / (2.0 * d_);
        return cfg_.beta * double(I) - cfg_.gamma * J;
    }

    void rebuild() {
        l_ = local_times(s_);
        const auto ip = IP_of(l_, s_, d_);
        I_ = ip.first;
        P_ = ip.second;
    }

    std::int64_t nbr_sum(const Site& x) const {
        std::int64_t t = 0;
        for (int a = 0; a < d_; ++a) {
            Site y = x;
            ++y[a];
            t += lt(l_, y);
            y[a] -= 2;
            t += lt(l_, y);
        }
        return t;
    }

    void remove_visit(const Site& x) {
        const auto k = pack(x);
        auto it = l_.find(k);
        if (--it->second == 0) l_.erase(it);
    }

    void local_move() {
        const std::size_t n = s_.size() - 1;
        const std::size_t i = rng_.below(n + 1);
        Site nw;
        if (i == 0 || i == n) {
            const Site& anchor = s_[i == 0 ? 1 : n - 1];
            nw = add(anchor, step_vec(int(rng_.below(std::uint64_t(2 * d_)))));
        } else {
            const Site& a = s_[i - 1];
            const Site& c = s_[i + 1];
            if (a == c) {
                nw = add(a, step_vec(int(rng_.below(std::uint64_t(2 * d_)))));
            } else {
                std::int64_t diff = 0;
                for (int k = 0; k < 3; ++k) diff += std::abs(a[k] - c[k]) > 0 ? 1 : 0;
                if (diff != 2) return;  // straight segment, nothing to flip
                for (int k = 0; k < 3; ++k) nw[k] = a[k] + c[k] - s_[i][k];
            }
        }
        ++local_tried;
        const Site old = s_[i];
        if (nw == old) {
            ++local_acc;
            return;
        }
        // move one visit: old -> nw
        const std::int64_t l_old = lt(l_, old);
        const std::int64_t dI1 = -(l_old - 1);
        const std::int64_t dP1 = -nbr_sum(old);
        remove_visit(old);
        const std::int64_t dI2 = lt(l_, nw);
        const std::int64_t dP2 = nbr_sum(nw);
        const std::int64_t I2 = I_ + dI1 + dI2, P2 = P_ + dP1 + dP2;
        const double dH = H(I2, P2) - H(I_, P_);
        if (dH <= 0.0 || rng_.uniform() < std::exp(-dH)) {
            ++l_[pack(nw)];
            s_[i] = nw;
            I_ = I2;
            P_ = P2;
            ++local_acc;
        } else {
            ++l_[pack(old)];
        }
    }

    void pivot_move() {
        const std::size_t n = s_.size() - 1;
        if (n < 2) return;
        ++pivot_tried;
        const std::size_t k = rng_.below(n);
        // uniform element of the hyperoctahedral group: axis permutation and signs
        std::array<int, 3> perm{0, 1, 2};
        for (int a = d_ - 1; a > 0; --a) std::swap(perm[a], perm[rng_.below(std::uint64_t(a + 1))]);
        std::array<int, 3> sign{1, 1, 1};
        for (int a = 0; a < d_; ++a) sign[a] = rng_.below(2) ? -1 : 1;
        std::vector<Site> t = s_;
        const Site c = s_[k];
        for (std::size_t j = k + 1; j <= n; ++j) {
            Site v{0, 0, 0};
            for (int a = 0; a < d_; ++a) v[perm[a]] = sign[a] * (s_[j][a] - c[a]);
            t[j] = add(c, v);
        }
        const LocalTime l2 = local_times(t);
        const auto [I2, P2] = IP_of(l2, t, d_);
        const double dH = H(I2, P2) - H(I_, P_);
        if (dH <= 0.0 || rng_.uniform() < std::exp(-dH)) {
            s_ = std::move(t);
            l_ = l2;
            I_ = I2;
            P_ = P2;
            ++pivot_acc;
            recenter();
        }
    }

    void recenter() {
        const Site c = s_[0];
        bool far = false;
        for (int a = 0; a < d_; ++a) far |= std::abs(c[a]) > (kOff >> 2);
        if (!far) return;
        for (auto& x : s_)
            for (int a = 0; a < d_; ++a) x[a] -= c[a];
        rebuild();
    }

    McConfig cfg_;
    Stream rng_;
    int d_;
    std::vector<Site> s_;
    LocalTime l_;
    std::int64_t I_ = 0, P_ = 0;
};

MeanErr batch_means(const std::vector<double>& v, std::size_t batches) {
    MeanErr out;
    if (v.empty()) return out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    const std::size_t B = std::max<std::size_t>(2, std::min(batches, v.size()));
    const std::size_t len = v.size() / B;
    std::vector<double> bm;
    for (std::size_t b = 0; b < B; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += v[i];
        bm.push_back(s / double(len));
    }
    const auto m = mean_stderr(bm);
    out.stderr_ = m.stderr_;
    out.stdev = mean_stderr(v).stdev;
    return out;
}

}  // namespace

McDiagnostics metropolis_sample(const McConfig& cfg) {
    if (cfg.n < 1 || cfg.n > 10000) throw ConfigError("bad-argument", "need 1 <= n <= 10^4");
    if (cfg.d < 1 || cfg.d > 3) throw ConfigError("bad-argument", "dimension must be 1, 2 or 3");
    if (cfg.sweeps < 10) throw ConfigError("bad-argument", "need at least 10 sweeps");
    const std::size_t burn = cfg.burn_in ? cfg.burn_in : cfg.sweeps / 5;
    Chain ch(cfg, SeedSpec{cfg.seed}.stream(cfg.stream));
    const double L = cfg.box_eps * std::pow(double(cfg.n), 1.0 / cfg.d);
    std::vector<double> range, end2, I, J, inside;
    std::vector<double> hist(2 * std::size_t(cfg.n) + 1, 0.0);
    for (std::size_t t = 0; t < burn + cfg.sweeps; ++t) {
        ch.sweep();
        if (t < burn) continue;
        const auto& s = ch.sites();
        const Site o = s[0];
        std::int64_t r = 0;
        bool in = true;
        for (int a = 0; a < cfg.d; ++a) {
            std::int64_t lo = 0, hi = 0;
            for (const auto& x : s) {
                const std::int64_t c = x[a] - o[a];
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            r = std::max(r, hi - lo);
            in = in && double(-lo) <= L && double(hi) <= L;
        }
        std::int64_t e2 = 0;
        for (int a = 0; a < cfg.d; ++a) e2 += (s.back()[a] - o[a]) * (s.back()[a] - o[a]);
        range.push_back(double(r));
        end2.push_back(double(e2));
        I.push_back(double(ch.I()));
        J.push_back(double(ch.J2d()) / (2.0 * cfg.d));
        inside.push_back(in ? 1.0 : 0.0);
        hist[std::size_t(s.back()[0] - o[0] + cfg.n)] += 1.0;
    }
    McDiagnostics out;
    out.samples = range.size();
    out.range = batch_means(range, cfg.batches);
    out.end2 = batch_means(end2, cfg.batches);
    out.I = batch_means(I, cfg.batches);
    out.J = batch_means(J, cfg.batches);
    out.inside = batch_means(inside, cfg.batches);
    for (auto& h : hist) h /= double(out.samples);
    out.endpoint_hist = std::move(hist);
    out.acceptance_local = ch.local_tried ? double(ch.local_acc) / double(ch.local_tried) : 0.0;
    out.acceptance_pivot = ch.pivot_tried ? double(ch.pivot_acc) / double(ch.pivot_tried) : 0.0;
    return out;
}

ScalingFit scaling_fit(McConfig base, const std::vector<int>& ns, int threads) {
    if (ns.size() < 2) throw ConfigError("bad-grid", "scaling fit needs at least two n");
    ScalingFit out;
    out.ns = ns;
    out.diag.resize(ns.size());
    parallel_for(ns.size(), threads, [&](std::size_t i) {
        McConfig c = base;
        c.n = ns[i];
        c.stream = base.stream + i;
        out.diag[i] = metropolis_sample(c);
    });
    auto slope = [&](auto value) {
        double mx = 0, my = 0;
        const double m = double(ns.size());
        for (std::size_t i = 0; i < ns.size(); ++i) mx += std::log(double(ns[i])), my += value(i);
        mx /= m;
        my /= m;
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const double dx = std::log(double(ns[i])) - mx;
            sxy += dx * (value(i) - my);
            sxx += dx * dx;
        }
        return sxy / sxx;
    };
    out.nu = slope([&](std::size_t i) { return 0.5 * std::log(std::max(out.diag[i].end2.mean, 1e-300)); });
    out.range_slope = slope([&](std::size_t i) { return std::log(std::max(out.diag[i].range.mean, 1e-300)); });
    return out;
}

}  // namespace polylab::undirected
