#pragma once

#include <cstdint>
#include <vector>

#include "polylab/core.hpp"

namespace polylab::undirected {

// Nearest-neighbour path in Z^d, d in {1, 2, 3}. Step code s: axis s/2,
// sign + for even s and - for odd s.
struct LatticePath {
    int d = 1;
    std::vector<std::uint8_t> steps;

    std::size_t n() const { return steps.size(); }
    void validate() const;
    static LatticePath straight(int d, std::size_t n);
    static LatticePath random(int d, std::size_t n, Stream& rng);
};

struct PathStats {
    std::int64_t I = 0;    // sum_{i<j} 1{w_i = w_j}
    std::int64_t J2d = 0;  // 2d * J_n, always an integer
    double J = 0.0;
    std::int64_t range = 0;         // largest coordinate extent
    std::int64_t end_to_end2 = 0;   // |S_n|^2
};
PathStats path_stats(const LatticePath& w);

// Both sides of the corrected identity multiplied by 4d, plus the printed
// form multiplied by 8d under both readings of its pair sum.
struct IdentityCheck {
    std::int64_t lhs4d = 0;   // 4d (I - J)
    std::int64_t rhs4d = 0;   // -2d(n+1) + 2n + sum_{unordered pairs} (l_x - l_y)^2
    std::int64_t residual4d = 0;
    std::int64_t grad2 = 0;   // sum over unordered neighbour pairs of (l_x - l_y)^2
    double lhs = 0.0, rhs = 0.0;
    double printed_rhs_unordered = 0.0;  // -(n+1)/2 + (1/8d) sum_unordered
    double printed_rhs_ordered = 0.0;    // -(n+1)/2 + (1/8d) sum_ordered
};
IdentityCheck local_time_identity_check(const LatticePath& w);

struct GibbsSmall {
    double logZ = 0.0;  // log E[e^{-beta I + gamma J}] under the uniform path law
    double mean_I = 0.0, mean_J = 0.0, mean_end2 = 0.0, mean_range = 0.0;
    // law of the first coordinate of S_n, index k -> S_n = k - n
    std::vector<double> endpoint_law;
};
// Exact sums over all (2d)^n paths; (2d)^n must stay below 2e7.
GibbsSmall exact_gibbs_small(double beta, double gamma, int n, int d);

struct McConfig {
    double beta = 0.0, gamma = 0.0;
    int n = 100;
    int d = 1;
    std::size_t sweeps = 2000;
    std::size_t burn_in = 0;       // 0 means sweeps / 5
    std::size_t batches = 20;
    double box_eps = 1.0;          // Lambda(eps n^{1/d}) = [-L, L]^d
    std::uint64_t seed = 42;
    std::uint64_t stream = 0;
    bool straight_start = true;   // false starts from a random walk; expansion from it is slow
};

struct McDiagnostics {
    MeanErr range, end2, I, J, inside;
    std::vector<double> endpoint_hist;  // first coordinate of S_n, index k -> S_n = k - n
    double acceptance_local = 0.0, acceptance_pivot = 0.0;
    std::size_t samples = 0;
};
McDiagnostics metropolis_sample(const McConfig& cfg);

struct ScalingFit {
    std::vector<int> ns;
    std::vector<McDiagnostics> diag;
    double nu = 0.0;         // slope of log sqrt(E|S_n|^2) against log n
    double range_slope = 0.0;
};
ScalingFit scaling_fit(McConfig base, const std::vector<int>& ns, int threads = 1);

}  // namespace polylab::undirected
