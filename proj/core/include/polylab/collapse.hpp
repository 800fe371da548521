#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polylab/core.hpp"

namespace polylab::collapse {

// c[n][m] = number of n-step partially directed paths (first step east)
// with m self-touchings. c[0] is empty.
struct TouchTable {
    int n_max = 0;
    std::vector<std::vector<std::uint64_t>> c;

    std::uint64_t at(int n, int m) const;
    std::uint64_t total(int n) const;
    // Z_n(x) = sum_m c_n(m) x^m
    double Z(int n, double x) const;
    // Z_1(x) .. Z_n_max(x)
    std::vector<double> coefficients(double x) const;
};

// hash_salt only changes the site-set layout; the table must not depend on it
TouchTable enumerate(int n_max, int threads = 1, std::uint64_t hash_salt = 0);

struct QSeriesEval {
    double x = 0.0, y = 0.0, q = 0.0;
    int K = 0;
    double value = 0.0;      // G(x, y) = sum_{n>=1} Z_n(x) y^n
    double trunc_err = 0.0;  // bound on the effect of the dropped q-series terms
};

// Truncated q-series. Throws NumericError("q-singular") for q >= 1 or a
// vanishing denominator.
QSeriesEval genfun_qseries(double x, double y, int K = 60);
// Same function anywhere it is finite: q-series below q = 1 for x <= 1,
// continued fraction for x > 1 (including the hyperbola q = 1).
double genfun(double x, double y);

// Power-series coefficients of G in y for fixed x; index n holds Z_n(x), index 0 is 0.
std::vector<double> genfun_coefficients(double x, int n_max);

struct Normalization {
    int kappa = 2;           // constant in the denominators: kappa * y^2
    bool counts_empty = false;  // whether G includes the n = 0 term
    std::string describe() const;
};
// Fixes the unknown constant and n = 0 convention by matching the first
// three coefficients against the enumeration at x = 2.
Normalization arbitrate_normalization(const TouchTable& oracle);

// R(x, y) = y s1/s0 from the backward continued fraction; x > 0, q = xy <= 1
double R_continued_fraction(double x, double y);
// P = 1/(1 + G); positive and decreasing on (0, y_c) with y_c its first zero
// (or y_c = 1/x when P stays positive up to the hyperbola)
double inverse_full_genfun(double x, double y);

struct CriticalPoint {
    double x = 0.0;
    double y_series = 0.0, unc_series = 0.0;      // ratio method on enumeration
    double y_singular = 0.0, unc_singular = 0.0;  // first zero of P
    bool on_hyperbola = false;                     // y_c = 1/x
    double y = 0.0;                                // reported value (singular route)
    double spread = 0.0;                           // |y_series - y_singular|
};

double y_c_singular(double x, double* uncertainty = nullptr, bool* on_hyperbola = nullptr);
RadiusEstimate y_c_series(const TouchTable& table, double x);

std::vector<CriticalPoint> critical_points(const std::vector<double>& x_grid,
                                           const TouchTable& table, int threads = 1);
SampledCurve critical_curve(const std::vector<double>& x_grid, const TouchTable& table,
                            int threads = 1);

struct CollapsePoint {
    double x_c = 0.0;
    double gamma_c = 0.0;
};
CollapsePoint collapse_point();

SampledCurve free_energy_curve(const std::vector<double>& gamma_grid, int threads = 1);
SampledCurve touch_density(const std::vector<double>& gamma_grid, int threads = 1);

}  // namespace polylab::collapse
