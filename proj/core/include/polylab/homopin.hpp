#pragma once

#include <optional>

#include "polylab/core.hpp"

namespace polylab::homopin {

struct PinningSpec {
    enum class Mode { pinned, wetting };

    TailedLaw R;
    Mode mode = Mode::pinned;
    std::optional<TailedLaw> Rplus;  // defective excursion law for wetting

    static PinningSpec pinned(TailedLaw R);
    // SRW wetting uses R+ = R/2 (excursions on one side only)
    static PinningSpec wetting(TailedLaw R, TailedLaw Rplus);
    static PinningSpec srw_pinned(std::size_t n_head = 20000);
    static PinningSpec srw_wetting(std::size_t n_head = 20000);

    // law whose generating function enters the free energy
    const TailedLaw& active() const { return mode == Mode::pinned ? R : *Rplus; }
    // 0 when pinned, -log phi+(1) when wetting
    double zeta_c() const;
};

struct LazyWalkSpec {
    double p = 1.0;  // P(+-1) = p/2 each, P(0) = 1-p
};

double phi_gf(const TailedLaw& R, double x);
double free_energy(const PinningSpec& spec, double zeta);
double contact_fraction(const PinningSpec& spec, double zeta);

// log Z*_n; exact renewal convolution in the e^{-r n} scaled form
double constrained_partition(const PinningSpec& spec, double zeta, std::size_t n);
// limit of e^{-r n} Z*_n along multiples of the period: period / M^zeta
double renewal_limit(const PinningSpec& spec, double zeta);

struct ExponentFit {
    double exponent = 0.0;
    double amplitude = 0.0;            // f(zeta_min) / zeta_min^{1/(1 ^ a)}
    double reference_amplitude = 0.0;  // 1/E(tau) or (a / (c Gamma(1-a)))^{1/a}; NaN if none
    double a = 0.0;
};
ExponentFit critical_exponent_fit(const TailedLaw& R, double zeta_lo = 1e-4,
                                  double zeta_hi = 1e-2, std::size_t points = 21);

// occupation probabilities P(S_n = 0), n = 0..N, by step convolution
std::vector<double> lazy_occupation(const LazyWalkSpec& walk, std::size_t N);
TailedLaw lazy_return_law(const LazyWalkSpec& walk, std::size_t N = 20000);

// Pulled adsorbed lazy walk. Builds the return law once.
class PulledModel {
public:
    explicit PulledModel(LazyWalkSpec walk, std::size_t n_head = 20000);

    const LazyWalkSpec& walk() const { return walk_; }
    const PinningSpec& pinning() const { return spec_; }
    double f(double zeta) const { return free_energy(spec_, zeta); }
    double g(double force) const;
    double g_inv(double y) const;
    double pulled_free_energy(double zeta, double force) const;
    double phi_c(double zeta) const;
    double F_c(double T) const;

private:
    LazyWalkSpec walk_;
    PinningSpec spec_;
};

double pulled_free_energy(const LazyWalkSpec& walk, double zeta, double force);
SampledCurve force_temperature_curve(const PulledModel& model, const std::vector<double>& T_grid,
                                     int threads = 1);
SampledCurve force_temperature_curve(const LazyWalkSpec& walk, const std::vector<double>& T_grid);
// true iff F_c has a strict interior minimum on the grid 0.01:5 (step 0.01)
bool reentrance_detect(const LazyWalkSpec& walk);
bool reentrance_detect(const SampledCurve& Fc, double tol = 1e-9);

}  // namespace polylab::homopin
