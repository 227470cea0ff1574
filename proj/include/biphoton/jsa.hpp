#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "biphoton/dispersion.hpp"

// The biphoton spectral wave function
//
//   Psi(nu1, nu2) = exp(-(nu1+nu2)^2 tau^2 / (8 ln 2))
//                   * sinc{ (L/2c) [ A (nu1+nu2) - B (nu1-nu2)^2 / omega_p ] }
//
// sampled on frequency-detuning grids. nu1, nu2 are detunings (rad/s) of the
// signal/idler frequencies from omega_p/2. sinc(x) = sin(x)/x, so the
// amplitude is real and may be negative in the side lobes.

namespace biphoton {

double sinc(double x);

// Pointwise evaluation of the (un-normalized) amplitude; equals 1 at the
// origin. Throws on non-finite input. The model assumes |nu| << omega_p;
// callers are expected to stay within validity_limit().
double evaluate_amplitude(const PhaseMatchConstants& constants,
                          const PumpSpec& pump, double length_m, double nu1,
                          double nu2);

// |nu| beyond this fraction of omega_p is outside the model's regime of
// validity; samplers record a warning instead of failing.
double validity_limit(const PhaseMatchConstants& constants);

// Characteristic scales of the state, used to size grids, integration
// windows and quadrature bands. Requires A > 0 and B > 0.
struct StateScales {
  double sinc_width = 0.0;     // 5.56 c/(A L): FWHM of sinc^2 along nu_plus
  double pump_width = 0.0;     // 4 ln 2 / tau: FWHM of the pump power spectrum
  double cond_width = 0.0;     // min of the two: conditional/coherence scale
  double plus_half = 0.0;      // half-extent of support along nu_plus
  double minus_half = 0.0;     // half-extent of support along nu_minus
  double marginal_half = 0.0;  // half-extent of single-photon support in nu1
};
StateScales state_scales(const PhaseMatchConstants& constants,
                         const PumpSpec& pump, double length_m);

// An interval of integration over the partner frequency.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Intervals of nu2 over which Psi(nu1, .) is non-negligible: the sinc
// argument stays within +-x_max and the pump Gaussian within +-gauss_sigmas
// of its center. At most two disjoint bands (the phase-matching parabola has
// two branches; usually only one survives the pump envelope).
std::vector<Band> conditional_bands(const PhaseMatchConstants& constants,
                                    const PumpSpec& pump, double length_m,
                                    double nu1, double x_max = 12.0 * 3.141592653589793,
                                    double gauss_sigmas = 6.0);

// ---------------------------------------------------------------------------
// Grids

struct GridPolicy {
  double span_factor = 3.0;        // half-span = span_factor * delta_omega_s
  double step_divisor = 8.0;       // step <= delta_omega_c / step_divisor
  std::size_t axis_budget = 20001; // hard cap on points per axis
  bool fill_budget = false;        // spend the whole budget refining the step
};

// Uniform, symmetric-about-zero product grid in (nu1, nu2).
class FrequencyGrid {
 public:
  FrequencyGrid() = default;  // empty; populate via the factories
  static FrequencyGrid uniform(double half_span1, std::size_t n1,
                               double half_span2, std::size_t n2);
  static FrequencyGrid square(double half_span, std::size_t n);

  const std::vector<double>& nu1_axis() const { return nu1_; }
  const std::vector<double>& nu2_axis() const { return nu2_; }
  std::size_t n1() const { return nu1_.size(); }
  std::size_t n2() const { return nu2_.size(); }
  double step1() const { return step1_; }
  double step2() const { return step2_; }
  double half_span1() const { return nu1_.back(); }
  double half_span2() const { return nu2_.back(); }
  std::size_t total_points() const { return n1() * n2(); }
  double memory_estimate_bytes() const {
    return static_cast<double>(total_points()) * sizeof(double);
  }
  bool square_symmetric() const;

 private:
  std::vector<double> nu1_, nu2_;
  double step1_ = 0.0, step2_ = 0.0;
};

// Grid sized from the analytic width predictions: step <= delta_omega_c /
// step_divisor, half-span >= span_factor * delta_omega_s. Throws SizingError
// (with a suggested compromise) when that needs more than axis_budget points
// per axis.
FrequencyGrid build_grid(const PhaseMatchConstants& constants,
                         const PumpSpec& pump, double length_m,
                         const GridPolicy& policy = {});

// ---------------------------------------------------------------------------
// Sampled amplitudes

struct JointSpectralAmplitude {
  FrequencyGrid grid;
  std::vector<double> amplitude;  // row-major [i1*n2 + i2], unit L2 norm
  // amplitude = raw kernel values * normalization_scale; kept so grid-free
  // evaluations can be compared against stored samples exactly.
  double normalization_scale = 1.0;
  bool validity_warning = false;  // grid reaches beyond validity_limit()

  double at(std::size_t i1, std::size_t i2) const {
    return amplitude[i1 * grid.n2() + i2];
  }
  // sum psi^2 * dnu1 * dnu2 (compensated); 1 within 1e-12 after sampling.
  double norm_check() const;
};

JointSpectralAmplitude sample_jsa(const PhaseMatchConstants& constants,
                                  const PumpSpec& pump, double length_m,
                                  const FrequencyGrid& grid);

// Same sampling/normalization machinery for arbitrary real kernels
// (separable and double-Gaussian test states).
JointSpectralAmplitude sample_kernel(
    const std::function<double(double, double)>& kernel,
    const FrequencyGrid& grid);

// Amplitude stored on a uniform grid in the sheared coordinates
// nu_plus = nu1+nu2, nu_minus = nu1-nu2 with a common step. The support of
// the state is a thin parabolic band, narrow along nu_plus and wide along
// nu_minus, so this stores in O(width * span) what a product grid stores in
// O(span^2). Equal steps make coincidence slices and single-count marginals
// exact diagonal traversals of the array.
class ShearedAmplitude {
 public:
  const std::vector<double>& plus_axis() const { return plus_; }
  const std::vector<double>& minus_axis() const { return minus_; }
  double step() const { return step_; }
  std::size_t n_plus() const { return plus_.size(); }
  std::size_t n_minus() const { return minus_.size(); }
  double at(std::size_t ip, std::size_t im) const {
    return values_[ip * minus_.size() + im];
  }
  // (nu1, nu2) of a lattice point.
  double nu1(std::size_t ip, std::size_t im) const {
    return 0.5 * (plus_[ip] + minus_[im]);
  }
  double nu2(std::size_t ip, std::size_t im) const {
    return 0.5 * (plus_[ip] - minus_[im]);
  }
  bool validity_warning() const { return validity_warning_; }

  friend ShearedAmplitude sample_jsa_sheared(const PhaseMatchConstants&,
                                             const PumpSpec&, double,
                                             const GridPolicy&);

 private:
  std::vector<double> plus_, minus_, values_;
  double step_ = 0.0;
  bool validity_warning_ = false;
};

// Sheared-coordinate sampler; agrees with sample_jsa pointwise (both call
// evaluate_amplitude). The policy's step rule applies to both axes; the
// budget caps total points.
ShearedAmplitude sample_jsa_sheared(const PhaseMatchConstants& constants,
                                    const PumpSpec& pump, double length_m,
                                    const GridPolicy& policy = {});

}  // namespace biphoton
