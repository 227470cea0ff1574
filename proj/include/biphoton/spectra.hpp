#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/jsa.hpp"

// Coincidence and single-count spectra, FWHM estimation, width unit
// conversion, instrument-response convolution and Gaussian fitting of
// measured spectra.

namespace biphoton {

enum class AxisUnit { RadPerSecond, Nanometer };
enum class SpectrumKind { Coincidence, Single, Measured };

std::string axis_unit_name(AxisUnit unit);

struct Spectrum {
  std::vector<double> axis;       // strictly increasing
  std::vector<double> intensity;  // peak-normalized to 1
  AxisUnit unit = AxisUnit::RadPerSecond;
  SpectrumKind kind = SpectrumKind::Measured;
  double center = 0.0;  // axis value at the maximum

  std::size_t size() const { return axis.size(); }
};

// Conditional spectrum: signal intensity with the idler fixed at detuning
// nu2_fixed (linear interpolation between grid rows). idler_window > 0
// integrates |Psi|^2 over a bandpass of that full width instead of slicing.
Spectrum coincidence_spectrum(const JointSpectralAmplitude& jsa,
                              double nu2_fixed = 0.0,
                              double idler_window = 0.0);

// Marginal over the idler frequency (trapezoidal quadrature).
Spectrum single_spectrum(const JointSpectralAmplitude& jsa);

// Grid-free evaluations for states whose product-grid sampling would exceed
// any sensible budget; the integrand is evaluated only inside its
// phase-matching bands.
// pad_half widens the axis beyond the band support (room for a response
// kernel before the tails meet the edge).
Spectrum coincidence_spectrum_direct(const PhaseMatchConstants& constants,
                                     const PumpSpec& pump, double length_m,
                                     double nu2_fixed = 0.0,
                                     std::size_t n_points = 4001,
                                     double pad_half = 0.0);
Spectrum single_spectrum_direct(const PhaseMatchConstants& constants,
                                const PumpSpec& pump, double length_m,
                                std::size_t n_points = 2001);

// Full width at half maximum from linear interpolation of the two
// half-maximum crossings adjacent to the (unique) main peak. Throws
// DomainError when a crossing is missing (grid span too small) and
// NumericalError when extra crossings make the peak ambiguous.
double fwhm(const Spectrum& spectrum);

// delta_lambda = lambda^2 * delta_omega / (2 pi c); exact inverse pair.
double width_to_wavelength(double delta_omega, double lambda_center_nm);
double width_to_angular(double delta_lambda_nm, double lambda_center_nm);

// Map a detuning-axis spectrum to wavelength (nm) around a carrier
// frequency; intensities are carried over unchanged (per-mode convention).
Spectrum spectrum_to_wavelength(const Spectrum& spectrum, double omega_center);

enum class ResponseShape { Gaussian, Rectangular };

// Convolution with a unit-area instrument response of the given FWHM on a
// uniform axis, re-normalized to peak 1 afterwards.
Spectrum convolve_response(const Spectrum& spectrum, double resolution_fwhm,
                           ResponseShape shape = ResponseShape::Gaussian);

struct FitResult {
  double amplitude = 0.0;
  double center = 0.0;
  double center_sigma = 0.0;
  double fwhm = 0.0;
  double fwhm_sigma = 0.0;
  double baseline = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Least-squares fit of amplitude*exp(-4 ln2 (x-center)^2/fwhm^2) + baseline
// by Levenberg-Marquardt; 1-sigma uncertainties from the quadratic model of
// the objective at the optimum. sigmas, when given, weight the residuals.
FitResult fit_gaussian(const std::vector<double>& x,
                       const std::vector<double>& y,
                       const std::vector<double>* sigmas = nullptr);

}  // namespace biphoton
