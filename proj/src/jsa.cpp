#include "biphoton/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biphoton/constants.hpp"
#include "biphoton/numeric.hpp"

namespace biphoton {

namespace {

using phys::c_vacuum;

// Eq-4-style width constants: 5.56 = 4 * 1.39 is the full width at half
// maximum of sinc^2 in its own argument.
constexpr double kSincFwhmFactor = 5.56;

// Capture range of the sinc argument when sizing integration windows and
// sheared grids: 12 lobes keep the truncated fraction of the sinc^2 mass
// below ~1%, and the bands stay narrow.
constexpr double kDefaultXMax = 12.0 * phys::pi;

double require_positive(double v, const char* what) {
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << what << " must be positive (got " << v << ")";
    throw RegimeError(os.str());
  }
  return v;
}

}  // namespace

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-2) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double evaluate_amplitude(const PhaseMatchConstants& constants,
                          const PumpSpec& pump, double length_m, double nu1,
                          double nu2) {
  if (!std::isfinite(nu1) || !std::isfinite(nu2))
    throw DomainError("evaluate_amplitude: non-finite detuning");
  if (!std::isfinite(constants.walkoff_A) || !std::isfinite(constants.dispersion_B) ||
      !(constants.omega_p > 0.0) || !(length_m > 0.0))
    throw DomainError("evaluate_amplitude: invalid constants");

  const double plus = nu1 + nu2;
  const double minus = nu1 - nu2;
  const double tau = pump.tau_s;
  const double gauss = std::exp(-plus * plus * tau * tau / (8.0 * phys::ln2));
  const double arg =
      length_m / (2.0 * c_vacuum) *
      (constants.walkoff_A * plus -
       constants.dispersion_B * minus * minus / constants.omega_p);
  return gauss * sinc(arg);
}

double validity_limit(const PhaseMatchConstants& constants) {
  return 0.3 * constants.omega_p;
}

StateScales state_scales(const PhaseMatchConstants& constants,
                         const PumpSpec& pump, double length_m) {
  const double A = require_positive(constants.walkoff_A, "walk-off constant A");
  const double B = require_positive(constants.dispersion_B, "dispersion constant B");
  require_positive(length_m, "crystal length");

  StateScales s;
  s.sinc_width = kSincFwhmFactor * c_vacuum / (A * length_m);
  s.pump_width = pump.bandwidth_rad_s();
  s.cond_width = std::min(s.sinc_width, s.pump_width);

  // Gaussian amplitude is exp(-nu_plus^2 / (2 sigma^2)), sigma = 2 sqrt(ln2)/tau.
  const double sigma_plus = 2.0 * std::sqrt(phys::ln2) / pump.tau_s;
  const double gauss_half = 6.0 * sigma_plus;
  const double x_reach = kDefaultXMax * 2.0 * c_vacuum / length_m;  // X*(2c/L)
  s.plus_half = std::min(gauss_half, x_reach / A);

  // |A nu_plus - B nu_minus^2/omega_p| <= x_reach with nu_plus up to the
  // Gaussian edge bounds the nu_minus support.
  s.minus_half =
      std::sqrt(constants.omega_p / B * (A * gauss_half + x_reach));
  s.marginal_half = 0.5 * (s.minus_half + s.plus_half);
  return s;
}

std::vector<Band> conditional_bands(const PhaseMatchConstants& constants,
                                    const PumpSpec& pump, double length_m,
                                    double nu1, double x_max,
                                    double gauss_sigmas) {
  const double sigma_plus = 2.0 * std::sqrt(phys::ln2) / pump.tau_s;
  const double g = gauss_sigmas * sigma_plus;
  const Band gauss_window{-g - nu1, g - nu1};  // |nu1 + t| <= g

  const double A = constants.walkoff_A;
  const double alpha = constants.dispersion_B / constants.omega_p;
  const double x_reach = x_max * 2.0 * c_vacuum / length_m;

  // Sinc condition |alpha w^2 + A w - 2 A nu1| <= x_reach on w = nu1 - t.
  std::vector<Band> w_bands;
  if (alpha <= 0.0 && A <= 0.0) {
    // sinc argument identically zero: Gaussian window alone.
    return {gauss_window};
  } else if (alpha <= 0.0) {
    const double half = x_reach / A;
    w_bands.push_back({2.0 * nu1 - half, 2.0 * nu1 + half});
  } else {
    const double disc1 = A * A + 4.0 * alpha * (2.0 * A * nu1 + x_reach);
    if (disc1 < 0.0) return {};
    const double r = std::sqrt(disc1);
    const double wlo = (-A - r) / (2.0 * alpha);
    const double whi = (-A + r) / (2.0 * alpha);
    const double disc2 = A * A + 4.0 * alpha * (2.0 * A * nu1 - x_reach);
    if (disc2 < 0.0) {
      w_bands.push_back({wlo, whi});
    } else {
      const double r2 = std::sqrt(disc2);
      w_bands.push_back({wlo, (-A - r2) / (2.0 * alpha)});
      w_bands.push_back({(-A + r2) / (2.0 * alpha), whi});
    }
  }

  std::vector<Band> out;
  for (const Band& wb : w_bands) {
    // t = nu1 - w reverses the interval.
    Band tb{nu1 - wb.hi, nu1 - wb.lo};
    tb.lo = std::max(tb.lo, gauss_window.lo);
    tb.hi = std::min(tb.hi, gauss_window.hi);
    if (tb.hi > tb.lo) out.push_back(tb);
  }
  std::sort(out.begin(), out.end(),
            [](const Band& a, const Band& b) { return a.lo < b.lo; });
  return out;
}

// ---------------------------------------------------------------------------
// Grids

FrequencyGrid FrequencyGrid::uniform(double half_span1, std::size_t n1,
                                     double half_span2, std::size_t n2) {
  if (n1 < 2 || n2 < 2)
    throw SizingError("grid needs at least 2 points per axis");
  if (!(half_span1 > 0.0) || !(half_span2 > 0.0))
    throw SizingError("grid half-span must be positive");

  FrequencyGrid g;
  auto fill = [](std::vector<double>& axis, double half, std::size_t n) {
    axis.resize(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      // (2i - (n-1)) is an exact integer, so the axis is symmetric to the bit.
      axis[i] = (2.0 * static_cast<double>(i) - denom) * (half / denom);
    }
    return 2.0 * half / denom;
  };
  g.step1_ = fill(g.nu1_, half_span1, n1);
  g.step2_ = fill(g.nu2_, half_span2, n2);
  return g;
}

FrequencyGrid FrequencyGrid::square(double half_span, std::size_t n) {
  return uniform(half_span, n, half_span, n);
}

bool FrequencyGrid::square_symmetric() const {
  return n1() == n2() && nu1_ == nu2_;
}

FrequencyGrid build_grid(const PhaseMatchConstants& constants,
                         const PumpSpec& pump, double length_m,
                         const GridPolicy& policy) {
  const StateScales scales = state_scales(constants, pump, length_m);
  const double dws_eq4 =
      std::sqrt(2.0 * constants.walkoff_A * phys::ln2 * constants.omega_p /
                (constants.dispersion_B * pump.tau_s));

  const double step = scales.cond_width / policy.step_divisor;
  const double half =
      std::max(policy.span_factor * dws_eq4, scales.marginal_half);

  std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * half / step)) + 1;
  if (n % 2 == 0) ++n;
  if (n > policy.axis_budget) {
    std::ostringstream os;
    os << "grid needs " << n << " points per axis (step " << step
       << " rad/s over +-" << half << " rad/s) but the budget is "
       << policy.axis_budget << "; raise axis_budget, lower span_factor below "
       << policy.span_factor * static_cast<double>(policy.axis_budget) / static_cast<double>(n)
       << ", or lower step_divisor below "
       << policy.step_divisor * static_cast<double>(policy.axis_budget) / static_cast<double>(n);
    throw SizingError(os.str());
  }
  if (policy.fill_budget) {
    n = policy.axis_budget;
    if (n % 2 == 0) --n;
  }
  return FrequencyGrid::square(half, n);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

double normalize(std::vector<double>& values, double cell) {
  KahanSum sum;
  for (double v : values) sum.add(v * v);
  const double norm = sum.value() * cell;
  if (!(norm > 0.0))
    throw NumericalError("sampled amplitude has zero norm on this grid");
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : values) v *= scale;
  return scale;
}

}  // namespace

double JointSpectralAmplitude::norm_check() const {
  KahanSum sum;
  for (double v : amplitude) sum.add(v * v);
  return sum.value() * grid.step1() * grid.step2();
}

JointSpectralAmplitude sample_jsa(const PhaseMatchConstants& constants,
                                  const PumpSpec& pump, double length_m,
                                  const FrequencyGrid& grid) {
  JointSpectralAmplitude out;
  out.grid = grid;
  out.amplitude.resize(grid.total_points());
  const auto& a1 = grid.nu1_axis();
  const auto& a2 = grid.nu2_axis();
  for (std::size_t i = 0; i < a1.size(); ++i) {
    double* row = out.amplitude.data() + i * a2.size();
    for (std::size_t j = 0; j < a2.size(); ++j)
      row[j] = evaluate_amplitude(constants, pump, length_m, a1[i], a2[j]);
  }
  out.normalization_scale = normalize(out.amplitude, grid.step1() * grid.step2());
  const double reach = std::max(std::abs(a1.front()),
                                std::max(std::abs(a1.back()),
                                         std::max(std::abs(a2.front()), std::abs(a2.back()))));
  out.validity_warning = reach > validity_limit(constants);
  return out;
}

JointSpectralAmplitude sample_kernel(
    const std::function<double(double, double)>& kernel,
    const FrequencyGrid& grid) {
  JointSpectralAmplitude out;
  out.grid = grid;
  out.amplitude.resize(grid.total_points());
  const auto& a1 = grid.nu1_axis();
  const auto& a2 = grid.nu2_axis();
  for (std::size_t i = 0; i < a1.size(); ++i) {
    double* row = out.amplitude.data() + i * a2.size();
    for (std::size_t j = 0; j < a2.size(); ++j) row[j] = kernel(a1[i], a2[j]);
  }
  out.normalization_scale = normalize(out.amplitude, grid.step1() * grid.step2());
  return out;
}

ShearedAmplitude sample_jsa_sheared(const PhaseMatchConstants& constants,
                                    const PumpSpec& pump, double length_m,
                                    const GridPolicy& policy) {
  const StateScales scales = state_scales(constants, pump, length_m);
  const double step = scales.cond_width / policy.step_divisor;

  auto axis_for = [&](double half) {
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * half / step)) + 1;
    if (n % 2 == 0) ++n;
    return n;
  };
  const std::size_t n_plus = axis_for(scales.plus_half);
  const std::size_t n_minus = axis_for(scales.minus_half);
  if (n_plus > policy.axis_budget || n_minus > policy.axis_budget) {
    std::ostringstream os;
    os << "sheared grid needs " << n_plus << " x " << n_minus
       << " points (step " << step << " rad/s) exceeding the per-axis budget "
       << policy.axis_budget;
    throw SizingError(os.str());
  }

  ShearedAmplitude out;
  out.step_ = step;
  auto fill = [&](std::vector<double>& axis, std::size_t n) {
    axis.resize(n);
    const double c = 0.5 * static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      axis[i] = (static_cast<double>(i) - c) * step;
  };
  fill(out.plus_, n_plus);
  fill(out.minus_, n_minus);
  out.values_.resize(n_plus * n_minus);
  for (std::size_t ip = 0; ip < n_plus; ++ip) {
    double* row = out.values_.data() + ip * n_minus;
    for (std::size_t im = 0; im < n_minus; ++im)
      row[im] = evaluate_amplitude(constants, pump, length_m,
                                   out.nu1(ip, im), out.nu2(ip, im));
  }
  const double reach = 0.5 * (out.plus_.back() + out.minus_.back());
  out.validity_warning_ = reach > validity_limit(constants);
  return out;
}

}  // namespace biphoton
