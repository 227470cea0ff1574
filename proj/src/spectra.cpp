#include "biphoton/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biphoton/constants.hpp"
#include "biphoton/numeric.hpp"

namespace biphoton {

namespace {

using phys::c_vacuum;

void peak_normalize(Spectrum& s) {
  const auto it = std::max_element(s.intensity.begin(), s.intensity.end());
  if (it == s.intensity.end() || !(*it > 0.0))
    throw NumericalError("spectrum has no positive maximum");
  const double scale = 1.0 / *it;
  for (double& v : s.intensity) v *= scale;
  *it = 1.0;  // the reciprocal multiply can land 1 ulp off
  s.center = s.axis[static_cast<std::size_t>(it - s.intensity.begin())];
}

void require_uniform_axis(const Spectrum& s, const char* who) {
  if (s.size() < 3) throw DomainError(std::string(who) + ": spectrum too short");
  const double step = s.axis[1] - s.axis[0];
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double d = s.axis[i + 1] - s.axis[i];
    if (std::abs(d - step) > 1e-9 * std::abs(step))
      throw DomainError(std::string(who) + ": axis is not uniform");
  }
}

std::vector<double> symmetric_axis(double center, double half_span,
                                   std::size_t n) {
  std::vector<double> axis(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    axis[i] = center + (2.0 * static_cast<double>(i) - denom) * (half_span / denom);
  return axis;
}

// Integral of |Psi(nu1, .)|^2 over the phase-matching bands.
double band_integral(const PhaseMatchConstants& constants, const PumpSpec& pump,
                     double length_m, double nu1, double fine_step) {
  double total = 0.0;
  for (const Band& band : conditional_bands(constants, pump, length_m, nu1)) {
    std::size_t n = static_cast<std::size_t>(std::ceil(band.width() / fine_step));
    n = std::clamp<std::size_t>(n, 32, 40000) | 1;
    const double h = band.width() / static_cast<double>(n - 1);
    KahanSum sum;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = band.lo + h * static_cast<double>(k);
      const double a = evaluate_amplitude(constants, pump, length_m, nu1, t);
      sum.add(trapezoid_weight(k, n) * a * a);
    }
    total += sum.value() * h;
  }
  return total;
}

}  // namespace

std::string axis_unit_name(AxisUnit unit) {
  return unit == AxisUnit::RadPerSecond ? "rad_s" : "nm";
}

// ---------------------------------------------------------------------------
// Spectra from sampled amplitudes

Spectrum coincidence_spectrum(const JointSpectralAmplitude& jsa,
                              double nu2_fixed, double idler_window) {
  const FrequencyGrid& g = jsa.grid;
  const auto& a2 = g.nu2_axis();
  if (nu2_fixed < a2.front() || nu2_fixed > a2.back()) {
    std::ostringstream os;
    os << "idler detuning " << nu2_fixed << " rad/s outside the sampled span ["
       << a2.front() << ", " << a2.back() << "]";
    throw DomainError(os.str());
  }

  Spectrum out;
  out.axis = g.nu1_axis();
  out.intensity.resize(g.n1());
  out.unit = AxisUnit::RadPerSecond;
  out.kind = SpectrumKind::Coincidence;

  if (idler_window > 0.0) {
    const double lo = nu2_fixed - 0.5 * idler_window;
    const double hi = nu2_fixed + 0.5 * idler_window;
    std::size_t jlo = static_cast<std::size_t>(
        std::lower_bound(a2.begin(), a2.end(), lo) - a2.begin());
    std::size_t jhi = static_cast<std::size_t>(
        std::upper_bound(a2.begin(), a2.end(), hi) - a2.begin());
    if (jhi > jlo + 1) {
      const std::size_t m = jhi - jlo;
      for (std::size_t i = 0; i < g.n1(); ++i) {
        KahanSum sum;
        for (std::size_t j = jlo; j < jhi; ++j) {
          const double a = jsa.at(i, j);
          sum.add(trapezoid_weight(j - jlo, m) * a * a);
        }
        out.intensity[i] = sum.value() * g.step2();
      }
      peak_normalize(out);
      return out;
    }
    // Window narrower than a grid cell: fall through to the pure slice.
  }

  // Linear interpolation between the two bracketing rows.
  std::size_t j1 = static_cast<std::size_t>(
      std::upper_bound(a2.begin(), a2.end(), nu2_fixed) - a2.begin());
  if (j1 == 0) j1 = 1;
  if (j1 >= g.n2()) j1 = g.n2() - 1;
  const std::size_t j0 = j1 - 1;
  const double t = (nu2_fixed - a2[j0]) / (a2[j1] - a2[j0]);
  for (std::size_t i = 0; i < g.n1(); ++i) {
    const double a = (1.0 - t) * jsa.at(i, j0) + t * jsa.at(i, j1);
    out.intensity[i] = a * a;
  }
  peak_normalize(out);
  return out;
}

Spectrum single_spectrum(const JointSpectralAmplitude& jsa) {
  const FrequencyGrid& g = jsa.grid;
  Spectrum out;
  out.axis = g.nu1_axis();
  out.intensity.resize(g.n1());
  out.unit = AxisUnit::RadPerSecond;
  out.kind = SpectrumKind::Single;
  for (std::size_t i = 0; i < g.n1(); ++i) {
    KahanSum sum;
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double a = jsa.at(i, j);
      sum.add(trapezoid_weight(j, g.n2()) * a * a);
    }
    out.intensity[i] = sum.value() * g.step2();
  }
  peak_normalize(out);
  return out;
}

// ---------------------------------------------------------------------------
// Grid-free spectra

Spectrum coincidence_spectrum_direct(const PhaseMatchConstants& constants,
                                     const PumpSpec& pump, double length_m,
                                     double nu2_fixed, std::size_t n_points,
                                     double pad_half) {
  if (n_points < 9) throw SizingError("coincidence axis needs at least 9 points");
  const StateScales scales = state_scales(constants, pump, length_m);
  // By exchange symmetry the nu1-bands at fixed nu2 are the nu2-bands at
  // fixed nu1.
  const auto bands = conditional_bands(constants, pump, length_m, nu2_fixed);
  if (bands.empty())
    throw DomainError("no phase-matching band at this idler detuning");
  const double mid = 0.5 * (bands.front().lo + bands.back().hi);
  const double half =
      std::max(0.65 * (bands.back().hi - bands.front().lo), 4.0 * scales.cond_width) +
      pad_half;

  Spectrum out;
  out.axis = symmetric_axis(mid, half, n_points | 1);
  out.intensity.resize(out.axis.size());
  out.unit = AxisUnit::RadPerSecond;
  out.kind = SpectrumKind::Coincidence;
  for (std::size_t i = 0; i < out.axis.size(); ++i) {
    const double a =
        evaluate_amplitude(constants, pump, length_m, out.axis[i], nu2_fixed);
    out.intensity[i] = a * a;
  }
  peak_normalize(out);
  return out;
}

Spectrum single_spectrum_direct(const PhaseMatchConstants& constants,
                                const PumpSpec& pump, double length_m,
                                std::size_t n_points) {
  if (n_points < 9) throw SizingError("single-count axis needs at least 9 points");
  const StateScales scales = state_scales(constants, pump, length_m);
  const double fine_step = scales.cond_width / 8.0;

  Spectrum out;
  out.axis = symmetric_axis(0.0, scales.marginal_half, n_points | 1);
  out.intensity.resize(out.axis.size());
  out.unit = AxisUnit::RadPerSecond;
  out.kind = SpectrumKind::Single;
  for (std::size_t i = 0; i < out.axis.size(); ++i)
    out.intensity[i] =
        band_integral(constants, pump, length_m, out.axis[i], fine_step);
  peak_normalize(out);
  return out;
}

// ---------------------------------------------------------------------------
// Width estimation

double fwhm(const Spectrum& spectrum) {
  const auto& x = spectrum.axis;
  const auto& y = spectrum.intensity;
  if (x.size() != y.size() || x.size() < 3)
    throw DomainError("fwhm: spectrum needs at least 3 samples");

  const auto max_it = std::max_element(y.begin(), y.end());
  const double vmax = *max_it;
  if (!(vmax > 0.0)) throw DomainError("fwhm: no positive peak");
  const double half = 0.5 * vmax;

  // Ties of the exact maximum are fine when contiguous (flat-top sample).
  std::size_t first_max = static_cast<std::size_t>(max_it - y.begin());
  std::size_t last_max = first_max;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == vmax) {
      first_max = std::min(first_max, i);
      last_max = std::max(last_max, i);
    }
  }
  for (std::size_t i = first_max; i <= last_max; ++i) {
    if (y[i] != vmax)
      throw NumericalError("fwhm: multiple distinct peaks share the maximum");
  }

  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double a = y[i] - half;
    const double b = y[i + 1] - half;
    if (a == 0.0 && b == 0.0) continue;
    if (a == 0.0) {
      crossings.push_back(x[i]);
    } else if (a * b < 0.0) {
      crossings.push_back(x[i] + (half - y[i]) / (y[i + 1] - y[i]) * (x[i + 1] - x[i]));
    }
  }
  if (y.back() == half) crossings.push_back(x.back());

  double left = 0.0, right = 0.0;
  bool have_left = false, have_right = false;
  for (double c : crossings) {
    if (c <= x[first_max]) {
      left = c;  // last crossing before the peak
      have_left = true;
    }
    if (c >= x[last_max] && !have_right) {
      right = c;  // first crossing after the peak
      have_right = true;
    }
  }
  if (!have_left || !have_right) {
    std::ostringstream os;
    os << "fwhm: incomplete support, no half-maximum crossing "
       << (!have_left ? "left" : "right")
       << " of the peak inside the axis; widen the span";
    throw DomainError(os.str());
  }
  if (crossings.size() > 2) {
    std::ostringstream os;
    os << "fwhm: ambiguous peak structure, " << crossings.size()
       << " half-maximum crossings at:";
    for (double c : crossings) os << " " << c;
    throw NumericalError(os.str());
  }
  return right - left;
}

double width_to_wavelength(double delta_omega, double lambda_center_nm) {
  if (delta_omega < 0.0 || !(lambda_center_nm > 0.0))
    throw DomainError("width_to_wavelength: invalid inputs");
  const double lam = phys::nm_to_m(lambda_center_nm);
  return phys::m_to_nm(lam * lam * delta_omega / (phys::two_pi * c_vacuum));
}

double width_to_angular(double delta_lambda_nm, double lambda_center_nm) {
  if (delta_lambda_nm < 0.0 || !(lambda_center_nm > 0.0))
    throw DomainError("width_to_angular: invalid inputs");
  const double lam = phys::nm_to_m(lambda_center_nm);
  return phys::nm_to_m(delta_lambda_nm) * phys::two_pi * c_vacuum / (lam * lam);
}

Spectrum spectrum_to_wavelength(const Spectrum& spectrum, double omega_center) {
  if (spectrum.unit != AxisUnit::RadPerSecond)
    throw DomainError("spectrum_to_wavelength: axis is already in nm");
  Spectrum out;
  out.unit = AxisUnit::Nanometer;
  out.kind = spectrum.kind;
  const std::size_t n = spectrum.size();
  out.axis.resize(n);
  out.intensity.resize(n);
  // lambda decreases with nu; reverse to keep the axis increasing.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = n - 1 - i;
    out.axis[i] = phys::lambda_nm_from_omega(omega_center + spectrum.axis[r]);
    out.intensity[i] = spectrum.intensity[r];
  }
  peak_normalize(out);
  return out;
}

// ---------------------------------------------------------------------------
// Instrument response

Spectrum convolve_response(const Spectrum& spectrum, double resolution_fwhm,
                           ResponseShape shape) {
  if (!(resolution_fwhm > 0.0))
    throw DomainError("convolve_response: resolution must be positive");
  require_uniform_axis(spectrum, "convolve_response");

  const double step = spectrum.axis[1] - spectrum.axis[0];
  const double span = spectrum.axis.back() - spectrum.axis.front();

  std::size_t m_half;
  if (shape == ResponseShape::Gaussian) {
    const double sigma = resolution_fwhm / (2.0 * std::sqrt(2.0 * phys::ln2));
    m_half = static_cast<std::size_t>(std::ceil(7.0 * sigma / step));
  } else {
    m_half = static_cast<std::size_t>(std::ceil(0.5 * resolution_fwhm / step));
  }
  if (2.0 * static_cast<double>(m_half) * step > span) {
    std::ostringstream os;
    os << "convolve_response: kernel support "
       << 2.0 * static_cast<double>(m_half) * step << " exceeds the axis span "
       << span;
    throw SizingError(os.str());
  }

  std::vector<double> kernel(2 * m_half + 1);
  if (shape == ResponseShape::Gaussian) {
    const double sigma = resolution_fwhm / (2.0 * std::sqrt(2.0 * phys::ln2));
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      const double d = (static_cast<double>(k) - static_cast<double>(m_half)) * step;
      kernel[k] = std::exp(-0.5 * d * d / (sigma * sigma));
    }
  } else {
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      const double d = std::abs((static_cast<double>(k) - static_cast<double>(m_half)) * step);
      kernel[k] = d <= 0.5 * resolution_fwhm ? 1.0 : 0.0;
    }
  }
  const double ksum = kahan_total(kernel) * step;
  for (double& k : kernel) k /= ksum;  // exact unit area on the lattice

  const std::size_t n = spectrum.size();
  Spectrum out;
  out.axis = spectrum.axis;
  out.unit = spectrum.unit;
  out.kind = spectrum.kind;
  out.intensity.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    KahanSum sum;
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) +
                               static_cast<std::ptrdiff_t>(k) -
                               static_cast<std::ptrdiff_t>(m_half);
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;  // zero padding
      sum.add(kernel[k] * spectrum.intensity[static_cast<std::size_t>(j)]);
    }
    out.intensity[i] = sum.value() * step;
  }

  const double before = kahan_total(spectrum.intensity) * step;
  const double after = kahan_total(out.intensity) * step;
  // Slowly decaying tails (sinc^2 wings) shed a little mass at the axis
  // edges; only a gross change signals a spectrum that was never contained.
  if (std::abs(after - before) > 1e-3 * std::abs(before)) {
    std::ostringstream os;
    os << "convolve_response: integral not preserved (" << before << " -> "
       << after << "); spectrum support reaches the axis edge";
    throw NumericalError(os.str());
  }
  peak_normalize(out);
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian fitting

namespace {

struct GaussParams {
  double amplitude, center, fwhm, baseline;
};

double gauss_model(const GaussParams& p, double x) {
  const double u = (x - p.center) / p.fwhm;
  return p.amplitude * std::exp(-4.0 * phys::ln2 * u * u) + p.baseline;
}

// Solve the symmetric 4x4 system a*dx = b in place; returns false when the
// pivot collapses.
bool solve4(double a[4][4], double b[4], double dx[4]) {
  int perm[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[perm[r]][col]) > std::abs(a[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const double diag = a[perm[col]][col];
    if (std::abs(diag) < 1e-300) return false;
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[perm[r]][col] / diag;
      for (int c = col; c < 4; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  for (int col = 3; col >= 0; --col) {
    double s = b[perm[col]];
    for (int c = col + 1; c < 4; ++c) s -= a[perm[col]][c] * dx[c];
    dx[col] = s / a[perm[col]][col];
  }
  return true;
}

// Inverse of a symmetric positive-definite 4x4 via Gauss-Jordan.
bool invert4(const double in[4][4], double out[4][4]) {
  double a[4][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j)
      a[i][j] = j < 4 ? in[i][j] : (j - 4 == i ? 1.0 : 0.0);
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return false;
    for (int j = 0; j < 8; ++j) std::swap(a[col][j], a[piv][j]);
    const double d = a[col][col];
    for (int j = 0; j < 8; ++j) a[col][j] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (int j = 0; j < 8; ++j) a[r][j] -= f * a[col][j];
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = a[i][j + 4];
  return true;
}

double chi_squared(const GaussParams& p, const std::vector<double>& x,
                   const std::vector<double>& y, const std::vector<double>& w) {
  KahanSum sum;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (gauss_model(p, x[i]) - y[i]) * w[i];
    sum.add(r * r);
  }
  return sum.value();
}

}  // namespace

FitResult fit_gaussian(const std::vector<double>& x,
                       const std::vector<double>& y,
                       const std::vector<double>* sigmas) {
  if (x.size() != y.size())
    throw DomainError("fit_gaussian: axis/intensity size mismatch");
  if (x.size() < 5)
    throw DomainError("fit_gaussian: needs at least 5 points spanning the peak");
  if (sigmas && sigmas->size() != x.size())
    throw DomainError("fit_gaussian: sigma column size mismatch");

  const std::size_t n = x.size();
  std::vector<double> w(n, 1.0);
  if (sigmas) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!((*sigmas)[i] > 0.0))
        throw DomainError("fit_gaussian: non-positive sigma");
      w[i] = 1.0 / (*sigmas)[i];
    }
  }

  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  if (*ymax_it == *ymin_it)
    throw DomainError("fit_gaussian: degenerate data (zero variance)");

  GaussParams p;
  p.baseline = *ymin_it;
  p.amplitude = *ymax_it - *ymin_it;
  const std::size_t imax = static_cast<std::size_t>(ymax_it - y.begin());
  p.center = x[imax];
  {
    // Rough half-maximum width for the start point.
    const double half = p.baseline + 0.5 * p.amplitude;
    double lo = x.front(), hi = x.back();
    for (std::size_t i = imax; i-- > 0;)
      if (y[i] < half) { lo = x[i]; break; }
    for (std::size_t i = imax + 1; i < n; ++i)
      if (y[i] < half) { hi = x[i]; break; }
    p.fwhm = std::max(hi - lo, (x.back() - x.front()) / static_cast<double>(n));
  }

  double lambda = 1e-3;
  double chi2 = chi_squared(p, x, y, w);
  const int max_iter = 200;
  bool converged = false;
  int iter = 0;

  for (; iter < max_iter; ++iter) {
    double jtj[4][4] = {};
    double jtr[4] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (x[i] - p.center) / p.fwhm;
      const double e = std::exp(-4.0 * phys::ln2 * u * u);
      const double f = p.amplitude * e + p.baseline;
      const double j0 = e;
      const double j1 = p.amplitude * e * 8.0 * phys::ln2 * u / p.fwhm;
      const double j2 = p.amplitude * e * 8.0 * phys::ln2 * u * u / p.fwhm;
      const double j3 = 1.0;
      const double jac[4] = {j0, j1, j2, j3};
      const double r = (f - y[i]) * w[i];
      for (int a = 0; a < 4; ++a) {
        jtr[a] += jac[a] * w[i] * r;
        for (int b = a; b < 4; ++b) jtj[a][b] += jac[a] * w[i] * jac[b] * w[i];
      }
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

    double damped[4][4];
    double rhs[4], dx[4];
    bool stepped = false;
    for (int attempt = 0; attempt < 32 && !stepped; ++attempt) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) damped[a][b] = jtj[a][b];
        damped[a][a] *= 1.0 + lambda;
        rhs[a] = -jtr[a];
      }
      if (!solve4(damped, rhs, dx)) {
        lambda *= 10.0;
        continue;
      }
      GaussParams trial = p;
      trial.amplitude += dx[0];
      trial.center += dx[1];
      trial.fwhm += dx[2];
      trial.baseline += dx[3];
      trial.fwhm = std::abs(trial.fwhm);
      if (!(trial.fwhm > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const double trial_chi2 = chi_squared(trial, x, y, w);
      if (trial_chi2 <= chi2) {
        const double rel_step =
            std::max({std::abs(dx[0]) / (std::abs(p.amplitude) + 1e-300),
                      std::abs(dx[1]) / (std::abs(p.fwhm) + 1e-300),
                      std::abs(dx[2]) / (std::abs(p.fwhm) + 1e-300)});
        const double rel_drop = (chi2 - trial_chi2) / (chi2 + 1e-300);
        p = trial;
        chi2 = trial_chi2;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel_step < 1e-10 || rel_drop < 1e-14) converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) {
      // No downhill step found at any damping: treat as converged stall.
      converged = chi2 / static_cast<double>(n) < 1e30;
      break;
    }
    if (converged) break;
  }

  if (!converged) {
    std::ostringstream os;
    os << "fit_gaussian: no convergence after " << max_iter
       << " iterations; best point center=" << p.center << " fwhm=" << p.fwhm
       << " amplitude=" << p.amplitude << " baseline=" << p.baseline
       << " chi2=" << chi2;
    throw NumericalError(os.str());
  }

  // Covariance from the quadratic model at the optimum.
  double jtj[4][4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (x[i] - p.center) / p.fwhm;
    const double e = std::exp(-4.0 * phys::ln2 * u * u);
    const double jac[4] = {e, p.amplitude * e * 8.0 * phys::ln2 * u / p.fwhm,
                           p.amplitude * e * 8.0 * phys::ln2 * u * u / p.fwhm, 1.0};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) jtj[a][b] += jac[a] * w[i] * jac[b] * w[i];
  }
  double cov[4][4];
  FitResult out;
  out.amplitude = p.amplitude;
  out.center = p.center;
  out.fwhm = std::abs(p.fwhm);
  out.baseline = p.baseline;
  out.iterations = iter + 1;
  out.converged = true;
  out.residual_rms = std::sqrt(chi2 / static_cast<double>(n));
  if (invert4(jtj, cov)) {
    // Unweighted fits estimate the data variance from the residuals.
    const double s2 = sigmas ? 1.0 : chi2 / static_cast<double>(n - 4);
    out.center_sigma = std::sqrt(std::max(0.0, cov[1][1] * s2));
    out.fwhm_sigma = std::sqrt(std::max(0.0, cov[2][2] * s2));
  }
  return out;
}

}  // namespace biphoton
