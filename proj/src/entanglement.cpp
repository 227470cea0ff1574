#include "biphoton/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biphoton/constants.hpp"
#include "biphoton/numeric.hpp"

extern "C" {
void dgesdd_(const char* jobz, const int* m, const int* n, double* a,
             const int* lda, double* s, double* u, const int* ldu, double* vt,
             const int* ldvt, double* work, const int* lwork, int* iwork,
             int* info);
}

namespace biphoton {

namespace {

using phys::c_vacuum;

// Singular values (descending) of a dense matrix; the storage order does not
// matter because sigma(A) = sigma(A^T).
std::vector<double> singular_values(std::vector<double> a, int n_rows,
                                    int n_cols) {
  std::vector<double> s(static_cast<std::size_t>(std::min(n_rows, n_cols)));
  std::vector<int> iwork(8 * s.size());
  int info = 0;
  int lwork = -1;
  int one = 1;
  double work_query = 0.0;
  dgesdd_("N", &n_rows, &n_cols, a.data(), &n_rows, s.data(), nullptr, &one,
          nullptr, &one, &work_query, &lwork, iwork.data(), &info);
  if (info != 0)
    throw NumericalError("dgesdd workspace query failed, info=" + std::to_string(info));
  lwork = static_cast<int>(work_query);
  std::vector<double> work(static_cast<std::size_t>(lwork));
  dgesdd_("N", &n_rows, &n_cols, a.data(), &n_rows, s.data(), nullptr, &one,
          nullptr, &one, work.data(), &lwork, iwork.data(), &info);
  if (info != 0) {
    std::ostringstream os;
    os << "singular value decomposition failed (dgesdd info=" << info
       << ", matrix " << n_rows << "x" << n_cols << ")";
    throw NumericalError(os.str());
  }
  return s;
}

double schmidt_number(const std::vector<double>& singular) {
  KahanSum s2, s4;
  for (double s : singular) {
    const double q = s * s;
    s2.add(q);
    s4.add(q * q);
  }
  if (!(s4.value() > 0.0))
    throw NumericalError("all singular values vanish");
  const double t = s2.value();
  return t * t / s4.value();
}

}  // namespace

// ---------------------------------------------------------------------------
// Analytic widths and R

AnalyticWidths analytic_widths_short_pulse(const PhaseMatchConstants& constants,
                                           double length_m,
                                           const PumpSpec& pump) {
  if (!(constants.walkoff_A > 0.0))
    throw RegimeError("analytic widths undefined: walk-off constant A <= 0");
  if (!(constants.dispersion_B > 0.0))
    throw RegimeError("analytic widths undefined: dispersion constant B <= 0");

  AnalyticWidths out;
  out.eta = control_parameter(constants.walkoff_A, length_m, pump.tau_s);
  if (out.eta >= 1.0) {
    std::ostringstream os;
    os << "short-pulse formulas refused at eta = " << out.eta
       << " (valid for eta < 1)";
    throw RegimeError(os.str());
  }
  out.intermediate_warning = out.eta > 0.2;
  out.delta_omega_c = 5.56 * c_vacuum / (constants.walkoff_A * length_m);
  out.delta_omega_s = std::sqrt(2.0 * constants.walkoff_A * phys::ln2 *
                                constants.omega_p /
                                (constants.dispersion_B * pump.tau_s));
  return out;
}

Ratio r_from_widths(const WidthMeasurement& single_width,
                    const WidthMeasurement& coincidence_width) {
  if (single_width.unit != coincidence_width.unit)
    throw DomainError("r_from_widths: mixed width units");
  if (!(single_width.value > 0.0) || !(coincidence_width.value > 0.0))
    throw DomainError("r_from_widths: widths must be positive");
  if (single_width.sigma < 0.0 || coincidence_width.sigma < 0.0)
    throw DomainError("r_from_widths: negative uncertainty");

  Ratio out;
  out.value = single_width.value / coincidence_width.value;
  const double rs = single_width.sigma / single_width.value;
  const double rc = coincidence_width.sigma / coincidence_width.value;
  out.sigma = out.value * std::sqrt(rs * rs + rc * rc);
  return out;
}

// ---------------------------------------------------------------------------
// Dense Schmidt decomposition

SchmidtResult schmidt_decomposition(const JointSpectralAmplitude& jsa) {
  const FrequencyGrid& g = jsa.grid;
  if (!g.square_symmetric())
    throw DomainError(
        "schmidt_decomposition: square sampling required (n1 == n2, same axes)");
  const int n = static_cast<int>(g.n1());

  const double cell = std::sqrt(g.step1() * g.step2());
  std::vector<double> matrix(jsa.amplitude.size());
  for (std::size_t i = 0; i < matrix.size(); ++i)
    matrix[i] = jsa.amplitude[i] * cell;

  std::vector<double> s = singular_values(std::move(matrix), n, n);
  KahanSum total;
  for (double v : s) total.add(v * v);
  if (!(total.value() > 0.0))
    throw NumericalError("schmidt_decomposition: zero amplitude matrix");

  SchmidtResult out;
  out.eigenvalues.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    out.eigenvalues[i] = s[i] * s[i] / total.value();
  out.K = schmidt_number(s);

  // Convergence record: decimate to every other grid point and repeat.
  {
    const std::size_t nh = (g.n1() + 1) / 2;
    std::vector<double> half(nh * nh);
    for (std::size_t i = 0; i < nh; ++i)
      for (std::size_t j = 0; j < nh; ++j)
        half[i * nh + j] = jsa.at(2 * i, 2 * j);
    // The uniform scale factor drops out of K.
    std::vector<double> sh =
        singular_values(std::move(half), static_cast<int>(nh), static_cast<int>(nh));
    out.K_half_density = schmidt_number(sh);
  }
  out.converged = std::abs(out.K - out.K_half_density) <= 0.01 * out.K;
  return out;
}

// ---------------------------------------------------------------------------
// Purity quadrature

PurityConfig PurityConfig::fast() {
  PurityConfig cfg;
  cfg.m_samples_per_width = 1.5;
  cfg.d_half_widths = 18.0;
  cfg.d_samples_per_width = 6.0;
  cfg.t_samples_per_width = 8.0;
  cfg.x_max = 12.0 * phys::pi;
  return cfg;
}

namespace {

std::vector<Band> intersect_bands(const std::vector<Band>& a,
                                  const std::vector<Band>& b) {
  std::vector<Band> out;
  for (const Band& x : a) {
    for (const Band& y : b) {
      const double lo = std::max(x.lo, y.lo);
      const double hi = std::min(x.hi, y.hi);
      if (hi > lo) out.push_back({lo, hi});
    }
  }
  return out;
}

struct PurityPass {
  double purity = 0.0;
  double norm = 0.0;
  std::size_t evaluations = 0;
};

PurityPass purity_pass(const std::function<double(double, double)>& kernel,
                       const KernelHints& hints, const PurityConfig& cfg,
                       double density) {
  const double w = hints.cond_width;
  // Near-separable states have cond_width ~ marginal width; the m grid must
  // resolve the marginal envelope too, not just the coherence band.
  const double m_step =
      std::min(w / cfg.m_samples_per_width, hints.marginal_half / 24.0) /
      density;
  const double d_step = w / (cfg.d_samples_per_width * density);
  const double t_step = w / (cfg.t_samples_per_width * density);
  const double d_max = cfg.d_half_widths * w;

  const std::ptrdiff_t m_half =
      static_cast<std::ptrdiff_t>(std::ceil(hints.marginal_half / m_step));
  const std::size_t n_d = static_cast<std::size_t>(std::ceil(d_max / d_step)) + 1;

  auto rho = [&](double nu1, double nu1p, std::size_t& evals) {
    const auto bands =
        intersect_bands(hints.bands(nu1), hints.bands(nu1p));
    double total = 0.0;
    for (const Band& band : bands) {
      std::size_t nt =
          static_cast<std::size_t>(std::ceil(band.width() / t_step));
      nt = std::clamp<std::size_t>(nt, 16, 100000) | 1;
      const double h = band.width() / static_cast<double>(nt - 1);
      KahanSum sum;
      for (std::size_t k = 0; k < nt; ++k) {
        const double t = band.lo + h * static_cast<double>(k);
        sum.add(trapezoid_weight(k, nt) * kernel(nu1, t) * kernel(nu1p, t));
      }
      evals += 2 * nt;
      total += sum.value() * h;
    }
    return total;
  };

  PurityPass out;
  KahanSum purity_sum, norm_sum;
  const std::size_t n_m = static_cast<std::size_t>(2 * m_half + 1);
  for (std::ptrdiff_t i = -m_half; i <= m_half; ++i) {
    const double m = static_cast<double>(i) * m_step;
    const double wm =
        trapezoid_weight(static_cast<std::size_t>(i + m_half), n_m);

    // d-integral: rho(m, d) is even in d, so integrate d >= 0 and double.
    KahanSum row;
    double rho0 = 0.0;
    for (std::size_t j = 0; j < n_d; ++j) {
      const double d = static_cast<double>(j) * d_step;
      const double r =
          rho(m + 0.5 * d, m - 0.5 * d, out.evaluations);
      if (j == 0) rho0 = r;
      row.add(trapezoid_weight(j, n_d) * r * r);
    }
    purity_sum.add(wm * 2.0 * row.value() * d_step);
    norm_sum.add(wm * rho0);
  }
  out.purity = purity_sum.value() * m_step;
  out.norm = norm_sum.value() * m_step;
  return out;
}

}  // namespace

PurityResult purity_K(const std::function<double(double, double)>& kernel,
                      const KernelHints& hints, const PurityConfig& cfg) {
  if (!(hints.cond_width > 0.0) || !(hints.marginal_half > 0.0) || !hints.bands)
    throw DomainError("purity_K: incomplete kernel hints");

  // Upfront cost estimate against the evaluation budget.
  {
    const double n_m =
        2.0 * hints.marginal_half /
        std::min(hints.cond_width / cfg.m_samples_per_width,
                 hints.marginal_half / 24.0);
    const double n_d = cfg.d_half_widths * cfg.d_samples_per_width;
    double band_width = 0.0;
    for (const Band& b : hints.bands(0.0)) band_width += b.width();
    const double n_t =
        band_width / (hints.cond_width / cfg.t_samples_per_width);
    const double estimate = n_m * (n_d + 1.0) * std::max(n_t, 16.0) * 2.0;
    if (estimate > static_cast<double>(cfg.eval_budget)) {
      std::ostringstream os;
      os << "purity quadrature needs ~" << estimate
         << " kernel evaluations, over the budget of " << cfg.eval_budget;
      throw SizingError(os.str());
    }
  }

  const PurityPass full = purity_pass(kernel, hints, cfg, 1.0);
  const PurityPass half = purity_pass(kernel, hints, cfg, 0.5);
  if (!(full.purity > 0.0) || !(full.norm > 0.0))
    throw NumericalError("purity quadrature produced a non-positive integral");

  PurityResult out;
  out.norm = full.norm;
  out.purity = full.purity / (full.norm * full.norm);
  out.K = full.norm * full.norm / full.purity;
  out.K_half_density = half.norm * half.norm / half.purity;
  out.converged = std::abs(out.K - out.K_half_density) <= 0.01 * out.K;
  out.evaluations = full.evaluations + half.evaluations;
  return out;
}

PurityResult purity_quadrature_K(const PhaseMatchConstants& constants,
                                 const PumpSpec& pump, double length_m,
                                 const PurityConfig& cfg) {
  if (!(constants.walkoff_A > 0.0) || !(constants.dispersion_B > 0.0))
    throw RegimeError("purity quadrature needs A > 0 and B > 0");

  const double sigma_plus = 2.0 * std::sqrt(phys::ln2) / pump.tau_s;
  const double gauss_half = cfg.gauss_sigmas * sigma_plus;
  const double x_reach = cfg.x_max * 2.0 * c_vacuum / length_m;
  const double minus_half =
      std::sqrt(constants.omega_p / constants.dispersion_B *
                (constants.walkoff_A * gauss_half + x_reach));
  const double plus_half =
      std::min(gauss_half, x_reach / constants.walkoff_A);

  KernelHints hints;
  hints.cond_width = std::min(5.56 * c_vacuum / (constants.walkoff_A * length_m),
                              pump.bandwidth_rad_s());
  hints.marginal_half = 0.5 * (minus_half + plus_half);
  hints.bands = [&constants, &pump, length_m, &cfg](double nu1) {
    return conditional_bands(constants, pump, length_m, nu1, cfg.x_max,
                             cfg.gauss_sigmas);
  };
  const auto kernel = [&constants, &pump, length_m](double nu1, double nu2) {
    return evaluate_amplitude(constants, pump, length_m, nu1, nu2);
  };
  return purity_K(kernel, hints, cfg);
}

// ---------------------------------------------------------------------------
// Sweep and bound

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2)
    throw DomainError("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double ratio = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo * std::exp(ratio * static_cast<double>(i));
  return out;
}

SweepTable sweep_quantifiers(const PhaseMatchConstants& base, double length_m,
                             double lambda_p_nm,
                             const std::vector<double>& taus_s, bool want_r,
                             bool want_k, const PurityConfig& purity) {
  if (taus_s.empty()) throw DomainError("sweep_quantifiers: empty tau list");
  for (double t : taus_s)
    if (!(t > 0.0)) throw DomainError("sweep_quantifiers: tau must be positive");

  SweepTable table;
  table.rows.reserve(taus_s.size());
  for (double tau : taus_s) {
    SweepRow row;
    row.tau_s = tau;
    const PumpSpec pump(lambda_p_nm, tau);
    PhaseMatchConstants constants = base;
    try {
      constants.eta = control_parameter(constants.walkoff_A, length_m,
                                        pump.tau_s);
      row.eta = constants.eta;
      if (want_r && *constants.eta < 1.0) {
        const AnalyticWidths w =
            analytic_widths_short_pulse(constants, length_m, pump);
        row.r_analytic = w.delta_omega_s / w.delta_omega_c;
      }
      if (want_k) {
        const PurityResult k =
            purity_quadrature_K(constants, pump, length_m, purity);
        row.k_numerical = k.K;
        row.k_converged = k.converged;
      }
    } catch (const Error& e) {
      row.note = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SweepTable sweep_quantifiers(const CrystalSpec& crystal, double lambda_p_nm,
                             const std::vector<double>& taus_s, bool want_r,
                             bool want_k, const PurityConfig& purity) {
  if (taus_s.empty()) throw DomainError("sweep_quantifiers: empty tau list");
  // A and B depend only on the crystal and the pump wavelength.
  const PumpSpec probe(lambda_p_nm, taus_s.front());
  const PhaseMatchConstants base = walkoff_constants(crystal, probe);
  return sweep_quantifiers(base, crystal.length_m, lambda_p_nm, taus_s, want_r,
                           want_k, purity);
}

double total_entanglement_bound(double r_angle, double r_omega) {
  if (!(r_angle >= 1.0) || !(r_omega >= 1.0))
    throw DomainError("total_entanglement_bound: both ratios must be >= 1");
  return 2.0 * r_angle * r_omega;
}

}  // namespace biphoton
