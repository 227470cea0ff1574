#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/spectra.hpp"

// Entanglement quantifiers of the biphoton state: the analytic short-pulse
// widths, the width ratio R (single/coincidence), the Schmidt number K from
// a dense singular-value decomposition or from a purity quadrature, the
// R(tau)/K(tau) sweep and the conventional total-entanglement upper bound.

namespace biphoton {

struct AnalyticWidths {
  double delta_omega_c = 0.0;  // 5.56 c / (A L)
  double delta_omega_s = 0.0;  // sqrt(2 A ln2 omega_p / (B tau))
  double eta = 0.0;
  bool intermediate_warning = false;  // 0.2 < eta < 1
};

// Short-pulse analytic FWHMs; refuses eta >= 1 where the formulas do not
// apply and flags the warning band 0.2 < eta < 1.
AnalyticWidths analytic_widths_short_pulse(const PhaseMatchConstants& constants,
                                           double length_m,
                                           const PumpSpec& pump);

struct WidthMeasurement {
  double value = 0.0;
  double sigma = 0.0;
  AxisUnit unit = AxisUnit::Nanometer;
};

struct Ratio {
  double value = 0.0;
  double sigma = 0.0;
};

// R = single/coincidence with first-order uncertainty propagation. The two
// widths must share a unit tag.
Ratio r_from_widths(const WidthMeasurement& single_width,
                    const WidthMeasurement& coincidence_width);

// ---------------------------------------------------------------------------
// Schmidt number, dense route

struct SchmidtResult {
  std::vector<double> eigenvalues;  // descending, sum to 1
  double K = 0.0;
  double K_half_density = 0.0;  // same state, every other grid point
  bool converged = false;       // |K - K_half|/K < 1%
};

// Singular values of the sampled amplitude scaled by the grid step give the
// Schmidt eigenvalues lambda_n = s_n^2 / sum s^2 and K = 1/sum lambda^2.
// Requires square sampling (n1 == n2, identical axes).
SchmidtResult schmidt_decomposition(const JointSpectralAmplitude& jsa);

// ---------------------------------------------------------------------------
// Schmidt number, purity-quadrature route

// K = 1/Tr(rho_1^2) with the purity evaluated as a quadrature of
// Psi(nu1,nu2) Psi(nu1',nu2) Psi(nu1',nu2') Psi(nu1,nu2') factored through
// rho_1(nu1,nu1') on a band around the diagonal (sheared coordinates
// m = (nu1+nu1')/2, d = nu1-nu1'); used when a dense matrix would exceed
// the point budget.
struct PurityConfig {
  double m_samples_per_width = 2.0;   // m step = cond_width / this
  double d_half_widths = 25.0;        // |d| <= this * cond_width
  double d_samples_per_width = 8.0;   // d step = cond_width / this
  double t_samples_per_width = 12.0;  // inner-integral density
  double x_max = 16.0 * 3.141592653589793;  // sinc-argument capture
  double gauss_sigmas = 6.0;                // pump-envelope capture
  std::size_t eval_budget = 600'000'000;    // kernel evaluations, full density

  static PurityConfig fast();  // sweep-grade accuracy (~1-2%)
};

struct KernelHints {
  double cond_width = 0.0;     // narrow (conditional/coherence) scale
  double marginal_half = 0.0;  // half-extent of the single-photon support
  std::function<std::vector<Band>(double nu1)> bands;  // partner support
};

struct PurityResult {
  double K = 0.0;
  double K_half_density = 0.0;
  bool converged = false;
  double purity = 0.0;  // Tr(rho_1^2) of the unit-normalized state
  double norm = 0.0;    // quadrature norm of the raw kernel
  std::size_t evaluations = 0;
};

PurityResult purity_K(const std::function<double(double, double)>& kernel,
                      const KernelHints& hints, const PurityConfig& config = {});

PurityResult purity_quadrature_K(const PhaseMatchConstants& constants,
                                 const PumpSpec& pump, double length_m,
                                 const PurityConfig& config = {});

// ---------------------------------------------------------------------------
// Sweep and bound

struct SweepRow {
  double tau_s = 0.0;
  std::optional<double> eta;
  std::optional<double> r_analytic;  // only emitted where eta < 1
  std::optional<double> k_numerical;
  bool k_converged = false;
  std::string note;  // per-row failure record
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

// Per-tau quantifiers at fixed crystal and pump wavelength. A and B do not
// depend on tau and are computed once. Row failures are recorded in the row
// and the sweep continues.
SweepTable sweep_quantifiers(const CrystalSpec& crystal, double lambda_p_nm,
                             const std::vector<double>& taus_s,
                             bool want_r = true, bool want_k = true,
                             const PurityConfig& purity = PurityConfig::fast());

// Same sweep from ready-made constants (anchored A/B route).
SweepTable sweep_quantifiers(const PhaseMatchConstants& base, double length_m,
                             double lambda_p_nm,
                             const std::vector<double>& taus_s,
                             bool want_r = true, bool want_k = true,
                             const PurityConfig& purity = PurityConfig::fast());

// R_tot = 2 * R_angle * R_omega: an upper bound on the dimensionality of the
// joint polarization-angle-frequency space, not an exact count.
double total_entanglement_bound(double r_angle, double r_omega);

// ---------------------------------------------------------------------------
// Assembled report (populated by the CLI layer)

struct EntanglementReport {
  double lambda_p_nm = 0.0;
  double lambda_c_nm = 0.0;
  double tau_fs = 0.0;
  double delta_lambda_p_nm = 0.0;
  double eta = 0.0;
  std::string regime;

  double delta_omega_c_analytic = 0.0;
  double delta_omega_s_analytic = 0.0;
  double delta_lambda_c_analytic_nm = 0.0;
  double delta_lambda_s_analytic_nm = 0.0;

  std::optional<double> delta_omega_c_numeric;
  std::optional<double> delta_omega_s_numeric;
  std::optional<double> delta_lambda_c_numeric_nm;
  std::optional<double> delta_lambda_s_numeric_nm;

  double resolution_nm = 0.0;
  std::optional<double> convolved_coincidence_nm;  // analytic (+) response

  double r_analytic = 0.0;
  std::optional<Ratio> r_numeric;
  std::optional<Ratio> r_measured;

  std::optional<double> k_value;
  bool k_converged = false;
  std::string k_method;

  std::optional<FitResult> measured_coincidence_fit;
  std::optional<FitResult> measured_singles_fit;

  bool discrepancy_flagged = false;  // |numeric-analytic|/analytic > 10%
  std::vector<std::string> notes;
};

}  // namespace biphoton
