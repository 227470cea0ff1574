#include "biphoton/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "biphoton/constants.hpp"
#include "biphoton/io.hpp"

namespace biphoton {

namespace {

std::string num(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::optional<FitResult> fit_measured(const std::string& path,
                                      std::vector<std::string>& notes,
                                      const char* label) {
  if (path.empty()) return std::nullopt;
  const MeasuredData data = read_measured_csv(path);
  const std::vector<double>* sig = data.sigma ? &*data.sigma : nullptr;
  const FitResult fit = fit_gaussian(data.axis, data.intensity, sig);
  if (data.unit != AxisUnit::Nanometer)
    notes.push_back(std::string(label) + ": measured axis is not in nm; "
                    "widths reported in file units");
  return fit;
}

}  // namespace

EntanglementReport make_report(const RunConfig& config,
                               const ReportOptions& options) {
  const PumpSpec pump = config.pump();
  const PhaseMatchConstants constants = config.constants();
  const double length_m = phys::mm_to_m(config.length_mm);
  const double lambda_c_nm = 2.0 * config.lambda_p_nm;

  EntanglementReport rep;
  rep.lambda_p_nm = config.lambda_p_nm;
  rep.lambda_c_nm = lambda_c_nm;
  rep.tau_fs = config.tau_fs;
  rep.delta_lambda_p_nm = pump.bandwidth_nm();

  if (constants.degenerate)
    throw RegimeError("report unavailable: walk-off constant A <= 0 "
                      "(degenerate dispersion model)");

  const AnalyticWidths widths =
      analytic_widths_short_pulse(constants, length_m, pump);
  rep.eta = widths.eta;
  rep.regime = regime_name(classify_regime(widths.eta));
  if (widths.intermediate_warning)
    rep.notes.push_back("eta in (0.2, 1): short-pulse formulas are "
                        "approaching their validity edge");

  rep.delta_omega_c_analytic = widths.delta_omega_c;
  rep.delta_omega_s_analytic = widths.delta_omega_s;
  rep.delta_lambda_c_analytic_nm =
      width_to_wavelength(widths.delta_omega_c, lambda_c_nm);
  rep.delta_lambda_s_analytic_nm =
      width_to_wavelength(widths.delta_omega_s, lambda_c_nm);
  rep.r_analytic = widths.delta_omega_s / widths.delta_omega_c;

  if (options.numerical_widths) {
    const Spectrum coinc = coincidence_spectrum_direct(
        constants, pump, length_m, config.idler_fix_rad_s);
    const Spectrum singles = single_spectrum_direct(constants, pump, length_m);
    rep.delta_omega_c_numeric = fwhm(coinc);
    rep.delta_omega_s_numeric = fwhm(singles);
    rep.delta_lambda_c_numeric_nm =
        width_to_wavelength(*rep.delta_omega_c_numeric, lambda_c_nm);
    rep.delta_lambda_s_numeric_nm =
        width_to_wavelength(*rep.delta_omega_s_numeric, lambda_c_nm);
    Ratio rn;
    rn.value = *rep.delta_omega_s_numeric / *rep.delta_omega_c_numeric;
    rep.r_numeric = rn;
    const double rel =
        std::abs(rn.value - rep.r_analytic) / rep.r_analytic;
    if (rel > 0.10) {
      rep.discrepancy_flagged = true;
      std::ostringstream os;
      os << "numerical R deviates from analytic R by " << num(100.0 * rel, 3)
         << "%";
      rep.notes.push_back(os.str());
    }
  }

  rep.resolution_nm = config.resolution_nm;
  if (config.resolution_nm > 0.0) {
    // Analytic coincidence width combined with the instrument response in
    // quadrature (exact for Gaussian-on-Gaussian, a close bound here).
    const double w = rep.delta_lambda_c_analytic_nm;
    rep.convolved_coincidence_nm =
        std::sqrt(w * w + config.resolution_nm * config.resolution_nm);
  }

  if (options.with_schmidt) {
    const PurityResult k =
        purity_quadrature_K(constants, pump, length_m, options.purity);
    rep.k_value = k.K;
    rep.k_converged = k.converged;
    rep.k_method = "purity-quadrature";
    if (!k.converged)
      rep.notes.push_back("K not converged at 1% under density doubling");
  }

  rep.measured_coincidence_fit =
      fit_measured(config.measured_coincidence_csv, rep.notes, "coincidence");
  rep.measured_singles_fit =
      fit_measured(config.measured_singles_csv, rep.notes, "singles");
  if (rep.measured_coincidence_fit && rep.measured_singles_fit) {
    WidthMeasurement s{rep.measured_singles_fit->fwhm,
                       rep.measured_singles_fit->fwhm_sigma,
                       AxisUnit::Nanometer};
    WidthMeasurement c{rep.measured_coincidence_fit->fwhm,
                       rep.measured_coincidence_fit->fwhm_sigma,
                       AxisUnit::Nanometer};
    rep.r_measured = r_from_widths(s, c);
  }
  if (rep.measured_coincidence_fit && rep.convolved_coincidence_nm) {
    const FitResult& f = *rep.measured_coincidence_fit;
    if (f.fwhm + f.fwhm_sigma < *rep.convolved_coincidence_nm) {
      std::ostringstream os;
      os << "measured coincidence width " << num(f.fwhm, 3) << " +- "
         << num(f.fwhm_sigma, 2) << " nm is narrower than the "
         << "resolution-convolved prediction "
         << num(*rep.convolved_coincidence_nm, 3) << " nm";
      rep.notes.push_back(os.str());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_report_table(const EntanglementReport& r) {
  std::ostringstream os;
  auto row = [&os](const std::string& label, const std::string& theory,
                   const std::string& measured) {
    os << "  " << std::left << std::setw(26) << label << std::setw(26) << theory
       << measured << "\n";
  };
  auto pm = [](const FitResult& f) {
    return num(f.fwhm, 4) + " +- " + num(f.fwhm_sigma, 2) + " nm";
  };

  os << "  " << std::left << std::setw(26) << "" << std::setw(26)
     << "Theory model" << "Measured" << "\n";
  os << "Pump\n";
  row("lambda_p", num(r.lambda_p_nm, 6) + " nm", "");
  row("delta_lambda_p", num(r.delta_lambda_p_nm, 4) + " nm", "");
  row("tau", num(r.tau_fs, 4) + " fs", "");
  row("eta", num(r.eta, 4) + " (" + r.regime + " pulse)", "");

  os << "Coincidence distribution\n";
  row("lambda_c", num(r.lambda_c_nm, 6) + " nm",
      r.measured_coincidence_fit
          ? num(r.measured_coincidence_fit->center, 6) + " nm (fit)"
          : "");
  row("delta_lambda_c", num(r.delta_lambda_c_analytic_nm, 4) + " nm",
      r.measured_coincidence_fit ? pm(*r.measured_coincidence_fit) : "");
  if (r.delta_lambda_c_numeric_nm)
    row("  numerical", num(*r.delta_lambda_c_numeric_nm, 4) + " nm", "");
  if (r.convolved_coincidence_nm)
    row("  with response", num(*r.convolved_coincidence_nm, 4) + " nm (" +
                                num(r.resolution_nm, 3) + " nm resolution)",
        "");

  os << "Single counts distribution\n";
  row("delta_lambda_s", num(r.delta_lambda_s_analytic_nm, 4) + " nm",
      r.measured_singles_fit ? pm(*r.measured_singles_fit) : "");
  if (r.delta_lambda_s_numeric_nm)
    row("  numerical", num(*r.delta_lambda_s_numeric_nm, 4) + " nm", "");

  os << "R quantifier\n";
  row("R", num(r.r_analytic, 6),
      r.r_measured ? num(r.r_measured->value, 6) + " +- " +
                         num(r.r_measured->sigma, 3)
                   : "");
  if (r.r_numeric) row("  numerical", num(r.r_numeric->value, 6), "");
  if (r.k_value) {
    row("K (" + r.k_method + ")",
        num(*r.k_value, 6) + (r.k_converged ? "" : " [not converged]"), "");
  }
  for (const auto& note : r.notes) os << "note: " << note << "\n";
  return os.str();
}

std::string render_report_keyvalues(const EntanglementReport& r) {
  std::ostringstream os;
  auto kv = [&os](const std::string& key, const std::string& value) {
    os << key << " = " << value << "\n";
  };
  kv("lambda_p_nm", num(r.lambda_p_nm, 9));
  kv("delta_lambda_p_nm", num(r.delta_lambda_p_nm, 9));
  kv("tau_fs", num(r.tau_fs, 9));
  kv("eta", num(r.eta, 9));
  kv("regime", r.regime);
  kv("lambda_c_nm", num(r.lambda_c_nm, 9));
  kv("delta_omega_c_analytic_rad_s", num(r.delta_omega_c_analytic, 9));
  kv("delta_lambda_c_analytic_nm", num(r.delta_lambda_c_analytic_nm, 9));
  kv("delta_omega_s_analytic_rad_s", num(r.delta_omega_s_analytic, 9));
  kv("delta_lambda_s_analytic_nm", num(r.delta_lambda_s_analytic_nm, 9));
  if (r.delta_lambda_c_numeric_nm)
    kv("delta_lambda_c_numeric_nm", num(*r.delta_lambda_c_numeric_nm, 9));
  if (r.delta_lambda_s_numeric_nm)
    kv("delta_lambda_s_numeric_nm", num(*r.delta_lambda_s_numeric_nm, 9));
  kv("r_analytic", num(r.r_analytic, 9));
  if (r.r_numeric) kv("r_numeric", num(r.r_numeric->value, 9));
  kv("resolution_nm", num(r.resolution_nm, 9));
  if (r.convolved_coincidence_nm)
    kv("convolved_coincidence_nm", num(*r.convolved_coincidence_nm, 9));
  if (r.k_value) {
    kv("k_value", num(*r.k_value, 9));
    kv("k_converged", r.k_converged ? "1" : "0");
    kv("k_method", r.k_method);
  }
  if (r.measured_coincidence_fit) {
    kv("measured_coincidence_fwhm_nm", num(r.measured_coincidence_fit->fwhm, 9));
    kv("measured_coincidence_fwhm_sigma_nm",
       num(r.measured_coincidence_fit->fwhm_sigma, 9));
    kv("measured_coincidence_center_nm",
       num(r.measured_coincidence_fit->center, 9));
  }
  if (r.measured_singles_fit) {
    kv("measured_singles_fwhm_nm", num(r.measured_singles_fit->fwhm, 9));
    kv("measured_singles_fwhm_sigma_nm",
       num(r.measured_singles_fit->fwhm_sigma, 9));
  }
  if (r.r_measured) {
    kv("r_measured", num(r.r_measured->value, 9));
    kv("r_measured_sigma", num(r.r_measured->sigma, 9));
  }
  kv("discrepancy_flagged", r.discrepancy_flagged ? "1" : "0");
  for (std::size_t i = 0; i < r.notes.size(); ++i)
    kv("note_" + std::to_string(i + 1), r.notes[i]);
  return os.str();
}

std::string render_report_csv(const EntanglementReport& r) {
  std::ostringstream os;
  os << "lambda_p_nm,tau_fs,eta,delta_lambda_p_nm,delta_lambda_c_analytic_nm,"
        "delta_lambda_s_analytic_nm,delta_lambda_c_numeric_nm,"
        "delta_lambda_s_numeric_nm,r_analytic,r_numeric,k_value\n";
  os << num(r.lambda_p_nm, 9) << "," << num(r.tau_fs, 9) << "," << num(r.eta, 9)
     << "," << num(r.delta_lambda_p_nm, 9) << ","
     << num(r.delta_lambda_c_analytic_nm, 9) << ","
     << num(r.delta_lambda_s_analytic_nm, 9) << ",";
  if (r.delta_lambda_c_numeric_nm) os << num(*r.delta_lambda_c_numeric_nm, 9);
  os << ",";
  if (r.delta_lambda_s_numeric_nm) os << num(*r.delta_lambda_s_numeric_nm, 9);
  os << "," << num(r.r_analytic, 9) << ",";
  if (r.r_numeric) os << num(r.r_numeric->value, 9);
  os << ",";
  if (r.k_value) os << num(*r.k_value, 9);
  os << "\n";
  return os.str();
}

}  // namespace biphoton
