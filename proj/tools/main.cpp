#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biphoton/config.hpp"
#include "biphoton/constants.hpp"
#include "biphoton/io.hpp"
#include "biphoton/report.hpp"

namespace fs = std::filesystem;
using namespace biphoton;

namespace {

std::string num(double v, int digits = 9) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

struct ConfigCli {
  std::string config_path;
  std::string preset;
  std::optional<double> tau_fs;
  std::optional<double> lambda_p_nm;
  std::optional<double> length_mm;
  std::optional<double> resolution_nm;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file");
    cmd->add_option("--preset", preset, "built-in preset (table1, table2, fig1)");
    cmd->add_option("--tau-fs", tau_fs, "override pump pulse duration [fs]");
    cmd->add_option("--lambda-p-nm", lambda_p_nm, "override pump wavelength [nm]");
    cmd->add_option("--length-mm", length_mm, "override crystal length [mm]");
    cmd->add_option("--resolution-nm", resolution_nm,
                    "override instrument resolution [nm]");
  }

  RunConfig load() const {
    if (!config_path.empty() && !preset.empty())
      throw ConfigError("give either --config or --preset, not both");
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = parse_config(config_path);
    } else {
      cfg = preset_config(preset.empty() ? "table1" : preset);
    }
    if (tau_fs) cfg.tau_fs = *tau_fs;
    if (lambda_p_nm) cfg.lambda_p_nm = *lambda_p_nm;
    if (length_mm) cfg.length_mm = *length_mm;
    if (resolution_nm) cfg.resolution_nm = *resolution_nm;
    if (!(cfg.tau_fs > 0.0)) throw ConfigError("tau-fs must be positive");
    if (!(cfg.lambda_p_nm > 0.0)) throw ConfigError("lambda-p-nm must be positive");
    if (!(cfg.length_mm > 0.0)) throw ConfigError("length-mm must be positive");
    if (cfg.resolution_nm < 0.0) throw ConfigError("resolution-nm must be >= 0");
    return cfg;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open '" + path + "' for writing");
  out << text;
}

int cmd_constants(const ConfigCli& cli, const std::string& csv_path) {
  const RunConfig cfg = cli.load();
  const PhaseMatchConstants constants = cfg.constants();

  std::ostringstream os;
  os << "crystal = " << cfg.crystal_name << "\n";
  os << "length_mm = " << num(cfg.length_mm) << "\n";
  os << "lambda_p_nm = " << num(cfg.lambda_p_nm) << "\n";
  os << "tau_fs = " << num(cfg.tau_fs) << "\n";
  os << "omega_p_rad_s = " << num(constants.omega_p) << "\n";
  os << "walkoff_A = " << num(constants.walkoff_A) << "\n";
  os << "dispersion_B = " << num(constants.dispersion_B) << "\n";
  if (constants.vg_pump) os << "vg_pump_m_s = " << num(*constants.vg_pump) << "\n";
  if (constants.vg_ordinary)
    os << "vg_ordinary_m_s = " << num(*constants.vg_ordinary) << "\n";
  if (constants.pump_angle_rad)
    os << "pump_angle_deg = " << num(phys::rad_to_deg(*constants.pump_angle_rad))
       << "\n";
  if (constants.eta) {
    os << "eta = " << num(*constants.eta) << "\n";
    os << "regime = " << regime_name(classify_regime(*constants.eta)) << "\n";
  } else {
    os << "eta = undefined\n";
    os << "regime = undefined\n";
  }
  std::cout << os.str();

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv << "walkoff_A,dispersion_B,eta,omega_p_rad_s\n";
    csv << num(constants.walkoff_A) << "," << num(constants.dispersion_B) << ",";
    if (constants.eta) csv << num(*constants.eta);
    csv << "," << num(constants.omega_p) << "\n";
    write_text(csv_path, csv.str());
  }

  if (!constants.eta) {
    std::cerr << "error: no temporal walk-off (A <= 0); "
                 "control parameter undefined\n";
    return static_cast<int>(ErrorCategory::Regime);
  }
  return 0;
}

int cmd_report(const ConfigCli& cli, const std::string& measured_coincidence,
               const std::string& measured_singles, bool with_schmidt,
               bool keyvalues, bool no_numeric, const std::string& out_dir) {
  RunConfig cfg = cli.load();
  if (!measured_coincidence.empty())
    cfg.measured_coincidence_csv = measured_coincidence;
  if (!measured_singles.empty()) cfg.measured_singles_csv = measured_singles;

  ReportOptions options;
  options.with_schmidt = with_schmidt;
  options.numerical_widths = !no_numeric;
  const EntanglementReport rep = make_report(cfg, options);

  std::cout << (keyvalues ? render_report_keyvalues(rep)
                          : render_report_table(rep));
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text((fs::path(out_dir) / "report.txt").string(),
               render_report_table(rep));
    write_text((fs::path(out_dir) / "report_keyvalues.txt").string(),
               render_report_keyvalues(rep));
    write_text((fs::path(out_dir) / "report.csv").string(),
               render_report_csv(rep));
  }
  return 0;
}

int cmd_spectra(const ConfigCli& cli, std::string out_dir,
                const std::string& unit, std::size_t points, bool dump_jsa,
                double singles_resolution_nm) {
  const RunConfig cfg = cli.load();
  const PumpSpec pump = cfg.pump();
  const PhaseMatchConstants constants = cfg.constants();
  const double length_m = phys::mm_to_m(cfg.length_mm);
  const double lambda_c_nm = 2.0 * cfg.lambda_p_nm;
  const double omega_c = constants.omega_p / 2.0;

  if (out_dir.empty()) out_dir = cfg.output_directory;
  fs::create_directories(out_dir);

  const bool in_nm = unit != "rad_s";
  auto emit = [&](const Spectrum& s, const std::string& name) {
    const Spectrum converted =
        in_nm ? spectrum_to_wavelength(s, omega_c) : s;
    const std::string path = (fs::path(out_dir) / (name + ".csv")).string();
    write_spectrum_csv(path, converted);
    std::cout << path << "\n";
  };

  const double res_rad = cfg.resolution_nm > 0.0
                             ? width_to_angular(cfg.resolution_nm, lambda_c_nm)
                             : 0.0;
  Spectrum coincidence = coincidence_spectrum_direct(
      constants, pump, length_m, cfg.idler_fix_rad_s, points, 4.0 * res_rad);
  Spectrum singles = single_spectrum_direct(constants, pump, length_m, points);
  emit(coincidence, "coincidence");
  emit(singles, "singles");

  if (cfg.resolution_nm > 0.0) {
    emit(convolve_response(coincidence, res_rad, cfg.response),
         "coincidence_convolved");
  }
  if (singles_resolution_nm > 0.0) {
    const double res_rad = width_to_angular(singles_resolution_nm, lambda_c_nm);
    emit(convolve_response(singles, res_rad, cfg.response), "singles_convolved");
  }

  if (dump_jsa) {
    const ShearedAmplitude sheared =
        sample_jsa_sheared(constants, pump, length_m, cfg.grid);
    if (sheared.validity_warning())
      std::cerr << "warning: sampled detunings exceed 0.3*omega_p; "
                   "the |nu| << omega_p expansion is strained\n";
    const std::string path = (fs::path(out_dir) / "jsa_sheared.csv").string();
    write_sheared_csv(path, sheared);
    std::cout << path << "\n";
  }
  return 0;
}

int cmd_sweep(const ConfigCli& cli, double tau_min_fs, double tau_max_fs,
              std::size_t n_points, bool no_r, bool no_k, bool precise,
              const std::string& out_path) {
  const RunConfig cfg = cli.load();
  const std::vector<double> taus =
      log_spaced(phys::fs_to_s(tau_min_fs), phys::fs_to_s(tau_max_fs), n_points);
  const PurityConfig purity = precise ? PurityConfig{} : PurityConfig::fast();

  SweepTable table;
  if (cfg.anchored()) {
    table = sweep_quantifiers(cfg.constants(), phys::mm_to_m(cfg.length_mm),
                              cfg.lambda_p_nm, taus, !no_r, !no_k, purity);
  } else {
    table = sweep_quantifiers(cfg.crystal(), cfg.lambda_p_nm, taus, !no_r,
                              !no_k, purity);
  }
  for (const SweepRow& row : table.rows) {
    if (!row.note.empty())
      std::cerr << "row tau=" << num(row.tau_s * 1e15, 6)
                << " fs: " << row.note << "\n";
  }
  if (out_path.empty()) {
    std::cout << sweep_csv_text(table);
  } else {
    write_sweep_csv(out_path, table);
    std::cout << out_path << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& input, std::optional<double> resolution_nm) {
  const MeasuredData data = read_measured_csv(input);
  const std::vector<double>* sig = data.sigma ? &*data.sigma : nullptr;
  const FitResult fit = fit_gaussian(data.axis, data.intensity, sig);

  const std::string unit = axis_unit_name(data.unit);
  std::cout << "model = gaussian\n";
  std::cout << "converged = " << (fit.converged ? "1" : "0") << "\n";
  std::cout << "center_" << unit << " = " << num(fit.center) << "\n";
  std::cout << "center_sigma_" << unit << " = " << num(fit.center_sigma) << "\n";
  std::cout << "fwhm_" << unit << " = " << num(fit.fwhm) << "\n";
  std::cout << "fwhm_sigma_" << unit << " = " << num(fit.fwhm_sigma) << "\n";
  std::cout << "amplitude = " << num(fit.amplitude) << "\n";
  std::cout << "baseline = " << num(fit.baseline) << "\n";
  std::cout << "residual_rms = " << num(fit.residual_rms) << "\n";
  std::cout << "iterations = " << fit.iterations << "\n";
  if (resolution_nm)
    std::cout << "resolution_nm = " << num(*resolution_nm) << "\n";
  return 0;
}

int cmd_rtot(double r_angle, double r_omega) {
  const double bound = total_entanglement_bound(r_angle, r_omega);
  std::cout << "r_tot = " << num(bound) << "\n";
  std::cout << "comment = upper bound, 2 * R_angle * R_omega; phase matching "
               "links the angular and spectral degrees of freedom\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "biphoton: SPDC joint-spectrum simulator and entanglement quantifiers"};
  app.require_subcommand(1);

  ConfigCli constants_cli, report_cli, spectra_cli, sweep_cli;

  auto* constants_cmd =
      app.add_subcommand("constants", "walk-off constant A, dispersion "
                                      "constant B and control parameter eta");
  constants_cli.attach(constants_cmd);
  std::string constants_csv;
  constants_cmd->add_option("--csv", constants_csv, "also write a CSV row");

  auto* report_cmd = app.add_subcommand(
      "report", "side-by-side theory table (widths, R, optional K)");
  report_cli.attach(report_cmd);
  std::string measured_coincidence, measured_singles, report_out;
  bool with_schmidt = false, keyvalues = false, no_numeric = false;
  report_cmd->add_option("--measured-coincidence", measured_coincidence,
                         "measured coincidence spectrum CSV");
  report_cmd->add_option("--measured-singles", measured_singles,
                         "measured single-count spectrum CSV");
  report_cmd->add_flag("--with-schmidt", with_schmidt,
                       "compute K by purity quadrature");
  report_cmd->add_flag("--keyvalues", keyvalues, "machine-readable output");
  report_cmd->add_flag("--no-numeric", no_numeric,
                       "skip the numerical-width pipeline");
  report_cmd->add_option("--out", report_out, "directory for report files");

  auto* spectra_cmd = app.add_subcommand(
      "spectra", "coincidence/single-count spectra as CSV files");
  spectra_cli.attach(spectra_cmd);
  std::string spectra_out, spectra_unit = "nm";
  std::size_t spectra_points = 4001;
  bool dump_jsa = false;
  double singles_resolution_nm = 0.0;
  spectra_cmd->add_option("--out", spectra_out, "output directory");
  spectra_cmd->add_option("--unit", spectra_unit, "axis unit: nm or rad_s")
      ->check(CLI::IsMember({"nm", "rad_s"}));
  spectra_cmd->add_option("--points", spectra_points, "points per spectrum");
  spectra_cmd->add_flag("--dump-jsa", dump_jsa,
                        "dump the sheared joint-spectral amplitude");
  spectra_cmd->add_option("--singles-resolution-nm", singles_resolution_nm,
                          "also emit singles convolved at this resolution");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "R(tau) and K(tau) over a pulse-duration range");
  sweep_cli.attach(sweep_cmd);
  double tau_min_fs = 50.0, tau_max_fs = 10000.0;
  std::size_t sweep_points = 40;
  bool no_r = false, no_k = false, precise = false;
  std::string sweep_out;
  sweep_cmd->add_option("--tau-min-fs", tau_min_fs, "sweep start [fs]");
  sweep_cmd->add_option("--tau-max-fs", tau_max_fs, "sweep end [fs]");
  sweep_cmd->add_option("--points", sweep_points, "number of log-spaced points");
  sweep_cmd->add_flag("--no-r", no_r, "skip analytic R");
  sweep_cmd->add_flag("--no-k", no_k, "skip numerical K");
  sweep_cmd->add_flag("--precise", precise, "high-accuracy purity quadrature");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (default stdout)");

  auto* fit_cmd =
      app.add_subcommand("fit", "Gaussian fit of a measured spectrum CSV");
  std::string fit_input;
  std::optional<double> fit_resolution_nm;
  fit_cmd->add_option("--input", fit_input, "CSV with axis,intensity[,sigma]")
      ->required();
  fit_cmd->add_option("--resolution-nm", fit_resolution_nm,
                      "instrument resolution recorded with the result");

  auto* rtot_cmd = app.add_subcommand(
      "rtot", "total-entanglement upper bound 2*R_angle*R_omega");
  double r_angle = 0.0, r_omega = 0.0;
  rtot_cmd->add_option("--r-angle", r_angle, "angular Fedorov ratio")->required();
  rtot_cmd->add_option("--r-omega", r_omega, "spectral Fedorov ratio")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (constants_cmd->parsed()) return cmd_constants(constants_cli, constants_csv);
    if (report_cmd->parsed())
      return cmd_report(report_cli, measured_coincidence, measured_singles,
                        with_schmidt, keyvalues, no_numeric, report_out);
    if (spectra_cmd->parsed())
      return cmd_spectra(spectra_cli, spectra_out, spectra_unit, spectra_points,
                         dump_jsa, singles_resolution_nm);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_cli, tau_min_fs, tau_max_fs, sweep_points, no_r,
                       no_k, precise, sweep_out);
    if (fit_cmd->parsed()) return cmd_fit(fit_input, fit_resolution_nm);
    if (rtot_cmd->parsed()) return cmd_rtot(r_angle, r_omega);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
