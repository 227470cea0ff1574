#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biphoton/dispersion.hpp"
#include "biphoton/jsa.hpp"
#include "biphoton/spectra.hpp"

// Run configuration: strict `[section] key = value` text files. Unknown
// sections or keys are rejected; validation reports every problem with its
// line number, not just the first.

namespace biphoton {

struct RunConfig {
  // crystal
  std::string crystal_name = "LiIO3";
  double length_mm = 10.0;
  std::optional<SellmeierCoefficients> sellmeier_o;
  std::optional<SellmeierCoefficients> sellmeier_e;
  std::optional<WavelengthWindow> window;
  std::optional<double> pump_angle_deg;
  std::optional<double> anchored_A;  // bypasses the index model entirely
  std::optional<double> anchored_B;

  // pump
  double lambda_p_nm = 397.5;
  double tau_fs = 186.0;

  // grid
  GridPolicy grid;

  // analysis
  double idler_fix_rad_s = 0.0;
  double resolution_nm = 0.0;  // 0: no instrument response applied
  ResponseShape response = ResponseShape::Gaussian;
  std::string measured_coincidence_csv;
  std::string measured_singles_csv;

  // output
  std::string output_directory = "out";
  std::string output_format = "csv";

  bool anchored() const { return anchored_A.has_value(); }
  CrystalSpec crystal() const;
  PumpSpec pump() const;
  // Anchored constants when configured, otherwise derived from the model.
  PhaseMatchConstants constants() const;
};

// Parse and validate a config file; ConfigError lists every problem as
// `path:line: message`.
RunConfig parse_config(const std::string& path);

// Built-in presets (table1, table2, fig1); their text is byte-identical to
// the files shipped under data/presets/.
const std::vector<std::string>& preset_names();
std::string preset_text(const std::string& name);
RunConfig preset_config(const std::string& name);

// Built-in crystal shortcuts accepted by the top-level `crystal =` key and
// the [crystal] name field: LiIO3, LiIO3-10mm-default, LiIO3-5mm-default,
// vacuum-test, anchored-10mm.
bool is_builtin_crystal(const std::string& name);

}  // namespace biphoton
