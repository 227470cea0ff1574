#include "biphoton/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "biphoton/constants.hpp"

namespace biphoton {

namespace {

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class ErrorList {
 public:
  explicit ErrorList(std::string source) : source_(std::move(source)) {}
  void add(int line, const std::string& message) {
    std::ostringstream os;
    os << source_ << ":" << line << ": " << message;
    items_.push_back(os.str());
  }
  void add(const std::string& message) { items_.push_back(source_ + ": " + message); }
  void raise_if_any() const {
    if (items_.empty()) return;
    std::ostringstream os;
    os << "invalid configuration (" << items_.size() << " problem"
       << (items_.size() == 1 ? "" : "s") << "):";
    for (const auto& m : items_) os << "\n  " << m;
    throw ConfigError(os.str());
  }

 private:
  std::string source_;
  std::vector<std::string> items_;
};

std::vector<Entry> tokenize(const std::string& text, ErrorList& errors) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.add(lineno, "unterminated section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.add(lineno, "expected 'key = value', got '" + line + "'");
      continue;
    }
    Entry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty()) {
      errors.add(lineno, "empty key");
      continue;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::optional<double> parse_double(const Entry& e, ErrorList& errors) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size() || !std::isfinite(v))
      throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    errors.add(e.line, "key '" + e.key + "': cannot parse '" + e.value +
                           "' as a number");
    return std::nullopt;
  }
}

std::optional<std::vector<double>> parse_list(const Entry& e, ErrorList& errors) {
  std::vector<double> out;
  std::istringstream in(e.value);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      errors.add(e.line, "key '" + e.key + "': cannot parse '" + tok +
                             "' as a number");
      return std::nullopt;
    }
  }
  if (out.empty()) {
    errors.add(e.line, "key '" + e.key + "': empty list");
    return std::nullopt;
  }
  return out;
}

std::optional<bool> parse_bool(const Entry& e, ErrorList& errors) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  errors.add(e.line, "key '" + e.key + "': expected true/false");
  return std::nullopt;
}

// Sellmeier list layout: a  b1 c1 [b2 c2 ...]  (resonance pairs).
std::optional<SellmeierCoefficients> parse_sellmeier(const Entry& e,
                                                     ErrorList& errors) {
  const auto values = parse_list(e, errors);
  if (!values) return std::nullopt;
  if (values->size() < 3 || (values->size() - 1) % 2 != 0) {
    errors.add(e.line, "key '" + e.key +
                           "': expected 'a b1 c1 [b2 c2 ...]' (odd count >= 3)");
    return std::nullopt;
  }
  SellmeierCoefficients sc;
  sc.a = (*values)[0];
  for (std::size_t i = 1; i + 1 < values->size(); i += 2)
    sc.resonances.push_back({(*values)[i], (*values)[i + 1]});
  return sc;
}

void apply_crystal_shortcut(RunConfig& cfg, const std::string& name,
                            int line, ErrorList& errors) {
  if (name == "LiIO3") {
    cfg.crystal_name = "LiIO3";
  } else if (name == "LiIO3-10mm-default") {
    cfg.crystal_name = "LiIO3";
    cfg.length_mm = 10.0;
  } else if (name == "LiIO3-5mm-default") {
    cfg.crystal_name = "LiIO3";
    cfg.length_mm = 5.0;
  } else if (name == "vacuum-test") {
    cfg.crystal_name = "vacuum-test";
  } else if (name == "anchored-10mm") {
    cfg.crystal_name = "anchored";
    cfg.length_mm = 10.0;
    cfg.anchored_A = 0.1748;
    cfg.anchored_B = 0.0695;
  } else {
    errors.add(line, "unknown crystal '" + name +
                         "' (known: LiIO3, LiIO3-10mm-default, "
                         "LiIO3-5mm-default, vacuum-test, anchored-10mm)");
  }
}

void apply_entries(RunConfig& cfg, const std::vector<Entry>& entries,
                   ErrorList& errors) {
  for (const Entry& e : entries) {
    const std::string where = e.section.empty() ? e.key : e.section + "." + e.key;
    if (e.section.empty()) {
      if (e.key == "preset") {
        // handled by the caller before this pass
      } else if (e.key == "crystal") {
        apply_crystal_shortcut(cfg, e.value, e.line, errors);
      } else {
        errors.add(e.line, "unknown top-level key '" + e.key + "'");
      }
    } else if (e.section == "crystal") {
      if (e.key == "name") {
        if (e.value == "custom") {
          cfg.crystal_name = "custom";
        } else {
          apply_crystal_shortcut(cfg, e.value, e.line, errors);
        }
      } else if (e.key == "length_mm") {
        if (auto v = parse_double(e, errors)) cfg.length_mm = *v;
      } else if (e.key == "sellmeier_o") {
        cfg.sellmeier_o = parse_sellmeier(e, errors);
      } else if (e.key == "sellmeier_e") {
        cfg.sellmeier_e = parse_sellmeier(e, errors);
      } else if (e.key == "window_nm") {
        if (auto v = parse_list(e, errors)) {
          if (v->size() != 2 || !((*v)[0] < (*v)[1])) {
            errors.add(e.line, "key 'window_nm': expected 'min max' with min < max");
          } else {
            cfg.window = WavelengthWindow{(*v)[0], (*v)[1]};
          }
        }
      } else if (e.key == "pump_angle_deg") {
        if (auto v = parse_double(e, errors)) cfg.pump_angle_deg = *v;
      } else if (e.key == "walkoff_A") {
        if (auto v = parse_double(e, errors)) cfg.anchored_A = *v;
      } else if (e.key == "dispersion_B") {
        if (auto v = parse_double(e, errors)) cfg.anchored_B = *v;
      } else {
        errors.add(e.line, "unknown key '" + where + "'");
      }
    } else if (e.section == "pump") {
      if (e.key == "lambda_p_nm") {
        if (auto v = parse_double(e, errors)) cfg.lambda_p_nm = *v;
      } else if (e.key == "tau_fs") {
        if (auto v = parse_double(e, errors)) cfg.tau_fs = *v;
      } else {
        errors.add(e.line, "unknown key '" + where + "'");
      }
    } else if (e.section == "grid") {
      if (e.key == "span_factor") {
        if (auto v = parse_double(e, errors)) cfg.grid.span_factor = *v;
      } else if (e.key == "step_divisor") {
        if (auto v = parse_double(e, errors)) cfg.grid.step_divisor = *v;
      } else if (e.key == "axis_budget") {
        if (auto v = parse_double(e, errors)) {
          if (*v < 2 || *v != std::floor(*v)) {
            errors.add(e.line, "key 'axis_budget': expected an integer >= 2");
          } else {
            cfg.grid.axis_budget = static_cast<std::size_t>(*v);
          }
        }
      } else if (e.key == "fill_budget") {
        if (auto v = parse_bool(e, errors)) cfg.grid.fill_budget = *v;
      } else {
        errors.add(e.line, "unknown key '" + where + "'");
      }
    } else if (e.section == "analysis") {
      if (e.key == "idler_fix_rad_s") {
        if (auto v = parse_double(e, errors)) cfg.idler_fix_rad_s = *v;
      } else if (e.key == "resolution_nm") {
        if (auto v = parse_double(e, errors)) cfg.resolution_nm = *v;
      } else if (e.key == "response") {
        if (e.value == "gaussian") {
          cfg.response = ResponseShape::Gaussian;
        } else if (e.value == "rectangular") {
          cfg.response = ResponseShape::Rectangular;
        } else {
          errors.add(e.line, "key 'response': expected gaussian or rectangular");
        }
      } else if (e.key == "measured_coincidence_csv") {
        cfg.measured_coincidence_csv = e.value;
      } else if (e.key == "measured_singles_csv") {
        cfg.measured_singles_csv = e.value;
      } else {
        errors.add(e.line, "unknown key '" + where + "'");
      }
    } else if (e.section == "output") {
      if (e.key == "directory") {
        cfg.output_directory = e.value;
      } else if (e.key == "format") {
        if (e.value != "csv") {
          errors.add(e.line, "key 'format': only 'csv' is supported");
        } else {
          cfg.output_format = e.value;
        }
      } else {
        errors.add(e.line, "unknown key '" + where + "'");
      }
    } else {
      errors.add(e.line, "unknown section '[" + e.section + "]'");
    }
  }
}

void validate(const RunConfig& cfg, ErrorList& errors) {
  if (!(cfg.length_mm > 0.0)) errors.add("crystal.length_mm must be positive");
  if (!(cfg.lambda_p_nm > 0.0)) errors.add("pump.lambda_p_nm must be positive");
  if (!(cfg.tau_fs > 0.0)) errors.add("pump.tau_fs must be positive");
  if (cfg.resolution_nm < 0.0) errors.add("analysis.resolution_nm must be >= 0");
  if (!(cfg.grid.span_factor > 0.0)) errors.add("grid.span_factor must be positive");
  if (!(cfg.grid.step_divisor > 0.0)) errors.add("grid.step_divisor must be positive");
  if (cfg.anchored_A.has_value() != cfg.anchored_B.has_value())
    errors.add("walkoff_A and dispersion_B must be given together");
  if (cfg.sellmeier_o.has_value() != cfg.sellmeier_e.has_value())
    errors.add("sellmeier_o and sellmeier_e must be given together");
  if (cfg.crystal_name == "custom" && !cfg.sellmeier_o && !cfg.anchored_A)
    errors.add("custom crystal needs sellmeier_o/sellmeier_e or walkoff_A/dispersion_B");
  if (cfg.sellmeier_o && !cfg.window)
    errors.add("custom Sellmeier coefficients need a window_nm");
  if (cfg.pump_angle_deg &&
      !(*cfg.pump_angle_deg > 0.0 && *cfg.pump_angle_deg < 90.0))
    errors.add("crystal.pump_angle_deg must be in (0, 90)");
}

RunConfig config_from_text(const std::string& text, const std::string& source);

const std::map<std::string, std::string>& preset_map() {
  static const std::map<std::string, std::string> presets = {
      {"table1",
       "# 10 mm LiIO3 sample, frequency-doubled Ti:sapphire pump\n"
       "crystal = LiIO3-10mm-default\n"
       "\n"
       "[pump]\n"
       "lambda_p_nm = 397.5\n"
       "tau_fs = 186\n"
       "\n"
       "[analysis]\n"
       "resolution_nm = 0.2\n"
       "response = gaussian\n"},
      {"table2",
       "# 5 mm LiIO3 sample, same pump\n"
       "crystal = LiIO3-5mm-default\n"
       "\n"
       "[pump]\n"
       "lambda_p_nm = 397.5\n"
       "tau_fs = 186\n"
       "\n"
       "[analysis]\n"
       "resolution_nm = 0.2\n"
       "response = gaussian\n"},
      {"fig1",
       "# K(tau)/R(tau) sweep configuration: 400 nm pump, 5 mm LiIO3\n"
       "crystal = LiIO3-5mm-default\n"
       "\n"
       "[pump]\n"
       "lambda_p_nm = 400\n"
       "tau_fs = 1000\n"},
  };
  return presets;
}

RunConfig config_from_text(const std::string& text, const std::string& source) {
  ErrorList errors(source);
  const std::vector<Entry> entries = tokenize(text, errors);

  RunConfig cfg;
  // A preset key replaces the defaults before the file's own keys apply.
  for (const Entry& e : entries) {
    if (e.section.empty() && e.key == "preset") {
      const auto& presets = preset_map();
      const auto it = presets.find(e.value);
      if (it == presets.end()) {
        std::string known;
        for (const auto& [k, v] : presets) known += (known.empty() ? "" : ", ") + k;
        errors.add(e.line, "unknown preset '" + e.value + "' (known: " + known + ")");
      } else {
        ErrorList preset_errors("preset " + e.value);
        cfg = RunConfig{};
        apply_entries(cfg, tokenize(it->second, preset_errors), preset_errors);
        preset_errors.raise_if_any();
      }
    }
  }
  apply_entries(cfg, entries, errors);
  validate(cfg, errors);
  errors.raise_if_any();
  return cfg;
}

}  // namespace

CrystalSpec RunConfig::crystal() const {
  CrystalSpec spec;
  spec.length_m = phys::mm_to_m(length_mm);
  if (pump_angle_deg) spec.pump_angle_rad = phys::deg_to_rad(*pump_angle_deg);
  if (sellmeier_o) {
    spec.name = crystal_name == "custom" ? "custom-sellmeier" : crystal_name;
    spec.index_model = std::make_shared<const SellmeierModel>(
        spec.name, *sellmeier_o, *sellmeier_e, *window);
  } else if (crystal_name == "vacuum-test") {
    spec.name = "vacuum-test";
    spec.index_model = vacuum_model();
  } else if (anchored()) {
    spec.name = "anchored";
    spec.index_model = nullptr;  // constants() bypasses the model
  } else {
    spec.name = "LiIO3";
    spec.index_model = liio3_model();
  }
  return spec;
}

PumpSpec RunConfig::pump() const {
  return PumpSpec(lambda_p_nm, phys::fs_to_s(tau_fs));
}

PhaseMatchConstants RunConfig::constants() const {
  const PumpSpec p = pump();
  if (anchored()) {
    return PhaseMatchConstants::anchored(*anchored_A, *anchored_B, p.omega_p(),
                                         phys::mm_to_m(length_mm), p.tau_s);
  }
  return walkoff_constants(crystal(), p);
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_text(text.str(), path);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : preset_map()) out.push_back(k);
    return out;
  }();
  return names;
}

std::string preset_text(const std::string& name) {
  const auto& presets = preset_map();
  const auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("unknown preset '" + name + "'");
  return it->second;
}

RunConfig preset_config(const std::string& name) {
  return config_from_text(preset_text(name), "preset " + name);
}

bool is_builtin_crystal(const std::string& name) {
  return name == "LiIO3" || name == "LiIO3-10mm-default" ||
         name == "LiIO3-5mm-default" || name == "vacuum-test" ||
         name == "anchored-10mm";
}

}  // namespace biphoton
