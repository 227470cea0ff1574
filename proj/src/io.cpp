#include "biphoton/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace biphoton {

namespace {

std::string fmt(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IngestionError("failed writing '" + path + "'");
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& path, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << path << ":" << line << ": cannot parse '" << s << "' as a number";
    throw IngestionError(os.str());
  }
}

}  // namespace

std::string spectrum_csv_text(const Spectrum& spectrum) {
  std::ostringstream os;
  os << "axis_" << axis_unit_name(spectrum.unit) << ",intensity\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    os << fmt(spectrum.axis[i], 9) << "," << fmt(spectrum.intensity[i], 9) << "\n";
  return os.str();
}

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum) {
  write_file(path, spectrum_csv_text(spectrum));
}

MeasuredData read_measured_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");

  MeasuredData out;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const auto fields = split_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 2 || fields.size() > 3) {
        std::ostringstream os;
        os << path << ":" << lineno
           << ": expected header 'axis_<unit>,intensity[,sigma]'";
        throw IngestionError(os.str());
      }
      if (fields[0] == "axis_nm") {
        out.unit = AxisUnit::Nanometer;
      } else if (fields[0] == "axis_rad_s") {
        out.unit = AxisUnit::RadPerSecond;
      } else {
        std::ostringstream os;
        os << path << ":" << lineno << ": unknown axis column '" << fields[0]
           << "' (expected axis_nm or axis_rad_s)";
        throw IngestionError(os.str());
      }
      if (fields[1] != "intensity") {
        std::ostringstream os;
        os << path << ":" << lineno << ": second column must be 'intensity'";
        throw IngestionError(os.str());
      }
      if (fields.size() == 3) {
        if (fields[2] != "sigma") {
          std::ostringstream os;
          os << path << ":" << lineno << ": third column must be 'sigma'";
          throw IngestionError(os.str());
        }
        out.sigma.emplace();
      }
      continue;
    }
    if (fields.size() != (out.sigma ? 3u : 2u)) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected " << (out.sigma ? 3 : 2)
         << " fields, got " << fields.size();
      throw IngestionError(os.str());
    }
    out.axis.push_back(parse_number(fields[0], path, lineno));
    out.intensity.push_back(parse_number(fields[1], path, lineno));
    if (out.sigma) out.sigma->push_back(parse_number(fields[2], path, lineno));
  }
  if (!header_seen || out.axis.empty())
    throw IngestionError(path + ": no data rows");
  for (std::size_t i = 1; i < out.axis.size(); ++i) {
    if (!(out.axis[i] > out.axis[i - 1]))
      throw IngestionError(path + ": axis must be strictly increasing");
  }
  return out;
}

void write_jsa_csv(const std::string& path, const JointSpectralAmplitude& jsa) {
  std::ostringstream os;
  os << "nu1_rad_s,nu2_rad_s,amplitude\n";
  const auto& a1 = jsa.grid.nu1_axis();
  const auto& a2 = jsa.grid.nu2_axis();
  for (std::size_t i = 0; i < a1.size(); ++i)
    for (std::size_t j = 0; j < a2.size(); ++j)
      os << fmt(a1[i], 17) << "," << fmt(a2[j], 17) << ","
         << fmt(jsa.at(i, j), 17) << "\n";
  write_file(path, os.str());
}

JointSpectralAmplitude read_jsa_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw IngestionError(path + ": empty file");
  ++lineno;
  if (split_fields(line) !=
      std::vector<std::string>{"nu1_rad_s", "nu2_rad_s", "amplitude"})
    throw IngestionError(path + ":1: expected header nu1_rad_s,nu2_rad_s,amplitude");

  std::vector<double> nu1, nu2, amp;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected 3 fields";
      throw IngestionError(os.str());
    }
    nu1.push_back(parse_number(fields[0], path, lineno));
    nu2.push_back(parse_number(fields[1], path, lineno));
    amp.push_back(parse_number(fields[2], path, lineno));
  }
  if (amp.empty()) throw IngestionError(path + ": no data rows");

  // Row-major dump: nu2 cycles fastest. Recover the axis lengths.
  std::size_t n2 = 1;
  while (n2 < nu2.size() && nu2[n2] > nu2[n2 - 1]) ++n2;
  if (amp.size() % n2 != 0)
    throw IngestionError(path + ": ragged grid (rows of unequal length)");
  const std::size_t n1 = amp.size() / n2;
  if (n1 < 2 || n2 < 2) throw IngestionError(path + ": grid too small");

  FrequencyGrid grid = FrequencyGrid::uniform(-nu1.front(), n1, -nu2.front(), n2);
  // The reconstructed axes must match what was dumped.
  for (std::size_t i = 0; i < n1; ++i) {
    if (std::abs(grid.nu1_axis()[i] - nu1[i * n2]) >
        1e-12 * std::max(1.0, std::abs(nu1[i * n2])))
      throw IngestionError(path + ": nu1 axis is not uniform/symmetric");
  }
  for (std::size_t j = 0; j < n2; ++j) {
    if (std::abs(grid.nu2_axis()[j] - nu2[j]) >
        1e-12 * std::max(1.0, std::abs(nu2[j])))
      throw IngestionError(path + ": nu2 axis is not uniform/symmetric");
  }

  JointSpectralAmplitude out;
  out.grid = std::move(grid);
  out.amplitude = std::move(amp);
  return out;
}

void write_sheared_csv(const std::string& path, const ShearedAmplitude& sheared) {
  std::ostringstream os;
  os << "nu1_rad_s,nu2_rad_s,amplitude\n";
  for (std::size_t ip = 0; ip < sheared.n_plus(); ++ip)
    for (std::size_t im = 0; im < sheared.n_minus(); ++im)
      os << fmt(sheared.nu1(ip, im), 17) << "," << fmt(sheared.nu2(ip, im), 17)
         << "," << fmt(sheared.at(ip, im), 17) << "\n";
  write_file(path, os.str());
}

std::string sweep_csv_text(const SweepTable& table) {
  std::ostringstream os;
  os << "tau_fs,eta,R_analytic,K_numerical,K_converged\n";
  for (const SweepRow& row : table.rows) {
    os << fmt(row.tau_s * 1e15, 9) << ",";
    if (row.eta) os << fmt(*row.eta, 9);
    os << ",";
    if (row.r_analytic) os << fmt(*row.r_analytic, 9);
    os << ",";
    if (row.k_numerical) os << fmt(*row.k_numerical, 9);
    os << ",";
    if (row.k_numerical) os << (row.k_converged ? "1" : "0");
    os << "\n";
  }
  return os.str();
}

void write_sweep_csv(const std::string& path, const SweepTable& table) {
  write_file(path, sweep_csv_text(table));
}

}  // namespace biphoton
