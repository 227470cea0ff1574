#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biphoton/entanglement.hpp"
#include "biphoton/jsa.hpp"
#include "biphoton/spectra.hpp"

// CSV readers/writers. Spectrum files carry `axis_<unit>,intensity` with at
// least 9 significant digits; amplitude dumps carry
// `nu1_rad_s,nu2_rad_s,amplitude` at 17 significant digits and round-trip
// losslessly.

namespace biphoton {

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum);
std::string spectrum_csv_text(const Spectrum& spectrum);

struct MeasuredData {
  std::vector<double> axis;
  std::vector<double> intensity;
  std::optional<std::vector<double>> sigma;
  AxisUnit unit = AxisUnit::Nanometer;
};

// Accepts the spectrum format plus an optional third column `sigma`.
// Throws IngestionError with the offending line on malformed input.
MeasuredData read_measured_csv(const std::string& path);

void write_jsa_csv(const std::string& path, const JointSpectralAmplitude& jsa);
JointSpectralAmplitude read_jsa_csv(const std::string& path);

// Sheared samples dumped in the same triplet layout (the 2D joint-spectral
// map); not meant to be read back into a product-grid object.
void write_sheared_csv(const std::string& path, const ShearedAmplitude& sheared);

void write_sweep_csv(const std::string& path, const SweepTable& table);
std::string sweep_csv_text(const SweepTable& table);

}  // namespace biphoton
