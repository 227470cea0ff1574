#pragma once

#include <numbers>

// Physical constants and unit conversions. Every conversion in the project
// goes through this header so that factors of c and 2*pi cannot drift
// between modules.

namespace biphoton::phys {

// CODATA vacuum speed of light, m/s (exact by SI definition).
inline constexpr double c_vacuum = 299'792'458.0;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double ln2 = std::numbers::ln2;

constexpr double nm_to_m(double nm) { return nm * 1e-9; }
constexpr double m_to_nm(double m) { return m * 1e9; }
constexpr double um_to_m(double um) { return um * 1e-6; }
constexpr double m_to_um(double m) { return m * 1e6; }
constexpr double nm_to_um(double nm) { return nm * 1e-3; }
constexpr double mm_to_m(double mm) { return mm * 1e-3; }
constexpr double m_to_mm(double m) { return m * 1e3; }
constexpr double fs_to_s(double fs) { return fs * 1e-15; }
constexpr double s_to_fs(double s) { return s * 1e15; }
constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Angular frequency (rad/s) of a vacuum wavelength given in nm, and back.
constexpr double omega_from_lambda_nm(double lambda_nm) {
  return two_pi * c_vacuum / nm_to_m(lambda_nm);
}
constexpr double lambda_nm_from_omega(double omega) {
  return m_to_nm(two_pi * c_vacuum / omega);
}

}  // namespace biphoton::phys
