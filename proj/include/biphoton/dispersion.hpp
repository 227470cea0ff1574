#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/errors.hpp"

// Crystal dispersion: refractive-index models, wave-vector derivatives, the
// temporal walk-off constant A, the dispersion constant B and the control
// parameter eta = 2*c*tau/(A*L) that separates the short- and long-pulse
// regimes of a pulsed type-I degenerate SPDC source.

namespace biphoton {

enum class Polarization { Ordinary, Extraordinary };

struct WavelengthWindow {
  double min_nm = 0.0;
  double max_nm = 0.0;
  bool contains(double lambda_nm) const {
    return lambda_nm >= min_nm && lambda_nm <= max_nm;
  }
  std::string describe() const;
};

// n, dn/dlambda, d2n/dlambda2 in SI units (per m, per m^2).
struct IndexDerivatives {
  double n = 0.0;
  double dn_dlambda = 0.0;
  double d2n_dlambda2 = 0.0;
};

class IndexModel {
 public:
  virtual ~IndexModel() = default;

  // Refractive index at a vacuum wavelength. Throws DomainError (naming the
  // window) outside the validity range.
  virtual double index(double lambda_nm, Polarization pol) const = 0;

  virtual WavelengthWindow window(Polarization pol) const = 0;

  // Analytic wavelength derivatives when the model has a closed form;
  // models without one return nullopt and callers fall back to finite
  // differences on index().
  virtual std::optional<IndexDerivatives> derivatives(double lambda_nm,
                                                      Polarization pol) const {
    (void)lambda_nm;
    (void)pol;
    return std::nullopt;
  }

  virtual const std::string& name() const = 0;

  // True when ordinary and extraordinary indices are the same function
  // (test models); such crystals skip the phase-matching angle machinery.
  virtual bool isotropic() const { return false; }
};

// n^2(lambda) = a + sum_i b_i*l2/(l2 - c_i) - d*l2, lambda in um.
struct SellmeierCoefficients {
  double a = 0.0;
  std::vector<std::pair<double, double>> resonances;  // {b_i, c_i}
  double d = 0.0;

  double n_squared(double lambda_um) const;
  // Derivatives of n^2 with respect to l2 = lambda_um^2.
  double dn2_dl2(double lambda_um) const;
  double d2n2_dl2l2(double lambda_um) const;
};

class SellmeierModel final : public IndexModel {
 public:
  SellmeierModel(std::string name, SellmeierCoefficients ordinary,
                 SellmeierCoefficients extraordinary, WavelengthWindow window);

  double index(double lambda_nm, Polarization pol) const override;
  WavelengthWindow window(Polarization) const override { return window_; }
  std::optional<IndexDerivatives> derivatives(double lambda_nm,
                                              Polarization pol) const override;
  const std::string& name() const override { return name_; }

  const SellmeierCoefficients& coefficients(Polarization pol) const {
    return pol == Polarization::Ordinary ? ordinary_ : extraordinary_;
  }

 private:
  std::string name_;
  SellmeierCoefficients ordinary_;
  SellmeierCoefficients extraordinary_;
  WavelengthWindow window_;
};

class ConstantIndexModel final : public IndexModel {
 public:
  explicit ConstantIndexModel(double n, std::string name = "constant");
  double index(double lambda_nm, Polarization pol) const override;
  WavelengthWindow window(Polarization) const override { return window_; }
  std::optional<IndexDerivatives> derivatives(double, Polarization) const override {
    return IndexDerivatives{n_, 0.0, 0.0};
  }
  const std::string& name() const override { return name_; }
  bool isotropic() const override { return true; }

 private:
  double n_;
  std::string name_;
  WavelengthWindow window_{1.0, 1e9};
};

// n(lambda) = n0 + alpha*lambda_um^2; closed-form derivatives make it the
// reference model for differentiation tests.
class QuadraticIndexModel final : public IndexModel {
 public:
  QuadraticIndexModel(double n0, double alpha_per_um2,
                      std::string name = "quadratic-test");
  double index(double lambda_nm, Polarization pol) const override;
  WavelengthWindow window(Polarization) const override { return window_; }
  std::optional<IndexDerivatives> derivatives(double lambda_nm,
                                              Polarization) const override;
  const std::string& name() const override { return name_; }
  bool isotropic() const override { return true; }

 private:
  double n0_;
  double alpha_;  // per um^2
  std::string name_;
  WavelengthWindow window_{1.0, 1e9};
};

// Shipped defaults.
std::shared_ptr<const IndexModel> liio3_model();
std::shared_ptr<const IndexModel> vacuum_model();
std::shared_ptr<const IndexModel> constant_model(double n);

struct CrystalSpec {
  std::string name;
  double length_m = 0.0;
  std::shared_ptr<const IndexModel> index_model;
  // Fixed angle between pump wave vector and optic axis. When unset, the
  // collinear type-I phase-matching angle is solved from
  // n_e(theta, lambda_p) = n_o(2*lambda_p).
  std::optional<double> pump_angle_rad;

  void validate() const;  // throws ConfigError
};

struct PumpSpec {
  double lambda_p_nm = 0.0;
  double tau_s = 0.0;

  PumpSpec(double lambda_nm, double tau_seconds);

  double omega_p() const;
  // Transform-limited Gaussian, intensity-FWHM convention:
  // delta_omega * tau = 4 ln 2.
  double bandwidth_rad_s() const;
  double bandwidth_nm() const;
};

struct PhaseMatchConstants {
  double walkoff_A = 0.0;     // c*(1/vg_pump - 1/vg_ordinary), dimensionless
  double dispersion_B = 0.0;  // (c/4)*omega_p*k1'' at omega_p/2, dimensionless
  double omega_p = 0.0;       // rad/s
  std::optional<double> vg_pump;      // m/s (absent for anchored constants)
  std::optional<double> vg_ordinary;  // m/s
  std::optional<double> pump_angle_rad;
  std::optional<double> eta;  // 2*c*tau/(A*L); absent when A <= 0
  bool degenerate = false;    // A <= 0: no walk-off, eta undefined

  // Anchored constants entered directly (bypassing any index model).
  static PhaseMatchConstants anchored(double A, double B, double omega_p,
                                      double length_m, double tau_s);
};

enum class PulseRegime { Short, Intermediate, Long };
PulseRegime classify_regime(double eta);
std::string regime_name(PulseRegime regime);

double refractive_index(const IndexModel& model, double lambda_nm,
                        Polarization pol);

struct WavevectorDerivatives {
  double kprime = 0.0;        // s/m
  double kdoubleprime = 0.0;  // s^2/m
};

// Preferred route: analytic model derivatives when available, otherwise
// Richardson-extrapolated central differences.
WavevectorDerivatives wavevector_derivatives(const IndexModel& model,
                                             Polarization pol, double omega);
// Always finite differences on index() alone; kept separate so the two
// routes stay independently checkable.
WavevectorDerivatives wavevector_derivatives_fd(const IndexModel& model,
                                                Polarization pol, double omega);

// Effective extraordinary index of a uniaxial crystal at angle theta from
// the optic axis: 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2.
double extraordinary_index_at_angle(const IndexModel& model, double lambda_nm,
                                    double theta_rad);

// Collinear type-I phase-matching angle: n_e(theta, lambda_p) = n_o(2 lambda_p).
// Throws RegimeError when no angle satisfies the condition.
double phase_match_angle(const IndexModel& model, double lambda_p_nm);

PhaseMatchConstants walkoff_constants(const CrystalSpec& crystal,
                                      const PumpSpec& pump);

// eta = 2*c*tau/(A*L). Throws RegimeError for A <= 0.
double control_parameter(double walkoff_A, double length_m, double tau_s);

}  // namespace biphoton
