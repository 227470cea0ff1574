#include "biphoton/dispersion.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/constants.hpp"

namespace biphoton {

namespace {

using phys::c_vacuum;

std::string pol_name(Polarization pol) {
  return pol == Polarization::Ordinary ? "ordinary" : "extraordinary";
}

void check_window(const IndexModel& model, double lambda_nm, Polarization pol) {
  const WavelengthWindow win = model.window(pol);
  if (!std::isfinite(lambda_nm) || !win.contains(lambda_nm)) {
    std::ostringstream os;
    os << "wavelength " << lambda_nm << " nm outside validity window "
       << win.describe() << " of model '" << model.name() << "' ("
       << pol_name(pol) << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

std::string WavelengthWindow::describe() const {
  std::ostringstream os;
  os << "[" << min_nm << ", " << max_nm << "] nm";
  return os.str();
}

// ---------------------------------------------------------------------------
// Sellmeier

double SellmeierCoefficients::n_squared(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  double n2 = a - d * l2;
  for (const auto& [b, c] : resonances) n2 += b * l2 / (l2 - c);
  return n2;
}

double SellmeierCoefficients::dn2_dl2(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  double out = -d;
  for (const auto& [b, c] : resonances) {
    const double den = l2 - c;
    out -= b * c / (den * den);
  }
  return out;
}

double SellmeierCoefficients::d2n2_dl2l2(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  double out = 0.0;
  for (const auto& [b, c] : resonances) {
    const double den = l2 - c;
    out += 2.0 * b * c / (den * den * den);
  }
  return out;
}

SellmeierModel::SellmeierModel(std::string name, SellmeierCoefficients ordinary,
                               SellmeierCoefficients extraordinary,
                               WavelengthWindow window)
    : name_(std::move(name)),
      ordinary_(std::move(ordinary)),
      extraordinary_(std::move(extraordinary)),
      window_(window) {}

double SellmeierModel::index(double lambda_nm, Polarization pol) const {
  check_window(*this, lambda_nm, pol);
  const double n2 = coefficients(pol).n_squared(phys::nm_to_um(lambda_nm));
  if (!(n2 > 0.0)) {
    std::ostringstream os;
    os << "model '" << name_ << "' yields n^2 = " << n2 << " at " << lambda_nm
       << " nm";
    throw DomainError(os.str());
  }
  return std::sqrt(n2);
}

std::optional<IndexDerivatives> SellmeierModel::derivatives(
    double lambda_nm, Polarization pol) const {
  check_window(*this, lambda_nm, pol);
  const SellmeierCoefficients& sc = coefficients(pol);
  const double lambda_um = phys::nm_to_um(lambda_nm);
  const double n = std::sqrt(sc.n_squared(lambda_um));
  const double f1 = sc.dn2_dl2(lambda_um);    // d(n^2)/d(l2), per um^2
  const double f2 = sc.d2n2_dl2l2(lambda_um); // per um^4

  // n(lambda) = sqrt(f(lambda^2)):
  //   dn/dl   = l*f'/n
  //   d2n/dl2 = (f' + 2 l^2 f'')/n - l^2 f'^2/n^3
  const double dn_dl_um = lambda_um * f1 / n;
  const double d2n_dl2_um =
      (f1 + 2.0 * lambda_um * lambda_um * f2) / n -
      lambda_um * lambda_um * f1 * f1 / (n * n * n);
  return IndexDerivatives{n, dn_dl_um * 1e6, d2n_dl2_um * 1e12};
}

// ---------------------------------------------------------------------------
// Test models

ConstantIndexModel::ConstantIndexModel(double n, std::string name)
    : n_(n), name_(std::move(name)) {
  if (!(n > 0.0)) throw ConfigError("constant index model requires n > 0");
}

double ConstantIndexModel::index(double lambda_nm, Polarization pol) const {
  check_window(*this, lambda_nm, pol);
  return n_;
}

QuadraticIndexModel::QuadraticIndexModel(double n0, double alpha_per_um2,
                                         std::string name)
    : n0_(n0), alpha_(alpha_per_um2), name_(std::move(name)) {}

double QuadraticIndexModel::index(double lambda_nm, Polarization pol) const {
  check_window(*this, lambda_nm, pol);
  const double l = phys::nm_to_um(lambda_nm);
  return n0_ + alpha_ * l * l;
}

std::optional<IndexDerivatives> QuadraticIndexModel::derivatives(
    double lambda_nm, Polarization) const {
  const double l = phys::nm_to_um(lambda_nm);
  return IndexDerivatives{n0_ + alpha_ * l * l, 2.0 * alpha_ * l * 1e6,
                          2.0 * alpha_ * 1e12};
}

// ---------------------------------------------------------------------------
// Shipped models

std::shared_ptr<const IndexModel> liio3_model() {
  // LiIO3 Sellmeier set from the Handbook of Nonlinear Optical Crystals
  // (Dmitriev, Gurzadyan, Nikogosyan), lambda in um:
  //   n_o^2 = 2.03132 + 1.37623 l2/(l2-0.0350823) + 1.06745 l2/(l2-169.0)
  //   n_e^2 = 1.83086 + 1.08807 l2/(l2-0.0313810) + 0.554582 l2/(l2-158.76)
  static const auto model = std::make_shared<const SellmeierModel>(
      "LiIO3",
      SellmeierCoefficients{2.03132, {{1.37623, 0.0350823}, {1.06745, 169.0}}, 0.0},
      SellmeierCoefficients{1.83086, {{1.08807, 0.0313810}, {0.554582, 158.76}}, 0.0},
      WavelengthWindow{310.0, 5000.0});
  return model;
}

std::shared_ptr<const IndexModel> vacuum_model() {
  static const auto model =
      std::make_shared<const ConstantIndexModel>(1.0, "vacuum");
  return model;
}

std::shared_ptr<const IndexModel> constant_model(double n) {
  return std::make_shared<const ConstantIndexModel>(n);
}

// ---------------------------------------------------------------------------
// Specs

void CrystalSpec::validate() const {
  if (!(length_m > 0.0))
    throw ConfigError("crystal '" + name + "': length must be positive");
  if (!index_model)
    throw ConfigError("crystal '" + name + "': no index model attached");
}

PumpSpec::PumpSpec(double lambda_nm, double tau_seconds)
    : lambda_p_nm(lambda_nm), tau_s(tau_seconds) {
  if (!(lambda_p_nm > 0.0)) throw ConfigError("pump wavelength must be positive");
  if (!(tau_s > 0.0)) throw ConfigError("pump pulse duration must be positive");
}

double PumpSpec::omega_p() const { return phys::omega_from_lambda_nm(lambda_p_nm); }

double PumpSpec::bandwidth_rad_s() const { return 4.0 * phys::ln2 / tau_s; }

double PumpSpec::bandwidth_nm() const {
  const double lam = phys::nm_to_m(lambda_p_nm);
  return phys::m_to_nm(lam * lam * bandwidth_rad_s() / (phys::two_pi * c_vacuum));
}

PhaseMatchConstants PhaseMatchConstants::anchored(double A, double B,
                                                  double omega_p,
                                                  double length_m,
                                                  double tau_s) {
  PhaseMatchConstants out;
  out.walkoff_A = A;
  out.dispersion_B = B;
  out.omega_p = omega_p;
  if (A > 0.0) {
    out.eta = control_parameter(A, length_m, tau_s);
  } else {
    out.degenerate = true;
  }
  return out;
}

PulseRegime classify_regime(double eta) {
  if (eta < 0.2) return PulseRegime::Short;
  if (eta > 5.0) return PulseRegime::Long;
  return PulseRegime::Intermediate;
}

std::string regime_name(PulseRegime regime) {
  switch (regime) {
    case PulseRegime::Short: return "short";
    case PulseRegime::Long: return "long";
    default: return "intermediate";
  }
}

// ---------------------------------------------------------------------------
// Derivatives of k(omega) = n(lambda(omega)) * omega / c

double refractive_index(const IndexModel& model, double lambda_nm,
                        Polarization pol) {
  return model.index(lambda_nm, pol);
}

namespace {

// Scalar index as a function of wavelength, with optional analytic
// derivatives; wraps either a plain polarization of a model or the
// angle-dependent pump index.
struct ScalarIndex {
  const IndexModel* model = nullptr;
  Polarization pol = Polarization::Ordinary;
  std::optional<double> angle;  // set: uniaxial effective index at fixed angle

  double value(double lambda_nm) const {
    if (angle) return extraordinary_index_at_angle(*model, lambda_nm, *angle);
    return model->index(lambda_nm, pol);
  }

  std::optional<IndexDerivatives> analytic(double lambda_nm) const {
    if (!angle) return model->derivatives(lambda_nm, pol);
    const auto o = model->derivatives(lambda_nm, Polarization::Ordinary);
    const auto e = model->derivatives(lambda_nm, Polarization::Extraordinary);
    if (!o || !e) return std::nullopt;
    // u(l) = cos^2/n_o^2 + sin^2/n_e^2, n_eff = u^{-1/2}
    const double c2 = std::cos(*angle) * std::cos(*angle);
    const double s2 = 1.0 - c2;
    const double u = c2 / (o->n * o->n) + s2 / (e->n * e->n);
    const double up = -2.0 * c2 * o->dn_dlambda / (o->n * o->n * o->n) -
                      2.0 * s2 * e->dn_dlambda / (e->n * e->n * e->n);
    auto term = [](double n, double d1, double d2) {
      // d2/dl2 of n^{-2} = 6 n'^2/n^4 - 2 n''/n^3
      return 6.0 * d1 * d1 / (n * n * n * n) - 2.0 * d2 / (n * n * n);
    };
    const double upp = c2 * term(o->n, o->dn_dlambda, o->d2n_dlambda2) +
                       s2 * term(e->n, e->dn_dlambda, e->d2n_dlambda2);
    const double n = 1.0 / std::sqrt(u);
    const double np = -0.5 * up * n * n * n;
    const double npp = -0.5 * upp * n * n * n + 0.75 * up * up * n * n * n * n * n;
    return IndexDerivatives{n, np, npp};
  }
};

double k_of_omega(const ScalarIndex& idx, double omega) {
  const double lambda_nm = phys::lambda_nm_from_omega(omega);
  return idx.value(lambda_nm) * omega / c_vacuum;
}

// Relative step 1e-5 with one Richardson extrapolation on central
// differences; balances truncation against round-off in double precision.
constexpr double kFdRelStep = 1e-5;

WavevectorDerivatives fd_derivatives(const ScalarIndex& idx, double omega) {
  const double h = omega * kFdRelStep;
  const double k0 = k_of_omega(idx, omega);
  const double kp1 = k_of_omega(idx, omega + h);
  const double km1 = k_of_omega(idx, omega - h);
  const double kp2 = k_of_omega(idx, omega + 0.5 * h);
  const double km2 = k_of_omega(idx, omega - 0.5 * h);

  const double d1_h = (kp1 - km1) / (2.0 * h);
  const double d1_h2 = (kp2 - km2) / h;
  const double d2_h = (kp1 - 2.0 * k0 + km1) / (h * h);
  const double d2_h2 = (kp2 - 2.0 * k0 + km2) / (0.25 * h * h);

  WavevectorDerivatives out;
  out.kprime = (4.0 * d1_h2 - d1_h) / 3.0;
  out.kdoubleprime = (4.0 * d2_h2 - d2_h) / 3.0;
  return out;
}

void check_fd_margin(const ScalarIndex& idx, double omega) {
  // The stencil reaches omega*(1 +- 1e-5); require the mapped wavelengths
  // to stay inside the window with a few steps of margin.
  const double margin = 4.0 * kFdRelStep;
  const WavelengthWindow win =
      idx.angle ? idx.model->window(Polarization::Extraordinary)
                : idx.model->window(idx.pol);
  const double lo = phys::lambda_nm_from_omega(omega * (1.0 + margin));
  const double hi = phys::lambda_nm_from_omega(omega * (1.0 - margin));
  if (!win.contains(lo) || !win.contains(hi)) {
    std::ostringstream os;
    os << "omega = " << omega << " rad/s maps to " << phys::lambda_nm_from_omega(omega)
       << " nm, too close to the edge of window " << win.describe()
       << " for differentiation (model '" << idx.model->name() << "')";
    throw DomainError(os.str());
  }
}

WavevectorDerivatives analytic_derivatives(double omega,
                                           const IndexDerivatives& d) {
  // k = n w / c with lambda = 2 pi c / w:
  //   k'  = (n - lambda n')/c
  //   k'' = lambda^3 n'' / (2 pi c^2)
  const double lambda_m = phys::two_pi * c_vacuum / omega;
  WavevectorDerivatives out;
  out.kprime = (d.n - lambda_m * d.dn_dlambda) / c_vacuum;
  out.kdoubleprime =
      lambda_m * lambda_m * lambda_m * d.d2n_dlambda2 / (phys::two_pi * c_vacuum * c_vacuum);
  return out;
}

WavevectorDerivatives derivatives_for(const ScalarIndex& idx, double omega) {
  check_fd_margin(idx, omega);
  const double lambda_nm = phys::lambda_nm_from_omega(omega);
  if (const auto d = idx.analytic(lambda_nm)) return analytic_derivatives(omega, *d);
  return fd_derivatives(idx, omega);
}

}  // namespace

WavevectorDerivatives wavevector_derivatives(const IndexModel& model,
                                             Polarization pol, double omega) {
  return derivatives_for(ScalarIndex{&model, pol, std::nullopt}, omega);
}

WavevectorDerivatives wavevector_derivatives_fd(const IndexModel& model,
                                                Polarization pol, double omega) {
  const ScalarIndex idx{&model, pol, std::nullopt};
  check_fd_margin(idx, omega);
  return fd_derivatives(idx, omega);
}

double extraordinary_index_at_angle(const IndexModel& model, double lambda_nm,
                                    double theta_rad) {
  const double no = model.index(lambda_nm, Polarization::Ordinary);
  const double ne = model.index(lambda_nm, Polarization::Extraordinary);
  const double c2 = std::cos(theta_rad) * std::cos(theta_rad);
  const double s2 = 1.0 - c2;
  return 1.0 / std::sqrt(c2 / (no * no) + s2 / (ne * ne));
}

double phase_match_angle(const IndexModel& model, double lambda_p_nm) {
  const double target = model.index(2.0 * lambda_p_nm, Polarization::Ordinary);
  auto f = [&](double th) {
    return extraordinary_index_at_angle(model, lambda_p_nm, th) - target;
  };
  double lo = 0.0, hi = phys::pi / 2.0;
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0.0) {
    std::ostringstream os;
    os << "no collinear type-I phase-matching angle for model '" << model.name()
       << "' at pump " << lambda_p_nm << " nm (n_e(0)=" << flo + target
       << ", n_e(90)=" << fhi + target << ", target n_o=" << target << ")";
    throw RegimeError(os.str());
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

PhaseMatchConstants walkoff_constants(const CrystalSpec& crystal,
                                      const PumpSpec& pump) {
  crystal.validate();
  const IndexModel& model = *crystal.index_model;
  const double omega_p = pump.omega_p();
  const double omega_half = 0.5 * omega_p;

  ScalarIndex pump_index{&model, Polarization::Extraordinary, std::nullopt};
  std::optional<double> angle;
  if (!model.isotropic()) {
    angle = crystal.pump_angle_rad ? *crystal.pump_angle_rad
                                   : phase_match_angle(model, pump.lambda_p_nm);
    pump_index.angle = angle;
  }

  const ScalarIndex ordinary{&model, Polarization::Ordinary, std::nullopt};
  const WavevectorDerivatives kp = derivatives_for(pump_index, omega_p);
  const WavevectorDerivatives ko = derivatives_for(ordinary, omega_half);

  PhaseMatchConstants out;
  out.omega_p = omega_p;
  out.walkoff_A = c_vacuum * (kp.kprime - ko.kprime);
  out.dispersion_B = 0.25 * c_vacuum * omega_p * ko.kdoubleprime;
  out.vg_pump = 1.0 / kp.kprime;
  out.vg_ordinary = 1.0 / ko.kprime;
  out.pump_angle_rad = angle;
  if (out.walkoff_A > 0.0) {
    out.eta = control_parameter(out.walkoff_A, crystal.length_m, pump.tau_s);
  } else {
    out.degenerate = true;
  }
  return out;
}

double control_parameter(double walkoff_A, double length_m, double tau_s) {
  if (!(walkoff_A > 0.0)) {
    std::ostringstream os;
    os << "control parameter undefined: walk-off constant A = " << walkoff_A
       << " (needs A > 0)";
    throw RegimeError(os.str());
  }
  if (!(length_m > 0.0) || !(tau_s > 0.0))
    throw ConfigError("control parameter needs positive length and duration");
  return 2.0 * c_vacuum * tau_s / (walkoff_A * length_m);
}

}  // namespace biphoton
