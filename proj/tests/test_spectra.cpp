#include <doctest.h>

#include <cmath>
#include <random>

#include "biphoton/constants.hpp"
#include "biphoton/jsa.hpp"
#include "biphoton/numeric.hpp"
#include "biphoton/spectra.hpp"
#include "support.hpp"

using namespace biphoton;

namespace {

const PumpSpec table_pump(397.5, 186e-15);

Spectrum sampled_curve(double half, std::size_t n,
                       const std::function<double(double)>& f) {
  Spectrum s;
  s.unit = AxisUnit::RadPerSecond;
  s.axis.resize(n);
  s.intensity.resize(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.axis[i] = (2.0 * static_cast<double>(i) - static_cast<double>(n - 1)) *
                (half / static_cast<double>(n - 1));
    s.intensity[i] = f(s.axis[i]);
    peak = std::max(peak, s.intensity[i]);
  }
  for (double& v : s.intensity) v /= peak;
  return s;
}

double riemann_integral(const Spectrum& s) {
  const double step = s.axis[1] - s.axis[0];
  double total = 0.0;
  for (double v : s.intensity) total += v * step;
  return total;
}

}  // namespace

TEST_SUITE_BEGIN("spectra");

TEST_CASE("fwhm of a sampled Gaussian") {
  const std::size_t n = 1201;
  const double half = 6.0;
  const Spectrum s = sampled_curve(half, n, [](double x) {
    return std::exp(-0.5 * x * x);
  });
  const double step = 2.0 * half / static_cast<double>(n - 1);
  CHECK(std::abs(fwhm(s) - 2.0 * std::sqrt(2.0 * phys::ln2)) <= step);
}

TEST_CASE("fwhm of sinc^2 against a bisection oracle") {
  // Independent oracle: solve sinc^2(x) = 1/2 on (1, 2) by bisection.
  auto sinc2 = [](double x) {
    if (x == 0.0) return 1.0;
    const double s = std::sin(x) / x;
    return s * s;
  };
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sinc2(mid) > 0.5 ? lo : hi) = mid;
  }
  const double x_half = 0.5 * (lo + hi);
  CHECK(x_half == doctest::Approx(1.39155737825).epsilon(1e-9));

  const std::size_t n = 4001;
  const double half = 20.0;
  const Spectrum s = sampled_curve(half, n, sinc2);
  const double step = 2.0 * half / static_cast<double>(n - 1);
  CHECK(std::abs(fwhm(s) - 2.0 * x_half) <= step);
}

TEST_CASE("fwhm error paths") {
  SUBCASE("monotone ramp has incomplete support") {
    Spectrum ramp;
    ramp.axis = {0, 1, 2, 3, 4};
    ramp.intensity = {0.1, 0.3, 0.5, 0.8, 1.0};
    CHECK_THROWS_AS(fwhm(ramp), DomainError);
  }
  SUBCASE("bimodal spectra are ambiguous and list crossings") {
    Spectrum bimodal;
    for (int i = 0; i <= 200; ++i) {
      const double x = -10.0 + 0.1 * i;
      bimodal.axis.push_back(x);
      bimodal.intensity.push_back(std::exp(-(x - 4) * (x - 4)) +
                                  0.9 * std::exp(-(x + 4) * (x + 4)));
    }
    try {
      fwhm(bimodal);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("crossings") != std::string::npos);
    }
  }
  SUBCASE("peak-sharing distinct maxima are rejected") {
    Spectrum twin;
    twin.axis = {0, 1, 2, 3, 4};
    twin.intensity = {0.0, 1.0, 0.2, 1.0, 0.0};
    CHECK_THROWS_AS(fwhm(twin), NumericalError);
  }
}

TEST_CASE("fwhm invariances") {
  const Spectrum s = sampled_curve(6.0, 801, [](double x) {
    return std::exp(-0.5 * x * x);
  });
  const double w = fwhm(s);

  Spectrum scaled = s;
  for (double& v : scaled.intensity) v *= 0.25;  // renormalization
  CHECK(fwhm(scaled) == doctest::Approx(w).epsilon(1e-12));

  Spectrum shifted = s;
  for (double& x : shifted.axis) x += 17.0;
  CHECK(fwhm(shifted) == doctest::Approx(w).epsilon(1e-9));

  Spectrum stretched = s;
  for (double& x : stretched.axis) x *= 3.0;
  CHECK(fwhm(stretched) == doctest::Approx(3.0 * w).epsilon(1e-12));
}

TEST_CASE("width unit conversion") {
  // Anchor arithmetic at 795 nm.
  CHECK(width_to_wavelength(9.53710e11, 795.0) ==
        doctest::Approx(0.32).epsilon(1e-4));
  CHECK(width_to_wavelength(2.98034e14, 795.0) ==
        doctest::Approx(100.0).epsilon(1e-4));
  CHECK(width_to_wavelength(0.0, 795.0) == 0.0);

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dw(1e9, 1e15);
  std::uniform_real_distribution<double> lam(300.0, 2000.0);
  for (int i = 0; i < 200; ++i) {
    const double w = dw(rng), l = lam(rng);
    CHECK(width_to_angular(width_to_wavelength(w, l), l) ==
          doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("instrument response convolution") {
  auto gaussian_fwhm = [](double w) {
    return [w](double x) { return std::exp(-4.0 * phys::ln2 * x * x / (w * w)); };
  };

  SUBCASE("3-4-5 quadrature addition") {
    const Spectrum s = sampled_curve(3.0, 3001, gaussian_fwhm(0.3));
    const double step = 6.0 / 3000.0;
    const Spectrum c = convolve_response(s, 0.4, ResponseShape::Gaussian);
    CHECK(std::abs(fwhm(c) - 0.5) <= step);
  }
  SUBCASE("near-delta spectrum adopts the response width") {
    const Spectrum s = sampled_curve(3.0, 6001, gaussian_fwhm(0.004));
    const Spectrum c = convolve_response(s, 0.4, ResponseShape::Gaussian);
    CHECK(fwhm(c) == doctest::Approx(0.4).epsilon(5e-3));
  }
  SUBCASE("coincidence-scale arithmetic: 0.32 (+) 0.2 resolution") {
    const Spectrum s = sampled_curve(2.0, 4001, gaussian_fwhm(0.32));
    const Spectrum c = convolve_response(s, 0.2, ResponseShape::Gaussian);
    CHECK(fwhm(c) == doctest::Approx(std::sqrt(0.32 * 0.32 + 0.2 * 0.2))
                         .epsilon(5e-3));
  }
  SUBCASE("integral is preserved before peak normalization") {
    const Spectrum s = sampled_curve(4.0, 2001, gaussian_fwhm(0.5));
    const double before = riemann_integral(s);
    Spectrum c = convolve_response(s, 0.35, ResponseShape::Gaussian);
    // Undo the peak normalization: scale back so integrals compare.
    // convolve preserves the integral of the unnormalized output; the
    // returned spectrum is peak-normalized, so compare shapes instead:
    // reconvolve manually at unit area is equivalent to checking the
    // ratio of integrals equals the peak value used for normalization.
    const double peak_area = riemann_integral(c);
    CHECK(peak_area > 0.0);
    // Direct check through the library's internal guarantee:
    // convolution with a rectangular kernel of tiny width is the identity.
    const Spectrum ident = convolve_response(s, 1e-6, ResponseShape::Rectangular);
    CHECK(riemann_integral(ident) == doctest::Approx(before).epsilon(1e-9));
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(ident.intensity[i] == doctest::Approx(s.intensity[i]).epsilon(1e-9));
  }
  SUBCASE("rectangular response") {
    const Spectrum s = sampled_curve(3.0, 6001, gaussian_fwhm(0.004));
    const Spectrum c = convolve_response(s, 0.5, ResponseShape::Rectangular);
    CHECK(fwhm(c) == doctest::Approx(0.5).epsilon(5e-3));
  }
  SUBCASE("kernel wider than the axis span is refused") {
    const Spectrum s = sampled_curve(1.0, 201, gaussian_fwhm(0.3));
    CHECK_THROWS_AS(convolve_response(s, 5.0, ResponseShape::Gaussian),
                    SizingError);
  }
  SUBCASE("support reaching the axis edge is caught") {
    const Spectrum wide = sampled_curve(2.0, 1601, gaussian_fwhm(2.5));
    CHECK_THROWS_AS(convolve_response(wide, 0.5, ResponseShape::Gaussian),
                    NumericalError);
  }
}

TEST_CASE("coincidence slice of the pure pump factor is Gaussian") {
  // A = B = 0: |Psi(nu1, 0)|^2 = exp(-nu1^2 tau^2/(4 ln2)), FWHM 4 ln2/tau.
  const auto constants = PhaseMatchConstants::anchored(
      0.0, 0.0, table_pump.omega_p(), 0.010, table_pump.tau_s);
  const double expect = 4.0 * phys::ln2 / table_pump.tau_s;
  const auto grid = FrequencyGrid::square(3.0 * expect, 1601);
  const auto jsa = sample_jsa(constants, table_pump, 0.010, grid);

  const Spectrum slice = coincidence_spectrum(jsa, 0.0);
  CHECK(std::abs(fwhm(slice) - expect) <= grid.step1());

  SUBCASE("slice out of the sampled span is an error") {
    CHECK_THROWS_AS(coincidence_spectrum(jsa, 10.0 * expect), DomainError);
  }
  SUBCASE("bandpass variant reduces to the slice as the window vanishes") {
    const Spectrum windowed =
        coincidence_spectrum(jsa, 0.0, 8.0 * grid.step2());
    CHECK(fwhm(windowed) == doctest::Approx(fwhm(slice)).epsilon(1e-3));
  }
}

TEST_CASE("separable product state marginalizes to its own factor") {
  const double wa = 3.0, wb = 1.0;
  auto kernel = [&](double x, double y) {
    return std::exp(-x * x / (2.0 * wa * wa)) *
           std::exp(-y * y / (2.0 * wb * wb));
  };
  const auto grid = FrequencyGrid::square(12.0, 601);
  const auto jsa = sample_kernel(kernel, grid);
  const Spectrum marginal = single_spectrum(jsa);

  for (std::size_t i = 0; i < grid.n1(); i += 7) {
    const double x = grid.nu1_axis()[i];
    CHECK(marginal.intensity[i] ==
          doctest::Approx(std::exp(-x * x / (wa * wa))).epsilon(1e-9));
  }
}

TEST_CASE("single-count marginal is exchange symmetric") {
  const auto constants = PhaseMatchConstants::anchored(
      0.1748, 0.0695, table_pump.omega_p(), 0.0005, table_pump.tau_s);
  const auto grid = build_grid(constants, table_pump, 0.0005);
  const auto jsa = sample_jsa(constants, table_pump, 0.0005, grid);

  const Spectrum over_nu2 = single_spectrum(jsa);
  // Marginal over nu1 computed transposed with the same summation order;
  // the matrix is exchange symmetric, so the two marginals agree bitwise.
  std::vector<double> transposed(grid.n2());
  double peak = 0.0;
  for (std::size_t j = 0; j < grid.n2(); ++j) {
    KahanSum sum;
    for (std::size_t i = 0; i < grid.n1(); ++i)
      sum.add(trapezoid_weight(i, grid.n1()) * jsa.at(i, j) * jsa.at(i, j));
    transposed[j] = sum.value() * grid.step1();
    peak = std::max(peak, transposed[j]);
  }
  // peak_normalize multiplies by the reciprocal; mirror it exactly.
  const double inv_peak = 1.0 / peak;
  for (std::size_t j = 0; j < grid.n2(); ++j)
    CHECK(over_nu2.intensity[j] == transposed[j] * inv_peak);
}

TEST_CASE("direct-evaluation spectra reproduce the table widths") {
  CrystalSpec crystal;
  crystal.name = "LiIO3";
  crystal.length_m = 0.010;
  crystal.index_model = liio3_model();
  const PhaseMatchConstants constants = walkoff_constants(crystal, table_pump);

  const Spectrum coinc =
      coincidence_spectrum_direct(constants, table_pump, 0.010);
  const double dlc = width_to_wavelength(fwhm(coinc), 795.0);
  CHECK(std::abs(dlc - 0.32) <= 0.05 * 0.32);

  const Spectrum singles = single_spectrum_direct(constants, table_pump, 0.010);
  const double dls = width_to_wavelength(fwhm(singles), 795.0);
  CHECK(std::abs(dls - 100.0) <= 0.05 * 100.0);

  SUBCASE("5 mm sample doubles the coincidence width, singles unchanged") {
    crystal.length_m = 0.005;
    const PhaseMatchConstants c5 = walkoff_constants(crystal, table_pump);
    const double dlc5 = width_to_wavelength(
        fwhm(coincidence_spectrum_direct(c5, table_pump, 0.005)), 795.0);
    CHECK(dlc5 >= 0.60);
    CHECK(dlc5 <= 0.67);
    const double dls5 = width_to_wavelength(
        fwhm(single_spectrum_direct(c5, table_pump, 0.005)), 795.0);
    CHECK(std::abs(dls5 - 100.0) <= 0.05 * 100.0);
  }
}

TEST_CASE("direct and grid-based routes agree on an affordable state") {
  const auto constants = PhaseMatchConstants::anchored(
      0.1748, 0.0695, table_pump.omega_p(), 0.0005, table_pump.tau_s);
  const auto grid = build_grid(constants, table_pump, 0.0005);
  const auto jsa = sample_jsa(constants, table_pump, 0.0005, grid);

  const double via_grid = fwhm(coincidence_spectrum(jsa, 0.0));
  const double via_direct =
      fwhm(coincidence_spectrum_direct(constants, table_pump, 0.0005));
  CHECK(via_direct == doctest::Approx(via_grid).epsilon(0.01));

  const double s_grid = fwhm(single_spectrum(jsa));
  const double s_direct =
      fwhm(single_spectrum_direct(constants, table_pump, 0.0005));
  CHECK(s_direct == doctest::Approx(s_grid).epsilon(0.01));
}

TEST_CASE("wavelength mapping centers the preset spectra at 795 nm") {
  const auto constants = PhaseMatchConstants::anchored(
      0.1748, 0.0695, table_pump.omega_p(), 0.010, table_pump.tau_s);
  const Spectrum coinc =
      coincidence_spectrum_direct(constants, table_pump, 0.010);
  const Spectrum in_nm = spectrum_to_wavelength(coinc, table_pump.omega_p() / 2.0);
  CHECK(in_nm.unit == AxisUnit::Nanometer);
  CHECK(in_nm.center == doctest::Approx(795.0).epsilon(1e-4));
  for (std::size_t i = 1; i < in_nm.size(); ++i)
    CHECK(in_nm.axis[i] > in_nm.axis[i - 1]);
}

TEST_CASE("gaussian fit recovers noiseless parameters exactly") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    x.push_back(794.0 + 0.05 * i);
    const double u = (x.back() - 795.0) / 0.29;
    y.push_back(0.97 * std::exp(-4.0 * phys::ln2 * u * u) + 0.015);
  }
  const FitResult fit = fit_gaussian(x, y);
  CHECK(fit.converged);
  CHECK(fit.center == doctest::Approx(795.0).epsilon(1e-9));
  CHECK(fit.fwhm == doctest::Approx(0.29).epsilon(1e-9));
  CHECK(fit.amplitude == doctest::Approx(0.97).epsilon(1e-7));
  CHECK(fit.baseline == doctest::Approx(0.015).epsilon(1e-6));
}

TEST_CASE("gaussian fit Monte Carlo coverage") {
  // 200 seeds, 5% additive noise: the reported 2-sigma band on the FWHM
  // must cover the truth in at least 90% of runs.
  const double truth = 0.29;
  int covered = 0;
  int runs = 0;
  for (unsigned seed = 1; seed <= 200; ++seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<double> x, y;
    for (int i = 0; i <= 28; ++i) {
      x.push_back(794.2 + 0.06 * i);
      const double u = (x.back() - 795.0) / truth;
      y.push_back(std::exp(-4.0 * phys::ln2 * u * u) + noise(rng));
    }
    try {
      const FitResult fit = fit_gaussian(x, y);
      ++runs;
      if (std::abs(fit.fwhm - truth) <= 2.0 * fit.fwhm_sigma) ++covered;
    } catch (const Error&) {
      // a failed fit counts as an uncovered run
      ++runs;
    }
  }
  CHECK(runs == 200);
  CHECK(covered >= 180);
}

TEST_CASE("gaussian fit rejects degenerate input") {
  CHECK_THROWS_AS(fit_gaussian({1, 2, 3}, {0, 1, 0}), DomainError);
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(fit_gaussian(x, {1, 1, 1, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(fit_gaussian(x, {1, 1, 1}), DomainError);
  const std::vector<double> bad_sigma = {1, 1, 1, 1, 1, 0};
  std::vector<double> y = {0, 0.3, 1, 1, 0.3, 0};
  CHECK_THROWS_AS(fit_gaussian(x, y, &bad_sigma), DomainError);
}

TEST_SUITE_END();
