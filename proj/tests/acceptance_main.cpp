// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 1-3 run the CLI end to end; the rest exercise
// the library directly. Tolerances are pinned here, not configurable.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton/config.hpp"
#include "biphoton/constants.hpp"
#include "biphoton/entanglement.hpp"
#include "biphoton/io.hpp"

using namespace biphoton;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

struct Criterion {
  int number;
  std::string title;
  std::vector<std::string> details;
  bool ok = true;

  Criterion(int n, std::string t) : number(n), title(std::move(t)) {}

  void require(bool condition, const std::string& what) {
    std::ostringstream os;
    os << (condition ? "ok" : "FAILED") << ": " << what;
    details.push_back(os.str());
    if (!condition) ok = false;
  }

  void finish(double seconds) {
    std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL",
                number, title.c_str(), seconds);
    for (const auto& d : details) std::printf("        %s\n", d.c_str());
    if (!ok) ++g_failures;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.output.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

double keyvalue_num(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  const std::string prefix = key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return std::stod(line.substr(prefix.size()));
  return std::nan("");
}

const std::string kCli = std::string("\"") + BIPHOTON_CLI_PATH + "\"";
const std::string kSource = BIPHOTON_SOURCE_DIR;

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

// ---------------------------------------------------------------------------

double criterion_1_table1() {  // returns R_analytic(10mm) for criterion 3
  Criterion c(1, "Table I theory reproduction via cmd_report(table1)");
  Timer t;
  const CommandResult r =
      run_command(kCli + " report --preset table1 --keyvalues");
  const double seconds = t.seconds();

  c.require(r.exit_code == 0, "exit code 0");
  const double dlc = keyvalue_num(r.output, "delta_lambda_c_analytic_nm");
  const double dls = keyvalue_num(r.output, "delta_lambda_s_analytic_nm");
  const double dlp = keyvalue_num(r.output, "delta_lambda_p_nm");
  const double R = keyvalue_num(r.output, "r_analytic");
  c.require(within(dlc, 0.32, 0.05), "delta_lambda_c = " + fmt(dlc) + " nm in 0.32 +- 5%");
  c.require(within(dls, 100.0, 0.05), "delta_lambda_s = " + fmt(dls) + " nm in 100 +- 5%");
  c.require(R >= 300.0 && R <= 330.0, "R = " + fmt(R) + " in [300, 330]");
  c.require(within(dlp, 1.25, 0.02), "delta_lambda_p = " + fmt(dlp) + " nm in 1.25 +- 2%");
  c.require(seconds < 10.0, "runtime " + fmt(seconds) + " s < 10 s");
  c.finish(seconds);
  return R;
}

double criterion_2_table2() {  // returns R_analytic(5mm)
  Criterion c(2, "Table II theory reproduction via cmd_report(table2)");
  Timer t;
  const CommandResult r =
      run_command(kCli + " report --preset table2 --keyvalues");
  const double seconds = t.seconds();

  c.require(r.exit_code == 0, "exit code 0");
  const double dlc = keyvalue_num(r.output, "delta_lambda_c_analytic_nm");
  const double R = keyvalue_num(r.output, "r_analytic");
  c.require(dlc >= 0.60 && dlc <= 0.67, "delta_lambda_c = " + fmt(dlc) + " nm in [0.60, 0.67]");
  c.require(R >= 150.0 && R <= 167.0, "R = " + fmt(R) + " in [150, 167]");
  c.require(seconds < 10.0, "runtime " + fmt(seconds) + " s < 10 s");
  c.finish(seconds);
  return R;
}

void criterion_3_scaling(double r10, double r5) {
  Criterion c(3, "L-scaling law R(10mm)/R(5mm) = 2 end to end");
  Timer t;
  const double ratio = r10 / r5;
  c.require(within(ratio, 2.0, 0.01), "ratio = " + fmt(ratio) + " within 1% of 2");
  c.finish(t.seconds());
}

void criterion_4_ratio_pipeline() {
  Criterion c(4, "experimental-ratio pipeline r_from_widths");
  Timer t;
  const Ratio r1 = r_from_widths({101.0, 1.0, AxisUnit::Nanometer},
                                 {0.29, 0.03, AxisUnit::Nanometer});
  c.require(std::abs(r1.value - 348.3) <= 0.5,
            "R(101/0.29) = " + fmt(r1.value) + " within 0.5 of 348.3");
  c.require(r1.sigma >= 35.0 && r1.sigma <= 37.5,
            "propagated sigma = " + fmt(r1.sigma) + " ~ 36");
  const Ratio r2 = r_from_widths({115.0, 1.0, AxisUnit::Nanometer},
                                 {0.64, 0.06, AxisUnit::Nanometer});
  c.require(std::abs(r2.value - 179.7) <= 0.5,
            "R(115/0.64) = " + fmt(r2.value) + " within 0.5 of 179.7");
  c.require(r2.sigma >= 16.0 && r2.sigma <= 18.0,
            "propagated sigma = " + fmt(r2.sigma) + " ~ 17");
  c.finish(t.seconds());
}

void criterion_5_sweep_shape() {
  Criterion c(5, "K(tau) sweep shape at 400 nm pump");
  Timer t;

  const RunConfig cfg = preset_config("fig1");
  const auto taus = log_spaced(50e-15, 10e-12, 40);
  const SweepTable table = sweep_quantifiers(cfg.crystal(), cfg.lambda_p_nm,
                                             taus, true, true,
                                             PurityConfig::fast());

  std::vector<double> k(taus.size(), std::nan(""));
  bool all_k = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].k_numerical) {
      k[i] = *table.rows[i].k_numerical;
    } else {
      all_k = false;
    }
  }
  c.require(all_k, "K computed on every row");

  std::size_t imin = 0;
  for (std::size_t i = 1; i < k.size(); ++i)
    if (k[i] < k[imin]) imin = i;
  const double tau_min_ps = taus[imin] * 1e12;
  c.require(imin > 0 && imin + 1 < k.size(), "minimum is interior");
  c.require(tau_min_ps >= 0.3 && tau_min_ps <= 3.0,
            "minimum at tau = " + fmt(tau_min_ps) + " ps in [0.3, 3]");

  // Single interior minimum: V shape up to a small wiggle allowance.
  bool single = true;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    if (i < imin && k[i + 1] > k[i] * 1.005) single = false;
    if (i >= imin && k[i + 1] < k[i] * 0.995) single = false;
  }
  c.require(single, "K decreases into the minimum and increases after it");

  c.require(k.front() > 3.0 * k[imin],
            "K(50 fs) = " + fmt(k.front()) + " > 3x minimum " + fmt(k[imin]));
  c.require(k.back() > 3.0 * k[imin],
            "K(10 ps) = " + fmt(k.back()) + " > 3x minimum " + fmt(k[imin]));

  double worst = 0.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& row = table.rows[i];
    if (row.eta && *row.eta < 0.2 && row.r_analytic && row.k_numerical)
      worst = std::max(worst,
                       std::abs(*row.r_analytic - *row.k_numerical) / *row.k_numerical);
  }
  c.require(worst < 0.20,
            "|R - K|/K = " + fmt(worst) + " < 20% wherever eta < 0.2");
  const double seconds = t.seconds();
  c.require(seconds < 600.0, "runtime " + fmt(seconds) + " s < 10 min");
  c.finish(seconds);
}

JointSpectralAmplitude double_gaussian_jsa(double a, double b, std::size_t n) {
  const double half = 4.0 * std::sqrt(2.0) * 0.5 * std::sqrt(a * a + b * b);
  return sample_kernel(
      [a, b](double nu1, double nu2) {
        const double p = nu1 + nu2, m = nu1 - nu2;
        return std::exp(-p * p / (4.0 * a * a) - m * m / (4.0 * b * b));
      },
      FrequencyGrid::square(half, n));
}

void criterion_6_schmidt_oracles() {
  Criterion c(6, "Schmidt oracle suite (separable and double-Gaussian)");
  Timer t;

  const SchmidtResult sep = schmidt_decomposition(double_gaussian_jsa(1, 1, 257));
  c.require(std::abs(sep.K - 1.0) <= 1e-9,
            "separable K = 1 + " + fmt(sep.K - 1.0));

  for (const double ratio : {1.0, 2.0, 10.0, 50.0}) {
    const double k_exact = (ratio * ratio + 1.0) / (2.0 * ratio);
    const auto jsa = double_gaussian_jsa(ratio, 1.0, 513);
    const SchmidtResult r = schmidt_decomposition(jsa);
    c.require(within(r.K, k_exact, 0.01),
              "a/b = " + fmt(ratio) + ": K = " + fmt(r.K) + " within 1% of " +
                  fmt(k_exact));
    const double width_r =
        fwhm(single_spectrum(jsa)) / fwhm(coincidence_spectrum(jsa));
    c.require(within(width_r, k_exact, 0.01),
              "a/b = " + fmt(ratio) + ": width R = " + fmt(width_r) +
                  " within 1% of K");
  }
  const double seconds = t.seconds();
  c.require(seconds < 120.0, "runtime " + fmt(seconds) + " s < 2 min");
  c.finish(seconds);
}

void criterion_7_numerical_consistency() {
  Criterion c(7, "numerical consistency of widths and K routes");
  Timer t;

  CrystalSpec crystal;
  crystal.name = "LiIO3";
  crystal.length_m = 0.010;
  crystal.index_model = liio3_model();
  const PumpSpec pump(397.5, 186e-15);

  // Coincidence FWHM from the numerical pipeline vs 5.56 c/(A L) at eta < 0.1.
  const PhaseMatchConstants pm10 = walkoff_constants(crystal, pump);
  c.require(pm10.eta && *pm10.eta < 0.1, "eta = " + fmt(*pm10.eta) + " < 0.1");
  const double predicted =
      5.56 * phys::c_vacuum / (pm10.walkoff_A * crystal.length_m);
  const double numeric =
      fwhm(coincidence_spectrum_direct(pm10, pump, crystal.length_m));
  c.require(within(numeric, predicted, 0.02),
            "coincidence FWHM " + fmt(numeric) + " within 2% of 5.56c/(AL) = " +
                fmt(predicted));

  // Decomposition vs purity quadrature on a state both can afford.
  crystal.length_m = 0.001;
  const PhaseMatchConstants pm1 = walkoff_constants(crystal, pump);
  const auto jsa = sample_jsa(pm1, pump, crystal.length_m,
                              build_grid(pm1, pump, crystal.length_m));
  const SchmidtResult dense = schmidt_decomposition(jsa);
  const PurityResult quad = purity_quadrature_K(pm1, pump, crystal.length_m);
  c.require(within(quad.K, dense.K, 0.02),
            "purity K = " + fmt(quad.K) + " within 2% of decomposition K = " +
                fmt(dense.K));

  // Grid-density doubling moves K by less than 1%.
  c.require(dense.converged,
            "decomposition K converged: half-density K = " +
                fmt(dense.K_half_density) + " vs " + fmt(dense.K));
  c.require(quad.converged,
            "purity K converged: half-density K = " + fmt(quad.K_half_density) +
                " vs " + fmt(quad.K));
  c.finish(t.seconds());
}

void criterion_8_estimators() {
  Criterion c(8, "FWHM and convolution estimator correctness");
  Timer t;

  auto sampled = [](double half, std::size_t n, auto f) {
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
  };

  {
    const double sigma = 1.7;
    const std::size_t n = 1601;
    const double half = 6.0 * sigma;
    const double step = 2.0 * half / static_cast<double>(n - 1);
    const Spectrum s = sampled(half, n, [sigma](double x) {
      return std::exp(-0.5 * x * x / (sigma * sigma));
    });
    const double expect = 2.0 * std::sqrt(2.0 * phys::ln2) * sigma;
    const double got = fwhm(s);
    c.require(std::abs(got - expect) <= step,
              "Gaussian FWHM " + fmt(got) + " vs 2*sqrt(2 ln2)*sigma = " +
                  fmt(expect) + " within one step");
  }
  {
    const double scale = 2.5;
    const std::size_t n = 8001;
    const double half = 10.0;
    const double step = 2.0 * half / static_cast<double>(n - 1);
    const Spectrum s = sampled(half, n, [scale](double x) {
      if (x == 0.0) return 1.0;
      const double u = std::sin(scale * x) / (scale * x);
      return u * u;
    });
    const double expect = 2.7831147565 / scale;
    const double got = fwhm(s);
    c.require(std::abs(got - expect) <= step,
              "sinc^2 FWHM " + fmt(got) + " vs 2.7831/scale = " + fmt(expect) +
                  " within one step");
  }
  {
    const std::size_t n = 4001;
    const double half = 3.0;
    const double step = 2.0 * half / static_cast<double>(n - 1);
    const Spectrum s = sampled(half, n, [](double x) {
      return std::exp(-4.0 * phys::ln2 * x * x / (0.3 * 0.3));
    });
    const double got = fwhm(convolve_response(s, 0.4, ResponseShape::Gaussian));
    c.require(std::abs(got - 0.5) <= step,
              "0.3 (x) 0.4 response FWHM = " + fmt(got) +
                  " within one step of 0.5 (quadrature addition)");
  }
  c.finish(t.seconds());
}

void criterion_9_fit_robustness() {
  Criterion c(9, "Gaussian-fit robustness and the measured fixture");
  Timer t;

  const double truth = 0.29;
  int covered = 0;
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
      if (std::abs(fit.fwhm - truth) <= 2.0 * fit.fwhm_sigma) ++covered;
    } catch (const Error&) {
    }
  }
  c.require(covered >= 180, "Monte Carlo coverage " + fmt(covered) +
                                "/200 within 2 sigma (need >= 180)");

  const MeasuredData data = read_measured_csv(
      kSource + "/data/fixtures/measured_coincidence_10mm.csv");
  const std::vector<double>* sig = data.sigma ? &*data.sigma : nullptr;
  const FitResult fit = fit_gaussian(data.axis, data.intensity, sig);
  c.require(fit.converged && fit.fwhm >= 0.26 && fit.fwhm <= 0.32,
            "fixture FWHM = " + fmt(fit.fwhm) + " nm within 0.29 +- 0.03");
  c.finish(t.seconds());
}

}  // namespace

int main() {
  std::printf("biphoton acceptance suite\n");
  const double r10 = criterion_1_table1();
  const double r5 = criterion_2_table2();
  criterion_3_scaling(r10, r5);
  criterion_4_ratio_pipeline();
  criterion_5_sweep_shape();
  criterion_6_schmidt_oracles();
  criterion_7_numerical_consistency();
  criterion_8_estimators();
  criterion_9_fit_robustness();

  if (g_failures == 0) {
    std::printf("all 9 criteria passed\n");
  } else {
    std::printf("%d criterion(s) FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
