#pragma once

// Shared helpers for the test suites: double-Gaussian oracle states and
// small utilities. The analytic expectations themselves live in the test
// files next to the assertions they feed.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "biphoton/entanglement.hpp"
#include "biphoton/jsa.hpp"

namespace testing_support {

// Double-Gaussian kernel exp(-(nu1+nu2)^2/(4 a^2) - (nu1-nu2)^2/(4 b^2)).
struct DoubleGaussian {
  double a = 1.0;  // nu_plus scale
  double b = 1.0;  // nu_minus scale

  std::function<double(double, double)> kernel() const {
    const double a2 = a * a, b2 = b * b;
    return [a2, b2](double nu1, double nu2) {
      const double p = nu1 + nu2, m = nu1 - nu2;
      return std::exp(-p * p / (4.0 * a2) - m * m / (4.0 * b2));
    };
  }

  // Center and intensity-level sigma of the conditional distribution in nu2
  // at fixed nu1.
  double conditional_center(double nu1) const {
    return nu1 * (a * a - b * b) / (a * a + b * b);
  }
  double conditional_sigma() const {
    // amplitude exponent coefficient (1/4a^2 + 1/4b^2) -> intensity sigma
    return a * b / std::sqrt(a * a + b * b);
  }
  double marginal_sigma() const {  // intensity-level sigma of nu1
    return 0.5 * std::sqrt(a * a + b * b);
  }

  biphoton::KernelHints hints() const {
    biphoton::KernelHints h;
    const double st = conditional_sigma();
    h.cond_width = 2.3548 * st;     // FWHM of the conditional intensity
    h.marginal_half = 8.0 * marginal_sigma();
    const DoubleGaussian self = *this;
    h.bands = [self, st](double nu1) {
      const double c = self.conditional_center(nu1);
      const double w = 9.0 * st * std::sqrt(2.0);  // amplitude-level capture
      return std::vector<biphoton::Band>{{c - w, c + w}};
    };
    return h;
  }

  // Dense sampling on a square grid sized for Schmidt analysis.
  biphoton::JointSpectralAmplitude sampled(std::size_t n = 512) const {
    const double half = 4.0 * std::sqrt(2.0) * marginal_sigma();
    const auto grid = biphoton::FrequencyGrid::square(half, n);
    return biphoton::sample_kernel(kernel(), grid);
  }
};

// Exit status and captured stdout of a shell command.
struct CommandResult {
  int exit_code = -1;
  std::string output;
};
CommandResult run_command(const std::string& command);

inline std::string source_dir() { return BIPHOTON_SOURCE_DIR; }
inline std::string cli_path() { return BIPHOTON_CLI_PATH; }

}  // namespace testing_support
