#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

// Error categories map one-to-one onto CLI exit codes. Library code throws;
// only the CLI layer translates categories into process exit status.
enum class ErrorCategory {
  Generic = 1,
  Config = 2,     // bad configuration file / invalid user input
  Regime = 3,     // physics regime violated (A <= 0, eta >= 1, ...)
  Numerical = 4,  // decomposition/fit failure, non-convergence
  Ingestion = 5,  // malformed data files
  Sizing = 6,     // grid or quadrature budget exceeded
  Domain = 7,     // out-of-window wavelength and similar domain violations
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }
  int exit_code() const { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};
struct RegimeError : Error {
  explicit RegimeError(const std::string& m) : Error(ErrorCategory::Regime, m) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& m) : Error(ErrorCategory::Numerical, m) {}
};
struct IngestionError : Error {
  explicit IngestionError(const std::string& m) : Error(ErrorCategory::Ingestion, m) {}
};
struct SizingError : Error {
  explicit SizingError(const std::string& m) : Error(ErrorCategory::Sizing, m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(ErrorCategory::Domain, m) {}
};

}  // namespace biphoton
