#pragma once

#include <string>

#include "biphoton/config.hpp"
#include "biphoton/entanglement.hpp"

// Assembly and rendering of the side-by-side theory/measurement report.

namespace biphoton {

struct ReportOptions {
  bool with_schmidt = false;          // add the purity-quadrature K
  bool numerical_widths = true;       // run the numerical spectra pipeline
  PurityConfig purity;
};

EntanglementReport make_report(const RunConfig& config,
                               const ReportOptions& options = {});

// Human-readable side-by-side table (theory column, optional measured column).
std::string render_report_table(const EntanglementReport& report);
// Flat `key = value` block.
std::string render_report_keyvalues(const EntanglementReport& report);
// Single CSV row (with header line).
std::string render_report_csv(const EntanglementReport& report);

}  // namespace biphoton
