#pragma once

// Per-hypersurface report of the quantities controlled by the curvature
// estimates: curvature bounds, cone margin, support function range and the
// two maximum-principle test functions
//   Q_general = ln kappa_1 - N ln u + alpha Phi
//   Q_measure = ln kappa_1 - ln(u - a) + alpha Phi,   a = u_min / 2.

#include "hypk/radial_graph.hpp"

#include <cstddef>
#include <vector>

namespace hypk {

struct DiagnosticsOptions {
  double N = 2.0;
  double alpha = 8.0;
};

struct SiteDiagnostics {
  GridSite site;
  double theta = 0.0;
  double phi = 0.0;
  double r = 0.0;
  std::vector<double> kappa;  // descending
  double u = 0.0;
  double Phi = 0.0;
  double cone_margin = 0.0;   // min_{j<=k} sigma_j(kappa)
  bool q_included = false;    // kappa_1 > 0
  double q_general = 0.0;
  double q_measure = 0.0;
};

struct QMaximum {
  bool found = false;
  GridSite site;
  double value = 0.0;
  std::size_t ties = 0;  // sites within 1e-12 (1 + |value|) of the maximum
};

struct IterationRecord {
  int iteration = 0;
  double max_residual = 0.0;
  double damping = 0.0;
  double cone_margin = 0.0;
};

struct DiagnosticsReport {
  int n = 0;
  int k = 0;
  double N = 0.0;
  double alpha = 0.0;
  double max_abs_kappa = 0.0;
  double K_semiconvex = 0.0;
  double cone_margin = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double a = 0.0;
  std::size_t excluded_sites = 0;
  QMaximum q_general_max;
  QMaximum q_measure_max;
  std::vector<SiteDiagnostics> sites;
  std::vector<IterationRecord> history;
};

/// Evaluates every grid node. Sites with kappa_1 <= 0 are excluded from the
/// Q fields rather than rejected.
DiagnosticsReport diagnostics(const RadialGraph& graph, int k, const DiagnosticsOptions& options = {},
                              unsigned workers = 0);

}  // namespace hypk
