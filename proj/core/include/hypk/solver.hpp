#pragma once

// Discrete prescribed curvature problems on radial graphs: the unknown is the
// grid of radii, the equation at each node is sigma_k(kappa) = rhs.

#include "hypk/diagnostics.hpp"
#include "hypk/prescribed_rhs.hpp"
#include "hypk/radial_graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypk {

struct ResidualField {
  std::vector<double> residual;   // sigma_k(kappa) - rhs, per node
  std::vector<double> sigma;
  std::vector<double> rhs;
  std::vector<double> margin;     // min_{j<=k} sigma_j(kappa), per node
  std::vector<char> admissible;   // kappa in Gamma_k
  double max_abs = 0.0;
  double min_margin = 0.0;
  bool all_admissible = true;
};

/// Residual at every node. Inadmissible nodes are flagged, not rejected.
ResidualField residual_field(const RadialGraph& graph, const PrescribedRHS& rhs, int k, unsigned workers = 0);

/// Expression variables at one node.
RhsPoint rhs_point(const RadialGraph& graph, GridSite site, int k);

enum class SolverMode { kNewton, kFlow };

struct SolverConfig {
  int k = 2;
  int max_iterations = 25;
  double tolerance = 1e-10;      // on max |residual|
  double min_damping = 1e-12;    // line search gives up below this step fraction
  double safeguard = 0.1;        // accepted iterates keep margin >= safeguard * previous margin
  SolverMode mode = SolverMode::kNewton;
  double flow_step = 0.2;        // pseudo-time step in flow mode
  double fd_step = 1e-6;         // Jacobian difference step (relative to r)
  unsigned workers = 0;
  DiagnosticsOptions diagnostics;

  /// DomainError on out-of-range settings.
  void validate() const;
};

enum class SolveStatus { kConverged, kNonConverged };

struct SolveResult {
  SolveStatus status = SolveStatus::kNonConverged;
  RadialGraph graph;
  DiagnosticsReport report;
  int iterations = 0;
  std::string message;
};

/// Damped Newton with a coloured finite-difference Jacobian, or the
/// log-flow r <- r + tau (log sigma_k - log rhs). Each accepted iterate has
/// every node in Gamma_k, a margin of at least safeguard times the previous
/// one and a max |residual| no larger than before. PreconditionError when
/// graph0 is not admissible. Stalling is reported through the status.
SolveResult solve(const RadialGraph& graph0, const PrescribedRHS& rhs, const SolverConfig& config);

/// r0 with C(n,k) coth^k(r0) = c. DomainError unless c > C(n,k).
double sphere_oracle(double c, int n, int k);

/// C(n, k) coth^k(r0): sigma_k on the geodesic sphere of radius r0.
double sphere_sigma(double r0, int n, int k);

double binomial(int n, int k);

}  // namespace hypk
