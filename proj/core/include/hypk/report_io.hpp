#pragma once

// Serialization of results: JSON (sorted keys) and CSV (fixed column order,
// 17 significant digits).

#include "hypk/diagnostics.hpp"
#include "hypk/geom_checks.hpp"
#include "hypk/inequality_lab.hpp"
#include "hypk/prescribed_rhs.hpp"
#include "hypk/radial_graph.hpp"
#include "hypk/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypk {

/// printf("%.17g"); "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

/// Joins cells with commas and terminates the row with '\n'.
std::string csv_row(const std::vector<std::string>& cells);

// --- graphs ---------------------------------------------------------------

/// {"mode": "full"|"axisymmetric", "n", "n_theta", "n_phi", "fd_order",
///  "preset": "..."} or with "radii": [...] instead of "preset".
/// ParseError on malformed input, DomainError on invalid grids or radii.
RadialGraph graph_from_json(const std::string& text);
std::string graph_to_json(const RadialGraph& graph);

GraphMode parse_mode(const std::string& name);
std::string mode_name(GraphMode mode);

// --- solve problems -------------------------------------------------------

struct SolveProblem {
  RadialGraph graph;
  PrescribedRHS rhs;
  SolverConfig config;
};

/// {"graph": {...}, "k": 2,
///  "rhs": {"kind": "general", "f": "..."} |
///         {"kind": "curvature_measure", "phi": "...", "p": 1},
///  "solver": {"mode": "newton"|"flow", "max_iterations", "tolerance",
///             "safeguard", "min_damping", "flow_step", "fd_step"},
///  "diagnostics": {"N": 2, "alpha": 8}}
SolveProblem parse_problem(const std::string& text);

// --- reports --------------------------------------------------------------

std::string search_outcome_json(const SearchOutcome& outcome, const ConcavityParams& params,
                                const SampleBudget& budget);
/// lambda_1..lambda_n, xi_1..xi_n, gap, head_pinched, tail_pinched.
std::string sample_records_csv(const std::vector<SampleRecord>& records, int n);

std::string diagnostics_json(const DiagnosticsReport& report);
/// One row per node: index, j, m, theta, phi, r, u, Phi, cone_margin,
/// q_included, q_general, q_measure, kappa_1..kappa_n.
std::string diagnostics_csv(const DiagnosticsReport& report);

std::string solve_result_json(const SolveResult& result, const SolveProblem& problem);

/// site, j, m, theta, phi, kind, value.
std::string geom_residuals_csv(const RadialGraph& graph, const GeomSweep& sweep);

}  // namespace hypk
