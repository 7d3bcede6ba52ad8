#include "hypk/report_io.hpp"

#include "hypk/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>

namespace hypk {

using nlohmann::json;

namespace {

json parse_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json site_json(GridSite s) { return json{{"j", s.j}, {"m", s.m}}; }

json qmax_json(const QMaximum& q) {
  json j{{"found", q.found}, {"ties", q.ties}};
  if (q.found) {
    j["site"] = site_json(q.site);
    j["value"] = q.value;
  }
  return j;
}

json counterexample_json(const Counterexample& c) {
  return json{{"lambda", c.lambda}, {"xi", c.xi}, {"gap", c.gap}, {"scale", c.scale}, {"delta_prime", c.delta_prime}};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  row += '\n';
  return row;
}

GraphMode parse_mode(const std::string& name) {
  if (name == "full" || name == "full_sphere") return GraphMode::kFullSphere;
  if (name == "axisymmetric" || name == "axi") return GraphMode::kAxisymmetric;
  throw ParseError("unknown graph mode '" + name + "'");
}

std::string mode_name(GraphMode mode) { return mode == GraphMode::kFullSphere ? "full" : "axisymmetric"; }

namespace {

RadialGraph graph_from(const json& j) {
  if (!j.is_object()) throw ParseError("graph must be a JSON object");
  const GraphMode mode = parse_mode(field_or<std::string>(j, "mode", "axisymmetric"));
  const int n = field_or<int>(j, "n", 2);
  const int n_theta = field_or<int>(j, "n_theta", 32);
  const int n_phi = field_or<int>(j, "n_phi", mode == GraphMode::kFullSphere ? 2 * n_theta : 1);
  const int order = field_or<int>(j, "fd_order", 4);
  if (j.contains("preset") && j.contains("radii")) throw ParseError("graph: give either 'preset' or 'radii'");
  if (j.contains("preset")) {
    return RadialGraph::from_preset(field_or<std::string>(j, "preset", ""), mode, n, n_theta, n_phi, order);
  }
  if (j.contains("radii")) {
    return RadialGraph(mode, n, n_theta, n_phi, field_or<std::vector<double>>(j, "radii", {}), order);
  }
  throw ParseError("graph: missing 'preset' or 'radii'");
}

}  // namespace

RadialGraph graph_from_json(const std::string& text) { return graph_from(parse_text(text, "graph JSON")); }

std::string graph_to_json(const RadialGraph& g) {
  json j{{"mode", mode_name(g.mode())},
         {"n", g.n()},
         {"n_theta", g.n_theta()},
         {"n_phi", g.n_phi()},
         {"fd_order", g.fd_order()},
         {"radii", g.values()}};
  return j.dump(2) + "\n";
}

SolveProblem parse_problem(const std::string& text) {
  const json j = parse_text(text, "problem JSON");
  if (!j.is_object()) throw ParseError("problem must be a JSON object");
  if (!j.contains("graph")) throw ParseError("problem: missing 'graph'");
  if (!j.contains("rhs")) throw ParseError("problem: missing 'rhs'");

  SolverConfig cfg;
  cfg.k = field_or<int>(j, "k", 2);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    const std::string mode = field_or<std::string>(s, "mode", "newton");
    if (mode == "newton") {
      cfg.mode = SolverMode::kNewton;
    } else if (mode == "flow") {
      cfg.mode = SolverMode::kFlow;
    } else {
      throw ParseError("solver mode must be 'newton' or 'flow'");
    }
    cfg.max_iterations = field_or<int>(s, "max_iterations", cfg.max_iterations);
    cfg.tolerance = field_or<double>(s, "tolerance", cfg.tolerance);
    cfg.safeguard = field_or<double>(s, "safeguard", cfg.safeguard);
    cfg.min_damping = field_or<double>(s, "min_damping", cfg.min_damping);
    cfg.flow_step = field_or<double>(s, "flow_step", cfg.flow_step);
    cfg.fd_step = field_or<double>(s, "fd_step", cfg.fd_step);
  }
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    cfg.diagnostics.N = field_or<double>(d, "N", cfg.diagnostics.N);
    cfg.diagnostics.alpha = field_or<double>(d, "alpha", cfg.diagnostics.alpha);
  }
  cfg.validate();

  const json& r = j.at("rhs");
  const std::string kind = field_or<std::string>(r, "kind", "general");
  PrescribedRHS rhs;
  if (kind == "general") {
    if (!r.contains("f")) throw ParseError("rhs: general kind needs 'f'");
    rhs = PrescribedRHS::general(field_or<std::string>(r, "f", ""));
  } else if (kind == "curvature_measure") {
    if (!r.contains("phi") || !r.contains("p")) throw ParseError("rhs: curvature_measure kind needs 'phi' and 'p'");
    rhs = PrescribedRHS::curvature_measure(field_or<std::string>(r, "phi", ""), field_or<double>(r, "p", 1.0));
  } else {
    throw ParseError("rhs kind must be 'general' or 'curvature_measure'");
  }
  return SolveProblem{graph_from(j.at("graph")), rhs, cfg};
}

std::string search_outcome_json(const SearchOutcome& o, const ConcavityParams& p, const SampleBudget& b) {
  json levels = json::array();
  for (const auto& l : o.levels) {
    json e{{"delta_prime", l.delta_prime},
           {"samples", l.samples},
           {"min_gap", finite_or_null(l.min_gap)},
           {"min_relative_gap", finite_or_null(l.min_relative_gap)}};
    e["counterexample"] = l.counterexample ? counterexample_json(*l.counterexample) : json(nullptr);
    levels.push_back(std::move(e));
  }
  json j{{"params", {{"n", p.n}, {"k", p.k}, {"l", p.l}, {"eps", p.eps}, {"delta", p.delta}, {"delta0", p.delta0}}},
         {"budget",
          {{"count", b.count},
           {"seed", b.seed},
           {"lambda_scale", b.lambda_scale},
           {"distribution", b.distribution == SampleDistribution::kUniform ? "uniform" : "boundary_biased"}}},
         {"success", o.success},
         {"delta_prime_found", o.delta_prime_found},
         {"samples_checked", o.samples_checked},
         {"total_samples", o.total_samples},
         {"min_gap", finite_or_null(o.min_gap)},
         {"min_relative_gap", finite_or_null(o.min_relative_gap)},
         {"levels", levels},
         {"message", o.message}};
  j["counterexample"] = o.counterexample ? counterexample_json(*o.counterexample) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string sample_records_csv(const std::vector<SampleRecord>& records, int n) {
  std::vector<std::string> head;
  for (int i = 1; i <= n; ++i) head.push_back("lambda_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) head.push_back("xi_" + std::to_string(i));
  head.insert(head.end(), {"gap", "head_pinched", "tail_pinched"});
  std::string out = csv_row(head);
  for (const auto& r : records) {
    std::vector<std::string> row;
    for (double v : r.lambda) row.push_back(format_double(v));
    for (double v : r.xi) row.push_back(format_double(v));
    row.push_back(format_double(r.gap));
    row.push_back(r.flags.head_pinched ? "1" : "0");
    row.push_back(r.flags.tail_pinched ? "1" : "0");
    out += csv_row(row);
  }
  return out;
}

namespace {

json diagnostics_object(const DiagnosticsReport& r) {
  json hist = json::array();
  for (const auto& h : r.history) {
    hist.push_back({{"iteration", h.iteration},
                    {"max_residual", h.max_residual},
                    {"damping", h.damping},
                    {"cone_margin", h.cone_margin}});
  }
  return json{{"n", r.n},
              {"k", r.k},
              {"N", r.N},
              {"alpha", r.alpha},
              {"max_abs_kappa", r.max_abs_kappa},
              {"K_semiconvex", r.K_semiconvex},
              {"cone_margin", r.cone_margin},
              {"u_min", r.u_min},
              {"u_max", r.u_max},
              {"a", r.a},
              {"sites", r.sites.size()},
              {"excluded_sites", r.excluded_sites},
              {"q_general_max", qmax_json(r.q_general_max)},
              {"q_measure_max", qmax_json(r.q_measure_max)},
              {"history", hist}};
}

}  // namespace

std::string diagnostics_json(const DiagnosticsReport& r) { return diagnostics_object(r).dump(2) + "\n"; }

std::string diagnostics_csv(const DiagnosticsReport& r) {
  std::vector<std::string> head = {"index", "j", "m", "theta", "phi", "r", "u", "Phi", "cone_margin",
                                   "q_included", "q_general", "q_measure"};
  for (int i = 1; i <= r.n; ++i) head.push_back("kappa_" + std::to_string(i));
  std::string out = csv_row(head);
  for (std::size_t i = 0; i < r.sites.size(); ++i) {
    const auto& s = r.sites[i];
    std::vector<std::string> row = {std::to_string(i),
                                    std::to_string(s.site.j),
                                    std::to_string(s.site.m),
                                    format_double(s.theta),
                                    format_double(s.phi),
                                    format_double(s.r),
                                    format_double(s.u),
                                    format_double(s.Phi),
                                    format_double(s.cone_margin),
                                    s.q_included ? "1" : "0",
                                    s.q_included ? format_double(s.q_general) : "",
                                    s.q_included ? format_double(s.q_measure) : ""};
    for (double kv : s.kappa) row.push_back(format_double(kv));
    out += csv_row(row);
  }
  return out;
}

std::string solve_result_json(const SolveResult& res, const SolveProblem& problem) {
  json rhs{{"kind", problem.rhs.kind() == RhsKind::kGeneral ? "general" : "curvature_measure"},
           {"expression", problem.rhs.expression().text()}};
  if (problem.rhs.kind() == RhsKind::kCurvatureMeasure) rhs["p"] = problem.rhs.p();
  const auto& g = res.graph;
  json j{{"status", res.status == SolveStatus::kConverged ? "converged" : "nonconverged"},
         {"iterations", res.iterations},
         {"message", res.message},
         {"k", problem.config.k},
         {"mode", problem.config.mode == SolverMode::kNewton ? "newton" : "flow"},
         {"rhs", rhs},
         {"graph",
          {{"mode", mode_name(g.mode())},
           {"n", g.n()},
           {"n_theta", g.n_theta()},
           {"n_phi", g.n_phi()},
           {"fd_order", g.fd_order()},
           {"radii", g.values()}}},
         {"diagnostics", diagnostics_object(res.report)}};
  return j.dump(2) + "\n";
}

std::string geom_residuals_csv(const RadialGraph& graph, const GeomSweep& sweep) {
  std::string out = csv_row({"site", "j", "m", "theta", "phi", "kind", "value"});
  for (std::size_t i = 0; i < sweep.sites.size(); ++i) {
    const auto& s = sweep.sites[i];
    for (const auto& kind : residual_kinds()) {
      if (kind == "interchange" && !s.residuals.has_interchange) continue;
      out += csv_row({std::to_string(i), std::to_string(s.site.j), std::to_string(s.site.m),
                      format_double(graph.theta(s.site.j)),
                      format_double(graph.mode() == GraphMode::kFullSphere ? graph.phi(s.site.m) : 0.0), kind,
                      format_double(residual_by_kind(s.residuals, kind))});
    }
  }
  return out;
}

}  // namespace hypk
