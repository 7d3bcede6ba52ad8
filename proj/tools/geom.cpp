#include "cli.hpp"

#include "hypk/errors.hpp"
#include "hypk/geom_checks.hpp"
#include "hypk/radial_graph.hpp"
#include "hypk/report_io.hpp"
#include "hypk/surface_jet.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hypk::cli {

namespace {

constexpr double kFirstOrderTol = 1e-6;
constexpr double kInterchangeTol = 1e-4;
// Below this the residual is round-off and an order estimate means nothing.
constexpr double kOrderFloor = 1e-11;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read graph file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Graphs {
  RadialGraph coarse;
  std::optional<RadialGraph> fine;
};

Graphs build_graphs(const GeomOptions& opt) {
  if (!opt.graph_file.empty()) {
    const std::string text = read_file(opt.graph_file);
    RadialGraph coarse = graph_from_json(text);
    std::optional<RadialGraph> fine;
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (opt.refine && j.is_object() && j.contains("preset")) {
      auto f = j;
      f["n_theta"] = 2 * coarse.n_theta();
      f["n_phi"] = coarse.mode() == GraphMode::kFullSphere ? 2 * coarse.n_phi() : 1;
      fine = graph_from_json(f.dump());
    }
    return {std::move(coarse), std::move(fine)};
  }
  const GraphMode mode = opt.mode.empty() ? (opt.n == 2 ? GraphMode::kFullSphere : GraphMode::kAxisymmetric)
                                          : parse_mode(opt.mode);
  auto n_phi_for = [&](int n_theta) {
    if (mode == GraphMode::kAxisymmetric) return 1;
    return opt.n_phi > 0 ? opt.n_phi * n_theta / opt.n_theta : 2 * n_theta;
  };
  RadialGraph coarse = RadialGraph::from_preset(opt.preset, mode, opt.n, opt.n_theta, n_phi_for(opt.n_theta),
                                                opt.fd_order);
  std::optional<RadialGraph> fine;
  if (opt.refine) {
    fine = RadialGraph::from_preset(opt.preset, mode, opt.n, 2 * opt.n_theta, n_phi_for(2 * opt.n_theta),
                                    opt.fd_order);
  }
  return {std::move(coarse), std::move(fine)};
}

}  // namespace

int cmd_geom(const RunConfig& run, const GeomOptions& opt, std::ostream& log) {
  if (opt.depth < 1 || opt.depth > 2) throw ParseError("geom: depth must be 1 or 2");
  if (opt.n < 2) throw ParseError("geom: n must be at least 2");
  if (opt.n_theta < 4) throw ParseError("geom: n-theta must be at least 4");
  const Graphs graphs = build_graphs(opt);
  const JetOptions jet{opt.depth, FrameOrder::kForward};

  const GeomSweep coarse = geom_sweep(graphs.coarse, default_check_sites(graphs.coarse, opt.sites), jet, run.workers);
  std::optional<GeomSweep> fine;
  if (graphs.fine) fine = geom_sweep(*graphs.fine, default_check_sites(*graphs.fine, opt.sites), jet, run.workers);

  write_text(run.out_dir / "geom.csv", geom_residuals_csv(graphs.coarse, coarse));
  if (fine) write_text(run.out_dir / "geom_refined.csv", geom_residuals_csv(*graphs.fine, *fine));

  bool all_pass = true;
  std::string summary = csv_row({"kind", "value", "refined_value", "order", "tolerance", "pass"});
  std::vector<Series> bars;
  for (const auto& kind : residual_kinds()) {
    if (kind == "interchange" && opt.depth < 2) continue;
    const double value = residual_by_kind(coarse.max, kind);
    const double tol = kind == "interchange" ? kInterchangeTol : kFirstOrderTol;
    const bool pass = value <= tol;
    all_pass = all_pass && pass;
    std::string refined, order;
    if (fine) {
      const double fv = residual_by_kind(fine->max, kind);
      refined = format_double(fv);
      if (value > kOrderFloor && fv > 0.0) order = format_double(std::log2(value / fv));
      if (run.emit_plots) bars.push_back({kind, {static_cast<double>(opt.n_theta), 2.0 * opt.n_theta}, {value, fv}});
    }
    summary += csv_row({kind, format_double(value), refined, order, format_double(tol), pass ? "true" : "false"});
    log << kind << ": " << format_double(value) << (fine ? " -> " + refined : "")
        << (order.empty() ? "" : " (order " + order + ")") << (pass ? "" : "  FAIL") << "\n";
  }
  write_text(run.out_dir / "geom_summary.csv", summary);
  if (run.emit_plots && !bars.empty()) {
    write_text(run.out_dir / "geom.svg", svg_chart("Residuals under refinement", "n_theta", "residual", bars, true));
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace hypk::cli
