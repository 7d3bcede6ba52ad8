#include "cli.hpp"

#include "hypk/errors.hpp"
#include "hypk/report_io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace hypk::cli {

std::filesystem::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("HYPK_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "hypk_out";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

namespace {

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_y) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << esc(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << esc(log_y ? "log10 " + y_label : y_label) << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y0 + (y1 - y0) * t / 4.0;
    const double yp = H - B - (H - T - B) * t / 4.0;
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double xp = L + (W - L - R) * t / 4.0;
    o << "<text x=\"" << L - 6 << "\" y=\"" << yp + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << yv
      << "</text>\n";
    o << "<text x=\"" << xp << "\" y=\"" << H - B + 14 << "\" text-anchor=\"middle\" font-size=\"10\">" << xv
      << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 7];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      const double y = series[s].y[i];
      if (!std::isfinite(y) || (log_y && y <= 0.0)) continue;
      o << px(series[s].x[i]) << "," << py(y) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R + 8 << "\" y=\"" << T + 14 * (s + 1) << "\" font-size=\"11\" fill=\"" << color
      << "\">" << esc(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw hypk::ParseError("bad number in list: '" + item + "'");
    }
  }
  if (out.empty()) throw hypk::ParseError("empty list");
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symmetric-function inequalities, hyperbolic hypersurface geometry and prescribed curvature solves",
               "hypk"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  std::string out_flag;
  app.add_option("--seed", rc.seed, "Random seed")->capture_default_str();
  app.add_option("--budget", rc.budget, "Sample budget (0: subcommand default)");
  app.add_option("--out", out_flag, "Output directory (default: $HYPK_OUT_DIR or ./hypk_out)");
  app.add_flag("--emit-plots", rc.emit_plots, "Also write SVG plots");
  app.add_flag("--self-test-break", rc.self_test_break, "Inject a sign fault (harness check)");
  app.add_option("--workers", rc.workers, "Worker threads (0: hardware concurrency)");

  IdentitiesOptions io;
  auto* ident = app.add_subcommand("identities", "Symmetric-function identities, cone bounds, derivative checks");
  ident->add_option("--n-min", io.n_min)->capture_default_str();
  ident->add_option("--n-max", io.n_max)->capture_default_str();
  ident->add_option("--matrices", io.derivative_matrices, "Derivative-check matrices (0: budget/20)");

  ConcavityOptions co;
  std::string eps_s = "0.5", delta_s = "0.5", delta0_s = "0.5";
  auto* conc = app.add_subcommand("concavity", "Search the pinching threshold delta' of the concavity inequality");
  conc->add_option("--n", co.n)->capture_default_str();
  conc->add_option("--k", co.k)->capture_default_str();
  conc->add_option("--l", co.l)->capture_default_str();
  conc->add_option("--eps", eps_s, "Value or comma list")->capture_default_str();
  conc->add_option("--delta", delta_s, "Value or comma list")->capture_default_str();
  conc->add_option("--delta0", delta0_s, "Value or comma list")->capture_default_str();
  conc->add_flag("--uniform", co.uniform, "Uniform instead of boundary-biased proposals");
  conc->add_flag("--claim", co.claim, "Also estimate the intermediate-claim constant");
  conc->add_option("--csv-rows", co.csv_rows, "Per-sample CSV rows kept per run")->capture_default_str();

  GeomOptions go;
  auto* geom = app.add_subcommand("geom", "Check hypersurface identities on a radial graph");
  geom->add_option("--graph", go.preset, "Preset, e.g. sphere:1.0 or perturbed:1.0,0.1")->capture_default_str();
  geom->add_option("--graph-file", go.graph_file, "Graph JSON file (overrides --graph)");
  geom->add_option("--mode", go.mode, "full | axisymmetric");
  geom->add_option("--n", go.n)->capture_default_str();
  geom->add_option("--n-theta", go.n_theta)->capture_default_str();
  geom->add_option("--n-phi", go.n_phi, "0: 2 n_theta");
  geom->add_option("--fd-order", go.fd_order)->capture_default_str();
  geom->add_option("--depth", go.depth)->capture_default_str();
  geom->add_option("--sites", go.sites)->capture_default_str();
  geom->add_flag("!--no-refine", go.refine, "Skip the refinement sweep");

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Solve a prescribed curvature problem");
  solve->add_option("--problem", so.problem_file, "Problem JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  rc.out_dir = resolve_out_dir(out_flag);
  try {
    if (ident->parsed()) {
      rc.subcommand = "identities";
      return cmd_identities(rc, io, out);
    }
    if (conc->parsed()) {
      rc.subcommand = "concavity";
      co.eps = parse_list(eps_s);
      co.delta = parse_list(delta_s);
      co.delta0 = parse_list(delta0_s);
      return cmd_concavity(rc, co, out);
    }
    if (geom->parsed()) {
      rc.subcommand = "geom";
      return cmd_geom(rc, go, out);
    }
    rc.subcommand = "solve";
    return cmd_solve(rc, so, out);
  } catch (const hypk::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hypk::DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hypk::PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace hypk::cli
