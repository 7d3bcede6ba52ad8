#include "cli.hpp"

#include "hypk/errors.hpp"
#include "hypk/report_io.hpp"
#include "hypk/solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace hypk::cli {

int cmd_solve(const RunConfig& run, const SolveOptions& opt, std::ostream& log) {
  std::ifstream f(opt.problem_file, std::ios::binary);
  if (!f) throw ParseError("cannot read problem file '" + opt.problem_file + "'");
  std::ostringstream text;
  text << f.rdbuf();

  SolveProblem problem = parse_problem(text.str());
  if (run.workers != 0) problem.config.workers = run.workers;
  problem.config.validate();

  const SolveResult result = solve(problem.graph, problem.rhs, problem.config);

  auto solution = nlohmann::json::parse(solve_result_json(result, problem));
  const auto& rhs = problem.rhs;
  if (rhs.kind() == RhsKind::kGeneral && rhs.expression().is_constant()) {
    const int n = result.graph.n();
    const int k = problem.config.k;
    const double c = rhs.expression().eval(RhsPoint{});
    if (c > binomial(n, k)) {
      const double r_star = sphere_oracle(c, n, k);
      double err = 0.0;
      for (double r : result.graph.values()) err = std::max(err, std::abs(r - r_star));
      solution["oracle"] = {{"sphere_radius", r_star}, {"sup_error", err}};
      log << "sphere oracle radius " << format_double(r_star) << ", sup error " << format_double(err) << "\n";
    }
  }
  write_text(run.out_dir / "solution.json", solution.dump(2) + "\n");
  write_text(run.out_dir / "diagnostics.json", diagnostics_json(result.report));
  write_text(run.out_dir / "diagnostics.csv", diagnostics_csv(result.report));

  if (run.emit_plots) {
    Series res{"max |residual|", {}, {}};
    for (const auto& h : result.report.history) {
      res.x.push_back(h.iteration);
      res.y.push_back(h.max_residual);
    }
    write_text(run.out_dir / "solve_history.svg",
               svg_chart("Residual history", "iteration", "max |residual|", {res}, true));
    Series q{"Q (general)", {}, {}};
    for (const auto& s : result.report.sites) {
      if (!s.q_included) continue;
      q.x.push_back(s.theta);
      q.y.push_back(s.q_general);
    }
    write_text(run.out_dir / "q_field.svg", svg_chart("Test function Q", "theta", "Q", {q}, false));
  }

  const bool converged = result.status == SolveStatus::kConverged;
  log << (converged ? "converged" : "not converged") << " after " << result.iterations << " iterations";
  if (!result.message.empty()) log << ": " << result.message;
  log << "\n";
  if (!converged) {
    for (const auto& h : result.report.history) {
      log << "  iteration " << h.iteration << " max|res| " << format_double(h.max_residual) << " damping "
          << format_double(h.damping) << " margin " << format_double(h.cone_margin) << "\n";
    }
  }
  return converged ? kExitOk : kExitNonConverged;
}

}  // namespace hypk::cli
