#include "cli.hpp"

#include "hypk/errors.hpp"
#include "hypk/inequality_lab.hpp"
#include "hypk/report_io.hpp"

#include "json.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace hypk::cli {

namespace {

struct RunPoint {
  double eps, delta, delta0;
};

// Direction of delta' along the swept parameter, or "none" when it turns.
std::string monotone_label(const std::vector<double>& y) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < y.size(); ++i) {
    up = up && y[i] >= y[i - 1];
    down = down && y[i] <= y[i - 1];
  }
  if (up && down) return "constant";
  if (up) return "nondecreasing";
  if (down) return "nonincreasing";
  return "none";
}

}  // namespace

int cmd_concavity(const RunConfig& run, const ConcavityOptions& opt, std::ostream& log) {
  std::vector<RunPoint> points;
  for (double e : opt.eps) {
    for (double d : opt.delta) {
      for (double d0 : opt.delta0) points.push_back({e, d, d0});
    }
  }
  // Validate every combination before spending any samples.
  for (const auto& p : points) {
    ConcavityParams params{opt.n, opt.k, opt.l, p.eps, p.delta, p.delta0, 0.5 * p.delta};
    params.validate();
  }

  SampleBudget budget;
  budget.count = run.budget == 0 ? 100000 : run.budget;
  budget.seed = run.seed;
  budget.distribution = opt.uniform ? SampleDistribution::kUniform : SampleDistribution::kBoundaryBiased;
  budget.workers = run.workers;
  budget.record_limit = opt.csv_rows;

  nlohmann::json runs = nlohmann::json::array();
  std::vector<double> found;
  bool all_success = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    SearchOutcome outcome;
    try {
      outcome = search_delta_prime(opt.n, opt.k, opt.l, p.eps, p.delta, p.delta0, budget);
    } catch (const SamplingError& e) {
      log << "sampler starvation at eps=" << format_double(p.eps) << " delta=" << format_double(p.delta)
          << " delta0=" << format_double(p.delta0) << ": " << e.what() << "\n";
      return kExitStarved;
    }
    ConcavityParams params{opt.n, opt.k, opt.l, p.eps, p.delta, p.delta0,
                           outcome.success ? outcome.delta_prime_found : 0.5 * p.delta};
    nlohmann::json entry = nlohmann::json::parse(search_outcome_json(outcome, params, budget));
    entry["samples_csv"] = "concavity_samples_" + std::to_string(i) + ".csv";
    if (opt.claim && outcome.success) {
      const auto claim = claim_min_constant(params, budget);
      entry["claim"] = {{"required_c", std::isfinite(claim.required_c) ? nlohmann::json(claim.required_c)
                                                                        : nlohmann::json(nullptr)},
                        {"worst_lambda", claim.worst_lambda},
                        {"worst_xi", claim.worst_xi},
                        {"samples", claim.samples}};
    }
    write_text(run.out_dir / ("concavity_samples_" + std::to_string(i) + ".csv"),
               sample_records_csv(outcome.records, opt.n));
    runs.push_back(std::move(entry));
    found.push_back(outcome.success ? outcome.delta_prime_found : 0.0);
    all_success = all_success && outcome.success;
    log << "n=" << opt.n << " k=" << opt.k << " l=" << opt.l << " eps=" << format_double(p.eps)
        << " delta=" << format_double(p.delta) << " delta0=" << format_double(p.delta0) << ": "
        << (outcome.success ? "delta' = " + format_double(outcome.delta_prime_found) : "no delta' survived") << " ("
        << outcome.samples_checked << " samples at the returned level, min relative gap "
        << format_double(outcome.min_relative_gap) << ")\n";
  }

  nlohmann::json trend = nullptr;
  const bool sweep_eps = opt.eps.size() > 1 && opt.delta.size() == 1 && opt.delta0.size() == 1;
  const bool sweep_delta = opt.eps.size() == 1 && opt.delta.size() > 1 && opt.delta0.size() == 1;
  const bool sweep_delta0 = opt.eps.size() == 1 && opt.delta.size() == 1 && opt.delta0.size() > 1;
  if (sweep_eps || sweep_delta || sweep_delta0) {
    const std::string name = sweep_eps ? "eps" : sweep_delta ? "delta" : "delta0";
    const auto& values = sweep_eps ? opt.eps : sweep_delta ? opt.delta : opt.delta0;
    trend = {{"parameter", name}, {"values", values}, {"delta_prime", found}, {"monotone", monotone_label(found)}};
    log << "trend in " << name << ": " << monotone_label(found) << "\n";
  }

  nlohmann::json summary = {{"n", opt.n},     {"k", opt.k},           {"l", opt.l},
                            {"seed", run.seed}, {"success", all_success}, {"runs", std::move(runs)},
                            {"trend", trend}};
  write_text(run.out_dir / "concavity.json", summary.dump(2) + "\n");

  if (run.emit_plots && found.size() > 1) {
    Series s{"delta'", {}, {}};
    for (std::size_t i = 0; i < found.size(); ++i) {
      s.x.push_back(static_cast<double>(i));
      s.y.push_back(found[i]);
    }
    write_text(run.out_dir / "concavity.svg", svg_chart("delta' per run", "run", "delta'", {s}, true));
  }
  return all_success ? kExitOk : kExitCheckFailed;
}

}  // namespace hypk::cli
