#include "cli.hpp"

#include "hypk/errors.hpp"
#include "hypk/inequality_lab.hpp"
#include "hypk/random.hpp"
#include "hypk/report_io.hpp"
#include "hypk/symmfunc.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace hypk::cli {

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kIdentityTol = 1e-10;
constexpr double kConeTol = 1e-10;
constexpr double kFormTol = 1e-12;
constexpr double kDerivativeTol = 1e-6;
constexpr double kFdStep = 1e-5;
constexpr double kEigenGap = 1e-2;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  std::string suite;
  int n = 0, k = 0, l = 0;
  std::size_t samples = 0;
  std::string metric;
  double value = 0.0;
  double tolerance = 0.0;  // nan: informational
  bool pass = true;
};

long double sigma_long(const LMatrix& a, int k) {
  Eigen::SelfAdjointEigenSolver<LMatrix> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  std::vector<long double> e(static_cast<std::size_t>(k + 1), 0.0L);
  e[0] = 1.0L;
  for (Eigen::Index m = 0; m < ev.size(); ++m) {
    for (int j = k; j >= 1; --j) e[static_cast<std::size_t>(j)] += ev(m) * e[static_cast<std::size_t>(j - 1)];
  }
  return e[static_cast<std::size_t>(k)];
}

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

std::vector<double> gapped_spectrum(int n, Rng& rng) {
  for (;;) {
    std::vector<double> d(static_cast<std::size_t>(n));
    for (double& v : d) v = rng.uniform(-2.0, 2.0);
    std::vector<double> s = d;
    std::sort(s.begin(), s.end());
    bool ok = true;
    for (std::size_t i = 1; i < s.size(); ++i) ok = ok && (s[i] - s[i - 1] > kEigenGap);
    if (ok) return d;
  }
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void identity_suite(const RunConfig& run, const IdentitiesOptions& opt, std::size_t samples, std::vector<Row>& rows) {
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    for (int k = 1; k <= n; ++k) {
      Rng rng(substream_seed(run.seed, 1, static_cast<std::uint64_t>(n * 16 + k)));
      double worst_del = 0, worst_sum = 0, worst_euler = 0;
      std::vector<double> x(static_cast<std::size_t>(n));
      for (std::size_t s = 0; s < samples; ++s) {
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        const auto r = identity_residuals(EigenVector(x), k);
        worst_del = std::max(worst_del, r.deletion / r.scale);
        worst_sum = std::max(worst_sum, r.sum_of_minors / r.scale);
        worst_euler = std::max(worst_euler, r.euler / r.scale);
      }
      rows.push_back({"identity", n, k, 0, samples, "deletion", worst_del, kIdentityTol, worst_del <= kIdentityTol});
      rows.push_back(
          {"identity", n, k, 0, samples, "sum_of_minors", worst_sum, kIdentityTol, worst_sum <= kIdentityTol});
      rows.push_back({"identity", n, k, 0, samples, "euler", worst_euler, kIdentityTol, worst_euler <= kIdentityTol});
    }
  }
}

void cone_bounds_suite(const RunConfig& run, const IdentitiesOptions& opt, std::size_t samples,
                       std::vector<Row>& rows) {
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    for (int k = 1; k <= n; ++k) {
      GardingConeSampler sampler(n, k, substream_seed(run.seed, 2, static_cast<std::uint64_t>(n * 16 + k)));
      double neg = kInf, lead = kInf, weighted = kInf, ratio = kInf;
      bool neg_ok = true, lead_ok = true, weighted_ok = true;
      for (std::size_t s = 0; s < samples; ++s) {
        const auto rep = cone_bounds_report(sampler.next(), k, kConeTol);
        neg = std::min(neg, rep.negative_entries_margin / rep.scale);
        lead = std::min(lead, rep.leading_products_margin / rep.scale);
        weighted = std::min(weighted, rep.weighted_square_margin / rep.scale);
        ratio = std::min(ratio, rep.top_ratio);
        neg_ok = neg_ok && rep.negative_entries_bounded;
        lead_ok = lead_ok && rep.leading_products_bounded;
        weighted_ok = weighted_ok && rep.weighted_square_bounded;
      }
      rows.push_back({"cone_bounds", n, k, 0, samples, "negative_entries_margin", neg, -kConeTol, neg_ok});
      rows.push_back({"cone_bounds", n, k, 0, samples, "leading_products_margin", lead, -kConeTol, lead_ok});
      rows.push_back({"cone_bounds", n, k, 0, samples, "weighted_square_margin", weighted, -kConeTol, weighted_ok});
      rows.push_back({"cone_bounds", n, k, 0, samples, "top_ratio_infimum", ratio,
                      std::numeric_limits<double>::quiet_NaN(), true});
    }
  }
}

// Ratio concavity and the Newton-type minor inequality on cone samples.
void concavity_suite(const RunConfig& run, const IdentitiesOptions& opt, std::size_t samples,
                     std::vector<Row>& rows) {
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    for (int k = 2; k <= n; ++k) {
      for (int l = 1; l < k; ++l) {
        const auto tag = static_cast<std::uint64_t>(n * 256 + k * 16 + l);
        GardingConeSampler sampler(n, k, substream_seed(run.seed, 3, tag));
        Rng rng(substream_seed(run.seed, 4, tag));
        double ratio_min = kInf, newton_min = kInf, form_diff = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
          const EigenVector lam = sampler.next();
          const auto form = ratio_concavity_form(lam, k, l);
          for (const auto& xi : {worst_direction(form).xi, rng.unit_vector(n)}) {
            const auto g = ratio_concavity_gap(lam, xi, k, l);
            ratio_min = std::min(ratio_min, g.gap / g.scale());
          }
          if (l >= 2) {
            for (std::size_t p = 0; p < lam.size(); ++p) {
              for (std::size_t q = p + 1; q < lam.size(); ++q) {
                const auto m = newton_minor_gap(lam, k, l, p, q);
                newton_min = std::min(newton_min, m.contracted / m.scale);
                newton_min = std::min(newton_min, m.minors / m.scale);
                form_diff = std::max(form_diff, std::abs(m.contracted - m.minors) / m.scale);
              }
            }
          }
        }
        rows.push_back({"ratio_concavity", n, k, l, samples, "min_relative_gap", ratio_min, -kConeTol,
                        ratio_min >= -kConeTol});
        if (l >= 2) {
          rows.push_back({"newton_minor", n, k, l, samples, "min_relative_value", newton_min, -kConeTol,
                          newton_min >= -kConeTol});
          rows.push_back({"newton_minor", n, k, l, samples, "form_disagreement", form_diff, kFormTol,
                          form_diff <= kFormTol});
        }
      }
    }
  }
}

void derivative_suite(const RunConfig& run, const IdentitiesOptions& opt, std::size_t matrices,
                      std::vector<Row>& rows) {
  const int n_lo = std::max(2, opt.n_min);
  const int n_hi = std::min(6, opt.n_max);
  if (n_lo > n_hi || matrices == 0) return;
  const long double sign = run.self_test_break ? -1.0L : 1.0L;
  const long double h = kFdStep;
  const int dims = n_hi - n_lo + 1;
  for (int n = n_lo; n <= n_hi; ++n) {
    const std::size_t count = matrices / static_cast<std::size_t>(dims) +
                              (static_cast<std::size_t>(n - n_lo) < matrices % static_cast<std::size_t>(dims) ? 1 : 0);
    for (int k = 1; k <= n; ++k) {
      Rng rng(substream_seed(run.seed, 5, static_cast<std::uint64_t>(n * 16 + k)));
      double grad_err = 0.0, hess_err = 0.0;
      for (std::size_t s = 0; s < count; ++s) {
        const Eigen::MatrixXd q = random_orthogonal(n, rng);
        const auto d = gapped_spectrum(n, rng);
        const Eigen::MatrixXd a = symmetrize(q * Eigen::Map<const Eigen::VectorXd>(d.data(), n).asDiagonal() *
                                             q.transpose());
        Eigen::MatrixXd b(n, n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) b(i, j) = rng.normal();
        }
        b = symmetrize(b);
        const SymMatrix sa(a);
        const SymMatrix grad = sigma_grad_matrix(sa, k);
        const double hess = sigma_hessian_contract(sa, SymMatrix(b), k);

        const LMatrix al = a.cast<long double>();
        for (int p = 0; p < n; ++p) {
          for (int r = p; r < n; ++r) {
            LMatrix e = LMatrix::Zero(n, n);
            e(p, r) = e(r, p) = 1.0L;
            long double fd = (sigma_long(al + h * e, k) - sigma_long(al - h * e, k)) / (2.0L * h);
            if (p != r) fd /= 2.0L;
            fd *= sign;
            const double an = grad(p, r);
            grad_err = std::max(grad_err, static_cast<double>(std::abs(fd - an)) / std::max(1.0, std::abs(an)));
          }
        }
        const LMatrix bl = b.cast<long double>();
        const long double fd2 =
            sign * (sigma_long(al + h * bl, k) - 2.0L * sigma_long(al, k) + sigma_long(al - h * bl, k)) / (h * h);
        hess_err = std::max(hess_err, static_cast<double>(std::abs(fd2 - hess)) / std::max(1.0, std::abs(hess)));
      }
      rows.push_back({"derivative", n, k, 0, count, "gradient_relative_error", grad_err, kDerivativeTol,
                      grad_err <= kDerivativeTol});
      rows.push_back({"derivative", n, k, 0, count, "second_contraction_relative_error", hess_err, kDerivativeTol,
                      hess_err <= kDerivativeTol});
    }
  }
}

}  // namespace

int cmd_identities(const RunConfig& run, const IdentitiesOptions& opt, std::ostream& log) {
  if (opt.n_min < 1 || opt.n_max < opt.n_min || opt.n_max > 16) {
    throw ParseError("identities: need 1 <= n-min <= n-max <= 16");
  }
  const std::size_t samples = run.budget == 0 ? 10000 : run.budget;
  const std::size_t matrices = opt.derivative_matrices == 0 ? std::max<std::size_t>(1, samples / 20)
                                                            : opt.derivative_matrices;

  std::vector<Row> rows;
  identity_suite(run, opt, samples, rows);
  cone_bounds_suite(run, opt, samples, rows);
  concavity_suite(run, opt, samples, rows);
  derivative_suite(run, opt, matrices, rows);

  bool all_pass = true;
  std::string csv = csv_row({"suite", "n", "k", "l", "samples", "metric", "value", "tolerance", "pass"});
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    const bool info = std::isnan(r.tolerance);
    csv += csv_row({r.suite, std::to_string(r.n), std::to_string(r.k), std::to_string(r.l), std::to_string(r.samples),
                    r.metric, format_double(r.value), info ? "" : format_double(r.tolerance),
                    info ? "" : (r.pass ? "true" : "false")});
    nlohmann::json j = {{"suite", r.suite}, {"n", r.n},           {"k", r.k},          {"l", r.l},
                        {"samples", r.samples}, {"metric", r.metric}, {"value", std::isfinite(r.value) ? nlohmann::json(r.value) : nlohmann::json(nullptr)}};
    if (!info) {
      j["tolerance"] = r.tolerance;
      j["pass"] = r.pass;
    }
    checks.push_back(std::move(j));
  }
  nlohmann::json summary = {{"seed", run.seed},
                            {"samples", samples},
                            {"derivative_matrices", matrices},
                            {"self_test_break", run.self_test_break},
                            {"pass", all_pass},
                            {"checks", std::move(checks)}};
  write_text(run.out_dir / "identities.csv", csv);
  write_text(run.out_dir / "identities.json", summary.dump(2) + "\n");

  if (run.emit_plots) {
    std::vector<Series> series;
    for (const char* metric : {"deletion", "sum_of_minors", "euler"}) {
      Series s{metric, {}, {}};
      for (int n = opt.n_min; n <= opt.n_max; ++n) {
        double worst = 0.0;
        for (const auto& r : rows) {
          if (r.suite == "identity" && r.metric == metric && r.n == n) worst = std::max(worst, r.value);
        }
        s.x.push_back(n);
        s.y.push_back(std::max(worst, 1e-18));
      }
      series.push_back(std::move(s));
    }
    write_text(run.out_dir / "identities.svg",
               svg_chart("Worst relative identity residual", "n", "residual", series, true));
  }

  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.pass) {
      ++failed;
      log << "FAIL " << r.suite << " n=" << r.n << " k=" << r.k << " l=" << r.l << " " << r.metric << " = "
          << format_double(r.value) << " (tolerance " << format_double(r.tolerance) << ")\n";
    }
  }
  log << "identities: " << rows.size() << " checks, " << failed << " failed\n";
  return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace hypk::cli
