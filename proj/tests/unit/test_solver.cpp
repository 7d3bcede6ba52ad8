#include "hypk/diagnostics.hpp"
#include "hypk/errors.hpp"
#include "hypk/prescribed_rhs.hpp"
#include "hypk/radial_graph.hpp"
#include "hypk/solver.hpp"
#include "hypk/symmfunc.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

using namespace hypk;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RadialGraph sphere_graph(int n, double r0, int n_theta = 12) {
  if (n == 2) return RadialGraph::from_preset("sphere:" + num(r0), GraphMode::kFullSphere, 2, n_theta, 2 * n_theta);
  return RadialGraph::from_preset("sphere:" + num(r0), GraphMode::kAxisymmetric, n, n_theta, 1);
}

double sup_error(const RadialGraph& g, double r) {
  double e = 0.0;
  for (double v : g.values()) e = std::max(e, std::abs(v - r));
  return e;
}

}  // namespace

TEST(Expression, ArithmeticAndPrecedence) {
  RhsPoint p;
  p.r = 2.0;
  p.theta = 0.5;
  EXPECT_DOUBLE_EQ(Expression::parse("1 + 2 * 3").eval(p), 7.0);
  EXPECT_DOUBLE_EQ(Expression::parse("(1 + 2) * 3").eval(p), 9.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2 ^ 3 ^ 2").eval(p), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse("-2 ^ 2").eval(p), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("r * cos(theta)").eval(p), 2.0 * std::cos(0.5));
  EXPECT_DOUBLE_EQ(Expression::parse("pow(r, 3) / 4").eval(p), 2.0);
  EXPECT_DOUBLE_EQ(Expression::parse("coth(1)").eval(p), 1.0 / std::tanh(1.0));
  EXPECT_DOUBLE_EQ(Expression::parse("abs(-pi)").eval(p), M_PI);
  EXPECT_DOUBLE_EQ(Expression::parse("1e-3 * 2").eval(p), 2e-3);
}

TEST(Expression, VariablesAndConstancy) {
  const auto e = Expression::parse("2 + nu_r * u");
  EXPECT_TRUE(e.uses("nu_r"));
  EXPECT_TRUE(e.uses("u"));
  EXPECT_FALSE(e.uses("theta"));
  EXPECT_FALSE(e.is_constant());
  EXPECT_TRUE(Expression::parse("coth(1)^2").is_constant());
  EXPECT_THROW(e.uses("zeta"), DomainError);
}

TEST(Expression, ParseErrors) {
  for (const char* bad : {"", "1 +", "(1", "foo(2)", "x + 1", "sin 2", "pow(1)", "1 2", "3 $ 4"}) {
    EXPECT_THROW(Expression::parse(bad), ParseError) << bad;
  }
}

TEST(PrescribedRhs, CurvatureMeasureMatchesGeneralForm) {
  const auto m = PrescribedRHS::curvature_measure("2 + cos(theta)", -1.0);
  const auto g = m.as_general();
  RhsPoint p;
  p.u = 1.7;
  p.theta = 0.3;
  EXPECT_NEAR(m.value(p), g.value(p), 1e-14 * m.value(p));
  EXPECT_THROW(PrescribedRHS::curvature_measure("1", 0.0), DomainError);
  EXPECT_THROW(PrescribedRHS::curvature_measure("1", 1.5), DomainError);
  EXPECT_THROW(PrescribedRHS::general("0 - 1").value(p), DomainError);
}

TEST(PrescribedRhs, EquationEquivalenceOnResidualField) {
  const auto graph = RadialGraph::from_preset("trig:1.0,0.05,0.03", GraphMode::kFullSphere, 2, 12, 24);
  const auto m = PrescribedRHS::curvature_measure("3 + 0.2 * cos(2 * theta)", 0.5);
  const auto a = residual_field(graph, m, 2, 1);
  const auto b = residual_field(graph, m.as_general(), 2, 1);
  for (std::size_t i = 0; i < a.residual.size(); ++i) {
    EXPECT_NEAR(a.residual[i], b.residual[i], 1e-14 * std::max(1.0, std::abs(a.rhs[i])));
  }
}

TEST(SphereOracle, InvertsSphereSigma) {
  for (int n : {2, 3, 4}) {
    for (int k = 1; k <= n; ++k) {
      for (double r0 : {0.3, 1.0, 2.2}) {
        EXPECT_NEAR(sphere_oracle(sphere_sigma(r0, n, k), n, k), r0, 1e-12 * r0);
      }
      EXPECT_THROW(sphere_oracle(binomial(n, k) * 0.9, n, k), DomainError);
    }
  }
  EXPECT_DOUBLE_EQ(binomial(5, 2), 10.0);
}

TEST(ResidualField, VanishesOnTheMatchingSphere) {
  const auto g = sphere_graph(3, 0.8);
  const auto rhs = PrescribedRHS::general(num(sphere_sigma(0.8, 3, 2)));
  const auto f = residual_field(g, rhs, 2, 1);
  EXPECT_LE(f.max_abs, 1e-10);
  EXPECT_TRUE(f.all_admissible);
  EXPECT_GT(f.min_margin, 0.0);
}

TEST(ResidualField, IndependentOfWorkerCount) {
  const auto g = RadialGraph::from_preset("tilted:1.0,0.1,0.05", GraphMode::kFullSphere, 2, 12, 24);
  const auto rhs = PrescribedRHS::general("2 + 0.1 * nu_r");
  const auto a = residual_field(g, rhs, 2, 1);
  const auto b = residual_field(g, rhs, 2, 3);
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(a.margin, b.margin);
}

class ConstantRhsSolve : public ::testing::TestWithParam<std::tuple<int, int, double>> {};

TEST_P(ConstantRhsSolve, RecoversOracleSphere) {
  const auto [n, k, start] = GetParam();
  const double c = sphere_sigma(1.0, n, k);
  SolverConfig cfg;
  cfg.k = k;
  cfg.workers = 1;
  const auto res = solve(sphere_graph(n, start), PrescribedRHS::general(num(c)), cfg);
  ASSERT_EQ(res.status, SolveStatus::kConverged) << res.message;
  EXPECT_LE(res.iterations, 25);
  EXPECT_LE(sup_error(res.graph, sphere_oracle(c, n, k)), 1e-6);
  for (const auto& h : res.report.history) EXPECT_GT(h.cone_margin, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Cases, ConstantRhsSolve,
                         ::testing::Values(std::make_tuple(2, 2, 0.5), std::make_tuple(2, 2, 1.5),
                                           std::make_tuple(3, 2, 0.5), std::make_tuple(3, 3, 1.5),
                                           std::make_tuple(3, 1, 0.7)));

TEST(Solve, CurvatureMeasureNearSphere) {
  for (double p : {-1.0, 0.5, 1.0}) {
    const double phi = sphere_sigma(1.0, 3, 2) / std::pow(std::sinh(1.0), p);
    SolverConfig cfg;
    cfg.k = 2;
    cfg.workers = 1;
    const auto res = solve(sphere_graph(3, 0.9), PrescribedRHS::curvature_measure(num(phi), p), cfg);
    ASSERT_EQ(res.status, SolveStatus::kConverged) << "p=" << p;
    EXPECT_LE(sup_error(res.graph, 1.0), 1e-6) << "p=" << p;
  }
}

// With p = -1 the centred spheres solving the tuned problem satisfy
// C(n,k) coth^k(r) sinh(r) = C(n,k) coth^k(1) sinh(1), which has a second
// root besides r = 1.
TEST(Solve, NegativeExponentHasSecondSphericalSolution) {
  const double target = sphere_sigma(1.0, 2, 2) * std::sinh(1.0);
  auto f = [&](double r) { return sphere_sigma(r, 2, 2) * std::sinh(r) - target; };
  double lo = 0.3, hi = 0.95;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double other = 0.5 * (lo + hi);
  EXPECT_NEAR(f(other), 0.0, 1e-12);
  EXPECT_LT(other, 0.9);

  const double phi = sphere_sigma(1.0, 2, 2) * std::sinh(1.0);
  SolverConfig cfg;
  cfg.k = 2;
  cfg.workers = 1;
  const auto res = solve(sphere_graph(2, 0.5), PrescribedRHS::curvature_measure(num(phi), -1.0), cfg);
  ASSERT_EQ(res.status, SolveStatus::kConverged);
  EXPECT_LE(sup_error(res.graph, other), 1e-6);
}

TEST(Solve, FlowModeReachesTheSameSphere) {
  SolverConfig cfg;
  cfg.k = 2;
  cfg.mode = SolverMode::kFlow;
  cfg.max_iterations = 400;
  cfg.tolerance = 1e-9;
  cfg.workers = 1;
  const double c = sphere_sigma(1.0, 3, 2);
  const auto res = solve(sphere_graph(3, 0.9), PrescribedRHS::general(num(c)), cfg);
  ASSERT_EQ(res.status, SolveStatus::kConverged) << res.message;
  EXPECT_LE(sup_error(res.graph, 1.0), 1e-6);
}

TEST(Solve, InadmissibleStartIsRejected) {
  // k = n = 2 on a sphere is always admissible, so force an inadmissible
  // graph with a deep dent.
  const auto g = RadialGraph::from_preset("trig:1.0,0.0,0.45", GraphMode::kAxisymmetric, 2, 32, 1);
  SolverConfig cfg;
  cfg.k = 2;
  ASSERT_FALSE(residual_field(g, PrescribedRHS::general("2"), 2, 1).all_admissible);
  EXPECT_THROW(solve(g, PrescribedRHS::general("2"), cfg), PreconditionError);
}

TEST(Solve, IterationLimitIsReportedNotThrown) {
  SolverConfig cfg;
  cfg.k = 2;
  cfg.max_iterations = 1;
  cfg.workers = 1;
  const auto res = solve(sphere_graph(2, 0.5), PrescribedRHS::general(num(sphere_sigma(1.0, 2, 2))), cfg);
  EXPECT_EQ(res.status, SolveStatus::kNonConverged);
  EXPECT_FALSE(res.message.empty());
  EXPECT_FALSE(res.report.history.empty());
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = SolverConfig{};
  cfg.safeguard = 1.5;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = SolverConfig{};
  cfg.tolerance = -1.0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Diagnostics, ConsistentWithCurvatureField) {
  const auto g = RadialGraph::from_preset("trig:1.0,0.1,0.08", GraphMode::kFullSphere, 2, 16, 32);
  const auto rep = diagnostics(g, 2, {}, 1);
  double kmin = 1e300, kabs = 0.0, umin = 1e300;
  std::size_t excluded = 0;
  for (const auto& s : rep.sites) {
    for (double v : s.kappa) {
      kmin = std::min(kmin, v);
      kabs = std::max(kabs, std::abs(v));
    }
    umin = std::min(umin, s.u);
    if (!s.q_included) {
      ++excluded;
      continue;
    }
    EXPECT_TRUE(std::isfinite(s.q_general));
    EXPECT_TRUE(std::isfinite(s.q_measure));
    const double expect = std::log(s.kappa[0]) - rep.N * std::log(s.u) + rep.alpha * s.Phi;
    EXPECT_NEAR(s.q_general, expect, 1e-12 * std::max(1.0, std::abs(expect)));
  }
  EXPECT_EQ(rep.sites.size(), static_cast<std::size_t>(g.size()));
  EXPECT_NEAR(rep.K_semiconvex, std::max(0.0, -kmin), 1e-12);
  EXPECT_EQ(rep.max_abs_kappa, kabs);
  EXPECT_EQ(rep.u_min, umin);
  EXPECT_DOUBLE_EQ(rep.a, 0.5 * umin);
  EXPECT_GT(rep.u_min, 2.0 * rep.a - 1e-15);
  EXPECT_EQ(rep.excluded_sites, excluded);
  EXPECT_TRUE(rep.q_general_max.found);
}

TEST(Diagnostics, SphereHasUniformFields) {
  const auto rep = diagnostics(sphere_graph(3, 1.0, 16), 2, {}, 1);
  EXPECT_NEAR(rep.max_abs_kappa, 1.0 / std::tanh(1.0), 1e-10);
  EXPECT_EQ(rep.K_semiconvex, 0.0);
  EXPECT_NEAR(rep.u_min, std::sinh(1.0), 1e-10);
  EXPECT_NEAR(rep.u_max, std::sinh(1.0), 1e-10);
  EXPECT_EQ(rep.excluded_sites, 0u);
  EXPECT_GT(rep.cone_margin, 0.0);
  EXPECT_EQ(rep.q_general_max.ties, rep.sites.size());
}
