#include "oracles.hpp"

#include "hypk/errors.hpp"
#include "hypk/geom_checks.hpp"
#include "hypk/radial_graph.hpp"
#include "hypk/solver.hpp"
#include "hypk/surface_jet.hpp"
#include "hypk/symmfunc.hpp"
#include "hypk/warping.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

using namespace hypk;

TEST(Warping, HyperbolicIdentity) {
  for (double r : {0.0, 0.3, 1.0, 2.5, 6.0}) {
    const auto w = warping(r);
    EXPECT_DOUBLE_EQ(w.phi, std::sinh(r));
    EXPECT_DOUBLE_EQ(w.phi_prime, std::cosh(r));
    EXPECT_DOUBLE_EQ(w.Phi, std::cosh(r) - 1.0);
    EXPECT_LE(std::abs(w.identity_residual()), 1e-12 * std::cosh(r) * std::cosh(r));
  }
  EXPECT_THROW(warping(-0.1), DomainError);
  EXPECT_THROW(warping(std::nan("")), DomainError);
}

TEST(RadialGraph, RejectsNonStarShapedInput) {
  EXPECT_THROW(RadialGraph::from_preset("sphere:-1", GraphMode::kAxisymmetric, 2, 16, 1), DomainError);
  EXPECT_THROW(RadialGraph::from_preset("perturbed:0.05,0.1", GraphMode::kAxisymmetric, 2, 16, 1), DomainError);
  EXPECT_THROW(RadialGraph::from_preset("ellipsoid:1", GraphMode::kAxisymmetric, 2, 16, 1), ParseError);
  EXPECT_THROW(RadialGraph::from_preset("sphere:1,2", GraphMode::kAxisymmetric, 2, 16, 1), ParseError);
  EXPECT_THROW(RadialGraph::from_preset("sphere:1", GraphMode::kFullSphere, 2, 16, 15), DomainError);
}

TEST(RadialGraph, PoleReflection) {
  const auto g = RadialGraph::from_preset("tilted:1.0,0.1,0.05", GraphMode::kFullSphere, 2, 16, 32);
  // One row beyond the north pole is row 0 seen from the opposite meridian.
  EXPECT_EQ(g.node_index({-1, 3}), g.node_index({0, 3 + 16}));
  EXPECT_EQ(g.node_index({16, 5}), g.node_index({15, 5 + 16}));
  EXPECT_EQ(g.node_index({4, -1}), g.node_index({4, 31}));
}

class SphereClosedForms : public ::testing::TestWithParam<double> {};

TEST_P(SphereClosedForms, CurvaturesSupportAndSigma) {
  const double r0 = GetParam();
  struct Case {
    GraphMode mode;
    int n, n_theta, n_phi;
  };
  for (const Case c : {Case{GraphMode::kFullSphere, 2, 16, 32}, Case{GraphMode::kAxisymmetric, 3, 16, 1},
                       Case{GraphMode::kAxisymmetric, 4, 16, 1}}) {
    const auto g = RadialGraph::from_preset("sphere:" + std::to_string(r0), c.mode, c.n, c.n_theta, c.n_phi);
    for (int j : {0, 5, 15}) {
      const auto jet = surface_jet(g, {j, c.n_phi > 1 ? 7 : 0}, {2, FrameOrder::kForward});
      for (double kappa : jet.kappa) EXPECT_NEAR(kappa, 1.0 / std::tanh(r0), 1e-10);
      EXPECT_NEAR(jet.u, std::sinh(r0), 1e-10);
      for (int k = 1; k <= c.n; ++k) {
        const double expect = sphere_sigma(r0, c.n, k);
        EXPECT_NEAR(sigma(EigenVector(jet.kappa), k), expect, 1e-10 * std::max(1.0, expect));
        EXPECT_NEAR(expect, binomial(c.n, k) * std::pow(1.0 / std::tanh(r0), k), 1e-12 * expect);
      }
      const auto res = check_all(jet);
      EXPECT_LE(res.phi_hessian, 1e-10);
      EXPECT_LE(res.support_first, 1e-10);
      EXPECT_LE(res.support_second, 1e-10);
      EXPECT_LE(res.gauss, 1e-10);
      EXPECT_LE(res.codazzi, 1e-10);
      // Third differences amplify round-off by h^-3.
      EXPECT_LE(res.interchange, 1e-8);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Radii, SphereClosedForms, ::testing::Values(0.5, 1.0, 2.0));

// Curvatures from the hyperboloid embedding, differentiated directly from
// the analytic radial function.
TEST(Curvature, MatchesHyperboloidModelFullSphere) {
  const std::string spec = "tilted:1.0,0.15,0.1";
  const auto preset = parse_preset(spec);
  const auto g = RadialGraph::from_preset(spec, GraphMode::kFullSphere, 2, 64, 128);
  const auto r = [&](const Eigen::VectorXd& x) { return preset.fn(x(0), x(1)); };
  int checked = 0;
  for (int s = 0; s < 10; ++s) {
    const GridSite site{8 + 5 * s, (13 * s + 3) % 128};
    const auto jet = surface_jet(g, site, {0, FrameOrder::kForward});
    Eigen::VectorXd at(2);
    at << g.theta(site.j), g.phi(site.m);
    const auto ref = oracle::hyperboloid_curvature(r, at);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(jet.kappa[i], ref.kappa[i], 1e-6) << "site " << s;
    EXPECT_NEAR(jet.u, ref.u, 1e-6);
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(Curvature, MatchesHyperboloidModelAxisymmetric) {
  for (int n : {2, 3, 4}) {
    const std::string spec = "trig:1.2,0.1,0.05";
    const auto preset = parse_preset(spec);
    const auto g = RadialGraph::from_preset(spec, GraphMode::kAxisymmetric, n, 64, 1);
    const auto r = [&](const Eigen::VectorXd& x) { return preset.fn(x(0), 0.0); };
    for (int s = 0; s < 10; ++s) {
      const int j = 6 + 5 * s;
      const auto jet = surface_jet(g, {j, 0}, {0, FrameOrder::kForward});
      Eigen::VectorXd at = Eigen::VectorXd::Constant(n, 1.1);
      at(0) = g.theta(j);
      const auto ref = oracle::hyperboloid_curvature(r, at);
      for (int i = 0; i < n; ++i) EXPECT_NEAR(jet.kappa[i], ref.kappa[i], 1e-6) << "n=" << n << " j=" << j;
      EXPECT_NEAR(jet.u, ref.u, 1e-6);
    }
  }
}

TEST(GeomChecks, ResidualsSmallOnPerturbedGraphs) {
  struct Case {
    std::string spec;
    GraphMode mode;
    int n;
  };
  for (const auto& c : {Case{"perturbed:1.0,0.1", GraphMode::kFullSphere, 2}, Case{"tilted:1.0,0.1,0.05", GraphMode::kFullSphere, 2},
                        Case{"trig:1.0,0.05,0.03", GraphMode::kAxisymmetric, 3}}) {
    const int n_phi = c.mode == GraphMode::kFullSphere ? 192 : 1;
    const auto g = RadialGraph::from_preset(c.spec, c.mode, c.n, 96, n_phi);
    const auto sweep = geom_sweep(g, default_check_sites(g), {2, FrameOrder::kForward}, 1);
    EXPECT_LE(sweep.max.phi_hessian, 1e-6) << c.spec;
    EXPECT_LE(sweep.max.support_first, 1e-6) << c.spec;
    EXPECT_LE(sweep.max.support_second, 1e-6) << c.spec;
    EXPECT_LE(sweep.max.gauss, 1e-6) << c.spec;
    EXPECT_LE(sweep.max.codazzi, 1e-6) << c.spec;
    EXPECT_LE(sweep.max.interchange, 1e-4) << c.spec;
    EXPECT_TRUE(sweep.max.has_interchange);
  }
}

// Fourth-order stencils: halving the spacing should divide the error by
// 2^4 within 30 %.
TEST(GeomChecks, FourthOrderConvergence) {
  const std::string spec = "perturbed:1.0,0.1";
  const auto coarse = RadialGraph::from_preset(spec, GraphMode::kAxisymmetric, 2, 32, 1);
  const auto fine = RadialGraph::from_preset(spec, GraphMode::kAxisymmetric, 2, 64, 1);
  const auto sc = geom_sweep(coarse, default_check_sites(coarse), {2, FrameOrder::kForward}, 1);
  const auto sf = geom_sweep(fine, default_check_sites(fine), {2, FrameOrder::kForward}, 1);
  for (const auto& kind : residual_kinds()) {
    const double ratio = residual_by_kind(sc.max, kind) / residual_by_kind(sf.max, kind);
    EXPECT_GT(ratio, 16.0 * 0.7) << kind;
    EXPECT_LT(ratio, 16.0 * 1.3) << kind;
  }
}

TEST(GeomChecks, CurvatureAtMatchingPointConvergesFourthOrder) {
  // The oracle is evaluated at the node itself, so only the grid error remains.
  const std::string spec = "trig:1.0,0.1,0.05";
  const auto preset = parse_preset(spec);
  const auto r = [&](const Eigen::VectorXd& x) { return preset.fn(x(0), 0.0); };
  double err[2] = {0, 0};
  int idx = 0;
  for (int nt : {24, 48}) {
    const auto g = RadialGraph::from_preset(spec, GraphMode::kAxisymmetric, 2, nt, 1);
    const int j = nt / 3;
    const auto jet = surface_jet(g, {j, 0}, {0, FrameOrder::kForward});
    Eigen::VectorXd at(2);
    at << g.theta(j), 1.1;
    const auto ref = oracle::hyperboloid_curvature(r, at);
    err[idx++] = std::abs(jet.kappa[0] - ref.kappa[0]) + std::abs(jet.kappa[1] - ref.kappa[1]);
  }
  EXPECT_GT(err[0] / err[1], 8.0);
}

TEST(GeomChecks, FrameIndependence) {
  const auto g = RadialGraph::from_preset("tilted:1.0,0.1,0.05", GraphMode::kFullSphere, 2, 32, 64);
  for (const auto site : default_check_sites(g, 6)) {
    const auto a = check_all(surface_jet(g, site, {2, FrameOrder::kForward}));
    const auto b = check_all(surface_jet(g, site, {2, FrameOrder::kReversed}));
    for (const auto& kind : residual_kinds()) {
      EXPECT_NEAR(residual_by_kind(a, kind), residual_by_kind(b, kind), 1e-12) << kind;
    }
  }
}

TEST(GeomChecks, InterchangeNeedsSecondDerivatives) {
  const auto g = RadialGraph::from_preset("sphere:1", GraphMode::kAxisymmetric, 2, 16, 1);
  const auto jet = surface_jet(g, {5, 0}, {1, FrameOrder::kForward});
  EXPECT_THROW(check_interchange(jet), PreconditionError);
  EXPECT_FALSE(check_all(jet).has_interchange);
}

TEST(GeomChecks, SweepIndependentOfWorkerCount) {
  const auto g = RadialGraph::from_preset("tilted:1.0,0.1,0.05", GraphMode::kFullSphere, 2, 32, 64);
  const auto sites = default_check_sites(g, 12);
  const auto a = geom_sweep(g, sites, {2, FrameOrder::kForward}, 1);
  const auto b = geom_sweep(g, sites, {2, FrameOrder::kForward}, 4);
  for (const auto& kind : residual_kinds()) EXPECT_EQ(residual_by_kind(a.max, kind), residual_by_kind(b.max, kind));
}

TEST(GeomChecks, CheckSitesStayInBand) {
  const auto g = RadialGraph::from_preset("sphere:1", GraphMode::kFullSphere, 2, 64, 128);
  for (const auto s : default_check_sites(g, 8)) {
    EXPECT_GE(g.theta(s.j), 0.2 * M_PI - 1e-12);
    EXPECT_LE(g.theta(s.j), 0.8 * M_PI + 1e-12);
  }
  EXPECT_GT(default_check_sites(g, 0).size(), 8u);
}
