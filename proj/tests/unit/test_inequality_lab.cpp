#include "oracles.hpp"

#include "hypk/errors.hpp"
#include "hypk/inequality_lab.hpp"
#include "hypk/random.hpp"
#include "hypk/symmfunc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace hypk;

namespace {

std::vector<double> sorted(const EigenVector& lam) { return {lam.values().begin(), lam.values().end()}; }

double ratio_gap_reference(const std::vector<double>& x, const std::vector<double>& xi, int k, int l) {
  return oracle::ratio_sides(x, xi, k, l).gap();
}

double concavity_gap_reference(const std::vector<double>& x, const std::vector<double>& xi, int k, int l,
                               double eps, double delta0) {
  return oracle::concavity_sides(x, xi, k, l, eps, delta0).gap();
}

}  // namespace

TEST(RatioConcavity, HandEvaluatedAnchor) {
  const std::vector<double> xi = {1.0, 1.0, 1.0};
  const auto g = ratio_concavity_gap(EigenVector{1.0, 1.0, 1.0}, xi, 2, 1);
  EXPECT_NEAR(g.lhs, -2.0, 1e-12);
  EXPECT_NEAR(g.rhs, -3.0, 1e-12);
  EXPECT_NEAR(g.gap, 1.0, 1e-12);
}

TEST(RatioConcavity, VanishesAtZeroDirection) {
  const std::vector<double> xi(4, 0.0);
  EXPECT_EQ(ratio_concavity_gap(EigenVector{2.0, 1.0, 0.5, -0.1}, xi, 3, 2).gap, 0.0);
}

TEST(RatioConcavity, MatchesSubsetReference) {
  GardingConeSampler sampler(5, 3, 21);
  Rng rng(22);
  for (int s = 0; s < 300; ++s) {
    const EigenVector lam = sampler.next();
    const auto xi = rng.unit_vector(5);
    for (int l = 1; l < 3; ++l) {
      const auto g = ratio_concavity_gap(lam, xi, 3, l);
      EXPECT_NEAR(g.gap, ratio_gap_reference(sorted(lam), xi, 3, l), 1e-9 * g.scale());
    }
  }
}

TEST(RatioConcavity, FormReproducesGap) {
  GardingConeSampler sampler(6, 4, 23);
  Rng rng(24);
  for (int s = 0; s < 100; ++s) {
    const EigenVector lam = sampler.next();
    const auto xi = rng.unit_vector(6);
    const Eigen::MatrixXd form = ratio_concavity_form(lam, 4, 2);
    const Eigen::Map<const Eigen::VectorXd> v(xi.data(), 6);
    const auto g = ratio_concavity_gap(lam, xi, 4, 2);
    EXPECT_NEAR(v.dot(form * v), g.gap, 1e-12 * g.scale());
  }
}

TEST(RatioConcavity, NonnegativeOnConeSamples) {
  GardingConeSampler sampler(5, 3, 25);
  Rng rng(26);
  for (int s = 0; s < 10000; ++s) {
    const EigenVector lam = sampler.next();
    const auto xi = rng.unit_vector(5);
    const auto g = ratio_concavity_gap(lam, xi, 3, 2);
    ASSERT_TRUE(g.holds(1e-10)) << "gap " << g.gap;
    const auto w = worst_direction(ratio_concavity_form(lam, 3, 2));
    // The eigenvalue itself carries eps * |form| of round-off; the gap is judged at its eigenvector.
    ASSERT_TRUE(ratio_concavity_gap(lam, w.xi, 3, 2).holds(1e-10));
  }
}

TEST(RatioConcavity, RequiresCone) {
  const std::vector<double> xi = {1.0, 0.0, 0.0};
  EXPECT_THROW(ratio_concavity_gap(EigenVector{3.0, 1.0, -1.0}, xi, 2, 1), PreconditionError);
}

TEST(NewtonMinor, WorkedExample) {
  const auto m = newton_minor_gap(EigenVector{1.0, 1.0, 1.0, 1.0}, 3, 2, 0, 1);
  EXPECT_DOUBLE_EQ(m.minors, 3.0);
  EXPECT_DOUBLE_EQ(m.contracted, m.minors);
  EXPECT_THROW(newton_minor_gap(EigenVector{1.0, 1.0, 1.0, 1.0}, 3, 2, 1, 1), DomainError);
}

TEST(NewtonMinor, FormsAgreeAndStayNonnegative) {
  for (int l : {2, 3}) {
    GardingConeSampler sampler(6, 4, 27 + static_cast<std::uint64_t>(l));
    for (int s = 0; s < 10000; ++s) {
      const EigenVector lam = sampler.next();
      for (std::size_t p = 0; p < 6; ++p) {
        for (std::size_t q = p + 1; q < 6; ++q) {
          const auto m = newton_minor_gap(lam, 4, l, p, q);
          ASSERT_GE(m.minors, -1e-10 * m.scale);
          ASSERT_NEAR(m.contracted, m.minors, 1e-12 * m.scale);
        }
      }
    }
  }
}

TEST(ConcavityGap, VanishesAtZeroDirection) {
  const ConcavityParams params{4, 3, 1, 0.5, 0.5, 0.5, 0.1};
  const std::vector<double> xi(4, 0.0);
  EXPECT_EQ(concavity_gap(EigenVector{2.0, 0.1, 0.05, 0.02}, xi, params).gap, 0.0);
}

TEST(ConcavityGap, FirstAxisWithFlatTail) {
  const ConcavityParams params{3, 2, 1, 0.5, 0.5, 0.5, 0.25};
  const std::vector<double> lam = {2.0, 0.0, 0.0};
  const std::vector<double> xi = {1.0, 0.0, 0.0};
  // lambda = (2, 0, 0) sits on the boundary of Gamma_2; nudge the tail inward.
  const std::vector<double> inside = {2.0, 1e-3, 1e-3};
  const auto g = concavity_gap(EigenVector(inside), xi, params);
  EXPECT_NEAR(g.gap, concavity_gap_reference(inside, xi, 2, 1, 0.5, 0.5), 1e-12 * g.scale());
  EXPECT_GE(g.gap, 0.0);
  EXPECT_NEAR(g.rhs, 0.5 / 4.0, 1e-15);
  EXPECT_THROW(concavity_gap(EigenVector(lam), xi, params), PreconditionError);
}

TEST(ConcavityGap, MatchesSubsetReference) {
  const ConcavityParams params{4, 3, 1, 0.5, 0.5, 0.5, 0.25};
  ConstrainedConeSampler sampler(4, 3, 1, 0.5, 0.25, 31);
  Rng rng(32);
  for (int s = 0; s < 300; ++s) {
    const EigenVector lam = sampler.next();
    const auto xi = rng.unit_vector(4);
    const auto g = concavity_gap(lam, xi, params);
    EXPECT_NEAR(g.gap, concavity_gap_reference(sorted(lam), xi, 3, 1, 0.5, 0.5), 1e-10 * g.scale());
  }
}

TEST(ConcavityGap, InvariantUnderJointScaling) {
  const ConcavityParams params{5, 3, 2, 0.5, 0.5, 0.5, 0.1};
  ConstrainedConeSampler sampler(5, 3, 2, 0.5, 0.1, 33);
  Rng rng(34);
  for (int s = 0; s < 200; ++s) {
    const EigenVector lam = sampler.next();
    auto xi = rng.unit_vector(5);
    const auto base = concavity_gap(lam, xi, params);
    for (double t : {1e-2, 1.0, 1e2}) {
      std::vector<double> txi = xi;
      for (double& v : txi) v *= t;
      const auto scaled = concavity_gap(lam.scaled(t), txi, params);
      EXPECT_NEAR(scaled.gap, base.gap, 1e-10 * base.scale());
    }
  }
}

TEST(ConcavityGap, FormsReproduceBothSides) {
  const ConcavityParams params{4, 3, 2, 0.25, 0.5, 0.75, 0.1};
  ConstrainedConeSampler sampler(4, 3, 2, 0.5, 0.1, 35);
  Rng rng(36);
  for (int s = 0; s < 100; ++s) {
    const EigenVector lam = sampler.next();
    const auto xi = rng.unit_vector(4);
    const auto forms = concavity_forms(lam, params);
    const Eigen::Map<const Eigen::VectorXd> v(xi.data(), 4);
    const auto g = concavity_gap(lam, xi, params);
    EXPECT_NEAR(v.dot(forms.lhs * v), g.lhs, 1e-12 * g.scale());
    EXPECT_NEAR(v.dot(forms.rhs * v), g.rhs, 1e-12 * g.scale());
  }
}

TEST(ConcavityParams, Validation) {
  EXPECT_NO_THROW((ConcavityParams{3, 2, 1, 0.5, 0.5, 0.5, 0.25}.validate()));
  EXPECT_THROW((ConcavityParams{3, 2, 2, 0.5, 0.5, 0.5, 0.25}.validate()), DomainError);
  EXPECT_THROW((ConcavityParams{3, 2, 1, 1.0, 0.5, 0.5, 0.25}.validate()), DomainError);
  EXPECT_THROW((ConcavityParams{3, 2, 1, 0.5, 0.5, 0.5, 0.5}.validate()), DomainError);
  EXPECT_THROW((ConcavityParams{3, 4, 1, 0.5, 0.5, 0.5, 0.25}.validate()), DomainError);
}

TEST(ConstrainedSampler, EmitsOnlyAdmissiblePinchedSpectra) {
  ConstrainedConeSampler sampler(4, 3, 1, 0.9, 0.01, 41);
  const ConcavityParams params{4, 3, 1, 0.5, 0.9, 0.5, 0.01};
  for (int s = 0; s < 2000; ++s) {
    const EigenVector lam = sampler.next();
    ASSERT_TRUE(in_gamma_k(lam, 3).inside);
    ASSERT_GT(lam[0], 0.0);
    ASSERT_TRUE(pinch_flags(lam, params).both());
  }
  EXPECT_GE(sampler.proposals(), sampler.accepted());
}

TEST(ConstrainedSampler, ReproducibleStream) {
  ConstrainedConeSampler a(5, 3, 2, 0.5, 0.1, 42), b(5, 3, 2, 0.5, 0.1, 42);
  for (int s = 0; s < 100; ++s) {
    const auto x = a.next(), y = b.next();
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(x[i], y[i]);
  }
}

TEST(ConstrainedSampler, StarvationIsReported) {
  // Seven tail entries uniform on [-3 lambda_1, lambda_1 / 4] almost never keep sigma_1 positive.
  ConstrainedConeSampler sampler(8, 2, 1, 0.5, 0.25, 43, 1.0, SampleDistribution::kUniform);
  EXPECT_THROW(
      {
        for (int s = 0; s < 10; ++s) sampler.next();
      },
      SamplingError);
}

TEST(Claim, RequiredConstantIsNonnegativeAndReproducible) {
  const ConcavityParams params{4, 3, 1, 0.5, 0.9, 0.5, 0.01};
  SampleBudget budget;
  budget.count = 5000;
  budget.seed = 51;
  const auto out = claim_min_constant(params, budget);
  EXPECT_GE(out.required_c, 0.0);
  EXPECT_TRUE(std::isfinite(out.required_c));
  const auto again = claim_required_constant(EigenVector(out.worst_lambda), params);
  EXPECT_NEAR(again.required_c, out.required_c, 1e-12 * std::max(1.0, out.required_c));
}

TEST(Claim, HeadOnlyDirectionNeedsNoTailConstant) {
  const ConcavityParams params{4, 3, 1, 0.5, 0.9, 0.5, 0.01};
  ConstrainedConeSampler sampler(4, 3, 1, 0.9, 0.01, 52);
  const std::vector<double> xi = {1.0, 0.0, 0.0, 0.0};
  for (int s = 0; s < 100; ++s) EXPECT_EQ(claim_required_constant(sampler.next(), xi, params), 0.0);
}

TEST(Claim, PerDirectionBoundByPerLambdaSup) {
  const ConcavityParams params{5, 3, 2, 0.5, 0.5, 0.5, 0.1};
  ConstrainedConeSampler sampler(5, 3, 2, 0.5, 0.1, 53);
  Rng rng(54);
  for (int s = 0; s < 200; ++s) {
    const EigenVector lam = sampler.next();
    const auto whole = claim_required_constant(lam, params);
    for (int t = 0; t < 5; ++t) {
      const double c = claim_required_constant(lam, rng.unit_vector(5), params);
      EXPECT_LE(c, whole.required_c * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST(Search, FindsThresholdForSmallestCase) {
  SampleBudget budget;
  budget.count = 20000;
  budget.seed = 61;
  const auto out = search_delta_prime(3, 2, 1, 0.5, 0.5, 0.5, budget);
  ASSERT_TRUE(out.success);
  EXPECT_GE(out.delta_prime_found, kDeltaPrimeFloor);
  EXPECT_GE(out.min_relative_gap, -1e-10);
  EXPECT_EQ(out.samples_checked, budget.count);
  EXPECT_FALSE(out.levels.empty());
  EXPECT_FALSE(out.levels.back().counterexample.has_value());
}

TEST(Search, DeterministicAcrossRunsAndWorkers) {
  SampleBudget budget;
  budget.count = 5000;
  budget.seed = 62;
  budget.record_limit = 100;
  budget.workers = 1;
  const auto a = search_delta_prime(4, 3, 2, 0.25, 0.75, 0.5, budget);
  budget.workers = 3;
  const auto b = search_delta_prime(4, 3, 2, 0.25, 0.75, 0.5, budget);
  EXPECT_EQ(a.delta_prime_found, b.delta_prime_found);
  EXPECT_EQ(a.min_gap, b.min_gap);
  EXPECT_EQ(a.total_samples, b.total_samples);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].gap, b.records[i].gap);
}

TEST(Search, CounterexamplesReevaluate) {
  SampleBudget budget;
  budget.count = 20000;
  budget.seed = 63;
  const double eps = 0.1, delta = 0.5, delta0 = 0.5;
  const auto out = search_delta_prime(5, 3, 2, eps, delta, delta0, budget);
  for (const auto& level : out.levels) {
    if (!level.counterexample) continue;
    const auto& c = *level.counterexample;
    const ConcavityParams params{5, 3, 2, eps, delta, delta0, c.delta_prime};
    const auto g = concavity_gap(EigenVector(c.lambda), c.xi, params);
    EXPECT_EQ(g.gap, c.gap);
    EXPECT_LT(g.gap, -1e-10 * g.scale());
  }
}
