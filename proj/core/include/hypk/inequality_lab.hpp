#pragma once

// Sampled verification of the concavity-type inequalities for sigma_k on
// the Garding cone, and the empirical search for the pinching threshold
// delta' in the main concavity inequality.
//
// lambda is always the descending-sorted spectrum of an EigenVector; the
// direction xi is indexed in the same sorted order. Orders l and k are the
// usual 1-based degrees; "lambda_l" in a statement is lam[l - 1] here.

#include "hypk/random.hpp"
#include "hypk/symmfunc.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hypk {

/// (n, k, l, eps, delta, delta0, delta') for the pinched concavity bound.
struct ConcavityParams {
  int n = 3;
  int k = 2;
  int l = 1;
  double eps = 0.5;
  double delta = 0.5;
  double delta0 = 0.5;
  double delta_prime = 0.25;

  /// DomainError unless 1 <= l < k <= n, eps/delta/delta0 in (0,1) and
  /// delta' in (0, delta).
  void validate() const;
};

enum class SampleDistribution {
  kBoundaryBiased,  // tail lower bound drawn log-uniformly toward the pinch
  kUniform,         // tail uniform on the full admissible range
};

struct SampleBudget {
  std::size_t count = 100000;
  std::uint64_t seed = 1;
  double lambda_scale = 1.0;
  SampleDistribution distribution = SampleDistribution::kBoundaryBiased;
  unsigned workers = 0;            // 0: hardware concurrency
  std::size_t record_limit = 0;    // per-sample records kept for the final level
};

/// Two sides of an inequality LHS >= RHS evaluated at one point.
struct GapEvaluation {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // lhs - rhs

  double scale() const;  // 1 + |lhs| + |rhs|
  bool holds(double rel_tol = 1e-10) const { return gap >= -rel_tol * scale(); }
};

// ---------------------------------------------------------------------------
// Ratio concavity: the sigma_k / sigma_l comparison of second-order forms.

/// LHS = -sum_{p!=q} s_k^{pp,qq} xi_p xi_q / s_k + sum_{p!=q} s_l^{pp,qq} xi_p xi_q / s_l
/// RHS = -(sum s_k^{ii} xi_i)^2 / s_k^2 + (sum s_l^{ii} xi_i)^2 / s_l^2.
/// PreconditionError when lambda is not in Gamma_k.
GapEvaluation ratio_concavity_gap(const EigenVector& lam, std::span<const double> xi, int k, int l);

/// Symmetric matrix G with ratio_concavity_gap(...).gap == xi^T G xi.
Eigen::MatrixXd ratio_concavity_form(const EigenVector& lam, int k, int l);

// ---------------------------------------------------------------------------
// Newton-type inequality for pairwise minors.

struct NewtonMinorGap {
  double contracted = 0.0;  // s_l^{pp} s_l^{qq} - s_l s_l^{pp,qq}
  double minors = 0.0;      // s_{l-1}(l|pq)^2 - s_l(l|pq) s_{l-2}(l|pq)
  double scale = 1.0;       // 1 + |s_l^{pp} s_l^{qq}| + |s_l s_l^{pp,qq}|
};

/// Requires lambda in Gamma_k and 2 <= l < k; DomainError when p == q.
NewtonMinorGap newton_minor_gap(const EigenVector& lam, int k, int l, std::size_t p, std::size_t q);

// ---------------------------------------------------------------------------
// Intermediate claim: the cross-term sum bounded by eps/2 on the head
// indices (i < l) and C/eps on the tail (i >= l).

struct ClaimRequirement {
  double required_c = 0.0;       // smallest C making the claim hold (may be +inf)
  std::vector<double> worst_xi;  // direction attaining it
};

/// Smallest C for this lambda over all xi (closed form via a Schur complement).
ClaimRequirement claim_required_constant(const EigenVector& lam, const ConcavityParams& params);
/// Smallest C for this single (lambda, xi).
double claim_required_constant(const EigenVector& lam, std::span<const double> xi, const ConcavityParams& params);

struct ClaimOutcome {
  double required_c = 0.0;
  std::vector<double> worst_lambda;
  std::vector<double> worst_xi;
  std::size_t samples = 0;
};

/// Sup of the per-sample required constant over pinched cone samples.
ClaimOutcome claim_min_constant(const ConcavityParams& params, const SampleBudget& budget);

// ---------------------------------------------------------------------------
// Main pinched concavity inequality.

struct PinchFlags {
  bool head_pinched = false;  // lambda_l >= delta lambda_1
  bool tail_pinched = false;  // lambda_{l+1} <= delta' lambda_1
  bool both() const { return head_pinched && tail_pinched; }
};

PinchFlags pinch_flags(const EigenVector& lam, const ConcavityParams& params);

/// LHS = -sum_{p!=q} s_k^{pp,qq} xi_p xi_q / s_k + (sum s_k^{ii} xi_i)^2 / s_k^2
/// RHS = (1-eps) xi_1^2 / lambda_1^2 - delta0 sum_{i>l} s_k^{ii} xi_i^2 / (lambda_1 s_k).
/// PreconditionError when lambda_1 <= 0 or lambda not in Gamma_k.
GapEvaluation concavity_gap(const EigenVector& lam, std::span<const double> xi, const ConcavityParams& params);

/// Quadratic forms (L, R) with LHS = xi^T L xi and RHS = xi^T R xi.
struct QuadraticPair {
  Eigen::MatrixXd lhs;
  Eigen::MatrixXd rhs;
  Eigen::MatrixXd gap() const { return lhs - rhs; }
};
QuadraticPair concavity_forms(const EigenVector& lam, const ConcavityParams& params);

/// Unit xi minimising the gap form, and that minimum.
struct WorstDirection {
  double min_gap = 0.0;
  std::vector<double> xi;
};
WorstDirection worst_direction(const Eigen::MatrixXd& form);

/// Directions probed per lambda sample: the worst-case eigenvector of the
/// gap form, one uniform point on the sphere, every axis e_i and e_1 +- e_i.
std::vector<std::vector<double>> probe_directions(const Eigen::MatrixXd& gap_form, Rng& rng);

// ---------------------------------------------------------------------------
// Sampling of Gamma_k.

/// lambda = x + t (1, ..., 1) with x uniform in [-1, 1]^n and t just above
/// the entry point t* of the ray into Gamma_k: half of the offsets t - t*
/// are log-uniform in [1e-6, 1], half uniform in [0, 1].
class GardingConeSampler {
 public:
  GardingConeSampler(int n, int k, std::uint64_t seed);
  EigenVector next();

 private:
  int n_, k_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Constrained sampling of pinched cone spectra.

class ConstrainedConeSampler {
 public:
  ConstrainedConeSampler(int n, int k, int l, double delta, double delta_prime, std::uint64_t seed,
                         double lambda_scale = 1.0,
                         SampleDistribution distribution = SampleDistribution::kBoundaryBiased);

  /// Next lambda in Gamma_k with lambda_1 > 0, lambda_l >= delta lambda_1 and
  /// lambda_{l+1} <= delta' lambda_1. SamplingError when the acceptance rate
  /// falls below 1e-4 after 1e6 proposals.
  EigenVector next();

  std::size_t proposals() const noexcept { return proposals_; }
  std::size_t accepted() const noexcept { return accepted_; }

  static constexpr std::size_t kStarvationProposals = 1000000;
  static constexpr double kStarvationRate = 1e-4;

 private:
  int n_, k_, l_;
  double delta_, delta_prime_, scale_;
  SampleDistribution distribution_;
  Rng rng_;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

// ---------------------------------------------------------------------------
// delta' search.

struct Counterexample {
  std::vector<double> lambda;
  std::vector<double> xi;
  double gap = 0.0;
  double scale = 1.0;
  double delta_prime = 0.0;  // candidate level it refuted
};

struct SampleRecord {
  std::vector<double> lambda;
  std::vector<double> xi;
  double gap = 0.0;
  PinchFlags flags;
};

struct LevelRecord {
  double delta_prime = 0.0;
  std::size_t samples = 0;
  double min_gap = 0.0;           // min raw gap among checked samples
  double min_relative_gap = 0.0;  // min gap / scale
  std::optional<Counterexample> counterexample;
};

struct SearchOutcome {
  bool success = false;
  double delta_prime_found = 0.0;
  std::optional<Counterexample> counterexample;  // the one refuting the last rejected level
  std::size_t samples_checked = 0;               // at the returned level
  std::size_t total_samples = 0;                 // over all levels
  double min_gap = 0.0;
  double min_relative_gap = 0.0;
  std::vector<LevelRecord> levels;
  std::vector<SampleRecord> records;  // up to budget.record_limit, final level
  std::string message;
};

/// Halves delta' from delta/2 until a full budget of constrained samples
/// shows no gap below -rel_tol * scale. Failure (no level above 1e-8) is a
/// reported outcome, not an exception.
SearchOutcome search_delta_prime(int n, int k, int l, double eps, double delta, double delta0,
                                 const SampleBudget& budget, double rel_tol = 1e-10);

inline constexpr double kDeltaPrimeFloor = 1e-8;

}  // namespace hypk
