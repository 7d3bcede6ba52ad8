#pragma once

// Elementary symmetric functions sigma_k, their deletion minors, the
// derivatives of F(A) = sigma_k(lambda(A)) and Garding cone membership.
//
// Index convention: all indices are 0-based and refer to positions in the
// descending-sorted eigenvalue vector (lambda_0 >= lambda_1 >= ...).

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hypk {

/// A real spectrum sorted descending. The permutation back to the caller's
/// ordering is kept so that matrix-basis operations can be undone.
class EigenVector {
 public:
  explicit EigenVector(std::vector<double> values);
  EigenVector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  int dim() const noexcept { return static_cast<int>(values_.size()); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  // original_index()[i] is the position in the constructor input of the
  // i-th largest value.
  const std::vector<std::size_t>& original_index() const noexcept { return origin_; }

  // Reorders a vector given in the caller's original ordering into sorted order.
  std::vector<double> to_sorted_order(std::span<const double> original) const;

  EigenVector scaled(double t) const;

 private:
  std::vector<double> values_;
  std::vector<std::size_t> origin_;
};

/// Symmetric n x n matrix (symmetric to 1e-14 absolute per entry).
class SymMatrix {
 public:
  explicit SymMatrix(Eigen::MatrixXd entries);
  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  static constexpr double kSymmetryTolerance = 1e-14;

 private:
  Eigen::MatrixXd m_;
};

// sigma_k by the prefix recursion e_k(m) = e_k(m-1) + x_m e_{k-1}(m-1).
// Returns 0 for k < 0 or k > x.size(); this is the convention used for
// vanishing minors (sigma_{-1} = 0, sigma_n(lambda|i) = 0).
double elementary_symmetric(std::span<const double> x, int k) noexcept;

// All of e_0..e_kmax in one pass.
std::vector<double> elementary_symmetric_all(std::span<const double> x, int kmax);

/// sigma_k(lambda), 0 <= k <= n; DomainError otherwise.
double sigma(const EigenVector& lam, int k);

/// sigma_k of lambda with the listed components removed (|drop| <= 2,
/// distinct, in range, k <= n - |drop|).
double sigma_minor(const EigenVector& lam, int k, std::initializer_list<std::size_t> drop);
double sigma_minor(const EigenVector& lam, int k, std::span<const std::size_t> drop);

struct ConeMembership {
  bool inside = false;
  double margin = 0.0;        // min_{1<=j<=k} sigma_j
  int weakest_order = 0;      // the j attaining the margin
};

/// Gamma_k = { sigma_j > 0 for 1 <= j <= k }.
ConeMembership in_gamma_k(const EigenVector& lam, int k);

/// First and second derivatives of sigma_k at a diagonal matrix.
struct SigmaDerivatives {
  int k = 0;
  double value = 0.0;
  Eigen::VectorXd grad_diag;   // sigma_k^{pp} = sigma_{k-1}(lambda|p)
  Eigen::MatrixXd hess_pairs;  // (p,r), p != r: sigma_{k-2}(lambda|pr); zero diagonal

  // sigma_k^{pp,rr}
  double second_diag(int p, int r) const { return hess_pairs(p, r); }
  // sigma_k^{pq,qp}
  double second_cross(int p, int q) const { return -hess_pairs(p, q); }
};

SigmaDerivatives sigma_jet_diag(const EigenVector& lam, int k);

/// sigma_k(lambda(A)) through a symmetric eigendecomposition.
double sigma_of_matrix(const SymMatrix& a, int k);

/// F^{pq} = dF/da_pq for F(A) = sigma_k(lambda(A)), in the ambient basis.
SymMatrix sigma_grad_matrix(const SymMatrix& a, int k);

/// d^2/dt^2 F(A + tB) at t = 0, i.e. F^{pq,rs} b_pq b_rs.
double sigma_hessian_contract(const SymMatrix& a, const SymMatrix& b, int k);

/// Residuals of the three exact deletion identities. Each is an absolute
/// residual; `scale` = max(1, |sigma_k|) turns them into relative ones.
struct IdentityResiduals {
  double deletion = 0.0;        // max_i |s_k - l_i s_{k-1}(l|i) - s_k(l|i)|
  double sum_of_minors = 0.0;   // |sum_i s_k(l|i) - (n-k) s_k|
  double euler = 0.0;           // |sum_i l_i s_{k-1}(l|i) - k s_k|
  double scale = 1.0;

  double max_relative() const;
};

IdentityResiduals identity_residuals(const EigenVector& lam, int k);

/// Four classical bounds for lambda in Gamma_k (sorted descending).
struct ConeBoundsReport {
  // -lambda_i <= (n-k)/k lambda_1 for every lambda_i <= 0. margin =
  // min over such i of ((n-k)/k lambda_1 + lambda_i); +inf when vacuous.
  bool negative_entries_bounded = true;
  double negative_entries_margin = 0.0;

  // sigma_l >= lambda_1 ... lambda_l for 1 <= l < k. margin = min over l of
  // the difference; +inf when k = 1.
  bool leading_products_bounded = true;
  double leading_products_margin = 0.0;

  // lambda_1 sigma_{k-1}(lambda|1) / sigma_k; the unnamed constant C(n,k)
  // is estimated downstream as an infimum of this ratio.
  double top_ratio = 0.0;

  // sum_i lambda_i^2 sigma_{k-1}(lambda|i) - (k/n) sigma_1 sigma_k >= 0.
  bool weighted_square_bounded = true;
  double weighted_square_margin = 0.0;

  double scale = 1.0;  // tolerance scale used for the boolean verdicts
};

/// PreconditionError when lambda is not in Gamma_k.
ConeBoundsReport cone_bounds_report(const EigenVector& lam, int k, double rel_tol = 1e-10);

}  // namespace hypk
