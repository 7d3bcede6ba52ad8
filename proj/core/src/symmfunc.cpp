#include "hypk/symmfunc.hpp"

#include "hypk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hypk {

namespace {

void check_order(int k, int n, const char* what) {
  if (k < 0 || k > n) {
    throw DomainError(std::string(what) + ": k=" + std::to_string(k) +
                      " outside [0, " + std::to_string(n) + "]");
  }
}

// lambda with up to two entries removed, preserving the order of the rest.
std::vector<double> without(std::span<const double> x, std::size_t a, std::size_t b = static_cast<std::size_t>(-1)) {
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i != a && i != b) out.push_back(x[i]);
  }
  return out;
}

// Eigenvalues sorted descending with matching eigenvector columns.
struct SortedEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

SortedEigen sorted_eigen(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) {
    throw NumericError("symmetric eigendecomposition failed");
  }
  const int n = static_cast<int>(a.rows());
  SortedEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  // Eigen returns ascending order.
  for (int i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

Eigen::VectorXd grad_diag_of(std::span<const double> lam, int k) {
  const std::size_t n = lam.size();
  Eigen::VectorXd g(static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    const auto minor = without(lam, p);
    g(static_cast<Eigen::Index>(p)) = elementary_symmetric(minor, k - 1);
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------

EigenVector::EigenVector(std::vector<double> values) {
  if (values.size() < 2) {
    throw DomainError("EigenVector requires n >= 2, got n=" + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("EigenVector entries must be finite");
  }
  origin_.resize(values.size());
  std::iota(origin_.begin(), origin_.end(), std::size_t{0});
  std::stable_sort(origin_.begin(), origin_.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  values_.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) values_[i] = values[origin_[i]];
}

EigenVector::EigenVector(std::initializer_list<double> values)
    : EigenVector(std::vector<double>(values)) {}

std::vector<double> EigenVector::to_sorted_order(std::span<const double> original) const {
  if (original.size() != values_.size()) throw DomainError("to_sorted_order: size mismatch");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = original[origin_[i]];
  return out;
}

EigenVector EigenVector::scaled(double t) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= t;
  return EigenVector(std::move(v));
}

SymMatrix::SymMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) throw DomainError("SymMatrix must be square and non-empty");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m_.cols(); ++j) {
      if (!(std::abs(m_(i, j) - m_(j, i)) <= kSymmetryTolerance)) {
        throw DomainError("SymMatrix: entries (" + std::to_string(i) + "," + std::to_string(j) +
                          ") not symmetric");
      }
    }
  }
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()),
                                            static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  return SymMatrix(std::move(m));
}

// ---------------------------------------------------------------------------

double elementary_symmetric(std::span<const double> x, int k) noexcept {
  const int m = static_cast<int>(x.size());
  if (k < 0 || k > m) return 0.0;
  if (k == 0) return 1.0;
  // e[j] holds e_j of the processed prefix; only orders <= k are needed.
  double e[64];
  std::vector<double> heap;
  double* buf = e;
  if (k + 1 > 64) {
    heap.assign(static_cast<std::size_t>(k + 1), 0.0);
    buf = heap.data();
  }
  buf[0] = 1.0;
  for (int j = 1; j <= k; ++j) buf[j] = 0.0;
  for (int i = 0; i < m; ++i) {
    const int top = std::min(k, i + 1);
    for (int j = top; j >= 1; --j) buf[j] += x[static_cast<std::size_t>(i)] * buf[j - 1];
  }
  return buf[k];
}

std::vector<double> elementary_symmetric_all(std::span<const double> x, int kmax) {
  kmax = std::max(0, std::min(kmax, static_cast<int>(x.size())));
  std::vector<double> e(static_cast<std::size_t>(kmax + 1), 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int top = std::min(kmax, static_cast<int>(i) + 1);
    for (int j = top; j >= 1; --j) e[static_cast<std::size_t>(j)] += x[i] * e[static_cast<std::size_t>(j - 1)];
  }
  return e;
}

double sigma(const EigenVector& lam, int k) {
  check_order(k, lam.dim(), "sigma");
  return elementary_symmetric(lam.values(), k);
}

double sigma_minor(const EigenVector& lam, int k, std::initializer_list<std::size_t> drop) {
  return sigma_minor(lam, k, std::span<const std::size_t>(drop.begin(), drop.size()));
}

double sigma_minor(const EigenVector& lam, int k, std::span<const std::size_t> drop) {
  const std::size_t n = lam.size();
  if (drop.size() > 2) throw DomainError("sigma_minor: at most two deleted indices");
  for (std::size_t i : drop) {
    if (i >= n) throw DomainError("sigma_minor: index " + std::to_string(i) + " out of range");
  }
  if (drop.size() == 2 && drop[0] == drop[1]) throw DomainError("sigma_minor: repeated index");
  check_order(k, static_cast<int>(n - drop.size()), "sigma_minor");
  const std::size_t none = static_cast<std::size_t>(-1);
  const auto rest = without(lam.values(), drop.empty() ? none : drop[0], drop.size() < 2 ? none : drop[1]);
  return elementary_symmetric(rest, k);
}

ConeMembership in_gamma_k(const EigenVector& lam, int k) {
  if (k < 1 || k > lam.dim()) {
    throw DomainError("in_gamma_k: k=" + std::to_string(k) + " outside [1, n]");
  }
  const auto e = elementary_symmetric_all(lam.values(), k);
  ConeMembership out;
  out.margin = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= k; ++j) {
    if (e[static_cast<std::size_t>(j)] < out.margin) {
      out.margin = e[static_cast<std::size_t>(j)];
      out.weakest_order = j;
    }
  }
  out.inside = out.margin > 0.0;
  return out;
}

SigmaDerivatives sigma_jet_diag(const EigenVector& lam, int k) {
  check_order(k, lam.dim(), "sigma_jet_diag");
  const int n = lam.dim();
  const auto x = lam.values();
  SigmaDerivatives d;
  d.k = k;
  d.value = elementary_symmetric(x, k);
  d.grad_diag = grad_diag_of(x, k);
  d.hess_pairs = Eigen::MatrixXd::Zero(n, n);
  if (k >= 2) {
    for (int p = 0; p < n; ++p) {
      for (int r = p + 1; r < n; ++r) {
        const auto minor = without(x, static_cast<std::size_t>(p), static_cast<std::size_t>(r));
        const double v = elementary_symmetric(minor, k - 2);
        d.hess_pairs(p, r) = v;
        d.hess_pairs(r, p) = v;
      }
    }
  }
  return d;
}

double sigma_of_matrix(const SymMatrix& a, int k) {
  check_order(k, a.dim(), "sigma_of_matrix");
  const auto se = sorted_eigen(a.matrix());
  return elementary_symmetric(std::span<const double>(se.values.data(), static_cast<std::size_t>(se.values.size())), k);
}

SymMatrix sigma_grad_matrix(const SymMatrix& a, int k) {
  check_order(k, a.dim(), "sigma_grad_matrix");
  const int n = a.dim();
  const auto se = sorted_eigen(a.matrix());
  std::vector<double> lam(se.values.data(), se.values.data() + n);

  double norm = 0.0;
  for (double v : lam) norm = std::max(norm, std::abs(v));
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < n; ++i) min_gap = std::min(min_gap, lam[static_cast<std::size_t>(i)] - lam[static_cast<std::size_t>(i + 1)]);

  Eigen::VectorXd g;
  if (n > 1 && min_gap < 1e-8 * std::max(norm, 1e-300)) {
    // Near multiplicity: average the diagonal gradient over a symmetric
    // deterministic stencil of eigenvalue splittings.
    const double step = 1e-7 * std::max(norm, 1.0);
    std::vector<double> plus(lam), minus(lam);
    for (int i = 0; i < n; ++i) {
      const double s = step * (0.5 * (n - 1) - i);
      plus[static_cast<std::size_t>(i)] += s;
      minus[static_cast<std::size_t>(i)] -= s;
    }
    g = 0.5 * (grad_diag_of(plus, k) + grad_diag_of(minus, k));
  } else {
    g = grad_diag_of(lam, k);
  }
  Eigen::MatrixXd f = se.vectors * g.asDiagonal() * se.vectors.transpose();
  f = 0.5 * (f + f.transpose());
  return SymMatrix(std::move(f));
}

double sigma_hessian_contract(const SymMatrix& a, const SymMatrix& b, int k) {
  check_order(k, a.dim(), "sigma_hessian_contract");
  if (a.dim() != b.dim()) throw DomainError("sigma_hessian_contract: dimension mismatch");
  if (k < 2) return 0.0;
  const int n = a.dim();
  const auto se = sorted_eigen(a.matrix());
  const Eigen::MatrixXd bt = se.vectors.transpose() * b.matrix() * se.vectors;
  const EigenVector lam(std::vector<double>(se.values.data(), se.values.data() + n));
  // lam is already sorted, so its indices match the eigenvector columns.
  const auto d = sigma_jet_diag(lam, k);
  // (f_p - f_q)/(l_p - l_q) = -sigma_{k-2}(l|pq) exactly, so the usual
  // divided-difference term needs no gap condition.
  double sum = 0.0;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      sum += d.second_diag(p, q) * bt(p, p) * bt(q, q);
      sum += d.second_cross(p, q) * bt(p, q) * bt(q, p);
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------

double IdentityResiduals::max_relative() const {
  return std::max({deletion, sum_of_minors, euler}) / scale;
}

IdentityResiduals identity_residuals(const EigenVector& lam, int k) {
  const int n = lam.dim();
  if (k < 1 || k > n) throw DomainError("identity_residuals: k outside [1, n]");
  const auto x = lam.values();
  const double sk = elementary_symmetric(x, k);
  IdentityResiduals r;
  r.scale = std::max(1.0, std::abs(sk));
  double sum_minor_k = 0.0;
  double sum_euler = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto minor = without(x, i);
    const double mk = elementary_symmetric(minor, k);        // 0 when k = n
    const double mkm1 = elementary_symmetric(minor, k - 1);
    r.deletion = std::max(r.deletion, std::abs(sk - x[i] * mkm1 - mk));
    sum_minor_k += mk;
    sum_euler += x[i] * mkm1;
  }
  r.sum_of_minors = std::abs(sum_minor_k - static_cast<double>(n - k) * sk);
  r.euler = std::abs(sum_euler - static_cast<double>(k) * sk);
  return r;
}

ConeBoundsReport cone_bounds_report(const EigenVector& lam, int k, double rel_tol) {
  const int n = lam.dim();
  if (k < 1 || k > n) throw DomainError("cone_bounds_report: k outside [1, n]");
  if (!in_gamma_k(lam, k).inside) throw PreconditionError("cone_bounds_report: lambda not in Gamma_k");
  const auto x = lam.values();
  const auto e = elementary_symmetric_all(x, k);
  const double sk = e[static_cast<std::size_t>(k)];
  const double inf = std::numeric_limits<double>::infinity();

  ConeBoundsReport rep;
  rep.scale = std::max(1.0, std::abs(sk));

  const double bound = static_cast<double>(n - k) / static_cast<double>(k) * x[0];
  rep.negative_entries_margin = inf;
  for (double v : x) {
    if (v <= 0.0) {
      const double m = bound + v;
      rep.negative_entries_margin = std::min(rep.negative_entries_margin, m);
      if (m < -rel_tol * (1.0 + std::abs(bound) + std::abs(v))) rep.negative_entries_bounded = false;
    }
  }

  rep.leading_products_margin = inf;
  double prod = 1.0;
  for (int l = 1; l < k; ++l) {
    prod *= x[static_cast<std::size_t>(l - 1)];
    const double sl = e[static_cast<std::size_t>(l)];
    const double m = sl - prod;
    rep.leading_products_margin = std::min(rep.leading_products_margin, m);
    if (m < -rel_tol * (1.0 + std::abs(sl) + std::abs(prod))) rep.leading_products_bounded = false;
  }

  const auto d = sigma_jet_diag(lam, k);
  rep.top_ratio = x[0] * d.grad_diag(0) / sk;

  double weighted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) weighted += x[i] * x[i] * d.grad_diag(static_cast<Eigen::Index>(i));
  const double rhs = static_cast<double>(k) / static_cast<double>(n) * e[1] * sk;
  rep.weighted_square_margin = weighted - rhs;
  rep.weighted_square_bounded =
      rep.weighted_square_margin >= -rel_tol * (1.0 + std::abs(weighted) + std::abs(rhs));
  return rep;
}

}  // namespace hypk
