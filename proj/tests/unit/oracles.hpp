#pragma once

// Reference computations that share no code path with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// sigma_k by summing products over all k-subsets.
inline double sigma_subsets(const std::vector<double>& x, int k) {
  const int n = static_cast<int>(x.size());
  if (k < 0 || k > n) return 0.0;
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) p *= x[static_cast<std::size_t>(i)];
    }
    total += p;
  }
  return total;
}

inline std::vector<double> drop(std::vector<double> x, std::vector<int> idx) {
  std::sort(idx.rbegin(), idx.rend());
  for (int i : idx) x.erase(x.begin() + i);
  return x;
}

// Both sides of an inequality, written out term by term from subset sums.
struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap() const { return lhs - rhs; }
  double scale() const { return 1.0 + std::abs(lhs) + std::abs(rhs); }
};

inline double d1_subsets(const std::vector<double>& x, int k, int p) { return sigma_subsets(drop(x, {p}), k - 1); }
inline double d2_subsets(const std::vector<double>& x, int k, int p, int q) {
  return sigma_subsets(drop(x, {p, q}), k - 2);
}

// sigma_k / sigma_l comparison of second-order forms.
inline Sides ratio_sides(const std::vector<double>& x, const std::vector<double>& xi, int k, int l) {
  const int n = static_cast<int>(x.size());
  const double sk = sigma_subsets(x, k), sl = sigma_subsets(x, l);
  double cross_k = 0, cross_l = 0, lin_k = 0, lin_l = 0;
  for (int p = 0; p < n; ++p) {
    lin_k += d1_subsets(x, k, p) * xi[p];
    lin_l += d1_subsets(x, l, p) * xi[p];
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      cross_k += d2_subsets(x, k, p, q) * xi[p] * xi[q];
      cross_l += d2_subsets(x, l, p, q) * xi[p] * xi[q];
    }
  }
  return {-cross_k / sk + cross_l / sl, -lin_k * lin_k / (sk * sk) + lin_l * lin_l / (sl * sl)};
}

// Pinched concavity inequality; x sorted descending.
inline Sides concavity_sides(const std::vector<double>& x, const std::vector<double>& xi, int k, int l, double eps,
                             double delta0) {
  const int n = static_cast<int>(x.size());
  const double sk = sigma_subsets(x, k);
  double cross = 0, lin = 0, tail = 0;
  for (int p = 0; p < n; ++p) {
    lin += d1_subsets(x, k, p) * xi[p];
    if (p >= l) tail += d1_subsets(x, k, p) * xi[p] * xi[p];
    for (int q = 0; q < n; ++q) {
      if (p != q) cross += d2_subsets(x, k, p, q) * xi[p] * xi[q];
    }
  }
  return {-cross / sk + lin * lin / (sk * sk),
          (1.0 - eps) * xi[0] * xi[0] / (x[0] * x[0]) - delta0 * tail / (x[0] * sk)};
}

// s_{l-1}(x|pq)^2 - s_l(x|pq) s_{l-2}(x|pq).
inline double newton_minor_subsets(const std::vector<double>& x, int l, int p, int q) {
  const auto m = drop(x, {p, q});
  return sigma_subsets(m, l - 1) * sigma_subsets(m, l - 1) - sigma_subsets(m, l) * sigma_subsets(m, l - 2);
}

// r with C(n,k) coth^k r = c, by bisection.
inline double sphere_radius(double c, int n, int k) {
  double binom = 1.0;
  for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
  auto f = [&](double r) { return binom * std::pow(1.0 / std::tanh(r), k) - c; };
  double lo = 1e-6, hi = 50.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// sigma_k(lambda(A)) as the sum of the k x k principal minors of A.
inline long double principal_minor_sum(const LMatrix& a, int k) {
  const int n = static_cast<int>(a.rows());
  if (k == 0) return 1.0L;
  long double total = 0.0L;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    LMatrix sub(k, k);
    std::vector<int> rows;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) rows.push_back(i);
    }
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) sub(i, j) = a(rows[i], rows[j]);
    }
    total += sub.fullPivLu().determinant();
  }
  return total;
}

// Principal curvatures of r(theta, psi_1, ..., psi_{n-1}) in the hyperboloid
// model X = (cosh r, sinh r w) of H^{n+1} inside R^{n+1,1}. w is the usual
// hyperspherical parametrisation of S^n, so the full-sphere chart (theta, phi)
// is the case n = 2 with psi_1 = phi. Derivatives of X by central
// differences with step h. Returns kappa descending and the support function.
struct HyperboloidCurvature {
  std::vector<double> kappa;
  double u = 0.0;
};

inline HyperboloidCurvature hyperboloid_curvature(const std::function<double(const Eigen::VectorXd&)>& r,
                                                  const Eigen::VectorXd& at, double h = 1e-4) {
  const int n = static_cast<int>(at.size());
  const int dim = n + 2;
  auto omega = [n](const Eigen::VectorXd& x) {
    Eigen::VectorXd w(n + 1);
    double s = 1.0;
    for (int i = 0; i < n; ++i) {
      w(i) = s * std::cos(x(i));
      s *= std::sin(x(i));
    }
    w(n) = s;
    return w;
  };
  auto embed = [&](const Eigen::VectorXd& x) {
    const double rr = r(x);
    Eigen::VectorXd X(dim);
    X(0) = std::cosh(rr);
    X.tail(n + 1) = std::sinh(rr) * omega(x);
    return X;
  };
  auto mink = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return -a(0) * b(0) + a.tail(a.size() - 1).dot(b.tail(b.size() - 1)); };

  const Eigen::VectorXd X = embed(at);
  std::vector<Eigen::VectorXd> d1(static_cast<std::size_t>(n));
  std::vector<std::vector<Eigen::VectorXd>> d2(static_cast<std::size_t>(n), std::vector<Eigen::VectorXd>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd ea = Eigen::VectorXd::Unit(n, a) * h;
    d1[a] = (embed(at + ea) - embed(at - ea)) / (2.0 * h);
    d2[a][a] = (embed(at + ea) - 2.0 * X + embed(at - ea)) / (h * h);
    for (int b = 0; b < a; ++b) {
      Eigen::VectorXd eb = Eigen::VectorXd::Unit(n, b) * h;
      d2[a][b] = d2[b][a] =
          (embed(at + ea + eb) - embed(at + ea - eb) - embed(at - ea + eb) + embed(at - ea - eb)) / (4.0 * h * h);
    }
  }

  // Normal: Minkowski-orthogonal to X and every X_a.
  Eigen::MatrixXd m(n + 1, dim);
  Eigen::VectorXd flip = Eigen::VectorXd::Ones(dim);
  flip(0) = -1.0;
  m.row(0) = X.cwiseProduct(flip).transpose();
  for (int a = 0; a < n; ++a) m.row(a + 1) = d1[a].cwiseProduct(flip).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  Eigen::VectorXd nu = svd.matrixV().col(dim - 1);
  nu /= std::sqrt(mink(nu, nu));
  const double rr = r(at);
  Eigen::VectorXd radial(dim);
  radial(0) = std::sinh(rr);
  radial.tail(n + 1) = std::cosh(rr) * omega(at);
  if (mink(nu, radial) < 0.0) nu = -nu;

  Eigen::MatrixXd g(n, n), hh(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      g(a, b) = mink(d1[a], d1[b]);
      hh(a, b) = -mink(d2[a][b], nu);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(hh, g);
  HyperboloidCurvature out;
  for (int i = n - 1; i >= 0; --i) out.kappa.push_back(es.eigenvalues()(i));
  // u = <sinh r d_r, nu>; d_r is the unit radial field above.
  out.u = std::sinh(rr) * mink(radial, nu);
  return out;
}

}  // namespace oracle
