#include "hypk/surface_jet.hpp"

#include "hypk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <utility>

namespace hypk {

namespace {

struct Weights {
  // f'(0) ~ sum_k first[k-1] (f(k) - f(-k)) / h
  std::vector<double> first;
  // f''(0) ~ (center f(0) + sum_k second[k-1] (f(k) + f(-k))) / h^2
  double center = 0.0;
  std::vector<double> second;
};

Weights weights_for(int order) {
  if (order == 2) return Weights{{0.5}, -2.0, {1.0}};
  return Weights{{8.0 / 12.0, -1.0 / 12.0}, -30.0 / 12.0, {16.0 / 12.0, -1.0 / 12.0}};
}

// Level-0 data at a node: everything computable from r and its first two
// derivatives. Components refer to the round-sphere frame e_a.
struct Node0 {
  double theta = 0.0;
  double sin_t = 0.0;
  double cot_t = 0.0;
  Warping warp;
  Eigen::VectorXd dr;
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Eigen::MatrixXd h;
  Eigen::MatrixXd frame;
  Eigen::VectorXd nu;
  double W = 0.0;
  double u = 0.0;
  Tensor3 gamma;  // gamma(i, j, k) = < nabla_{e_i} e_j, e_k > on the round sphere
};

// Level-1 data: one more derivative, taken across neighbouring nodes.
struct Node1 {
  Tensor3 D;       // D(i, j, p): difference of the g and sphere connections
  Tensor3 G;       // G(i, j, p) = < nabla^g_{e_i} e_j, e_p >_sigma-components
  Tensor3 h1;      // h1(a, b, c) = (nabla_c h)(e_a, e_b)
  Eigen::VectorXd dPhi;
  Eigen::VectorXd du;
};

Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& g, FrameOrder order) {
  const int n = static_cast<int>(g.rows());
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const int axis = order == FrameOrder::kForward ? col : n - 1 - col;
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, axis);
    for (int prev = 0; prev < col; ++prev) {
      const Eigen::VectorXd f = frame.col(prev);
      v -= (f.dot(g * v)) * f;
    }
    const double norm2 = v.dot(g * v);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw GeometryError("induced metric is not positive definite");
    frame.col(col) = v / std::sqrt(norm2);
  }
  return frame;
}

Tensor3 to_frame(const Tensor3& t, const Eigen::MatrixXd& e) {
  const int n = t.dim();
  Tensor3 a(n), b(n), c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int p = 0; p < n; ++p) s += t(i, j, p) * e(p, k);
        a(i, j, k) = s;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int p = 0; p < n; ++p) s += a(i, p, k) * e(p, j);
        b(i, j, k) = s;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int p = 0; p < n; ++p) s += b(p, j, k) * e(p, i);
        c(i, j, k) = s;
      }
  return c;
}

Tensor4 to_frame(const Tensor4& t, const Eigen::MatrixXd& e) {
  const int n = t.dim();
  Tensor4 cur = t;
  for (int slot = 3; slot >= 0; --slot) {
    Tensor4 next(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            int idx[4] = {i, j, k, l};
            const int out = idx[slot];
            double s = 0.0;
            for (int p = 0; p < n; ++p) {
              idx[slot] = p;
              s += cur(idx[0], idx[1], idx[2], idx[3]) * e(p, out);
            }
            next(i, j, k, l) = s;
          }
    cur = std::move(next);
  }
  return cur;
}

class Engine {
 public:
  Engine(const RadialGraph& graph, FrameOrder order)
      : graph_(graph), n_(graph.n()), full_(graph.mode() == GraphMode::kFullSphere),
        w_(weights_for(graph.fd_order())), order_(order) {}

  const Node0& level0(int j, int m) {
    const auto key = normalize(j, m);
    auto it = cache0_.find(key);
    if (it == cache0_.end()) it = cache0_.emplace(key, compute0(key.first, key.second)).first;
    return it->second;
  }

  const Node1& level1(int j, int m) {
    const auto key = normalize(j, m);
    auto it = cache1_.find(key);
    if (it == cache1_.end()) it = cache1_.emplace(key, compute1(key.first, key.second)).first;
    return it->second;
  }

  SurfaceJet jet(GridSite s, int depth);

 private:
  std::pair<int, int> normalize(int j, int m) const {
    if (!full_) return {j, 0};
    const int np = graph_.n_phi();
    return {j, ((m % np) + np) % np};
  }

  double r_at(int j, int m) const { return graph_.value({j, m}); }

  // Derivative of a node field along e_c. `get` maps (j, m) to a flat vector.
  template <class Get>
  Eigen::VectorXd frame_derivative(int c, int j, int m, double sin_t, Get&& get) {
    if (c >= 1 && !full_) {
      const Eigen::VectorXd f0 = get(j, m);
      return Eigen::VectorXd::Zero(f0.size());
    }
    Eigen::VectorXd acc;
    for (std::size_t k = 0; k < w_.first.size(); ++k) {
      const int s = static_cast<int>(k) + 1;
      Eigen::VectorXd diff = c == 0 ? Eigen::VectorXd(get(j + s, m) - get(j - s, m))
                                    : Eigen::VectorXd(get(j, m + s) - get(j, m - s));
      if (k == 0) {
        acc = w_.first[k] * diff;
      } else {
        acc += w_.first[k] * diff;
      }
    }
    const double step = c == 0 ? graph_.dtheta() : graph_.dphi() * sin_t;
    return acc / step;
  }

  Node0 compute0(int j, int m);
  Node1 compute1(int j, int m);

  const RadialGraph& graph_;
  int n_;
  bool full_;
  Weights w_;
  FrameOrder order_;
  std::map<std::pair<int, int>, Node0> cache0_;
  std::map<std::pair<int, int>, Node1> cache1_;
};

Node0 Engine::compute0(int j, int m) {
  Node0 nd;
  const int n = n_;
  nd.theta = graph_.theta(j);
  nd.sin_t = std::sin(nd.theta);
  nd.cot_t = std::cos(nd.theta) / nd.sin_t;
  const double r0 = r_at(j, m);
  const double ht = graph_.dtheta();

  double rt = 0.0, rtt = w_.center * r0;
  for (std::size_t k = 0; k < w_.first.size(); ++k) {
    const int s = static_cast<int>(k) + 1;
    rt += w_.first[k] * (r_at(j + s, m) - r_at(j - s, m));
    rtt += w_.second[k] * (r_at(j + s, m) + r_at(j - s, m));
  }
  rt /= ht;
  rtt /= ht * ht;

  nd.dr = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
  nd.dr(0) = rt;
  hess(0, 0) = rtt;
  if (full_) {
    const double hp = graph_.dphi();
    double rp = 0.0, rpp = w_.center * r0, rtp = 0.0;
    for (std::size_t k = 0; k < w_.first.size(); ++k) {
      const int s = static_cast<int>(k) + 1;
      rp += w_.first[k] * (r_at(j, m + s) - r_at(j, m - s));
      rpp += w_.second[k] * (r_at(j, m + s) + r_at(j, m - s));
      for (std::size_t q = 0; q < w_.first.size(); ++q) {
        const int t = static_cast<int>(q) + 1;
        rtp += w_.first[k] * w_.first[q] *
               ((r_at(j + s, m + t) - r_at(j + s, m - t)) - (r_at(j - s, m + t) - r_at(j - s, m - t)));
      }
    }
    rp /= hp;
    rpp /= hp * hp;
    rtp /= ht * hp;
    const double s = nd.sin_t;
    nd.dr(1) = rp / s;
    hess(0, 1) = hess(1, 0) = rtp / s - nd.cot_t * rp / s;
    hess(1, 1) = rpp / (s * s) + nd.cot_t * rt;
  } else {
    for (int a = 1; a < n; ++a) hess(a, a) = nd.cot_t * rt;
  }

  nd.warp = warping(r0);
  const double phi = nd.warp.phi;
  const double dphi = nd.warp.phi_prime;
  nd.W = std::sqrt(phi * phi + nd.dr.squaredNorm());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  nd.g = nd.dr * nd.dr.transpose() + phi * phi * I;
  nd.h = (-phi * hess + 2.0 * dphi * nd.dr * nd.dr.transpose() + phi * phi * dphi * I) / nd.W;
  nd.u = phi * phi / nd.W;
  if (!(nd.u > 0.0)) throw GeometryError("support function is not positive");
  nd.nu = Eigen::VectorXd(n + 1);
  nd.nu(0) = phi / nd.W;
  nd.nu.tail(n) = -nd.dr / nd.W;
  nd.frame = gram_schmidt(nd.g, order_);
  nd.g_inv = nd.frame * nd.frame.transpose();

  nd.gamma = Tensor3(n);
  for (int a = 1; a < n; ++a) {
    nd.gamma(a, a, 0) = -nd.cot_t;
    nd.gamma(a, 0, a) = nd.cot_t;
  }
  return nd;
}

Node1 Engine::compute1(int j, int m) {
  const int n = n_;
  const Node0 c0 = level0(j, m);
  const double sin_t = c0.sin_t;
  const auto& gam = c0.gamma;

  auto field_g = [&](int jj, int mm) -> Eigen::VectorXd {
    const auto& nd = level0(jj, mm);
    return Eigen::Map<const Eigen::VectorXd>(nd.g.data(), n * n);
  };
  auto field_h = [&](int jj, int mm) -> Eigen::VectorXd {
    const auto& nd = level0(jj, mm);
    return Eigen::Map<const Eigen::VectorXd>(nd.h.data(), n * n);
  };
  auto field_Phi = [&](int jj, int mm) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, level0(jj, mm).warp.Phi);
  };
  auto field_u = [&](int jj, int mm) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, level0(jj, mm).u);
  };

  Tensor3 ng(n);  // ng(c, a, b) = (nabla^sigma_c g)(a, b)
  Node1 out;
  out.h1 = Tensor3(n);
  out.dPhi = Eigen::VectorXd(n);
  out.du = Eigen::VectorXd(n);
  std::vector<Eigen::MatrixXd> eh(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    const Eigen::VectorXd eg = frame_derivative(c, j, m, sin_t, field_g);
    const Eigen::VectorXd ehc = frame_derivative(c, j, m, sin_t, field_h);
    eh[static_cast<std::size_t>(c)] = Eigen::Map<const Eigen::MatrixXd>(ehc.data(), n, n);
    out.dPhi(c) = frame_derivative(c, j, m, sin_t, field_Phi)(0);
    out.du(c) = frame_derivative(c, j, m, sin_t, field_u)(0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double v = eg(a + n * b);
        for (int k = 0; k < n; ++k) v -= gam(c, a, k) * c0.g(k, b) + gam(c, b, k) * c0.g(a, k);
        ng(c, a, b) = v;
      }
  }

  out.D = Tensor3(n);
  out.G = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int p = 0; p < n; ++p) {
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += c0.g_inv(p, q) * (ng(i, k, q) + ng(k, i, q) - ng(q, i, k));
        out.D(i, k, p) = 0.5 * s;
        out.G(i, k, p) = gam(i, k, p) + out.D(i, k, p);
      }

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = eh[static_cast<std::size_t>(c)](a, b);
        for (int p = 0; p < n; ++p) v -= out.G(c, a, p) * c0.h(p, b) + out.G(c, b, p) * c0.h(a, p);
        out.h1(a, b, c) = v;
      }
  return out;
}

SurfaceJet Engine::jet(GridSite s, int depth) {
  const int n = n_;
  const int j = s.j, m = s.m;
  const Node0 c0 = level0(j, m);
  SurfaceJet jet;
  jet.n = n;
  jet.depth = depth;
  jet.site = s;
  jet.theta = c0.theta;
  jet.phi = full_ ? graph_.phi(m) : 0.0;
  jet.warp = c0.warp;
  jet.g = c0.g;
  jet.g_inv = c0.g_inv;
  jet.h = c0.h;
  jet.frame = c0.frame;
  jet.nu = c0.nu;
  jet.u = c0.u;
  const Eigen::MatrixXd& E = c0.frame;
  jet.h_on = E.transpose() * c0.h * E;
  jet.h_on = 0.5 * (jet.h_on + jet.h_on.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jet.h_on, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("principal curvature eigenproblem failed");
  jet.kappa.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(jet.kappa.begin(), jet.kappa.end(), std::greater<>());
  if (depth <= 0) return jet;

  const Node1 c1 = level1(j, m);
  const double sin_t = c0.sin_t;
  const auto& G = c1.G;
  const auto& gam = c0.gamma;
  jet.h_cov1 = to_frame(c1.h1, E);
  jet.grad_Phi = E.transpose() * c1.dPhi;
  jet.grad_u = E.transpose() * c1.du;

  auto field_dPhi = [&](int jj, int mm) -> Eigen::VectorXd { return level1(jj, mm).dPhi; };
  auto field_du = [&](int jj, int mm) -> Eigen::VectorXd { return level1(jj, mm).du; };
  auto field_D = [&](int jj, int mm) -> Eigen::VectorXd {
    const auto& d = level1(jj, mm).D.data();
    return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  };

  Eigen::MatrixXd hPhi(n, n), hu(n, n);
  Tensor4 nD(n);  // nD(c, i, k, p) = (nabla^sigma_c D)(e_i, e_k)^p
  std::vector<Eigen::VectorXd> eD(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const Eigen::VectorXd ePhi = frame_derivative(a, j, m, sin_t, field_dPhi);
    const Eigen::VectorXd eu = frame_derivative(a, j, m, sin_t, field_du);
    for (int b = 0; b < n; ++b) {
      double vp = ePhi(b), vu = eu(b);
      for (int p = 0; p < n; ++p) {
        vp -= G(a, b, p) * c1.dPhi(p);
        vu -= G(a, b, p) * c1.du(p);
      }
      hPhi(a, b) = vp;
      hu(a, b) = vu;
    }
    eD[static_cast<std::size_t>(a)] = frame_derivative(a, j, m, sin_t, field_D);
  }
  const auto& D = c1.D;
  for (int c = 0; c < n; ++c) {
    const Eigen::VectorXd& ed = eD[static_cast<std::size_t>(c)];
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < n; ++p) {
          double v = ed((i * n + k) * n + p);
          for (int q = 0; q < n; ++q) {
            v -= gam(c, i, q) * D(q, k, p) + gam(c, k, q) * D(i, q, p);
            v += gam(c, q, p) * D(i, k, q);
          }
          nD(c, i, k, p) = v;
        }
  }
  Tensor4 rvec(n);  // R(e_i, e_j) e_k, component p
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < n; ++p) {
          double v = (jj == k && i == p ? 1.0 : 0.0) - (i == k && jj == p ? 1.0 : 0.0);
          v += nD(i, jj, k, p) - nD(jj, i, k, p);
          for (int q = 0; q < n; ++q) v += D(jj, k, q) * D(i, q, p) - D(i, k, q) * D(jj, q, p);
          rvec(i, jj, k, p) = v;
        }
  Tensor4 rcov(n);  // < R(e_i, e_j) e_l, e_k >_g
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int p = 0; p < n; ++p) v += rvec(i, jj, l, p) * c0.g(p, k);
          rcov(i, jj, k, l) = v;
        }
  jet.riemann = to_frame(rcov, E);
  jet.hess_Phi = E.transpose() * hPhi * E;
  jet.hess_u = E.transpose() * hu * E;
  if (depth <= 1) return jet;

  auto field_h1 = [&](int jj, int mm) -> Eigen::VectorXd {
    const auto& d = level1(jj, mm).h1.data();
    return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  };
  Tensor4 h2(n);
  const auto& h1 = c1.h1;
  for (int d = 0; d < n; ++d) {
    const Eigen::VectorXd e1 = frame_derivative(d, j, m, sin_t, field_h1);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double v = e1((a * n + b) * n + c);
          for (int p = 0; p < n; ++p) {
            v -= G(d, a, p) * h1(p, b, c) + G(d, b, p) * h1(a, p, c) + G(d, c, p) * h1(a, b, p);
          }
          h2(a, b, c, d) = v;
        }
  }
  jet.h_cov2 = to_frame(h2, E);
  return jet;
}

}  // namespace

SurfaceJet surface_jet(const RadialGraph& graph, GridSite site, const JetOptions& options) {
  if (options.depth < 0 || options.depth > 2) throw DomainError("surface_jet: depth must be 0, 1 or 2");
  if (site.j < 0 || site.j >= graph.n_theta() || site.m < 0 || site.m >= graph.n_phi()) {
    throw DomainError("surface_jet: site outside the grid");
  }
  Engine engine(graph, options.frame);
  return engine.jet(site, options.depth);
}

SiteCurvature site_curvature(const RadialGraph& graph, GridSite site) {
  const SurfaceJet j = surface_jet(graph, site, JetOptions{0, FrameOrder::kForward});
  return SiteCurvature{j.kappa, j.u, j.warp.r, j.nu};
}

}  // namespace hypk
