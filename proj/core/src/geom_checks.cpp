#include "hypk/geom_checks.hpp"

#include "hypk/errors.hpp"
#include "hypk/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace hypk {

namespace {

void require_depth(const SurfaceJet& jet, int depth, const char* what) {
  if (jet.depth < depth) {
    throw PreconditionError(std::string(what) + ": jet depth " + std::to_string(jet.depth) + " < " +
                            std::to_string(depth));
  }
}

double kd(int a, int b) { return a == b ? 1.0 : 0.0; }

}  // namespace

double check_phi_hessian(const SurfaceJet& jet) {
  require_depth(jet, 1, "check_phi_hessian");
  const int n = jet.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = jet.hess_Phi(i, j) - jet.warp.phi_prime * kd(i, j) + jet.h_on(i, j) * jet.u;
      s += d * d;
    }
  return std::sqrt(s);
}

std::pair<double, double> check_support_derivs(const SurfaceJet& jet) {
  require_depth(jet, 1, "check_support_derivs");
  const int n = jet.n;
  const auto& h = jet.h_on;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double rhs = 0.0;
    for (int k = 0; k < n; ++k) rhs += h(i, k) * jet.grad_Phi(k);
    const double d = jet.grad_u(i) - rhs;
    s1 += d * d;
    for (int j = 0; j < n; ++j) {
      double r2 = jet.warp.phi_prime * h(i, j);
      for (int k = 0; k < n; ++k) {
        r2 += jet.h_cov1(i, j, k) * jet.grad_Phi(k);
        r2 -= h(i, k) * h(j, k) * jet.u;
      }
      const double e = jet.hess_u(i, j) - r2;
      s2 += e * e;
    }
  }
  return {std::sqrt(s1), std::sqrt(s2)};
}

std::pair<double, double> check_gauss_codazzi(const SurfaceJet& jet) {
  require_depth(jet, 1, "check_gauss_codazzi");
  const int n = jet.n;
  const auto& h = jet.h_on;
  double sg = 0.0, sc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double c = jet.h_cov1(i, j, k) - jet.h_cov1(i, k, j);
        sc += c * c;
        for (int l = 0; l < n; ++l) {
          const double rhs = -(kd(i, k) * kd(j, l) - kd(i, l) * kd(j, k)) + (h(i, k) * h(j, l) - h(i, l) * h(j, k));
          const double d = jet.riemann(i, j, k, l) - rhs;
          sg += d * d;
        }
      }
  return {std::sqrt(sg), std::sqrt(sc)};
}

double interchange_defect(const SurfaceJet& jet, int i, int j, int k, int l) {
  require_depth(jet, 2, "interchange");
  const int n = jet.n;
  const auto& h = jet.h_on;
  const auto& h2 = jet.h_cov2;
  double rhs = h2(i, j, k, l) + kd(l, i) * h(j, k) - kd(j, i) * h(l, k) + kd(l, k) * h(i, j) - kd(j, k) * h(i, l);
  for (int m = 0; m < n; ++m) {
    rhs -= h(m, k) * (h(j, m) * h(l, i) - h(j, i) * h(l, m));
    rhs -= h(i, m) * (h(j, m) * h(l, k) - h(j, k) * h(l, m));
  }
  return h2(k, l, i, j) - rhs;
}

double check_interchange(const SurfaceJet& jet) {
  require_depth(jet, 2, "check_interchange");
  const int n = jet.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double d = interchange_defect(jet, i, j, k, l);
          s += d * d;
        }
  return std::sqrt(s);
}

void GeomResiduals::absorb(const GeomResiduals& o) {
  phi_hessian = std::max(phi_hessian, o.phi_hessian);
  support_first = std::max(support_first, o.support_first);
  support_second = std::max(support_second, o.support_second);
  gauss = std::max(gauss, o.gauss);
  codazzi = std::max(codazzi, o.codazzi);
  interchange = std::max(interchange, o.interchange);
  has_interchange = has_interchange || o.has_interchange;
}

GeomResiduals check_all(const SurfaceJet& jet) {
  require_depth(jet, 1, "check_all");
  GeomResiduals r;
  r.phi_hessian = check_phi_hessian(jet);
  std::tie(r.support_first, r.support_second) = check_support_derivs(jet);
  std::tie(r.gauss, r.codazzi) = check_gauss_codazzi(jet);
  if (jet.depth >= 2) {
    r.interchange = check_interchange(jet);
    r.has_interchange = true;
  }
  return r;
}

const std::vector<std::string>& residual_kinds() {
  static const std::vector<std::string> kinds = {"phi_hessian", "support_first", "support_second",
                                                 "gauss",       "codazzi",       "interchange"};
  return kinds;
}

double residual_by_kind(const GeomResiduals& r, const std::string& kind) {
  if (kind == "phi_hessian") return r.phi_hessian;
  if (kind == "support_first") return r.support_first;
  if (kind == "support_second") return r.support_second;
  if (kind == "gauss") return r.gauss;
  if (kind == "codazzi") return r.codazzi;
  if (kind == "interchange") return r.interchange;
  throw DomainError("unknown residual kind '" + kind + "'");
}

std::vector<GridSite> default_check_sites(const RadialGraph& graph, int count) {
  const int nt = graph.n_theta();
  const int lo = static_cast<int>(std::ceil(0.2 * nt - 0.5));
  const int hi = std::max(lo, static_cast<int>(std::floor(0.8 * nt - 0.5)));
  std::vector<GridSite> sites;
  if (count <= 0) {
    for (int j = lo; j <= hi; ++j)
      for (int m = 0; m < graph.n_phi(); ++m) sites.push_back({j, m});
    return sites;
  }
  for (int s = 0; s < count; ++s) {
    const int j = count == 1 ? (lo + hi) / 2 : lo + static_cast<int>(std::lround(double(hi - lo) * s / (count - 1)));
    const int m = graph.mode() == GraphMode::kFullSphere ? (s * graph.n_phi()) / count : 0;
    sites.push_back({j, m});
  }
  return sites;
}

GeomSweep geom_sweep(const RadialGraph& graph, const std::vector<GridSite>& sites, const JetOptions& options,
                     unsigned workers) {
  GeomSweep sweep;
  sweep.sites.resize(sites.size());
  for_each_chunk(sites.size(), workers, [&](std::size_t i) {
    const SurfaceJet jet = surface_jet(graph, sites[i], options);
    sweep.sites[i] = SiteResiduals{sites[i], check_all(jet)};
    return false;
  });
  for (const auto& s : sweep.sites) sweep.max.absorb(s.residuals);
  return sweep;
}

}  // namespace hypk
