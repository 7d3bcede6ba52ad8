#include "hypk/diagnostics.hpp"

#include "hypk/errors.hpp"
#include "hypk/parallel.hpp"
#include "hypk/surface_jet.hpp"
#include "hypk/symmfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypk {

namespace {

QMaximum locate_max(const std::vector<SiteDiagnostics>& sites, double SiteDiagnostics::*field) {
  QMaximum q;
  for (const auto& s : sites) {
    if (!s.q_included) continue;
    if (!q.found || s.*field > q.value) {
      q.found = true;
      q.value = s.*field;
      q.site = s.site;
    }
  }
  if (!q.found) return q;
  const double tol = 1e-12 * (1.0 + std::abs(q.value));
  for (const auto& s : sites) {
    if (s.q_included && s.*field >= q.value - tol) ++q.ties;
  }
  return q;
}

}  // namespace

DiagnosticsReport diagnostics(const RadialGraph& graph, int k, const DiagnosticsOptions& options, unsigned workers) {
  if (k < 1 || k > graph.n()) throw DomainError("diagnostics: k outside [1, n]");
  DiagnosticsReport rep;
  rep.n = graph.n();
  rep.k = k;
  rep.N = options.N;
  rep.alpha = options.alpha;
  const int count = graph.size();
  rep.sites.resize(static_cast<std::size_t>(count));
  for_each_chunk(static_cast<std::size_t>(count), workers, [&](std::size_t i) {
    const GridSite site = graph.site_of(static_cast<int>(i));
    const SiteCurvature c = site_curvature(graph, site);
    SiteDiagnostics& d = rep.sites[i];
    d.site = site;
    d.theta = graph.theta(site.j);
    d.phi = graph.mode() == GraphMode::kFullSphere ? graph.phi(site.m) : 0.0;
    d.r = c.r;
    d.kappa = c.kappa;
    d.u = c.u;
    d.Phi = warping(c.r).Phi;
    d.cone_margin = in_gamma_k(EigenVector(c.kappa), k).margin;
    return false;
  });

  rep.u_min = std::numeric_limits<double>::infinity();
  rep.u_max = -std::numeric_limits<double>::infinity();
  rep.cone_margin = std::numeric_limits<double>::infinity();
  double kappa_min = std::numeric_limits<double>::infinity();
  for (const auto& d : rep.sites) {
    rep.u_min = std::min(rep.u_min, d.u);
    rep.u_max = std::max(rep.u_max, d.u);
    rep.cone_margin = std::min(rep.cone_margin, d.cone_margin);
    for (double kv : d.kappa) {
      rep.max_abs_kappa = std::max(rep.max_abs_kappa, std::abs(kv));
      kappa_min = std::min(kappa_min, kv);
    }
  }
  rep.K_semiconvex = std::max(0.0, -kappa_min);
  rep.a = 0.5 * rep.u_min;

  for (auto& d : rep.sites) {
    d.q_included = d.kappa.front() > 0.0;
    if (!d.q_included) {
      ++rep.excluded_sites;
      continue;
    }
    const double lk = std::log(d.kappa.front());
    d.q_general = lk - options.N * std::log(d.u) + options.alpha * d.Phi;
    d.q_measure = lk - std::log(d.u - rep.a) + options.alpha * d.Phi;
  }
  rep.q_general_max = locate_max(rep.sites, &SiteDiagnostics::q_general);
  rep.q_measure_max = locate_max(rep.sites, &SiteDiagnostics::q_measure);
  return rep;
}

}  // namespace hypk
