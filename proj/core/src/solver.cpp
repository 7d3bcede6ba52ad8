#include "hypk/solver.hpp"

#include "hypk/errors.hpp"
#include "hypk/parallel.hpp"
#include "hypk/surface_jet.hpp"
#include "hypk/symmfunc.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hypk {

namespace {

constexpr std::size_t kSitesPerChunk = 128;

struct NodeEval {
  double residual = 0.0;
  double sigma = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool admissible = false;
};

RhsPoint make_point(const RadialGraph& graph, GridSite site, int k, const SiteCurvature& c) {
  RhsPoint p;
  p.r = c.r;
  p.theta = graph.theta(site.j);
  p.phi = graph.mode() == GraphMode::kFullSphere ? graph.phi(site.m) : 0.0;
  p.nu_r = c.nu(0);
  p.nu_theta = c.nu(1);
  p.nu_phi = graph.mode() == GraphMode::kFullSphere ? c.nu(2) : 0.0;
  p.u = c.u;
  p.n = graph.n();
  p.k = k;
  return p;
}

NodeEval eval_node(const RadialGraph& graph, const PrescribedRHS& rhs, int k, GridSite site) {
  const SiteCurvature c = site_curvature(graph, site);
  const EigenVector kappa(c.kappa);
  const ConeMembership cone = in_gamma_k(kappa, k);
  NodeEval e;
  e.sigma = sigma(kappa, k);
  e.rhs = rhs.value(make_point(graph, site, k, c));
  e.residual = e.sigma - e.rhs;
  e.margin = cone.margin;
  e.admissible = cone.inside;
  return e;
}

template <class Fn>
void for_sites(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t chunks = (count + kSitesPerChunk - 1) / kSitesPerChunk;
  for_each_chunk(chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(count, (c + 1) * kSitesPerChunk);
    for (std::size_t i = c * kSitesPerChunk; i < end; ++i) fn(i);
    return false;
  });
}

// Columns that share no residual node get the same colour, so one pair of
// perturbed evaluations recovers all their Jacobian entries.
struct Coloring {
  std::vector<std::vector<int>> deps;     // per residual node
  std::vector<std::vector<int>> affects;  // per unknown
  std::vector<std::vector<int>> groups;   // unknowns per colour
  std::vector<int> color;
};

Coloring color_columns(const RadialGraph& graph) {
  const int n = graph.size();
  Coloring c;
  c.deps.resize(static_cast<std::size_t>(n));
  c.affects.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    c.deps[static_cast<std::size_t>(s)] = graph.level0_dependencies(graph.site_of(s));
    for (int j : c.deps[static_cast<std::size_t>(s)]) c.affects[static_cast<std::size_t>(j)].push_back(s);
  }
  c.color.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<char>> claimed;
  for (int j = 0; j < n; ++j) {
    const auto& aff = c.affects[static_cast<std::size_t>(j)];
    int col = 0;
    for (;; ++col) {
      if (col == static_cast<int>(claimed.size())) {
        claimed.emplace_back(static_cast<std::size_t>(n), 0);
        c.groups.emplace_back();
      }
      const auto& cl = claimed[static_cast<std::size_t>(col)];
      if (std::none_of(aff.begin(), aff.end(), [&](int s) { return cl[static_cast<std::size_t>(s)] != 0; })) break;
    }
    for (int s : aff) claimed[static_cast<std::size_t>(col)][static_cast<std::size_t>(s)] = 1;
    c.color[static_cast<std::size_t>(j)] = col;
    c.groups[static_cast<std::size_t>(col)].push_back(j);
  }
  return c;
}

Eigen::SparseMatrix<double> fd_jacobian(const RadialGraph& graph, const PrescribedRHS& rhs, int k,
                                        const Coloring& col, double rel_step, unsigned workers) {
  const int n = graph.size();
  const auto& base = graph.values();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> step(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) step[static_cast<std::size_t>(j)] = rel_step * std::max(1.0, base[static_cast<std::size_t>(j)]);

  for (std::size_t g = 0; g < col.groups.size(); ++g) {
    const auto& group = col.groups[g];
    std::vector<double> plus = base, minus = base;
    std::vector<int> sites;
    for (int j : group) {
      plus[static_cast<std::size_t>(j)] += step[static_cast<std::size_t>(j)];
      minus[static_cast<std::size_t>(j)] -= step[static_cast<std::size_t>(j)];
      const auto& aff = col.affects[static_cast<std::size_t>(j)];
      sites.insert(sites.end(), aff.begin(), aff.end());
    }
    const RadialGraph gp = graph.with_values(std::move(plus));
    const RadialGraph gm = graph.with_values(std::move(minus));
    std::vector<double> value(sites.size());
    std::vector<int> column(sites.size());
    for_sites(sites.size(), workers, [&](std::size_t i) {
      const int s = sites[i];
      int owner = -1;
      for (int j : col.deps[static_cast<std::size_t>(s)]) {
        if (col.color[static_cast<std::size_t>(j)] == static_cast<int>(g)) owner = j;
      }
      const GridSite site = graph.site_of(s);
      const double rp = eval_node(gp, rhs, k, site).residual;
      const double rm = eval_node(gm, rhs, k, site).residual;
      column[i] = owner;
      value[i] = (rp - rm) / (2.0 * step[static_cast<std::size_t>(owner)]);
    });
    for (std::size_t i = 0; i < sites.size(); ++i) trip.emplace_back(sites[i], column[i], value[i]);
  }
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

std::string describe(const ResidualField& f) {
  std::ostringstream msg;
  msg.precision(6);
  msg << "max|res|=" << f.max_abs << ", margin=" << f.min_margin;
  return msg.str();
}

}  // namespace

RhsPoint rhs_point(const RadialGraph& graph, GridSite site, int k) {
  return make_point(graph, site, k, site_curvature(graph, site));
}

ResidualField residual_field(const RadialGraph& graph, const PrescribedRHS& rhs, int k, unsigned workers) {
  if (k < 1 || k > graph.n()) throw DomainError("residual_field: k outside [1, n]");
  const auto count = static_cast<std::size_t>(graph.size());
  std::vector<NodeEval> nodes(count);
  for_sites(count, workers, [&](std::size_t i) {
    nodes[i] = eval_node(graph, rhs, k, graph.site_of(static_cast<int>(i)));
  });
  ResidualField f;
  f.residual.resize(count);
  f.sigma.resize(count);
  f.rhs.resize(count);
  f.margin.resize(count);
  f.admissible.resize(count);
  f.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    f.residual[i] = nodes[i].residual;
    f.sigma[i] = nodes[i].sigma;
    f.rhs[i] = nodes[i].rhs;
    f.margin[i] = nodes[i].margin;
    f.admissible[i] = nodes[i].admissible ? 1 : 0;
    f.max_abs = std::max(f.max_abs, std::abs(nodes[i].residual));
    f.min_margin = std::min(f.min_margin, nodes[i].margin);
    f.all_admissible = f.all_admissible && nodes[i].admissible;
  }
  return f;
}

void SolverConfig::validate() const {
  if (k < 1) throw DomainError("solver: k must be >= 1");
  if (max_iterations < 1) throw DomainError("solver: max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw DomainError("solver: tolerance must be > 0");
  if (!(safeguard > 0.0 && safeguard < 1.0)) throw DomainError("solver: safeguard must lie in (0,1)");
  if (!(min_damping > 0.0 && min_damping < 1.0)) throw DomainError("solver: min_damping must lie in (0,1)");
  if (!(flow_step > 0.0)) throw DomainError("solver: flow_step must be > 0");
  if (!(fd_step > 0.0)) throw DomainError("solver: fd_step must be > 0");
}

SolveResult solve(const RadialGraph& graph0, const PrescribedRHS& rhs, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.k > graph0.n()) throw DomainError("solver: k exceeds n");
  const int k = cfg.k;
  RadialGraph graph = graph0;
  ResidualField field = residual_field(graph, rhs, k, cfg.workers);
  if (!field.all_admissible) {
    throw PreconditionError("initial graph is not admissible (kappa not in Gamma_k at some node)");
  }

  std::vector<IterationRecord> history;
  history.push_back({0, field.max_abs, 0.0, field.min_margin});
  std::optional<Coloring> coloring;
  SolveStatus status = SolveStatus::kNonConverged;
  std::string message;
  int it = 0;

  for (;;) {
    if (field.max_abs <= cfg.tolerance) {
      status = SolveStatus::kConverged;
      message = "converged: " + describe(field);
      break;
    }
    if (it >= cfg.max_iterations) {
      message = "iteration limit reached: " + describe(field);
      break;
    }
    ++it;

    const auto count = static_cast<std::size_t>(graph.size());
    Eigen::VectorXd direction(static_cast<Eigen::Index>(count));
    try {
      if (cfg.mode == SolverMode::kNewton) {
        if (!coloring) coloring = color_columns(graph);
        const Eigen::SparseMatrix<double> J = fd_jacobian(graph, rhs, k, *coloring, cfg.fd_step, cfg.workers);
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw NumericError("Jacobian factorization failed");
        const Eigen::Map<const Eigen::VectorXd> res(field.residual.data(), static_cast<Eigen::Index>(count));
        direction = lu.solve(-res);
        if (lu.info() != Eigen::Success || !direction.allFinite()) throw NumericError("Newton solve failed");
      } else {
        for (std::size_t i = 0; i < count; ++i) {
          direction(static_cast<Eigen::Index>(i)) =
              cfg.flow_step * (std::log(field.sigma[i]) - std::log(field.rhs[i]));
        }
      }
    } catch (const std::exception& e) {
      message = std::string("step computation failed at iteration ") + std::to_string(it) + ": " + e.what();
      break;
    }

    bool accepted = false;
    double t = 1.0;
    while (t >= cfg.min_damping) {
      std::vector<double> trial = graph.values();
      bool positive = true;
      for (std::size_t i = 0; i < count; ++i) {
        trial[i] += t * direction(static_cast<Eigen::Index>(i));
        positive = positive && trial[i] > 0.0 && std::isfinite(trial[i]);
      }
      if (positive) {
        try {
          RadialGraph cand = graph.with_values(std::move(trial));
          ResidualField cf = residual_field(cand, rhs, k, cfg.workers);
          if (cf.all_admissible && cf.min_margin >= cfg.safeguard * field.min_margin &&
              cf.max_abs <= field.max_abs) {
            graph = std::move(cand);
            field = std::move(cf);
            accepted = true;
            break;
          }
        } catch (const DomainError&) {
        } catch (const GeometryError&) {
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      message = "line search underflow at iteration " + std::to_string(it) + ": " + describe(field);
      break;
    }
    history.push_back({it, field.max_abs, t, field.min_margin});
  }

  DiagnosticsReport report = diagnostics(graph, k, cfg.diagnostics, cfg.workers);
  report.history = std::move(history);
  return SolveResult{status, std::move(graph), std::move(report), it, std::move(message)};
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

double sphere_sigma(double r0, int n, int k) {
  if (!(r0 > 0.0)) throw DomainError("sphere_sigma: r0 must be > 0");
  if (k < 0 || k > n) throw DomainError("sphere_sigma: k outside [0, n]");
  return binomial(n, k) * std::pow(1.0 / std::tanh(r0), k);
}

double sphere_oracle(double c, int n, int k) {
  if (k < 1 || k > n) throw DomainError("sphere_oracle: k outside [1, n]");
  const double cnk = binomial(n, k);
  if (!(c > cnk) || !std::isfinite(c)) throw DomainError("sphere_oracle: need c > C(n,k)");
  return std::atanh(std::pow(cnk / c, 1.0 / k));
}

}  // namespace hypk
