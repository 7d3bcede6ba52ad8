#include "hypk/inequality_lab.hpp"

#include "hypk/errors.hpp"
#include "hypk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace hypk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_cone(const EigenVector& lam, int k, const char* what) {
  if (k < 1 || k > lam.dim()) throw DomainError(std::string(what) + ": k outside [1, n]");
  if (!in_gamma_k(lam, k).inside) throw PreconditionError(std::string(what) + ": lambda not in Gamma_k");
}

void require_direction(const EigenVector& lam, std::span<const double> xi, const char* what) {
  if (xi.size() != lam.size()) throw DomainError(std::string(what) + ": xi has wrong dimension");
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> xi) {
  return Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
}

// Off-diagonal second-derivative matrix divided by sigma: (p != q) s^{pp,qq}/s.
Eigen::MatrixXd pair_form(const SigmaDerivatives& d) { return d.hess_pairs / d.value; }

std::size_t chunk_size_for(std::size_t count) {
  constexpr std::size_t kChunk = 2048;
  return std::max<std::size_t>(1, std::min(kChunk, count));
}

}  // namespace

double GapEvaluation::scale() const { return 1.0 + std::abs(lhs) + std::abs(rhs); }

void ConcavityParams::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (n < 2) throw DomainError("ConcavityParams: n must be >= 2");
  if (!(1 <= l && l < k && k <= n)) {
    throw DomainError("ConcavityParams: need 1 <= l < k <= n (n=" + std::to_string(n) + ", k=" +
                      std::to_string(k) + ", l=" + std::to_string(l) + ")");
  }
  if (!open_unit(eps) || !open_unit(delta) || !open_unit(delta0)) {
    throw DomainError("ConcavityParams: eps, delta, delta0 must lie in (0,1)");
  }
  if (!(delta_prime > 0.0 && delta_prime < delta)) {
    throw DomainError("ConcavityParams: delta' must lie in (0, delta)");
  }
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd ratio_concavity_form(const EigenVector& lam, int k, int l) {
  require_cone(lam, k, "ratio_concavity_form");
  if (!(1 <= l && l < k)) throw DomainError("ratio_concavity_form: need 1 <= l < k");
  const auto dk = sigma_jet_diag(lam, k);
  const auto dl = sigma_jet_diag(lam, l);
  const Eigen::VectorXd gk = dk.grad_diag / dk.value;
  const Eigen::VectorXd gl = dl.grad_diag / dl.value;
  Eigen::MatrixXd lhs = -pair_form(dk) + pair_form(dl);
  Eigen::MatrixXd rhs = -gk * gk.transpose() + gl * gl.transpose();
  return lhs - rhs;
}

GapEvaluation ratio_concavity_gap(const EigenVector& lam, std::span<const double> xi, int k, int l) {
  require_cone(lam, k, "ratio_concavity_gap");
  require_direction(lam, xi, "ratio_concavity_gap");
  if (!(1 <= l && l < k)) throw DomainError("ratio_concavity_gap: need 1 <= l < k");
  const auto dk = sigma_jet_diag(lam, k);
  const auto dl = sigma_jet_diag(lam, l);
  const std::size_t n = lam.size();
  double cross_k = 0.0, cross_l = 0.0, lin_k = 0.0, lin_l = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto pi = static_cast<int>(p);
    lin_k += dk.grad_diag(pi) * xi[p];
    lin_l += dl.grad_diag(pi) * xi[p];
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      const auto qi = static_cast<int>(q);
      cross_k += dk.second_diag(pi, qi) * xi[p] * xi[q];
      cross_l += dl.second_diag(pi, qi) * xi[p] * xi[q];
    }
  }
  GapEvaluation g;
  g.lhs = -cross_k / dk.value + cross_l / dl.value;
  g.rhs = -(lin_k * lin_k) / (dk.value * dk.value) + (lin_l * lin_l) / (dl.value * dl.value);
  g.gap = g.lhs - g.rhs;
  return g;
}

// ---------------------------------------------------------------------------

NewtonMinorGap newton_minor_gap(const EigenVector& lam, int k, int l, std::size_t p, std::size_t q) {
  require_cone(lam, k, "newton_minor_gap");
  if (!(2 <= l && l < k)) throw DomainError("newton_minor_gap: need 2 <= l < k");
  if (p >= lam.size() || q >= lam.size()) throw DomainError("newton_minor_gap: index out of range");
  if (p == q) throw DomainError("newton_minor_gap: p and q must differ");
  const double sl = sigma(lam, l);
  const double sp = sigma_minor(lam, l - 1, {p});
  const double sq = sigma_minor(lam, l - 1, {q});
  const double spq_lm2 = sigma_minor(lam, l - 2, {p, q});
  const double spq_lm1 = sigma_minor(lam, l - 1, {p, q});
  const double spq_l = l <= lam.dim() - 2 ? sigma_minor(lam, l, {p, q}) : 0.0;
  NewtonMinorGap out;
  out.contracted = sp * sq - sl * spq_lm2;
  out.minors = spq_lm1 * spq_lm1 - spq_l * spq_lm2;
  out.scale = 1.0 + std::abs(sp * sq) + std::abs(sl * spq_lm2);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ClaimForms {
  Eigen::MatrixXd p;  // cross terms + eps/2 head diagonal
  Eigen::VectorXd tail_weight;  // (s_l^{ii})^2 for i >= l, zero on the head
};

ClaimForms claim_forms(const EigenVector& lam, const ConcavityParams& params) {
  const int n = lam.dim();
  const int l = params.l;
  const auto dl = sigma_jet_diag(lam, l);
  ClaimForms f{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      f.p(p, q) = dl.grad_diag(p) * dl.grad_diag(q) - dl.value * dl.second_diag(p, q);
    }
  }
  for (int i = 0; i < n; ++i) {
    const double s2 = dl.grad_diag(i) * dl.grad_diag(i);
    if (i < l) {
      f.p(i, i) += 0.5 * params.eps * s2;
    } else {
      f.tail_weight(i) = s2;
    }
  }
  return f;
}

}  // namespace

double claim_required_constant(const EigenVector& lam, std::span<const double> xi, const ConcavityParams& params) {
  params.validate();
  require_cone(lam, params.k, "claim_required_constant");
  require_direction(lam, xi, "claim_required_constant");
  const auto f = claim_forms(lam, params);
  const auto x = as_vector(xi);
  const double quad = x.dot(f.p * x);
  const double tail = x.dot(f.tail_weight.asDiagonal() * x);
  if (quad >= 0.0) return 0.0;
  if (tail <= 0.0) return kInf;
  return -quad * params.eps / tail;
}

ClaimRequirement claim_required_constant(const EigenVector& lam, const ConcavityParams& params) {
  params.validate();
  require_cone(lam, params.k, "claim_required_constant");
  const int n = lam.dim();
  const int l = params.l;
  const int t = n - l;
  const auto f = claim_forms(lam, params);

  ClaimRequirement out;
  out.worst_xi.assign(static_cast<std::size_t>(n), 0.0);
  const Eigen::MatrixXd phh = f.p.topLeftCorner(l, l);
  const Eigen::MatrixXd pht = f.p.topRightCorner(l, t);
  const Eigen::MatrixXd ptt = f.p.bottomRightCorner(t, t);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> head(phh);
  if (head.eigenvalues()(0) <= 0.0) {
    // No finite C helps: a head-only direction already violates the claim.
    out.required_c = kInf;
    for (int i = 0; i < l; ++i) out.worst_xi[static_cast<std::size_t>(i)] = head.eigenvectors()(i, 0);
    return out;
  }
  const Eigen::LLT<Eigen::MatrixXd> chol(phh);
  const Eigen::MatrixXd coupling = chol.solve(pht);  // P_hh^{-1} P_ht
  const Eigen::MatrixXd schur = ptt - pht.transpose() * coupling;
  const Eigen::VectorXd inv_sqrt_w = f.tail_weight.tail(t).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd scaled = -(inv_sqrt_w.asDiagonal() * schur * inv_sqrt_w.asDiagonal());
  scaled = 0.5 * (scaled + scaled.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  const double mu = es.eigenvalues()(t - 1);
  const Eigen::VectorXd v = es.eigenvectors().col(t - 1);
  const Eigen::VectorXd xt = inv_sqrt_w.asDiagonal() * v;
  const Eigen::VectorXd xh = -coupling * xt;
  for (int i = 0; i < l; ++i) out.worst_xi[static_cast<std::size_t>(i)] = xh(i);
  for (int i = 0; i < t; ++i) out.worst_xi[static_cast<std::size_t>(l + i)] = xt(i);
  out.required_c = params.eps * std::max(0.0, mu);
  return out;
}

ClaimOutcome claim_min_constant(const ConcavityParams& params, const SampleBudget& budget) {
  params.validate();
  if (budget.count == 0) throw SamplingError("claim_min_constant: empty budget");
  const std::size_t chunk = chunk_size_for(budget.count);
  const std::size_t chunks = (budget.count + chunk - 1) / chunk;
  std::vector<ClaimOutcome> partial(chunks);

  for_each_chunk(chunks, budget.workers, [&](std::size_t c) {
    ConstrainedConeSampler sampler(params.n, params.k, params.l, params.delta, params.delta_prime,
                                   substream_seed(budget.seed, 0xC1A1, c), budget.lambda_scale,
                                   budget.distribution);
    ClaimOutcome& out = partial[c];
    out.required_c = -1.0;
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(budget.count, begin + chunk);
    for (std::size_t s = begin; s < end; ++s) {
      const EigenVector lam = sampler.next();
      const auto req = claim_required_constant(lam, params);
      ++out.samples;
      if (req.required_c > out.required_c) {
        out.required_c = req.required_c;
        out.worst_lambda.assign(lam.values().begin(), lam.values().end());
        out.worst_xi = req.worst_xi;
      }
    }
    return false;
  });

  ClaimOutcome total;
  total.required_c = -1.0;
  for (auto& p : partial) {
    total.samples += p.samples;
    if (p.required_c > total.required_c) {
      total.required_c = p.required_c;
      total.worst_lambda = std::move(p.worst_lambda);
      total.worst_xi = std::move(p.worst_xi);
    }
  }
  total.required_c = std::max(0.0, total.required_c);
  return total;
}

// ---------------------------------------------------------------------------

PinchFlags pinch_flags(const EigenVector& lam, const ConcavityParams& params) {
  const auto l = static_cast<std::size_t>(params.l);
  if (l < 1 || l >= lam.size()) throw DomainError("pinch_flags: l outside [1, n)");
  PinchFlags f;
  f.head_pinched = lam[l - 1] >= params.delta * lam[0];
  f.tail_pinched = lam[l] <= params.delta_prime * lam[0];
  return f;
}

QuadraticPair concavity_forms(const EigenVector& lam, const ConcavityParams& params) {
  if (!(lam[0] > 0.0)) throw PreconditionError("concavity_forms: lambda_1 must be positive");
  require_cone(lam, params.k, "concavity_forms");
  const int n = lam.dim();
  const auto dk = sigma_jet_diag(lam, params.k);
  const Eigen::VectorXd g = dk.grad_diag / dk.value;
  QuadraticPair q;
  q.lhs = -pair_form(dk) + g * g.transpose();
  q.rhs = Eigen::MatrixXd::Zero(n, n);
  q.rhs(0, 0) = (1.0 - params.eps) / (lam[0] * lam[0]);
  for (int i = params.l; i < n; ++i) {
    q.rhs(i, i) = -params.delta0 * dk.grad_diag(i) / (lam[0] * dk.value);
  }
  return q;
}

GapEvaluation concavity_gap(const EigenVector& lam, std::span<const double> xi, const ConcavityParams& params) {
  if (!(lam[0] > 0.0)) throw PreconditionError("concavity_gap: lambda_1 must be positive");
  require_cone(lam, params.k, "concavity_gap");
  require_direction(lam, xi, "concavity_gap");
  if (!(1 <= params.l && params.l < params.k)) throw DomainError("concavity_gap: need 1 <= l < k");
  const auto dk = sigma_jet_diag(lam, params.k);
  const std::size_t n = lam.size();
  double cross = 0.0, lin = 0.0, tail = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto pi = static_cast<int>(p);
    lin += dk.grad_diag(pi) * xi[p];
    if (p >= static_cast<std::size_t>(params.l)) tail += dk.grad_diag(pi) * xi[p] * xi[p];
    for (std::size_t q = 0; q < n; ++q) {
      if (p != q) cross += dk.second_diag(pi, static_cast<int>(q)) * xi[p] * xi[q];
    }
  }
  const double l1 = lam[0];
  GapEvaluation g;
  g.lhs = -cross / dk.value + (lin * lin) / (dk.value * dk.value);
  g.rhs = (1.0 - params.eps) * xi[0] * xi[0] / (l1 * l1) - params.delta0 * tail / (l1 * dk.value);
  g.gap = g.lhs - g.rhs;
  return g;
}

WorstDirection worst_direction(const Eigen::MatrixXd& form) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (form + form.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("worst_direction: eigendecomposition failed");
  WorstDirection w;
  w.min_gap = es.eigenvalues()(0);
  const Eigen::VectorXd v = es.eigenvectors().col(0);
  // Fix the sign so the direction is reproducible.
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  const double sign = v(arg) < 0.0 ? -1.0 : 1.0;
  w.xi.resize(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) w.xi[static_cast<std::size_t>(i)] = sign * v(i);
  return w;
}

std::vector<std::vector<double>> probe_directions(const Eigen::MatrixXd& gap_form, Rng& rng) {
  const int n = static_cast<int>(gap_form.rows());
  std::vector<std::vector<double>> dirs;
  dirs.reserve(static_cast<std::size_t>(3 * n + 1));
  dirs.push_back(worst_direction(gap_form).xi);
  dirs.push_back(rng.unit_vector(n));
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    dirs.push_back(std::move(e));
  }
  const double h = 1.0 / std::sqrt(2.0);
  for (int i = 1; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[0] = h;
      e[static_cast<std::size_t>(i)] = s * h;
      dirs.push_back(std::move(e));
    }
  }
  return dirs;
}

// ---------------------------------------------------------------------------

namespace {

struct ChunkResult {
  std::size_t samples = 0;
  double min_gap = kInf;
  double min_relative_gap = kInf;
  std::optional<Counterexample> counterexample;
  std::vector<SampleRecord> records;
};

LevelRecord run_level(const ConcavityParams& params, const SampleBudget& budget, std::size_t level,
                      double rel_tol, std::vector<SampleRecord>* records) {
  const std::size_t chunk = chunk_size_for(budget.count);
  const std::size_t chunks = (budget.count + chunk - 1) / chunk;
  std::vector<ChunkResult> partial(chunks);
  const bool keep = records != nullptr && budget.record_limit > 0;

  const std::size_t stop = for_each_chunk(chunks, budget.workers, [&](std::size_t c) {
    ConstrainedConeSampler sampler(params.n, params.k, params.l, params.delta, params.delta_prime,
                                   substream_seed(budget.seed, level, c), budget.lambda_scale,
                                   budget.distribution);
    Rng dir_rng(substream_seed(budget.seed ^ 0x5eedULL, level, c));
    ChunkResult& out = partial[c];
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(budget.count, begin + chunk);
    for (std::size_t s = begin; s < end; ++s) {
      const EigenVector lam = sampler.next();
      const QuadraticPair forms = concavity_forms(lam, params);
      const Eigen::MatrixXd gap_form = forms.gap();
      const auto dirs = probe_directions(gap_form, dir_rng);
      ++out.samples;
      double worst_rel = kInf;
      std::size_t worst = 0;
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const auto xi = as_vector(dirs[d]);
        GapEvaluation g;
        g.lhs = xi.dot(forms.lhs * xi);
        g.rhs = xi.dot(forms.rhs * xi);
        g.gap = g.lhs - g.rhs;
        const double rel = g.gap / g.scale();
        if (rel < worst_rel) {
          worst_rel = rel;
          worst = d;
        }
      }
      // Re-evaluate the worst direction on the direct path so that a stored
      // counterexample reproduces its gap exactly.
      const GapEvaluation g = concavity_gap(lam, dirs[worst], params);
      out.min_gap = std::min(out.min_gap, g.gap);
      out.min_relative_gap = std::min(out.min_relative_gap, g.gap / g.scale());
      if (keep && begin + out.records.size() < budget.record_limit && s < budget.record_limit) {
        out.records.push_back(SampleRecord{std::vector<double>(lam.values().begin(), lam.values().end()),
                                           dirs[worst], g.gap, pinch_flags(lam, params)});
      }
      if (!g.holds(rel_tol)) {
        out.counterexample = Counterexample{std::vector<double>(lam.values().begin(), lam.values().end()),
                                            dirs[worst], g.gap, g.scale(), params.delta_prime};
        return true;
      }
    }
    return false;
  });

  LevelRecord rec;
  rec.delta_prime = params.delta_prime;
  rec.min_gap = kInf;
  rec.min_relative_gap = kInf;
  const std::size_t last = std::min(stop, chunks - 1);
  for (std::size_t c = 0; c <= last; ++c) {
    const auto& p = partial[c];
    rec.samples += p.samples;
    rec.min_gap = std::min(rec.min_gap, p.min_gap);
    rec.min_relative_gap = std::min(rec.min_relative_gap, p.min_relative_gap);
    if (c == stop) rec.counterexample = p.counterexample;
    if (records != nullptr) {
      for (const auto& r : p.records) {
        if (records->size() < budget.record_limit) records->push_back(r);
      }
    }
  }
  return rec;
}

}  // namespace

SearchOutcome search_delta_prime(int n, int k, int l, double eps, double delta, double delta0,
                                 const SampleBudget& budget, double rel_tol) {
  ConcavityParams params{n, k, l, eps, delta, delta0, 0.5 * delta};
  params.validate();
  if (budget.count == 0) throw SamplingError("search_delta_prime: empty budget");

  SearchOutcome out;
  std::size_t level = 0;
  for (double candidate = 0.5 * delta; candidate >= kDeltaPrimeFloor; candidate *= 0.5, ++level) {
    params.delta_prime = candidate;
    std::vector<SampleRecord> records;
    LevelRecord rec = run_level(params, budget, level, rel_tol, &records);
    out.total_samples += rec.samples;
    out.levels.push_back(rec);
    if (rec.counterexample) {
      out.counterexample = rec.counterexample;
      continue;
    }
    out.success = true;
    out.delta_prime_found = candidate;
    out.samples_checked = rec.samples;
    out.min_gap = rec.min_gap;
    out.min_relative_gap = rec.min_relative_gap;
    out.records = std::move(records);
    std::ostringstream msg;
    msg << "delta'=" << candidate << " survived " << rec.samples << " samples";
    out.message = msg.str();
    return out;
  }
  out.message = "no candidate delta' >= 1e-8 survived the sample budget";
  return out;
}

}  // namespace hypk
