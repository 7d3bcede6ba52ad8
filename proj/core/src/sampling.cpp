#include "hypk/errors.hpp"
#include "hypk/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace hypk {

ConstrainedConeSampler::ConstrainedConeSampler(int n, int k, int l, double delta, double delta_prime,
                                               std::uint64_t seed, double lambda_scale,
                                               SampleDistribution distribution)
    : n_(n),
      k_(k),
      l_(l),
      delta_(delta),
      delta_prime_(delta_prime),
      scale_(lambda_scale),
      distribution_(distribution),
      rng_(seed) {
  ConcavityParams p{n, k, l, 0.5, delta, 0.5, delta_prime};
  p.validate();
  if (!(lambda_scale > 0.0)) throw DomainError("sampler: lambda_scale must be positive");
}

EigenVector ConstrainedConeSampler::next() {
  const double spread = static_cast<double>(n_ - k_) / static_cast<double>(k_);
  std::vector<double> lam(static_cast<std::size_t>(n_));
  for (;;) {
    ++proposals_;
    if (proposals_ >= kStarvationProposals &&
        static_cast<double>(accepted_) < kStarvationRate * static_cast<double>(proposals_)) {
      std::ostringstream msg;
      msg << "constrained cone sampler starved: " << accepted_ << " accepted of " << proposals_
          << " proposals (n=" << n_ << ", k=" << k_ << ", l=" << l_ << ", delta=" << delta_
          << ", delta'=" << delta_prime_ << ")";
      throw SamplingError(msg.str());
    }

    const double top = scale_ * rng_.uniform(0.5, 2.0);
    lam[0] = top;
    for (int i = 1; i < l_; ++i) lam[static_cast<std::size_t>(i)] = rng_.uniform(delta_ * top, top);

    // Negative entries of Gamma_k spectra satisfy -lambda_i <= (n-k)/k lambda_1.
    double reach = spread;
    if (distribution_ == SampleDistribution::kBoundaryBiased && spread > 0.0 && rng_.uniform() < 0.5) {
      const double lo = std::log(std::max(1e-3 * delta_prime_, 1e-12));
      const double hi = std::log(spread);
      if (hi > lo) reach = std::exp(rng_.uniform(lo, hi));
    }
    for (int i = l_; i < n_; ++i) {
      lam[static_cast<std::size_t>(i)] = rng_.uniform(-reach * top, delta_prime_ * top);
    }
    std::sort(lam.begin() + 1, lam.begin() + l_, std::greater<>());
    std::sort(lam.begin() + l_, lam.end(), std::greater<>());

    EigenVector ev(lam);
    if (!in_gamma_k(ev, k_).inside) continue;
    const double l1 = ev[0];
    if (!(l1 > 0.0)) continue;
    if (ev[static_cast<std::size_t>(l_ - 1)] < delta_ * l1) continue;
    if (ev[static_cast<std::size_t>(l_)] > delta_prime_ * l1) continue;
    ++accepted_;
    return ev;
  }
}

GardingConeSampler::GardingConeSampler(int n, int k, std::uint64_t seed) : n_(n), k_(k), rng_(seed) {
  if (n < 2) throw DomainError("cone sampler: n must be >= 2");
  if (k < 1 || k > n) throw DomainError("cone sampler: k outside [1, n]");
}

EigenVector GardingConeSampler::next() {
  std::vector<double> x(static_cast<std::size_t>(n_));
  std::vector<double> shifted(x.size());
  auto inside = [&](double t) {
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + t;
    for (int j = 1; j <= k_; ++j) {
      if (!(elementary_symmetric(shifted, j) > 0.0)) return false;
    }
    return true;
  };
  for (;;) {
    for (double& v : x) v = rng_.uniform(-1.0, 1.0);
    // x + t lies outside for t <= -1 (sigma_1 <= 0) and inside for t > 1.
    double lo = -1.0, hi = 1.0 + 1e-12;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(mid) ? hi : lo) = mid;
    }
    const double offset = rng_.uniform() < 0.5 ? std::exp(rng_.uniform(std::log(1e-6), 0.0)) : rng_.uniform();
    if (!inside(hi + offset)) continue;
    return EigenVector(shifted);
  }
}

}  // namespace hypk
