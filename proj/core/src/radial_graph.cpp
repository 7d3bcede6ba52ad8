#include "hypk/radial_graph.hpp"

#include "hypk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hypk {

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("graph preset '" + spec + "': bad number '" + item + "'");
    }
  }
  return out;
}

int positive_mod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

GraphPreset parse_preset(const std::string& spec) {
  const auto colon = spec.find(':');
  GraphPreset p;
  p.name = spec.substr(0, colon);
  if (colon != std::string::npos) p.params = parse_numbers(spec.substr(colon + 1), spec);
  const auto& a = p.params;
  auto want = [&](std::size_t count) {
    if (a.size() != count) {
      throw ParseError("graph preset '" + spec + "': expected " + std::to_string(count) + " parameters");
    }
  };
  if (p.name == "sphere") {
    want(1);
    const double r0 = a[0];
    p.fn = [r0](double, double) { return r0; };
  } else if (p.name == "perturbed") {
    want(2);
    const double r0 = a[0], eps = a[1];
    p.fn = [r0, eps](double t, double) { return r0 + eps * std::cos(t); };
  } else if (p.name == "trig") {
    want(3);
    const double r0 = a[0], a1 = a[1], a2 = a[2];
    p.fn = [r0, a1, a2](double t, double) { return r0 + a1 * std::cos(t) + a2 * std::cos(2.0 * t); };
  } else if (p.name == "tilted") {
    want(3);
    const double r0 = a[0], c1 = a[1], c2 = a[2];
    p.axisymmetric = false;
    p.fn = [r0, c1, c2](double t, double f) {
      const double wx = std::sin(t) * std::cos(f);
      const double wy = std::sin(t) * std::sin(f);
      return r0 + c1 * wx + c2 * wx * wy;
    };
  } else {
    throw ParseError("unknown graph preset '" + p.name + "'");
  }
  return p;
}

RadialGraph::RadialGraph(GraphMode mode, int n, int n_theta, int n_phi, std::vector<double> radii, int fd_order)
    : mode_(mode), n_(n), n_theta_(n_theta), n_phi_(n_phi), fd_order_(fd_order), radii_(std::move(radii)) {
  if (fd_order_ != 2 && fd_order_ != 4) throw DomainError("RadialGraph: fd_order must be 2 or 4");
  if (n_ < 2) throw DomainError("RadialGraph: n must be >= 2");
  if (mode_ == GraphMode::kFullSphere) {
    if (n_ != 2) throw DomainError("RadialGraph: full-sphere mode requires n = 2");
    if (n_phi_ < 4 || n_phi_ % 2 != 0) throw DomainError("RadialGraph: n_phi must be even and >= 4");
  } else {
    n_phi_ = 1;
  }
  if (n_theta_ < 4) throw DomainError("RadialGraph: n_theta must be >= 4");
  if (radii_.size() != static_cast<std::size_t>(n_theta_) * static_cast<std::size_t>(n_phi_)) {
    throw DomainError("RadialGraph: radii size does not match the grid");
  }
  for (double r : radii_) {
    if (!std::isfinite(r) || r <= 0.0) throw DomainError("RadialGraph: radii must be finite and > 0");
  }
  dtheta_ = std::numbers::pi / n_theta_;
  dphi_ = mode_ == GraphMode::kFullSphere ? 2.0 * std::numbers::pi / n_phi_ : 0.0;
}

RadialGraph RadialGraph::from_function(GraphMode mode, int n, int n_theta, int n_phi, const RadialFunction& fn,
                                       int fd_order) {
  const int cols = mode == GraphMode::kFullSphere ? n_phi : 1;
  if (n_theta < 1 || cols < 1) throw DomainError("RadialGraph: empty grid");
  std::vector<double> radii(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(cols));
  const double dt = std::numbers::pi / n_theta;
  const double dp = 2.0 * std::numbers::pi / cols;
  for (int j = 0; j < n_theta; ++j) {
    for (int m = 0; m < cols; ++m) {
      radii[static_cast<std::size_t>(j * cols + m)] = fn((j + 0.5) * dt, mode == GraphMode::kFullSphere ? m * dp : 0.0);
    }
  }
  return RadialGraph(mode, n, n_theta, cols, std::move(radii), fd_order);
}

RadialGraph RadialGraph::from_preset(const std::string& spec, GraphMode mode, int n, int n_theta, int n_phi,
                                     int fd_order) {
  const GraphPreset p = parse_preset(spec);
  if (!p.axisymmetric && mode == GraphMode::kAxisymmetric) {
    throw DomainError("graph preset '" + spec + "' needs full-sphere mode");
  }
  return from_function(mode, n, n_theta, n_phi, p.fn, fd_order);
}

int RadialGraph::node_index(GridSite s) const {
  int j = s.j;
  int m = s.m;
  const int half = n_phi_ / 2;
  for (;;) {
    if (j < 0) {
      j = -1 - j;
    } else if (j >= n_theta_) {
      j = 2 * n_theta_ - 1 - j;
    } else {
      break;
    }
    if (mode_ == GraphMode::kFullSphere) m += half;
  }
  m = mode_ == GraphMode::kFullSphere ? positive_mod(m, n_phi_) : 0;
  return j * n_phi_ + m;
}

GridSite RadialGraph::site_of(int index) const {
  if (index < 0 || index >= size()) throw DomainError("RadialGraph: node index out of range");
  return GridSite{index / n_phi_, index % n_phi_};
}

std::vector<int> RadialGraph::level0_dependencies(GridSite s) const {
  const int rad = stencil_radius();
  std::vector<int> deps;
  for (int a = -rad; a <= rad; ++a) {
    if (mode_ == GraphMode::kFullSphere) {
      for (int b = -rad; b <= rad; ++b) deps.push_back(node_index({s.j + a, s.m + b}));
    } else {
      deps.push_back(node_index({s.j + a, 0}));
    }
  }
  std::sort(deps.begin(), deps.end());
  deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
  return deps;
}

RadialGraph RadialGraph::with_values(std::vector<double> radii) const {
  return RadialGraph(mode_, n_, n_theta_, n_phi_, std::move(radii), fd_order_);
}

}  // namespace hypk
