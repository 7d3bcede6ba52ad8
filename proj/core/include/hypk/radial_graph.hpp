#pragma once

// Star-shaped hypersurfaces of H^{n+1} given as radial graphs r > 0 over the
// unit sphere S^n, sampled on cell-centred grids.
//
// kFullSphere (n = 2): latitude-longitude grid, theta_j = (j + 1/2) dtheta,
//   phi_m = m dphi, with n_phi even. Points beyond a pole are reached through
//   r(-theta, phi) = r(theta, phi + pi), so stencils never need special pole
//   treatment.
// kAxisymmetric (any n >= 2): r depends on the polar angle only; the profile
//   is extended evenly across both poles, which builds in r'(0) = r'(pi) = 0.

#include <functional>
#include <string>
#include <vector>

namespace hypk {

enum class GraphMode { kFullSphere, kAxisymmetric };

/// Grid node. j may lie outside [0, n_theta) and m outside [0, n_phi): such
/// virtual nodes are points of the extended (theta, phi) chart.
struct GridSite {
  int j = 0;
  int m = 0;
  bool operator==(const GridSite&) const = default;
};

/// r as a function of (theta, phi). Axisymmetric graphs ignore phi.
using RadialFunction = std::function<double(double theta, double phi)>;

struct GraphPreset {
  std::string name;
  std::vector<double> params;
  bool axisymmetric = true;  // false when the preset depends on phi
  RadialFunction fn;
};

/// "sphere:r0", "perturbed:r0,eps" (r0 + eps cos theta),
/// "trig:r0,a1,a2" (r0 + a1 cos theta + a2 cos 2theta),
/// "tilted:r0,a,b" (r0 + a w_x + b w_x w_y, full sphere only).
/// ParseError on unknown names or wrong parameter counts.
GraphPreset parse_preset(const std::string& spec);

class RadialGraph {
 public:
  /// radii are indexed j * n_phi + m (n_phi = 1 in axisymmetric mode).
  /// DomainError on bad sizes or any radius <= 0.
  RadialGraph(GraphMode mode, int n, int n_theta, int n_phi, std::vector<double> radii, int fd_order = 4);

  static RadialGraph from_function(GraphMode mode, int n, int n_theta, int n_phi, const RadialFunction& fn,
                                   int fd_order = 4);
  static RadialGraph from_preset(const std::string& spec, GraphMode mode, int n, int n_theta, int n_phi,
                                 int fd_order = 4);

  GraphMode mode() const noexcept { return mode_; }
  int n() const noexcept { return n_; }
  int n_theta() const noexcept { return n_theta_; }
  int n_phi() const noexcept { return n_phi_; }
  int fd_order() const noexcept { return fd_order_; }
  int size() const noexcept { return n_theta_ * n_phi_; }
  double dtheta() const noexcept { return dtheta_; }
  double dphi() const noexcept { return dphi_; }
  const std::vector<double>& values() const noexcept { return radii_; }

  double theta(int j) const noexcept { return (j + 0.5) * dtheta_; }
  double phi(int m) const noexcept { return m * dphi_; }

  /// Index of the real node a (possibly virtual) site maps to.
  int node_index(GridSite s) const;
  GridSite site_of(int index) const;
  double value(GridSite s) const { return radii_[static_cast<std::size_t>(node_index(s))]; }

  /// Stencil half-width of one derivative level for the configured order.
  int stencil_radius() const noexcept { return fd_order_ == 4 ? 2 : 1; }

  /// Distinct real nodes whose radii enter the level-0 geometry at s.
  std::vector<int> level0_dependencies(GridSite s) const;

  /// Same grid, new radii.
  RadialGraph with_values(std::vector<double> radii) const;

 private:
  GraphMode mode_;
  int n_;
  int n_theta_;
  int n_phi_;
  int fd_order_;
  double dtheta_;
  double dphi_;
  std::vector<double> radii_;
};

}  // namespace hypk
