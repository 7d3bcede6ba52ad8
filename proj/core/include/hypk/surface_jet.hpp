#pragma once

// Pointwise extrinsic and intrinsic geometry of a radial graph.
//
// Derivatives of r come from central finite differences on the graph grid.
// Tensor fields are first assembled in the orthonormal frame e_a = d_a / H_a
// of the round sphere chart (theta first, then the remaining angles), then
// expressed in a g-orthonormal frame obtained by Gram-Schmidt.
// Covariant derivatives of order two are built by differencing order-one
// fields between neighbouring nodes.
//
// Index conventions in the g-orthonormal frame:
//   h_cov1(i, j, k)    = (nabla_k h)(e_i, e_j)
//   h_cov2(i, j, k, l) = (nabla_l nabla_k h)(e_i, e_j)
//   riemann(i, j, k, l) = < R(e_i, e_j) e_l, e_k >

#include "hypk/radial_graph.hpp"
#include "hypk/tensor.hpp"
#include "hypk/warping.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hypk {

enum class FrameOrder { kForward, kReversed };

struct JetOptions {
  int depth = 1;  // 0: g, h, kappa, u; 1: + nabla h, Hess Phi, Hess u, R; 2: + nabla^2 h
  FrameOrder frame = FrameOrder::kForward;
};

struct SurfaceJet {
  int n = 0;
  int depth = 0;
  GridSite site;
  double theta = 0.0;
  double phi = 0.0;
  Warping warp;

  // Components in the round-sphere frame e_a.
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Eigen::MatrixXd h;
  // Columns are the g-orthonormal frame vectors in e_a components.
  Eigen::MatrixXd frame;

  Eigen::MatrixXd h_on;        // h in the g-orthonormal frame
  std::vector<double> kappa;   // principal curvatures, descending
  Eigen::VectorXd nu;          // unit normal in (d_r, e_a / phi) components
  double u = 0.0;              // support function <phi d_r, nu>

  // depth >= 1, all in the g-orthonormal frame.
  Tensor3 h_cov1;
  Eigen::VectorXd grad_Phi;
  Eigen::VectorXd grad_u;
  Eigen::MatrixXd hess_Phi;
  Eigen::MatrixXd hess_u;
  Tensor4 riemann;

  // depth >= 2.
  Tensor4 h_cov2;
};

/// GeometryError when g is not positive definite or u <= 0.
SurfaceJet surface_jet(const RadialGraph& graph, GridSite site, const JetOptions& options = {});

/// kappa and u only, for residual sweeps.
struct SiteCurvature {
  std::vector<double> kappa;
  double u = 0.0;
  double r = 0.0;
  Eigen::VectorXd nu;
};
SiteCurvature site_curvature(const RadialGraph& graph, GridSite site);

}  // namespace hypk
