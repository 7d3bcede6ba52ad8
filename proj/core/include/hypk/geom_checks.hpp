#pragma once

// Numerical residuals of the hypersurface identities in H^{n+1}. Each
// residual is the Frobenius norm of (LHS - RHS) over all index tuples in the
// g-orthonormal frame, so it does not depend on which orthonormal frame is
// used.

#include "hypk/surface_jet.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hypk {

/// Phi_ij - phi' g_ij + h_ij u. Needs depth >= 1.
double check_phi_hessian(const SurfaceJet& jet);

/// First: u_i - sum_k h_ik Phi_k.
/// Second: u_ij - sum_k h_ijk Phi_k - phi' h_ij + sum_k h_ik h_jk u.
/// Needs depth >= 1.
std::pair<double, double> check_support_derivs(const SurfaceJet& jet);

/// Gauss: R_ijkl + (d_ik d_jl - d_il d_jk) - (h_ik h_jl - h_il h_jk).
/// Codazzi: h_ijk - h_ikj. Needs depth >= 1.
std::pair<double, double> check_gauss_codazzi(const SurfaceJet& jet);

/// Commutation of second covariant derivatives of h:
///   h_klij = h_ijkl + d_li h_jk - d_ji h_lk + d_lk h_ij - d_jk h_il
///            - sum_m h_mk (h_jm h_li - h_ji h_lm)
///            - sum_m h_im (h_jm h_lk - h_jk h_lm)
/// with h_ijkl = (nabla_l nabla_k h)(e_i, e_j). PreconditionError below depth 2.
double check_interchange(const SurfaceJet& jet);

/// LHS - RHS of the commutation identity for one index tuple.
double interchange_defect(const SurfaceJet& jet, int i, int j, int k, int l);

struct GeomResiduals {
  double phi_hessian = 0.0;
  double support_first = 0.0;
  double support_second = 0.0;
  double gauss = 0.0;
  double codazzi = 0.0;
  double interchange = 0.0;  // only when depth >= 2
  bool has_interchange = false;

  /// Componentwise max.
  void absorb(const GeomResiduals& other);
};

GeomResiduals check_all(const SurfaceJet& jet);

/// Residual kinds in reporting order.
const std::vector<std::string>& residual_kinds();
double residual_by_kind(const GeomResiduals& r, const std::string& kind);

/// Deterministic check sites: rows with theta in [0.2 pi, 0.8 pi], spread
/// over longitude in full-sphere mode.
std::vector<GridSite> default_check_sites(const RadialGraph& graph, int count = 8);

struct SiteResiduals {
  GridSite site;
  GeomResiduals residuals;
};

struct GeomSweep {
  std::vector<SiteResiduals> sites;
  GeomResiduals max;
};

/// check_all at each site, parallel over sites.
GeomSweep geom_sweep(const RadialGraph& graph, const std::vector<GridSite>& sites, const JetOptions& options,
                     unsigned workers = 0);

}  // namespace hypk
