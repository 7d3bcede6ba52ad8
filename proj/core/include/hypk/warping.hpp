#pragma once

// Hyperbolic space as the warped product dr^2 + sinh^2(r) dsigma^2.

namespace hypk {

struct Warping {
  double r = 0.0;
  double phi = 0.0;        // sinh r
  double phi_prime = 1.0;  // cosh r
  double Phi = 0.0;        // cosh r - 1, the primitive of phi vanishing at 0

  /// phi'^2 - phi^2 - 1.
  double identity_residual() const;
};

/// DomainError for r < 0 or non-finite r.
Warping warping(double r);

}  // namespace hypk
