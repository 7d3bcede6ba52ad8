#include "hypk/warping.hpp"

#include "hypk/errors.hpp"

#include <cmath>

namespace hypk {

double Warping::identity_residual() const { return (phi_prime - phi) * (phi_prime + phi) - 1.0; }

Warping warping(double r) {
  if (!std::isfinite(r) || r < 0.0) throw DomainError("warping: radius must be finite and >= 0");
  Warping w;
  w.r = r;
  w.phi = std::sinh(r);
  w.phi_prime = std::cosh(r);
  // expm1 keeps Phi accurate for small r.
  const double e = std::expm1(r);
  const double em = std::expm1(-r);
  w.Phi = 0.5 * (e + em);
  return w;
}

}  // namespace hypk
