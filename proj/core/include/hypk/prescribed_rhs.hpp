#pragma once

// Right-hand sides of the prescribed curvature equations
//   sigma_k(kappa) = f(X, nu)          (general kind)
//   sigma_k(kappa) = u^p varphi(X)     (curvature-measure kind)
// with f and varphi given as closed-form expressions.

#include <memory>
#include <string>
#include <vector>

namespace hypk {

/// Values available to expressions at one site.
struct RhsPoint {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;       // longitude (0 in axisymmetric mode)
  double nu_r = 0.0;      // radial component of the unit normal
  double nu_theta = 0.0;  // component along e_theta / sinh r
  double nu_phi = 0.0;    // component along e_phi / sinh r (0 when absent)
  double u = 0.0;         // support function
  int n = 2;
  int k = 1;
};

/// Arithmetic expression over the variables
///   r theta phi nu_r nu_theta nu_phi u n k pi
/// with + - * / ^, unary minus, parentheses and the functions
///   sin cos tan exp log sqrt sinh cosh tanh coth abs pow(a, b).
class Expression {
 public:
  Expression();
  /// ParseError with the offending position on malformed input.
  static Expression parse(const std::string& text);

  double eval(const RhsPoint& at) const;
  const std::string& text() const noexcept { return text_; }
  /// True when the value depends on the named variable.
  bool uses(const std::string& variable) const;
  /// True when no variable appears.
  bool is_constant() const;

  struct Op {
    int code = 0;
    double value = 0.0;
  };

 private:
  std::string text_;
  std::vector<Op> program_;
};

enum class RhsKind { kGeneral, kCurvatureMeasure };

class PrescribedRHS {
 public:
  static PrescribedRHS general(const std::string& f);
  /// DomainError unless p lies in (-inf, 0) or (0, 1].
  static PrescribedRHS curvature_measure(const std::string& varphi, double p);

  RhsKind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  const Expression& expression() const noexcept { return expr_; }

  /// f(X, nu) or u^p varphi(X). GeometryError when u <= 0 with p < 0;
  /// DomainError when the value is not finite and positive.
  double value(const RhsPoint& at) const;

  /// The general-kind equivalent f := u^p varphi, evaluated through the
  /// same code path as a general right-hand side.
  PrescribedRHS as_general() const;

 private:
  RhsKind kind_ = RhsKind::kGeneral;
  Expression expr_;
  double p_ = 1.0;
};

}  // namespace hypk
