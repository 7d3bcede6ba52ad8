#include "hypk/prescribed_rhs.hpp"

#include "hypk/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hypk {

namespace {

enum Code : int {
  kConst,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kNeg,
  kSin,
  kCos,
  kTan,
  kExp,
  kLog,
  kSqrt,
  kSinh,
  kCosh,
  kTanh,
  kCoth,
  kAbs,
};

constexpr std::array<const char*, 9> kVariables = {"r", "theta", "phi", "nu_r", "nu_theta", "nu_phi", "u", "n", "k"};

struct Function {
  const char* name;
  int code;
  int arity;
};

constexpr std::array<Function, 12> kFunctions = {{{"sin", kSin, 1},
                                                  {"cos", kCos, 1},
                                                  {"tan", kTan, 1},
                                                  {"exp", kExp, 1},
                                                  {"log", kLog, 1},
                                                  {"sqrt", kSqrt, 1},
                                                  {"sinh", kSinh, 1},
                                                  {"cosh", kCosh, 1},
                                                  {"tanh", kTanh, 1},
                                                  {"coth", kCoth, 1},
                                                  {"abs", kAbs, 1},
                                                  {"pow", kPow, 2}}};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::vector<Expression::Op> run() {
    expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "expression '" << s_ << "': " << what << " at position " << pos_;
    throw ParseError(msg.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(int code, double value = 0.0) { out_.push_back({code, value}); }

  void expr() {
    term();
    for (;;) {
      if (eat('+')) {
        term();
        emit(kAdd);
      } else if (eat('-')) {
        term();
        emit(kSub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (eat('*')) {
        unary();
        emit(kMul);
      } else if (eat('/')) {
        unary();
        emit(kDiv);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (eat('-')) {
      unary();
      emit(kNeg);
    } else if (eat('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (eat('^')) {
      unary();
      emit(kPow);
    }
  }

  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      expr();
      if (!eat(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      emit(kConst, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        for (const auto& f : kFunctions) {
          if (name != f.name) continue;
          eat('(');
          expr();
          for (int a = 1; a < f.arity; ++a) {
            if (!eat(',')) fail("expected ',' in call to " + name);
            expr();
          }
          if (!eat(')')) fail("expected ')' after arguments of " + name);
          emit(f.code);
          return;
        }
        fail("unknown function '" + name + "'");
      }
      if (name == "pi") {
        emit(kConst, std::numbers::pi);
        return;
      }
      for (std::size_t v = 0; v < kVariables.size(); ++v) {
        if (name == kVariables[v]) {
          emit(kVar, static_cast<double>(v));
          return;
        }
      }
      fail("unknown variable '" + name + "'");
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::vector<Expression::Op> out_;
};

double variable(int index, const RhsPoint& p) {
  switch (index) {
    case 0: return p.r;
    case 1: return p.theta;
    case 2: return p.phi;
    case 3: return p.nu_r;
    case 4: return p.nu_theta;
    case 5: return p.nu_phi;
    case 6: return p.u;
    case 7: return p.n;
    default: return p.k;
  }
}

}  // namespace

Expression::Expression() : text_("1"), program_{{kConst, 1.0}} {}

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.program_ = Parser(text).run();
  return e;
}

bool Expression::uses(const std::string& name) const {
  for (std::size_t v = 0; v < kVariables.size(); ++v) {
    if (name != kVariables[v]) continue;
    for (const auto& op : program_) {
      if (op.code == kVar && static_cast<std::size_t>(op.value) == v) return true;
    }
    return false;
  }
  throw DomainError("unknown expression variable '" + name + "'");
}

bool Expression::is_constant() const {
  return std::none_of(program_.begin(), program_.end(), [](const Op& op) { return op.code == kVar; });
}

double Expression::eval(const RhsPoint& at) const {
  double stack[64];
  int top = 0;
  for (const auto& op : program_) {
    if (top >= 63) throw NumericError("expression '" + text_ + "' is nested too deeply");
    switch (op.code) {
      case kConst: stack[top++] = op.value; break;
      case kVar: stack[top++] = variable(static_cast<int>(op.value), at); break;
      case kNeg: stack[top - 1] = -stack[top - 1]; break;
      case kAdd: --top; stack[top - 1] += stack[top]; break;
      case kSub: --top; stack[top - 1] -= stack[top]; break;
      case kMul: --top; stack[top - 1] *= stack[top]; break;
      case kDiv: --top; stack[top - 1] /= stack[top]; break;
      case kPow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
      case kSin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case kCos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case kTan: stack[top - 1] = std::tan(stack[top - 1]); break;
      case kExp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case kLog: stack[top - 1] = std::log(stack[top - 1]); break;
      case kSqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
      case kSinh: stack[top - 1] = std::sinh(stack[top - 1]); break;
      case kCosh: stack[top - 1] = std::cosh(stack[top - 1]); break;
      case kTanh: stack[top - 1] = std::tanh(stack[top - 1]); break;
      case kCoth: stack[top - 1] = 1.0 / std::tanh(stack[top - 1]); break;
      case kAbs: stack[top - 1] = std::abs(stack[top - 1]); break;
      default: throw NumericError("corrupt expression program");
    }
  }
  return stack[0];
}

PrescribedRHS PrescribedRHS::general(const std::string& f) {
  PrescribedRHS r;
  r.kind_ = RhsKind::kGeneral;
  r.expr_ = Expression::parse(f);
  return r;
}

PrescribedRHS PrescribedRHS::curvature_measure(const std::string& varphi, double p) {
  if (!std::isfinite(p) || p == 0.0 || p > 1.0) {
    throw DomainError("curvature-measure exponent p must lie in (-inf, 0) or (0, 1]");
  }
  PrescribedRHS r;
  r.kind_ = RhsKind::kCurvatureMeasure;
  r.expr_ = Expression::parse(varphi);
  r.p_ = p;
  return r;
}

double PrescribedRHS::value(const RhsPoint& at) const {
  double v = 0.0;
  if (kind_ == RhsKind::kGeneral) {
    v = expr_.eval(at);
  } else {
    if (!(at.u > 0.0) && p_ < 0.0) throw GeometryError("support function u <= 0 with negative exponent p");
    v = std::pow(at.u, p_) * expr_.eval(at);
  }
  if (!std::isfinite(v) || !(v > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "right-hand side '" << expr_.text() << "' is not positive (" << v << ") at theta=" << at.theta
        << ", phi=" << at.phi << ", r=" << at.r;
    throw DomainError(msg.str());
  }
  return v;
}

PrescribedRHS PrescribedRHS::as_general() const {
  if (kind_ == RhsKind::kGeneral) return *this;
  std::ostringstream text;
  text.precision(17);
  text << "pow(u, " << p_ << ") * (" << expr_.text() << ")";
  return general(text.str());
}

}  // namespace hypk
