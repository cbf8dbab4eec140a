#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbih/errors.hpp"

namespace pbih {

enum class Op : std::uint8_t {
  constant,
  variable,
  neg,
  sin,
  cos,
  sinh,
  cosh,
  exp,
  ln,
  sqrt,
  add,
  sub,
  mul,
  div,
  pow,
};

bool is_unary(Op op) noexcept;
bool is_binary(Op op) noexcept;
std::string_view op_name(Op op) noexcept;

/// Immutable expression tree over named real variables.
///
/// Copies share structure. Builders (`operator+`, `sin`, ...) apply only the
/// light rewrites: constant folding, x*1, x+0, x*0 and friends. `make_raw`
/// builds a node exactly as given; the parser uses it so parsed trees keep
/// their written shape.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor)

  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr make_raw(Op op, std::vector<Expr> children);

  Op op() const noexcept;
  double value() const;              // constant nodes only
  const std::string& name() const;   // variable nodes only
  std::span<const Expr> children() const noexcept;
  const Expr& arg(std::size_t i) const { return children()[i]; }

  bool is_constant() const noexcept { return op() == Op::constant; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }

  /// Node count, counting shared subtrees once per occurrence.
  std::size_t size() const;

  friend bool structurally_equal(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sinh(const Expr& a);
Expr cosh(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);
Expr sqrt(const Expr& a);
Expr apply(Op op, const Expr& a);
Expr apply(Op op, const Expr& a, const Expr& b);

using Bindings = std::map<std::string, double, std::less<>>;

/// Parses the formula grammar documented in README.md. Throws ParseError.
Expr parse(std::string_view text);

/// Canonical, fully parenthesized emission; `parse(to_string(e))` is
/// structurally equal to `e`.
std::string to_string(const Expr& e);

Expr differentiate(const Expr& e, std::string_view variable);

std::set<std::string> free_variables(const Expr& e);

/// Replaces variables by expressions, re-simplifying the rebuilt nodes.
Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& replacement);

/// Substitutes numeric values for the bound names; other variables stay free.
Expr substitute_values(const Expr& e, const Bindings& values);

/// Evaluates in double precision. Throws UnboundVariableError listing every
/// missing name, or DomainError.
double evaluate(const Expr& e, const Bindings& bindings);

// Scalar hooks used by Program for plain doubles. Jet provides its own
// overloads found by argument-dependent lookup.
inline double scalar_value(double x) noexcept { return x; }
inline bool is_constant_scalar(double) noexcept { return true; }
inline bool all_finite(double x) noexcept { return std::isfinite(x); }
inline double pow_int(double x, long n) { return std::pow(x, static_cast<double>(n)); }
inline double pow_real(double x, double r) { return std::pow(x, r); }

/// An expression flattened to postfix form with variables resolved to slot
/// indices, evaluable over any scalar type providing the hooks above
/// (double, Jet).
class Program {
 public:
  Program() = default;
  /// Throws UnboundVariableError if `e` uses a name not in `slots`.
  Program(const Expr& e, std::vector<std::string> slots);

  const std::vector<std::string>& slots() const noexcept { return slots_; }
  /// True when the program is a single constant.
  bool is_constant() const noexcept { return code_.size() == 1 && code_[0].op == Op::constant; }
  double constant_value() const { return code_.front().value; }

  template <typename Scalar>
  Scalar operator()(std::span<const Scalar> inputs) const;

 private:
  struct Instruction {
    Op op;
    std::uint32_t slot;
    double value;
  };
  void emit(const Expr& e);

  std::vector<std::string> slots_;
  std::vector<Instruction> code_;
};

namespace detail {
[[noreturn]] void throw_domain(std::string_view what, double at);
}

template <typename Scalar>
Scalar Program::operator()(std::span<const Scalar> inputs) const {
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sinh;
  using std::sqrt;

  std::vector<Scalar> stack;
  stack.reserve(code_.size());
  for (const Instruction& ins : code_) {
    switch (ins.op) {
      case Op::constant:
        stack.push_back(Scalar(ins.value));
        break;
      case Op::variable:
        stack.push_back(inputs[ins.slot]);
        break;
      case Op::add:
      case Op::sub:
      case Op::mul:
      case Op::div:
      case Op::pow: {
        Scalar b = std::move(stack.back());
        stack.pop_back();
        Scalar& a = stack.back();
        switch (ins.op) {
          case Op::add: a = a + b; break;
          case Op::sub: a = a - b; break;
          case Op::mul: a = a * b; break;
          case Op::div:
            if (scalar_value(b) == 0.0) detail::throw_domain("division by zero", 0.0);
            a = a / b;
            break;
          default: {
            const double base = scalar_value(a);
            if (is_constant_scalar(b)) {
              const double r = scalar_value(b);
              if (std::nearbyint(r) == r && std::abs(r) <= 1e6) {
                if (r < 0 && base == 0.0) detail::throw_domain("zero to a negative power", base);
                a = pow_int(a, static_cast<long>(r));
              } else {
                if (!(base > 0.0)) detail::throw_domain("non-integer power of non-positive base", base);
                a = pow_real(a, r);
              }
            } else {
              if (!(base > 0.0)) detail::throw_domain("variable power of non-positive base", base);
              a = exp(b * log(a));
            }
          }
        }
        break;
      }
      default: {
        Scalar& a = stack.back();
        const double v = scalar_value(a);
        switch (ins.op) {
          case Op::neg: a = -a; break;
          case Op::sin: a = sin(a); break;
          case Op::cos: a = cos(a); break;
          case Op::sinh: a = sinh(a); break;
          case Op::cosh: a = cosh(a); break;
          case Op::exp: a = exp(a); break;
          case Op::ln:
            if (!(v > 0.0)) detail::throw_domain("ln of non-positive value", v);
            a = log(a);
            break;
          case Op::sqrt:
            if (v < 0.0 || (v == 0.0 && !is_constant_scalar(a)))
              detail::throw_domain("sqrt of non-positive value", v);
            a = sqrt(a);
            break;
          default: break;
        }
      }
    }
  }
  if (!all_finite(stack.back())) detail::throw_domain("non-finite result", scalar_value(stack.back()));
  return std::move(stack.back());
}

}  // namespace pbih
