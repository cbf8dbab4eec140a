#include "pbih/random_expr.hpp"

#include <cmath>

#include "pbih/errors.hpp"

namespace pbih {

Expr random_expression(std::mt19937_64& rng, const std::vector<std::string>& variables, int max_depth) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(unit(rng) * static_cast<double>(n)) % n; };
  if (max_depth <= 1 || unit(rng) < 0.25) {
    if (unit(rng) < 0.6) return Expr::variable(variables[pick(variables.size())]);
    return Expr::constant(std::round(unit(rng) * 40.0 - 20.0) / 10.0);
  }
  static constexpr Op unary[] = {Op::neg, Op::sin, Op::cos, Op::sinh, Op::cosh, Op::exp, Op::ln, Op::sqrt};
  static constexpr Op binary[] = {Op::add, Op::sub, Op::mul, Op::div, Op::pow};
  if (unit(rng) < 0.4) {
    const Op op = unary[pick(std::size(unary))];
    return Expr::make_raw(op, {random_expression(rng, variables, max_depth - 1)});
  }
  const Op op = binary[pick(std::size(binary))];
  Expr lhs = random_expression(rng, variables, max_depth - 1);
  if (op == Op::pow) {
    // Integer powers of anything, or real powers of a positive base.
    if (unit(rng) < 0.5) return Expr::make_raw(op, {lhs, Expr::constant(static_cast<double>(pick(4)) - 1.0)});
    lhs = Expr::make_raw(Op::add, {Expr::make_raw(Op::mul, {lhs, lhs}), Expr::constant(0.5)});
    return Expr::make_raw(op, {lhs, random_expression(rng, variables, max_depth - 2)});
  }
  return Expr::make_raw(op, {lhs, random_expression(rng, variables, max_depth - 1)});
}

DerivativeCheck check_derivatives_against_fd(std::uint64_t seed, int cases, int max_depth, double step,
                                             double tolerance, double blowup) {
  const std::vector<std::string> vars{"x", "y", "z"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  DerivativeCheck out;
  out.requested = cases;
  while (out.accepted < cases) {
    const Expr e = random_expression(rng, vars, max_depth);
    const std::string v = vars[static_cast<std::size_t>(coord(rng) + 2.0) % vars.size()];
    Bindings at{{"x", coord(rng)}, {"y", coord(rng)}, {"z", coord(rng)}};
    const double x0 = at[v];
    auto eval_at = [&](double t) {
      Bindings b = at;
      b[v] = t;
      return evaluate(e, b);
    };
    double exact = 0.0, fd = 0.0;
    try {
      const Expr d1 = differentiate(e, v);
      const Expr d2 = differentiate(d1, v);
      const Expr d3 = differentiate(d2, v);
      exact = evaluate(d1, at);
      const double sizes[] = {evaluate(e, at), exact, evaluate(d2, at), evaluate(d3, at),
                              eval_at(x0 + 2 * step), eval_at(x0 - 2 * step)};
      bool tame = true;
      for (double s : sizes) tame = tame && std::abs(s) <= blowup;
      if (!tame) {
        ++out.rejected;
        continue;
      }
      fd = (eval_at(x0 + step) - eval_at(x0 - step)) / (2.0 * step);
    } catch (const Error&) {
      ++out.rejected;
      continue;
    }
    ++out.accepted;
    const double ratio = std::abs(exact - fd) / (1.0 + std::abs(exact));
    if (ratio > tolerance) ++out.failures;
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_case = "d/d" + v + " " + to_string(e);
    }
  }
  return out;
}

}  // namespace pbih
