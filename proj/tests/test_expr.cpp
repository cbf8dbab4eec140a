#include <cmath>
#include <random>

#include "doctest.h"

#include "pbih/expr.hpp"
#include "pbih/random_expr.hpp"

using namespace pbih;

TEST_SUITE("expr") {

TEST_CASE("parse builds the expected tree") {
  const Expr e = parse("x^2 + 1");
  REQUIRE(e.op() == Op::add);
  CHECK(e.arg(0).op() == Op::pow);
  CHECK(e.arg(0).arg(0).op() == Op::variable);
  CHECK(e.arg(0).arg(0).name() == "x");
  CHECK(e.arg(0).arg(1).is_constant(2.0));
  CHECK(e.arg(1).is_constant(1.0));
}

TEST_CASE("free variables of the conformal factor and catenoid formulas") {
  CHECK(free_variables(parse("ln((p1)*(z) + (p2))")) == std::set<std::string>{"p1", "p2", "z"});
  CHECK(free_variables(parse("a*cosh(x2/a + b)*cos(x1)")) == std::set<std::string>{"a", "b", "x1", "x2"});
}

TEST_CASE("precedence and associativity") {
  CHECK(to_string(parse("-x^2")) == "(-(x ^ 2))");
  CHECK(to_string(parse("2^3^2")) == "(2 ^ (3 ^ 2))");
  CHECK(to_string(parse("a - b - c")) == "((a - b) - c)");
  CHECK(evaluate(parse("-2^2"), {}) == doctest::Approx(-4.0));
  CHECK(evaluate(parse("2^3^2"), {}) == doctest::Approx(512.0));
}

TEST_CASE("parse errors report the offending position") {
  auto position = [](const char* text) {
    try {
      (void)parse(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1L;
  };
  CHECK(position("1 +") == 3);
  CHECK(position("x + * 2") == 4);
  CHECK(position("sin(x") == 5);
  CHECK(position("2 $ 3") == 2);
  CHECK(position("") == 0);
  CHECK(position("foo(x)") == 3);
}

TEST_CASE("to_string round-trips") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Expr raw = random_expression(rng, {"x", "y"}, 5);
    const Expr e = parse(to_string(raw));
    CHECK(structurally_equal(parse(to_string(e)), e));
    const Bindings at{{"x", 0.37}, {"y", 0.81}};
    double a = 0.0, b = 0.0;
    bool ok_a = true, ok_b = true;
    try { a = evaluate(raw, at); } catch (const DomainError&) { ok_a = false; }
    try { b = evaluate(e, at); } catch (const DomainError&) { ok_b = false; }
    CHECK(ok_a == ok_b);
    if (ok_a && ok_b) CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("differentiate examples") {
  CHECK(evaluate(differentiate(parse("z^3"), "z"), {{"z", 2.0}}) == doctest::Approx(12.0).epsilon(1e-14));
  const Expr g1 = parse("ln((p-1)*(c1*z+c2))/(p-1)");
  const Expr g2 = differentiate(differentiate(g1, "z"), "z");
  const Bindings at{{"z", 0.0}, {"p", 3.0}, {"c1", 1.0}, {"c2", 1.0}};
  CHECK(evaluate(g2, at) == doctest::Approx(-0.5).epsilon(1e-14));
  // central second difference as an independent check
  const double h = 1e-4;
  auto g = [&](double z) { return evaluate(g1, {{"z", z}, {"p", 3.0}, {"c1", 1.0}, {"c2", 1.0}}); };
  CHECK((g(h) - 2 * g(0.0) + g(-h)) / (h * h) == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(evaluate(differentiate(parse("sin(x)*cos(x)"), "x"), {{"x", 0.3}}) ==
        doctest::Approx(std::cos(0.6)).epsilon(1e-14));
}

TEST_CASE("derivative of constants and of the variable itself") {
  CHECK(differentiate(parse("3.5"), "x").is_constant(0.0));
  CHECK(differentiate(parse("y"), "x").is_constant(0.0));
  CHECK(differentiate(parse("x"), "x").is_constant(1.0));
}

TEST_CASE("evaluate examples") {
  CHECK(evaluate(parse("x+y"), {{"x", 1.0}, {"y", 2.0}}) == 3.0);
  CHECK(evaluate(parse("ln((3-1)*(1*0+1))/(3-1)"), {}) == doctest::Approx(std::log(2.0) / 2).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate(parse("1/x"), {{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse("ln(x)"), {{"x", -1.0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse("sqrt(x)"), {{"x", -1.0}}), DomainError);
}

TEST_CASE("unbound variables are all listed") {
  try {
    (void)evaluate(parse("x + y*w"), {{"y", 1.0}});
    FAIL("expected UnboundVariableError");
  } catch (const UnboundVariableError& e) {
    CHECK(e.names() == std::vector<std::string>{"w", "x"});
  }
}

TEST_CASE("substitution binds only the named variables") {
  const Expr e = substitute_values(parse("a*x + b"), {{"a", 2.0}, {"b", 1.0}});
  CHECK(free_variables(e) == std::set<std::string>{"x"});
  CHECK(evaluate(e, {{"x", 3.0}}) == 7.0);
}

TEST_CASE("differentiation agrees with finite differences on random expressions") {
  const DerivativeCheck r = check_derivatives_against_fd(99, 300);
  CHECK(r.accepted == 300);
  CHECK(r.failures == 0);
  CHECK(r.worst_ratio <= 1e-6);
}

}
