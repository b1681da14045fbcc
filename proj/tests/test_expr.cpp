#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "excal/expr.hpp"

using namespace excal;

namespace {
double eval1(const Expression& e, double x) {
  std::vector<double> p{x};
  return e.eval(p);
}
}  // namespace

TEST_CASE("parser handles precedence and associativity") {
  std::vector<double> p{2.0, 3.0};
  CHECK(Expression::parse("1 + 2*3", 2).eval(p) == doctest::Approx(7.0));
  CHECK(Expression::parse("2*x0^2", 2).eval(p) == doctest::Approx(8.0));
  CHECK(Expression::parse("-x0^2", 2).eval(p) == doctest::Approx(-4.0));
  CHECK(Expression::parse("8/4/2", 2).eval(p) == doctest::Approx(1.0));
  CHECK(Expression::parse("1 - 2 - 3", 2).eval(p) == doctest::Approx(-4.0));
  CHECK(Expression::parse("x0^-1", 2).eval(p) == doctest::Approx(0.5));
  CHECK(Expression::parse("(x0 + x1)^3", 2).eval(p) == doctest::Approx(125.0));
}

TEST_CASE("functions evaluate against the standard library") {
  std::vector<double> p{0.7};
  CHECK(eval1(Expression::parse("sin(x0)", 1), 0.7) == doctest::Approx(std::sin(0.7)));
  CHECK(eval1(Expression::parse("tanh(x0)*exp(x0)", 1), 0.7) ==
        doctest::Approx(std::tanh(0.7) * std::exp(0.7)));
  CHECK(eval1(Expression::parse("log(sqrt(x0))", 1), 0.7) ==
        doctest::Approx(0.5 * std::log(0.7)));
  CHECK(eval1(Expression::parse("pospart(x0 - 1)", 1), 0.7) == 0.0);
  CHECK(eval1(Expression::parse("pospart(x0 - 1)", 1), 1.7) ==
        doctest::Approx(0.7));
  (void)p;
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(Expression::parse("1 + ", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x0)", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x3", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("x0^x0", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x0", 1), ParseError);
  try {
    Expression::parse("1 + @", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
}

TEST_CASE("domain errors surface as EvalError") {
  CHECK_THROWS_AS(eval1(Expression::parse("log(x0)", 1), -1.0), EvalError);
  CHECK_THROWS_AS(eval1(Expression::parse("sqrt(x0)", 1), -1.0), EvalError);
  CHECK_THROWS_AS(eval1(Expression::parse("1/x0", 1), 0.0), EvalError);
  CHECK_THROWS_AS(eval1(Expression::parse("x0^-2", 1), 0.0), EvalError);
}

TEST_CASE("gradients are exact") {
  auto e = Expression::parse("sin(x0)*exp(x1) + x0^3*x1", 2);
  std::vector<double> p{0.4, -0.9};
  auto [v, g] = e.eval_grad(p);
  CHECK(v == doctest::Approx(std::sin(0.4) * std::exp(-0.9) + 0.064 * -0.9));
  CHECK(g[0] == doctest::Approx(std::cos(0.4) * std::exp(-0.9) + 3 * 0.16 * -0.9));
  CHECK(g[1] == doctest::Approx(std::sin(0.4) * std::exp(-0.9) + 0.064));
}

TEST_CASE("derivative expressions stack to higher order") {
  auto e = Expression::parse("sin(2*x0)", 1);
  auto d1 = e.derivative(0);
  auto d2 = d1.derivative(0);
  auto d3 = d2.derivative(0);
  CHECK(eval1(d1, 0.3) == doctest::Approx(2.0 * std::cos(0.6)));
  CHECK(eval1(d2, 0.3) == doctest::Approx(-4.0 * std::sin(0.6)));
  CHECK(eval1(d3, 0.3) == doctest::Approx(-8.0 * std::cos(0.6)));
}

TEST_CASE("derivative nesting beyond the supported depth is rejected") {
  auto e = Expression::parse("x0^8", 1);
  for (int i = 0; i < 7; ++i) e = e.derivative(0);
  std::vector<double> p{1.0};
  CHECK_THROWS_AS(e.eval(p), EvalError);
}

TEST_CASE("compose applies the chain rule through substitution") {
  // f(u) = u^2, u(x) = sin(x0) + x1: d/dx0 f(u(x)) = 2 u cos(x0).
  auto f = Expression::parse("x0^2", 1);
  auto u = Expression::parse("sin(x0) + x1", 2);
  auto comp = f.compose({u});
  std::vector<double> p{0.5, 1.2};
  double uv = std::sin(0.5) + 1.2;
  CHECK(comp.eval(p) == doctest::Approx(uv * uv));
  CHECK(comp.derivative(0).eval(p) == doctest::Approx(2.0 * uv * std::cos(0.5)));

  // Composition must also transport derivatives already inside f.
  auto fd = Expression::parse("x0^2", 1).derivative(0);  // 2 x0
  CHECK(fd.compose({u}).eval(p) == doctest::Approx(2.0 * uv));
}

TEST_CASE("pospart is C1 across the seam") {
  auto bump = Expression::parse("pospart(1 - x0^2)^2", 1);
  CHECK(eval1(bump, 0.0) == doctest::Approx(1.0));
  CHECK(eval1(bump, 1.0) == 0.0);
  CHECK(eval1(bump, 1.5) == 0.0);
  auto d = bump.derivative(0);
  CHECK(eval1(d, 1.0 - 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(eval1(d, 1.0 + 1e-9) == 0.0);
}

TEST_CASE("serialization round-trips structurally") {
  auto e = Expression::parse("sin(x0)*exp(x1) + x0^3/x1 - 2", 2);
  auto back = Expression::parse(e.serialize(), 2);
  CHECK(e.same_ast(back));
  std::vector<double> p{0.3, 0.8};
  CHECK(e.eval(p) == doctest::Approx(back.eval(p)));
}

TEST_CASE("operators build valid expressions") {
  auto a = Expression::variable(0, 2);
  auto b = Expression::variable(1, 2);
  auto e = (a + b) * (a - b) / (a * a + Expression::constant(1.0, 2));
  std::vector<double> p{1.5, 0.5};
  CHECK(e.eval(p) == doctest::Approx((2.25 - 0.25) / 3.25));
  CHECK((-a).eval(p) == doctest::Approx(-1.5));
}

TEST_CASE("dimension mismatches are rejected") {
  auto e = Expression::parse("x0 + x1", 2);
  std::vector<double> p{1.0};
  CHECK_THROWS_AS(e.eval(p), EvalError);
}
