#include "vfcal/expression.hpp"

#include <doctest.h>

#include <cmath>

using namespace vfcal;

TEST_CASE("constant expression") {
  const Expression e = Expression::parse("1");
  CHECK(e.is_constant());
  CHECK(e.evaluate(3.0, -2.0) == 1.0);
}

TEST_CASE("round-sphere factor") {
  const Expression e = Expression::parse("4/(1+r2)^2");
  CHECK_FALSE(e.is_constant());
  const double x = 0.3, y = -0.7;
  const double q = 1 + x * x + y * y;
  CHECK(e.evaluate(x, y) == doctest::Approx(4 / (q * q)).epsilon(1e-15));
}

TEST_CASE("unbalanced parenthesis reports the offset") {
  try {
    Expression::parse("4/(1+r2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Syntax);
    CHECK(e.offset() == 8);
  }
}

TEST_CASE("unknown identifiers are rejected") {
  try {
    Expression::parse("1 + z*2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::UnknownIdentifier);
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(Expression::parse("tan(x)"), ParseError);
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(Expression::parse(""), ParseError);
  CHECK_THROWS_AS(Expression::parse("1 +"), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x))"), ParseError);
  CHECK_THROWS_AS(Expression::parse("x y"), ParseError);
  CHECK_THROWS_AS(Expression::parse("exp x"), ParseError);
  CHECK_THROWS_AS(Expression::parse("2 $ 3"), ParseError);
}

TEST_CASE("precedence and associativity") {
  auto ev = [](const char* s) { return Expression::parse(s).evaluate(2.0, 3.0); };
  CHECK(ev("1 + 2 * 3") == 7);
  CHECK(ev("(1 + 2) * 3") == 9);
  CHECK(ev("2 ^ 3 ^ 2") == 512);
  CHECK(ev("-2 ^ 2") == -4);
  CHECK(ev("2 ^ -1") == 0.5);
  CHECK(ev("8 / 4 / 2") == 1);
  CHECK(ev("7 - 2 - 1") == 4);
  CHECK(ev("x * y - r2") == 6 - 13);
  CHECK(ev("--x") == 2);
  CHECK(ev("1.5e1 + .5") == 15.5);
}

TEST_CASE("functions and constants") {
  const Expression e = Expression::parse("exp(x) + log(y) + sqrt(r2) + sin(pi/2) + cos(0)");
  const double x = 0.4, y = 1.7;
  CHECK(e.evaluate(x, y) ==
        doctest::Approx(std::exp(x) + std::log(y) + std::sqrt(x * x + y * y) + 2.0).epsilon(1e-15));
  CHECK(Expression::parse("4/(1-r2)^2").evaluate(0.5, 0.0) == doctest::Approx(4 / 0.5625));
  CHECK(Expression::parse("1/y^2").evaluate(0.0, 1.5) == doctest::Approx(1 / 2.25));
}
