#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "srbf/expr.hpp"

using namespace srbf;

namespace {

double at(const std::string& text, std::vector<double> x, double eps = 1.0, int dim = kMaxDim) {
  ExprBindings b;
  b.epsilon = eps;
  return eval_expr(parse(text, dim), x, b);
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(at("1+2*3", {0, 0, 0}) == 7.0);
  CHECK(at("(1+2)*3", {0, 0, 0}) == 9.0);
  CHECK(at("2^3^2", {0, 0, 0}) == 512.0);
  CHECK(at("-2^2", {0, 0, 0}) == -4.0);
  CHECK(at("2^-1", {0, 0, 0}) == 0.5);
  CHECK(at("8/4/2", {0, 0, 0}) == 1.0);
  CHECK(at("1-2-3", {0, 0, 0}) == -4.0);
  CHECK(at("1.5e2 + .5", {0, 0, 0}) == 150.5);
}

TEST_CASE("variables and functions") {
  const double eps = 0.2;
  CHECK(at("2+sin(2*pi*x/eps)", {eps / 4}, eps, 1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(at("2+sin(2*pi*x/eps)", {0.0}, 0.37, 1) == 2.0);
  CHECK(at("2+sin(2*pi*(x+y)/eps)", {eps / 8, eps / 8}, eps, 2) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(at("sqrt(abs(-16)) + floor(2.7) + exp(0) + cos(0)", {0}, 1.0, 1) == 8.0);
  CHECK(at("x + y + z", {1, 2, 3}) == 6.0);
}

TEST_CASE("mod and select give the piecewise coefficient") {
  const double eps = 0.1;
  const std::string a = "select(mod(x,eps) < eps/2, 1, 10)";
  CHECK(at(a, {0.3 * eps}, eps, 1) == 1.0);
  CHECK(at(a, {0.7 * eps}, eps, 1) == 10.0);
  CHECK(at(a, {3.7 * eps}, eps, 1) == 10.0);
  CHECK(at("mod(-1, 3)", {0}) == 2.0);
  CHECK(at("mod(7.5, 2)", {0}) == 1.5);
  CHECK(at("(1 <= 1) + (2 > 3) + (2 >= 2)", {0}) == 2.0);
}

TEST_CASE("two-scale coefficient at the origin") {
  const std::string a =
      "(1.5+sin(2*pi*x/eps))/(1.5+sin(2*pi*y/eps)) + (1.5+sin(2*pi*y/eps))/(1.5+cos(2*pi*x/eps))"
      " + sin(4*x^2*y^2) + 1";
  for (double eps : {0.5, 0.1, 0.013}) CHECK(at(a, {0, 0}, eps, 2) == doctest::Approx(2.6).epsilon(1e-15));
}

TEST_CASE("scale bindings") {
  ExprBindings b;
  b.scales = {0.5, 0.25, 0.125, 1.0, 2.0};
  const double x = 0.0;
  CHECK(eval_expr(parse("eps1 + eps2 + eps3 + eps4 + eps5"), std::span(&x, 1), b) == 3.875);
}

TEST_CASE("syntax errors carry offsets") {
  auto offset_of = [](const std::string& text, int dim = kMaxDim) -> std::size_t {
    try {
      parse(text, dim);
    } catch (const ParseError& e) {
      return e.offset();
    }
    FAIL("expected a parse error for " << text);
    return 0;
  };
  CHECK(offset_of("1 + * 2") == 4);
  CHECK(offset_of("foo(1)") == 0);
  CHECK(offset_of("2 + w") == 4);
  CHECK(offset_of("x + y", 1) == 4);
  CHECK(offset_of("x + z", 2) == 4);
  CHECK(offset_of("sin(1, 2)") >= 0);
  CHECK_THROWS_AS(parse("mod(1)"), ParseError);
  CHECK_THROWS_AS(parse("select(1,2)"), ParseError);
  CHECK_THROWS_AS(parse("(1+2"), ParseError);
  CHECK_THROWS_AS(parse("1 2"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1 +"), ConfigError);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(at("1/(x-x)", {0.3}), EvalError);
  CHECK_THROWS_AS(at("sqrt(x-1)", {0.3}), EvalError);
  CHECK_THROWS_AS(at("mod(x, 0)", {0.3}), NumericalError);
}

TEST_CASE("printing and reparsing is a fixed point") {
  const std::vector<std::string> corpus = {
      "2+sin(2*pi*x/eps)",
      "select(mod(x,eps) < eps/2, 1, 10)",
      "-x^2^-y + abs(-3)*floor(z)",
      "1/6*((1.1+sin(2*pi*x/eps1))/(1.1+sin(2*pi*y/eps1)) + sin(4*x^2*y^2) + 1)",
      "(x <= 0.5) - (y >= 0.25) + (z > 1)",
      "-(-(-1))",
  };
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  ExprBindings b;
  b.epsilon = 0.3;
  b.scales = {0.2, 0.3, 0.4, 0.5, 0.6};
  for (const auto& text : corpus) {
    const Expr e = parse(text);
    const Expr again = parse(e.to_string());
    CHECK(again == e);
    CHECK(again.to_string() == e.to_string());
    for (int i = 0; i < 20; ++i) {
      const double x[3] = {u(rng), u(rng), u(rng)};
      CHECK(again(x, b) == e(x, b));
    }
  }
}

TEST_CASE("constant detection") {
  CHECK(parse("3.5").is_constant());
  CHECK_FALSE(parse("x").is_constant());
  CHECK_FALSE(parse("1+1").is_constant());
}
