#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "srbf/problem.hpp"

using namespace srbf;

namespace {

const std::vector<double> kSweep = {0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002};

}  // namespace

TEST_CASE("catalog data") {
  const MultiscaleProblem p1 = builtin(1, 0.5);
  const double o = 0.0;
  CHECK(p1.dimension == 1);
  CHECK(p1.a(std::span(&o, 1)) == 2.0);
  CHECK(p1.f(std::span(&o, 1)) == 1.0);
  CHECK(p1.g(std::span(&o, 1)) == 1.0);

  const MultiscaleProblem p5 = builtin(5, 0.1);
  const double q[2] = {0.025, 0.0};
  CHECK(p5.a(q) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(p5.f(q) == -1.0);
  CHECK(p5.g(q) == 1.0);

  const MultiscaleProblem p7 = builtin(7, 0.3);
  CHECK(p7.scales == kExample7Scales);
  CHECK(p7.scales[0] == 1.0 / 5);
  CHECK(p7.scales[4] == 1.0 / 65);
  CHECK(p7.f(q) == -10.0);
  CHECK(p7.g(q) == 0.0);

  const MultiscaleProblem p8 = builtin(8, 0.1);
  CHECK(p8.dimension == 3);
  const double r[3] = {0.025, 0.025, 0.025};
  CHECK(p8.a(r) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(p8.f(r) == 10.0);
  CHECK(p8.g(r) == 0.0);

  CHECK_THROWS_AS(builtin(0, 0.5), ConfigError);
  CHECK_THROWS_AS(builtin(9, 0.5), ConfigError);
}

TEST_CASE("catalog and expression paths agree on random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int id = 1; id <= 8; ++id) {
    const int dim = builtin_dimension(id);
    for (double eps : {0.5, 0.1, 0.01}) {
      const MultiscaleProblem native = builtin(id, eps);
      ProblemDefinition def;
      def.dimension = dim;
      def.epsilon = eps;
      def.a = builtin_coefficient_text(id);
      def.f = native.definition.f;
      def.g = native.definition.g;
      if (id == 7) def.scales.assign(kExample7Scales.begin(), kExample7Scales.end());
      const MultiscaleProblem parsed = make_problem(def);
      double worst = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const double x[3] = {u(rng), u(rng), u(rng)};
        const std::span<const double> p(x, static_cast<std::size_t>(dim));
        worst = std::max(worst, std::abs(native.a(p) - parsed.a(p)));
      }
      INFO("example " << id << " eps " << eps);
      CHECK(worst <= 1e-15);
    }
  }
}

TEST_CASE("every catalog coefficient is elliptic at every swept scale") {
  for (int id = 1; id <= 8; ++id) {
    for (double eps : kSweep) {
      INFO("example " << id << " eps " << eps);
      CHECK_NOTHROW(check_ellipticity(builtin(id, eps)));
    }
  }
}

TEST_CASE("example 1 minimum is 1") {
  const MultiscaleProblem p = builtin(1, 0.1);
  const double x = 0.075;
  CHECK(p.a(std::span(&x, 1)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ellipticity failures are configuration errors") {
  ProblemDefinition def;
  def.dimension = 1;
  def.epsilon = 0.5;
  def.a = "x - 0.5";
  def.f = "1";
  def.g = "0";
  CHECK_THROWS_AS(make_problem(def), ConfigError);
  def.a = "1/(x-x)";
  CHECK_THROWS(make_problem(def));
}

TEST_CASE("problem json collects all field errors") {
  const auto j = nlohmann::json::parse(R"({"dimension": 4, "a": "1+", "f": [1]})");
  try {
    problem_definition_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("problem.dimension") != std::string::npos);
    CHECK(msg.find("problem.epsilon") != std::string::npos);
    CHECK(msg.find("problem.f") != std::string::npos);
  }
}

TEST_CASE("problem json round trip") {
  const auto j = nlohmann::json::parse(R"({"dimension": 2, "epsilon": 0.25, "a": "builtin:5"})");
  const ProblemDefinition def = problem_definition_from_json(j);
  CHECK(def.dimension == 2);
  CHECK(def.epsilon == 0.25);
  const ProblemDefinition again = problem_definition_from_json(to_json(def));
  CHECK(again.a == def.a);
  CHECK(again.f == def.f);
  CHECK(again.g == def.g);
  const MultiscaleProblem p = make_problem(def);
  const double x[2] = {0.3, 0.4};
  CHECK(p.a(x) == builtin(5, 0.25).a(x));
  CHECK(p.f(x) == -1.0);
}
