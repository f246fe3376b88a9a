#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srbf/common.hpp"
#include "srbf/expr.hpp"

namespace srbf {

using ScalarField = std::function<double(std::span<const double>)>;

/// Textual problem description as it appears in a problem file:
/// {"dimension", "epsilon", "a": "<expr or builtin:k>", "f", "g", "scales"}.
struct ProblemDefinition {
  int dimension = 1;
  double epsilon = 1.0;
  std::string a;
  std::string f;
  std::string g;
  std::vector<double> scales;
};

/// -div(a grad u) = f on [0,1]^n, u = g on the boundary.
struct MultiscaleProblem {
  int dimension = 1;
  double epsilon = 1.0;
  std::array<double, 5> scales{};
  ScalarField a;
  ScalarField f;
  ScalarField g;
  ProblemDefinition definition;
};

/// The five fixed scales of the six-scale example (id 7).
inline constexpr std::array<double, 5> kExample7Scales{1.0 / 5, 1.0 / 13, 1.0 / 17, 1.0 / 31, 1.0 / 65};

/// Closed-form catalog entry for example `id` in 1..8. Coefficients are
/// native code; they agree bit-for-bit with `builtin_coefficient_text(id)`
/// evaluated through the expression engine.
MultiscaleProblem builtin(int id, double epsilon);

/// Expression-language form of the catalog coefficient of example `id`.
std::string builtin_coefficient_text(int id);

/// Spatial dimension of catalog example `id`.
int builtin_dimension(int id);

/// Binds a definition: "builtin:k" coefficients use the catalog, anything
/// else is parsed. Runs the ellipticity check before returning.
MultiscaleProblem make_problem(const ProblemDefinition& definition);

/// Samples `samples` points in the closed domain and throws ConfigError if
/// the coefficient is not strictly positive and finite at all of them.
void check_ellipticity(const MultiscaleProblem& problem, std::size_t samples = 10000,
                       std::uint64_t seed = 20230911);

/// Parses a problem object, collecting every field error before throwing
/// one ConfigError. `path` prefixes field names in messages.
ProblemDefinition problem_definition_from_json(const nlohmann::json& j, const std::string& path = "problem");
nlohmann::json to_json(const ProblemDefinition& definition);

}  // namespace srbf
