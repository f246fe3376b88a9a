#include "srbf/problem.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace srbf {

namespace {

constexpr double kPi = std::numbers::pi;

// Catalog coefficients. Each lambda performs the same floating-point
// operations, in the same order, as the corresponding expression text.
ScalarField catalog_coefficient(int id, double eps, const std::array<double, 5>& s) {
  switch (id) {
    case 1:
      return [eps](std::span<const double> p) { return 2.0 + std::sin(2.0 * kPi * p[0] / eps); };
    case 2:
      return [eps](std::span<const double> p) {
        return 2.0 + std::sin(2.0 * kPi * p[0] / eps) * std::cos(2.0 * kPi * p[0]);
      };
    case 3:
      return [eps](std::span<const double> p) {
        return 2.0 + std::sin(2.0 * kPi * p[0] + 2.0 * kPi * p[0] / eps);
      };
    case 4:
      return [eps](std::span<const double> p) {
        const double m = p[0] - eps * std::floor(p[0] / eps);
        return m < eps / 2.0 ? 1.0 : 10.0;
      };
    case 5:
      return [eps](std::span<const double> p) { return 2.0 + std::sin(2.0 * kPi * (p[0] + p[1]) / eps); };
    case 6:
      return [eps](std::span<const double> p) {
        const double x = p[0];
        const double y = p[1];
        return (1.5 + std::sin(2.0 * kPi * x / eps)) / (1.5 + std::sin(2.0 * kPi * y / eps)) +
               (1.5 + std::sin(2.0 * kPi * y / eps)) / (1.5 + std::cos(2.0 * kPi * x / eps)) +
               std::sin(4.0 * (x * x) * (y * y)) + 1.0;
      };
    case 7:
      return [s](std::span<const double> p) {
        const double x = p[0];
        const double y = p[1];
        return 1.0 / 6.0 *
               ((1.1 + std::sin(2.0 * kPi * x / s[0])) / (1.1 + std::sin(2.0 * kPi * y / s[0])) +
                (1.1 + std::sin(2.0 * kPi * y / s[1])) / (1.1 + std::cos(2.0 * kPi * x / s[1])) +
                (1.1 + std::cos(2.0 * kPi * x / s[2])) / (1.1 + std::sin(2.0 * kPi * y / s[2])) +
                (1.1 + std::sin(2.0 * kPi * y / s[3])) / (1.1 + std::cos(2.0 * kPi * x / s[3])) +
                (1.1 + std::cos(2.0 * kPi * x / s[4])) / (1.1 + std::sin(2.0 * kPi * y / s[4])) +
                std::sin(4.0 * (x * x) * (y * y)) + 1.0);
      };
    case 8:
      return [eps](std::span<const double> p) {
        return 2.0 + std::sin(2.0 * kPi * p[0] / eps) * std::sin(2.0 * kPi * p[1] / eps) *
                         std::sin(2.0 * kPi * p[2] / eps);
      };
    default:
      throw ConfigError("unknown built-in example " + std::to_string(id) + " (expected 1..8)");
  }
}

struct CatalogData {
  int dimension;
  const char* f;
  const char* g;
};

CatalogData catalog_data(int id) {
  switch (id) {
    case 1:
    case 2:
    case 3:
    case 4: return {1, "1", "1"};
    case 5: return {2, "-1", "1"};
    case 6:
    case 7: return {2, "-10", "0"};
    case 8: return {3, "10", "0"};
    default: throw ConfigError("unknown built-in example " + std::to_string(id) + " (expected 1..8)");
  }
}

ScalarField bind_expression(const std::string& text, const std::string& field, int dimension,
                            const ExprBindings& bindings) {
  Expr e;
  try {
    e = parse(text, dimension);
  } catch (const ParseError& err) {
    throw ConfigError(field + ": " + err.what());
  }
  if (e.is_constant()) {
    const double v = e({}, bindings);
    return [v](std::span<const double>) { return v; };
  }
  return [e, bindings](std::span<const double> p) { return e(p, bindings); };
}

std::optional<int> builtin_id(const std::string& text) {
  constexpr std::string_view prefix = "builtin:";
  if (text.rfind(prefix, 0) != 0) return std::nullopt;
  try {
    std::size_t used = 0;
    const int id = std::stoi(text.substr(prefix.size()), &used);
    if (used + prefix.size() != text.size()) throw ConfigError("");
    return id;
  } catch (...) {
    throw ConfigError("a: malformed built-in reference '" + text + "'");
  }
}

}  // namespace

int builtin_dimension(int id) { return catalog_data(id).dimension; }

std::string builtin_coefficient_text(int id) {
  switch (id) {
    case 1: return "2+sin(2*pi*x/eps)";
    case 2: return "2+sin(2*pi*x/eps)*cos(2*pi*x)";
    case 3: return "2+sin(2*pi*x+2*pi*x/eps)";
    case 4: return "select(mod(x,eps) < eps/2, 1, 10)";
    case 5: return "2+sin(2*pi*(x+y)/eps)";
    case 6:
      return "(1.5+sin(2*pi*x/eps))/(1.5+sin(2*pi*y/eps)) + (1.5+sin(2*pi*y/eps))/(1.5+cos(2*pi*x/eps))"
             " + sin(4*x^2*y^2) + 1";
    case 7:
      return "1/6*((1.1+sin(2*pi*x/eps1))/(1.1+sin(2*pi*y/eps1))"
             " + (1.1+sin(2*pi*y/eps2))/(1.1+cos(2*pi*x/eps2))"
             " + (1.1+cos(2*pi*x/eps3))/(1.1+sin(2*pi*y/eps3))"
             " + (1.1+sin(2*pi*y/eps4))/(1.1+cos(2*pi*x/eps4))"
             " + (1.1+cos(2*pi*x/eps5))/(1.1+sin(2*pi*y/eps5))"
             " + sin(4*x^2*y^2) + 1)";
    case 8: return "2+sin(2*pi*x/eps)*sin(2*pi*y/eps)*sin(2*pi*z/eps)";
    default: throw ConfigError("unknown built-in example " + std::to_string(id) + " (expected 1..8)");
  }
}

MultiscaleProblem builtin(int id, double epsilon) {
  const CatalogData data = catalog_data(id);
  ProblemDefinition def;
  def.dimension = data.dimension;
  def.epsilon = epsilon;
  def.a = "builtin:" + std::to_string(id);
  def.f = data.f;
  def.g = data.g;
  if (id == 7) def.scales.assign(kExample7Scales.begin(), kExample7Scales.end());
  return make_problem(def);
}

MultiscaleProblem make_problem(const ProblemDefinition& def) {
  if (def.dimension < 1 || def.dimension > kMaxDim) {
    throw ConfigError("dimension: must be 1, 2 or 3 (got " + std::to_string(def.dimension) + ")");
  }
  if (!(def.epsilon > 0.0) || !(def.epsilon <= 1.0)) {
    throw ConfigError("epsilon: must lie in (0, 1]");
  }
  if (def.scales.size() > 5) throw ConfigError("scales: at most 5 entries (eps1..eps5)");

  MultiscaleProblem p;
  p.dimension = def.dimension;
  p.epsilon = def.epsilon;
  p.definition = def;
  for (std::size_t i = 0; i < def.scales.size(); ++i) p.scales[i] = def.scales[i];

  const auto id = builtin_id(def.a);
  if (id && *id == 7 && def.scales.empty()) {
    p.scales = kExample7Scales;
    p.definition.scales.assign(kExample7Scales.begin(), kExample7Scales.end());
  }

  const ExprBindings bindings{p.epsilon, p.scales};
  if (id) {
    if (builtin_dimension(*id) != def.dimension) {
      throw ConfigError("a: builtin:" + std::to_string(*id) + " is a " + std::to_string(builtin_dimension(*id)) +
                        "D example but dimension is " + std::to_string(def.dimension));
    }
    p.a = catalog_coefficient(*id, p.epsilon, p.scales);
  } else {
    p.a = bind_expression(def.a, "a", def.dimension, bindings);
  }
  p.f = bind_expression(def.f, "f", def.dimension, bindings);
  p.g = bind_expression(def.g, "g", def.dimension, bindings);

  check_ellipticity(p);
  return p;
}

void check_ellipticity(const MultiscaleProblem& problem, std::size_t samples, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, kMaxDim> x{};
  const std::span<const double> point(x.data(), static_cast<std::size_t>(problem.dimension));
  for (std::size_t s = 0; s < samples; ++s) {
    for (int j = 0; j < problem.dimension; ++j) x[j] = unit(rng);
    // Include corners of the closed domain in the first draws.
    if (s < (1u << problem.dimension)) {
      for (int j = 0; j < problem.dimension; ++j) x[j] = (s >> j) & 1u ? 1.0 : 0.0;
    }
    double a = 0.0;
    try {
      a = problem.a(point);
    } catch (const EvalError& err) {
      throw ConfigError(std::string("a: ") + err.what());
    }
    if (!std::isfinite(a) || a <= 0.0) {
      std::string where = "(";
      for (int j = 0; j < problem.dimension; ++j) where += (j ? ", " : "") + std::to_string(x[j]);
      throw ConfigError("a: coefficient is not strictly positive at " + where + "): a = " + std::to_string(a));
    }
  }
}

ProblemDefinition problem_definition_from_json(const nlohmann::json& j, const std::string& path) {
  std::vector<std::string> errors;
  ProblemDefinition def;
  if (!j.is_object()) throw ConfigError(path + ": expected an object");

  auto number = [&](const char* key, double& out, bool required) {
    if (!j.contains(key)) {
      if (required) errors.push_back(path + "." + key + ": missing");
      return;
    }
    if (!j[key].is_number()) {
      errors.push_back(path + "." + key + ": expected a number");
      return;
    }
    out = j[key].get<double>();
  };
  auto text = [&](const char* key, std::string& out, bool required) {
    if (!j.contains(key)) {
      if (required) errors.push_back(path + "." + key + ": missing");
      return;
    }
    if (j[key].is_number()) {
      // Constants may be given as plain numbers.
      out = nlohmann::json(j[key].get<double>()).dump();
    } else if (j[key].is_string()) {
      out = j[key].get<std::string>();
    } else {
      errors.push_back(path + "." + key + ": expected a string or number");
    }
  };

  double dim = 0;
  number("dimension", dim, true);
  def.dimension = static_cast<int>(dim);
  if (j.contains("dimension") && (dim != def.dimension || def.dimension < 1 || def.dimension > kMaxDim)) {
    errors.push_back(path + ".dimension: must be 1, 2 or 3");
  }
  number("epsilon", def.epsilon, true);
  if (j.contains("epsilon") && j["epsilon"].is_number() && !(def.epsilon > 0.0 && def.epsilon <= 1.0)) {
    errors.push_back(path + ".epsilon: must lie in (0, 1]");
  }
  text("a", def.a, true);

  // Catalog problems carry default f and g.
  std::optional<int> id;
  try {
    id = builtin_id(def.a);
  } catch (const ConfigError& err) {
    errors.push_back(path + "." + err.what());
  }
  if (id && *id >= 1 && *id <= 8) {
    def.f = catalog_data(*id).f;
    def.g = catalog_data(*id).g;
  }
  text("f", def.f, !id);
  text("g", def.g, !id);

  if (j.contains("scales")) {
    if (!j["scales"].is_array()) {
      errors.push_back(path + ".scales: expected an array");
    } else {
      for (const auto& v : j["scales"]) {
        if (!v.is_number()) {
          errors.push_back(path + ".scales: entries must be numbers");
          break;
        }
        def.scales.push_back(v.get<double>());
      }
    }
  }

  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
    throw ConfigError(msg);
  }
  return def;
}

nlohmann::json to_json(const ProblemDefinition& def) {
  nlohmann::json j;
  j["dimension"] = def.dimension;
  j["epsilon"] = def.epsilon;
  j["a"] = def.a;
  j["f"] = def.f;
  j["g"] = def.g;
  if (!def.scales.empty()) j["scales"] = def.scales;
  return j;
}

}  // namespace srbf
