#include "srbf/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srbf/parallel.hpp"

namespace srbf {

std::string_view to_string(BasisForm form) { return form == BasisForm::squared ? "squared" : "literal"; }

BasisForm basis_form_from_string(std::string_view text) {
  if (text == "squared") return BasisForm::squared;
  if (text == "literal") return BasisForm::literal;
  throw ConfigError("basis_form: expected \"squared\" or \"literal\", got \"" + std::string(text) + "\"");
}

RbfNetwork::RbfNetwork(int dimension, BasisForm form) : dim_(dimension), form_(form) {
  if (dimension < 1 || dimension > kMaxDim) throw ConfigError("network dimension must be 1, 2 or 3");
}

RbfNetwork::RbfNetwork(int dimension, std::vector<RbfUnit> units, BasisForm form)
    : RbfNetwork(dimension, form) {
  units_ = std::move(units);
}

Profile basis_profile(BasisForm form, double s) {
  if (form == BasisForm::squared) {
    const double e = std::exp(-s);
    return {e, -e, e};
  }
  const double rho = std::sqrt(s);
  const double e = std::exp(-rho);
  if (rho == 0.0) return {e, 0.0, 0.0};
  return {e, -e / (2.0 * rho), e * (rho + 1.0) / (4.0 * rho * rho * rho)};
}

namespace {

double scaled_distance(const RbfUnit& u, std::span<const double> x, int dim,
                       std::array<double, kMaxDim>& r) {
  double s = 0.0;
  for (int j = 0; j < dim; ++j) {
    r[j] = x[j] - u.center[j];
    const double t = u.shape[j] * r[j];
    s += t * t;
  }
  return s;
}

void check_point(const RbfNetwork& net, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(net.dimension())) {
    throw ConfigError("point has " + std::to_string(x.size()) + " coordinates, network is " +
                      std::to_string(net.dimension()) + "D");
  }
}

}  // namespace

double eval_basis(const RbfUnit& unit, std::span<const double> x, int dimension, BasisForm form) {
  std::array<double, kMaxDim> r{};
  const double s = scaled_distance(unit, x, dimension, r);
  return form == BasisForm::squared ? std::exp(-s) : std::exp(-std::sqrt(s));
}

double eval(const RbfNetwork& net, std::span<const double> x) {
  check_point(net, x);
  double sum = 0.0;
  for (const auto& u : net.units()) sum += u.weight * eval_basis(u, x, net.dimension(), net.form());
  return sum;
}

std::vector<double> eval(const RbfNetwork& net, const PointSet& points) {
  if (points.dimension() != net.dimension()) throw ConfigError("point set dimension does not match network");
  std::vector<double> out(points.size(), 0.0);
  constexpr std::size_t chunk = 256;
  parallel_for((points.size() + chunk - 1) / chunk, [&](std::size_t t) {
    const std::size_t end = std::min(points.size(), (t + 1) * chunk);
    for (std::size_t m = t * chunk; m < end; ++m) out[m] = eval(net, points[m]);
  });
  return out;
}

std::vector<double> grad_x(const RbfNetwork& net, std::span<const double> x) {
  check_point(net, x);
  const int n = net.dimension();
  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  std::array<double, kMaxDim> r{};
  for (const auto& u : net.units()) {
    const Profile p = basis_profile(net.form(), scaled_distance(u, x, n, r));
    for (int k = 0; k < n; ++k) g[k] += u.weight * p.d1 * 2.0 * u.shape[k] * u.shape[k] * r[k];
  }
  return g;
}

ParamGradients param_grads(const RbfNetwork& net, std::span<const double> x) {
  check_point(net, x);
  const int n = net.dimension();
  ParamGradients out;
  out.value.resize(net.size());
  for (int k = 0; k < n; ++k) out.gradient[k].resize(net.size());

  std::array<double, kMaxDim> r{};
  for (std::size_t i = 0; i < net.size(); ++i) {
    const RbfUnit& u = net[i];
    const Profile p = basis_profile(net.form(), scaled_distance(u, x, n, r));
    const double w = u.weight;

    // ds/dc_j = -2 d_j^2 r_j, ds/dd_j = 2 d_j r_j^2
    std::array<double, kMaxDim> ds_dc{};
    std::array<double, kMaxDim> ds_dd{};
    for (int j = 0; j < n; ++j) {
      ds_dc[j] = -2.0 * u.shape[j] * u.shape[j] * r[j];
      ds_dd[j] = 2.0 * u.shape[j] * r[j] * r[j];
    }

    UnitGradient& v = out.value[i];
    v.weight = p.value;
    for (int j = 0; j < n; ++j) {
      v.center[j] = w * p.d1 * ds_dc[j];
      v.shape[j] = w * p.d1 * ds_dd[j];
    }

    for (int k = 0; k < n; ++k) {
      const double ds_dx = 2.0 * u.shape[k] * u.shape[k] * r[k];
      UnitGradient& g = out.gradient[k][i];
      g.weight = p.d1 * ds_dx;
      for (int j = 0; j < n; ++j) {
        g.center[j] = w * p.d2 * ds_dc[j] * ds_dx;
        g.shape[j] = w * p.d2 * ds_dd[j] * ds_dx;
      }
      g.center[k] += w * p.d1 * (-2.0 * u.shape[k] * u.shape[k]);
      g.shape[k] += w * p.d1 * (4.0 * u.shape[k] * r[k]);
    }
  }
  return out;
}

RbfNetwork init_network(std::size_t count, int dimension, double epsilon, Rng& rng, BasisForm form) {
  if (count < 1) throw ConfigError("initial basis count must be at least 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> shape(0.0, 1.0 / epsilon);

  RbfNetwork net(dimension, form);
  net.units().reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RbfUnit u;
    for (int j = 0; j < dimension; ++j) u.center[j] = unit(rng);
    u.weight = unit(rng);
    for (int j = 0; j < dimension; ++j) u.shape[j] = shape(rng);
    net.add(u);
  }
  return net;
}

PruneResult prune(const RbfNetwork& net, double tol2) {
  if (!(tol2 >= 0.0)) throw ConfigError("tol2 must be non-negative");
  PruneResult result;
  result.network = RbfNetwork(net.dimension(), net.form());
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (std::abs(net[i].weight) >= tol2) {
      result.kept.push_back(i);
      result.network.add(net[i]);
    }
  }
  if (result.kept.empty() && !net.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < net.size(); ++i) {
      if (std::abs(net[i].weight) > std::abs(net[best].weight)) best = i;
    }
    result.kept.push_back(best);
    result.network.add(net[best]);
    result.kept_largest = true;
  }
  result.removed = net.size() - result.kept.size();
  return result;
}

std::vector<double> flatten(const RbfNetwork& net) {
  const int n = net.dimension();
  std::vector<double> params;
  params.reserve(net.size() * params_per_unit(n));
  for (const auto& u : net.units()) {
    params.push_back(u.weight);
    for (int j = 0; j < n; ++j) params.push_back(u.center[j]);
    for (int j = 0; j < n; ++j) params.push_back(u.shape[j]);
  }
  return params;
}

void assign_parameters(RbfNetwork& net, std::span<const double> params) {
  const int n = net.dimension();
  if (params.size() != net.size() * params_per_unit(n)) {
    throw ConfigError("parameter vector length does not match network size");
  }
  std::size_t k = 0;
  for (auto& u : net.units()) {
    u.weight = params[k++];
    for (int j = 0; j < n; ++j) u.center[j] = params[k++];
    for (int j = 0; j < n; ++j) u.shape[j] = params[k++];
  }
}

}  // namespace srbf
