#include "srbf/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "srbf/common.hpp"
#include "srbf/parallel.hpp"

namespace srbf {

namespace {

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, end};
}

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : "undefined"; }

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

NodalFields reference_fields(const FdmSolution& reference) {
  return {reference.dimension, reference.values, nodal_gradient(reference)};
}

NodalFields network_fields(std::span<const RbfNetwork> bundle, const PointSet& nodes,
                           const MultiscaleProblem& problem) {
  const int n = nodes.dimension();
  if (bundle.size() != static_cast<std::size_t>(n) + 1) {
    throw ConfigError("network bundle needs " + std::to_string(n + 1) + " networks for dimension " +
                      std::to_string(n));
  }
  for (const auto& net : bundle) {
    if (net.dimension() != n) throw ConfigError("network dimension does not match the evaluation grid");
  }
  NodalFields out{n, eval(bundle[0], nodes), {}};
  std::vector<double> a(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t m) { a[m] = problem.a(nodes[m]); });
  for (int k = 1; k <= n; ++k) {
    std::vector<double> flux = eval(bundle[static_cast<std::size_t>(k)], nodes);
    for (std::size_t m = 0; m < flux.size(); ++m) {
      if (a[m] == 0.0) throw NumericalError("coefficient vanishes at an evaluation node");
      flux[m] /= a[m];
    }
    out.gradient.push_back(std::move(flux));
  }
  return out;
}

ErrorReport relative_errors(const NodalFields& approx, const NodalFields& reference) {
  if (approx.dimension != reference.dimension || approx.value.size() != reference.value.size()) {
    throw ConfigError("approximation and reference live on different grids");
  }
  const std::size_t count = reference.value.size();
  if (count == 0) throw ConfigError("empty evaluation grid");
  double diff2 = 0.0, ref2 = 0.0, diff_max = 0.0, ref_max = 0.0, gdiff2 = 0.0, gref2 = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    const double e = approx.value[m] - reference.value[m];
    diff2 += e * e;
    ref2 += reference.value[m] * reference.value[m];
    diff_max = std::max(diff_max, std::abs(e));
    ref_max = std::max(ref_max, std::abs(reference.value[m]));
  }
  for (std::size_t k = 0; k < reference.gradient.size(); ++k) {
    for (std::size_t m = 0; m < count; ++m) {
      const double e = approx.gradient[k][m] - reference.gradient[k][m];
      gdiff2 += e * e;
      gref2 += reference.gradient[k][m] * reference.gradient[k][m];
    }
  }
  const auto c = static_cast<double>(count);
  ErrorReport r;
  r.err2 = ratio(std::sqrt(diff2 / c), std::sqrt(ref2 / c));
  r.err_inf = ratio(diff_max, ref_max);
  r.err_h1 = ratio(std::sqrt((diff2 + gdiff2) / c), std::sqrt((ref2 + gref2) / c));
  return r;
}

ErrorReport relative_errors(std::span<const RbfNetwork> bundle, const FdmSolution& reference,
                            const MultiscaleProblem& problem) {
  if (problem.dimension != reference.dimension) {
    throw ConfigError("reference dimension " + std::to_string(reference.dimension) +
                      " does not match problem dimension " + std::to_string(problem.dimension));
  }
  const PointSet nodes = reference.grid().nodes();
  ErrorReport r = relative_errors(network_fields(bundle, nodes, problem), reference_fields(reference));
  r.basis_count = bundle.empty() ? 0 : bundle[0].size();
  r.epsilon = problem.epsilon;
  return r;
}

std::vector<double> self_convergence(std::span<const RbfNetwork> fine,
                                     std::span<const std::vector<RbfNetwork>> others, const RegularGrid& grid) {
  if (fine.empty()) throw ConfigError("self_convergence: empty reference bundle");
  const PointSet nodes = grid.nodes();
  const std::vector<double> base = eval(fine[0], nodes);
  const double weight = std::pow(grid.spacing(), grid.dimension());
  std::vector<double> out;
  for (const auto& bundle : others) {
    if (bundle.empty() || bundle[0].dimension() != fine[0].dimension()) {
      throw ConfigError("self_convergence: bundle dimensions differ");
    }
    const std::vector<double> u = eval(bundle[0], nodes);
    double s = 0.0;
    for (std::size_t m = 0; m < u.size(); ++m) s += (u[m] - base[m]) * (u[m] - base[m]);
    out.push_back(std::sqrt(weight * s));
  }
  return out;
}

SlopeFit slope_fit(std::span<const std::pair<double, double>> eps_n) {
  if (eps_n.size() < 2) throw ConfigError("slope fit needs at least two (epsilon, N) pairs");
  SlopeFit fit;
  for (const auto& [eps, n] : eps_n) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("slope fit: epsilon must lie in (0, 1), got " + number(eps));
    if (!(n >= 1.0)) throw ConfigError("slope fit: N must be at least 1, got " + number(n));
    fit.points.emplace_back(std::log(1.0 / eps), std::log(n));
  }
  // Sorting makes the result independent of input order.
  auto sorted = fit.points;
  std::sort(sorted.begin(), sorted.end());
  const auto count = static_cast<double>(sorted.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : sorted) {
    mx += x;
    my += y;
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : sorted) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw ConfigError("slope fit: all epsilon values are equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

std::string error_report_csv_header() { return "example,epsilon,N,err2,errInf,errH1,runtime_s"; }

std::string to_csv_row(const ErrorReport& r) {
  return r.example + "," + number(r.epsilon) + "," + std::to_string(r.basis_count) + "," + optional_number(r.err2) +
         "," + optional_number(r.err_inf) + "," + optional_number(r.err_h1) + "," + number(r.runtime_seconds);
}

std::string slope_fit_csv_header() { return "slope,intercept,points"; }

std::string to_csv_row(const SlopeFit& fit) {
  return number(fit.slope) + "," + number(fit.intercept) + "," + std::to_string(fit.points.size());
}

}  // namespace srbf
