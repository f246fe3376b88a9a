#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srbf/fdm.hpp"
#include "srbf/problem.hpp"
#include "srbf/rbf.hpp"
#include "srbf/sampling.hpp"

namespace srbf {

/// Values and gradient components of a field at the nodes of a grid.
struct NodalFields {
  int dimension = 1;
  std::vector<double> value;
  std::vector<std::vector<double>> gradient;  // one vector per axis
};

NodalFields reference_fields(const FdmSolution& reference);

/// u from the first network; grad u reconstructed as (p/a, q/a, r/a) from
/// the auxiliary networks.
NodalFields network_fields(std::span<const RbfNetwork> bundle, const PointSet& nodes,
                           const MultiscaleProblem& problem);

/// A relative error is empty when the reference norm is zero.
struct ErrorReport {
  std::optional<double> err2;
  std::optional<double> err_inf;
  std::optional<double> err_h1;
  std::size_t basis_count = 0;
  double epsilon = 0.0;
  double runtime_seconds = 0.0;
  std::string example;
};

/// Grid-mean discrete norms:
///   err2   = |uS - uF|_2 / |uF|_2
///   errInf = max|uS - uF| / max|uF|
///   errH1  = sqrt(|e|^2 + |grad e|^2) / sqrt(|uF|^2 + |grad uF|^2)
ErrorReport relative_errors(const NodalFields& approx, const NodalFields& reference);

ErrorReport relative_errors(std::span<const RbfNetwork> bundle, const FdmSolution& reference,
                            const MultiscaleProblem& problem);

/// sqrt(h^n sum (u_fine - u_other)^2) over the nodes of `grid`, one entry per
/// bundle in `others`. Only the solution networks are compared.
std::vector<double> self_convergence(std::span<const RbfNetwork> fine,
                                     std::span<const std::vector<RbfNetwork>> others, const RegularGrid& grid);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<std::pair<double, double>> points;  // (ln 1/eps, ln N)
};

/// Ordinary least squares of ln N on ln(1/eps). Needs two or more pairs
/// with distinct eps in (0,1) and N >= 1.
SlopeFit slope_fit(std::span<const std::pair<double, double>> eps_n);

std::string error_report_csv_header();
std::string to_csv_row(const ErrorReport& report);
std::string slope_fit_csv_header();
std::string to_csv_row(const SlopeFit& fit);

}  // namespace srbf
