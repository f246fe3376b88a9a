#pragma once

#include <span>
#include <vector>

#include "srbf/common.hpp"
#include "srbf/problem.hpp"
#include "srbf/rbf.hpp"

namespace srbf {

/// Penalties on the divergence residual, the boundary residual and the
/// l1 norm of the solution network's weights.
struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 100.0;
  double lambda3 = 0.0;
};

/// Raw residual terms (batch means) and the assembled totals:
///   l2_total = flux + lambda1 * divergence + lambda2 * boundary
///   total    = l2_total + lambda3 * l1
struct LossBreakdown {
  double flux = 0.0;
  double divergence = 0.0;
  double boundary = 0.0;
  double l1 = 0.0;
  double l2_total = 0.0;
  double total = 0.0;
};

/// Interior points with the coefficient and source tabulated at each point.
struct InteriorBatch {
  int dimension = 1;
  std::span<const double> coords;
  std::span<const double> a;
  std::span<const double> f;

  std::size_t size() const { return a.size(); }
};

/// Boundary points with the Dirichlet data tabulated at each point.
struct BoundaryBatch {
  int dimension = 1;
  std::span<const double> coords;
  std::span<const double> g;

  std::size_t size() const { return g.size(); }
};

struct TabulatedInterior {
  PointSet points;
  std::vector<double> a;
  std::vector<double> f;

  InteriorBatch view() const { return {points.dimension(), points.coords(), a, f}; }
};

struct TabulatedBoundary {
  PointSet points;
  std::vector<double> g;

  BoundaryBatch view() const { return {points.dimension(), points.coords(), g}; }
};

TabulatedInterior tabulate_interior(const MultiscaleProblem& problem, PointSet points);
TabulatedBoundary tabulate_boundary(const MultiscaleProblem& problem, PointSet points);

/// Networks are ordered [u, p, q, r][0..n]: the solution followed by one
/// flux network per axis. Residuals per interior point x:
///   flux_k     = a(x) du/dx_k - P_k(x)
///   divergence = sum_k dP_k/dx_k + f(x)
/// and per boundary point u(x) - g(x).
LossBreakdown system_loss(std::span<const RbfNetwork> nets, const InteriorBatch& interior,
                          const BoundaryBatch& boundary, const LossWeights& weights);

LossBreakdown loss_1d(const RbfNetwork& u, const RbfNetwork& p, const MultiscaleProblem& problem,
                      const PointSet& interior, const PointSet& boundary, const LossWeights& weights);
LossBreakdown loss_2d(const RbfNetwork& u, const RbfNetwork& p, const RbfNetwork& q,
                      const MultiscaleProblem& problem, const PointSet& interior, const PointSet& boundary,
                      const LossWeights& weights);
LossBreakdown loss_3d(const RbfNetwork& u, const RbfNetwork& p, const RbfNetwork& q, const RbfNetwork& r,
                      const MultiscaleProblem& problem, const PointSet& interior, const PointSet& boundary,
                      const LossWeights& weights);

struct LossGradients {
  LossBreakdown loss;
  /// One gradient per network in the flatten() parameter layout.
  std::vector<std::vector<double>> grads;
};

/// Loss and its exact gradient with respect to every parameter of every
/// network. The l1 term contributes lambda3 * sign(w) to the solution
/// network's weights, with sign(0) = 0.
LossGradients loss_grads(std::span<const RbfNetwork> nets, const InteriorBatch& interior,
                         const BoundaryBatch& boundary, const LossWeights& weights);

LossGradients loss_grads(std::span<const RbfNetwork> nets, const MultiscaleProblem& problem,
                         const PointSet& interior, const PointSet& boundary, const LossWeights& weights);

}  // namespace srbf
