#include "srbf/loss.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "srbf/parallel.hpp"

namespace srbf {

namespace {

// Points per work chunk. Fixed so that reductions, and therefore results,
// do not depend on the number of worker threads.
constexpr std::size_t kChunk = 128;

using Arr = Eigen::ArrayXd;

// Structure-of-arrays copy of one network.
template <int Dim>
struct Packed {
  std::size_t size = 0;
  Arr w;
  std::array<Arr, Dim> c;
  std::array<Arr, Dim> d;
  std::array<Arr, Dim> dd;  // d^2

  explicit Packed(const RbfNetwork& net) : size(net.size()), w(static_cast<Eigen::Index>(size)) {
    const auto n = static_cast<Eigen::Index>(size);
    for (int j = 0; j < Dim; ++j) {
      c[j].resize(n);
      d[j].resize(n);
    }
    for (std::size_t i = 0; i < size; ++i) {
      const RbfUnit& u = net[i];
      const auto e = static_cast<Eigen::Index>(i);
      w[e] = u.weight;
      for (int j = 0; j < Dim; ++j) {
        c[j][e] = u.center[j];
        d[j][e] = u.shape[j];
      }
    }
    for (int j = 0; j < Dim; ++j) dd[j] = d[j].square();
  }
};

// Per-unit quantities at the current point, shared by the forward and
// backward sweeps. d1 and d2 are only filled for the literal form; for the
// squared form phi' = -phi and phi'' = phi are used directly.
template <int Dim>
struct Scratch {
  std::array<Arr, Dim> r;
  Arr s, phi, wp, d1, d2;

  void resize(std::size_t n) {
    const auto e = static_cast<Eigen::Index>(n);
    for (auto& v : r) v.resize(e);
    s.resize(e);
    phi.resize(e);
    wp.resize(e);
    d1.resize(e);
    d2.resize(e);
  }
};

template <int Dim>
struct GradAccumulator {
  Arr w;
  std::array<Arr, Dim> c;
  std::array<Arr, Dim> d;

  void reset(std::size_t n) {
    const auto e = static_cast<Eigen::Index>(n);
    w.setZero(e);
    for (auto& v : c) v.setZero(e);
    for (auto& v : d) v.setZero(e);
  }
};

template <int Dim, BasisForm Form>
void profiles(const Packed<Dim>& net, const double* x, Scratch<Dim>& sc) {
  for (int j = 0; j < Dim; ++j) sc.r[j] = x[j] - net.c[j];
  if constexpr (Form == BasisForm::squared) {
    if constexpr (Dim == 1) {
      sc.phi = (-(net.dd[0] * sc.r[0].square())).exp();
    } else if constexpr (Dim == 2) {
      sc.phi = (-(net.dd[0] * sc.r[0].square() + net.dd[1] * sc.r[1].square())).exp();
    } else {
      sc.phi = (-(net.dd[0] * sc.r[0].square() + net.dd[1] * sc.r[1].square() + net.dd[2] * sc.r[2].square())).exp();
    }
  } else {
    sc.s = net.dd[0] * sc.r[0].square();
    for (int j = 1; j < Dim; ++j) sc.s += net.dd[j] * sc.r[j].square();
    for (Eigen::Index i = 0; i < sc.s.size(); ++i) {
      const Profile p = basis_profile(BasisForm::literal, sc.s[i]);
      sc.phi[i] = p.value;
      sc.d1[i] = p.d1;
      sc.d2[i] = p.d2;
    }
  }
}

// Network value and spatial gradient at x; fills the scratch for backward().
template <int Dim, BasisForm Form>
double forward(const Packed<Dim>& net, const double* x, Scratch<Dim>& sc, std::array<double, Dim>& grad) {
  profiles<Dim, Form>(net, x, sc);
  if constexpr (Form == BasisForm::squared) {
    sc.wp = net.w * sc.phi;
    for (int j = 0; j < Dim; ++j) grad[j] = -2.0 * (sc.wp * net.dd[j] * sc.r[j]).sum();
    return sc.wp.sum();
  } else {
    sc.wp = net.w * sc.d1;
    for (int j = 0; j < Dim; ++j) grad[j] = 2.0 * (sc.wp * net.dd[j] * sc.r[j]).sum();
    return (net.w * sc.phi).sum();
  }
}

template <int Dim, BasisForm Form>
double forward_value(const Packed<Dim>& net, const double* x, Scratch<Dim>& sc) {
  profiles<Dim, Form>(net, x, sc);
  if constexpr (Form == BasisForm::squared) {
    sc.wp = net.w * sc.phi;
    return sc.wp.sum();
  } else {
    return (net.w * sc.phi).sum();
  }
}

// Accumulates gamma * dV/dtheta + sum_k beta_k * dG_k/dtheta, where V is the
// network value and G_k its k-th spatial derivative.
//
// With t = sum_k 2 beta_k d_k^2 r_k, A = gamma phi' + t phi'':
//   dw  = gamma phi + t phi'
//   dc_j = -2 w d_j^2 (r_j A + beta_j phi')
//   dd_j = 2 w d_j r_j (r_j A + 2 beta_j phi')
template <int Dim, BasisForm Form>
void backward(const Packed<Dim>& net, const Scratch<Dim>& sc, double gamma, const std::array<double, Dim>& beta,
              GradAccumulator<Dim>& g) {
  const auto n = static_cast<std::size_t>(net.w.size());
  const double* __restrict w = net.w.data();
  const double* __restrict phi = sc.phi.data();
  double* __restrict gw = g.w.data();
  std::array<const double*, Dim> r, d, dd;
  std::array<double*, Dim> gc, gd;
  for (int j = 0; j < Dim; ++j) {
    r[j] = sc.r[j].data();
    d[j] = net.d[j].data();
    dd[j] = net.dd[j].data();
    gc[j] = g.c[j].data();
    gd[j] = g.d[j].data();
  }
  if constexpr (Form == BasisForm::squared) {
    // phi' = -phi, phi'' = phi, so A = phi (t - gamma).
    const double* __restrict wp = sc.wp.data();
#pragma GCC ivdep
    for (std::size_t i = 0; i < n; ++i) {
      double t = 0.0;
      for (int k = 0; k < Dim; ++k) t += 2.0 * beta[k] * dd[k][i] * r[k][i];
      const double u = t - gamma;
      gw[i] -= phi[i] * u;
      for (int j = 0; j < Dim; ++j) {
        gc[j][i] -= 2.0 * dd[j][i] * wp[i] * (r[j][i] * u - beta[j]);
        gd[j][i] += 2.0 * d[j][i] * wp[i] * r[j][i] * (r[j][i] * u - 2.0 * beta[j]);
      }
    }
  } else {
    const double* __restrict d1 = sc.d1.data();
    const double* __restrict d2 = sc.d2.data();
    for (std::size_t i = 0; i < n; ++i) {
      double t = 0.0;
      for (int k = 0; k < Dim; ++k) t += 2.0 * beta[k] * dd[k][i] * r[k][i];
      const double a = gamma * d1[i] + d2[i] * t;
      gw[i] += gamma * phi[i] + d1[i] * t;
      for (int j = 0; j < Dim; ++j) {
        gc[j][i] += w[i] * (-2.0 * dd[j][i]) * (r[j][i] * a + beta[j] * d1[i]);
        gd[j][i] += w[i] * (2.0 * d[j][i]) * r[j][i] * (r[j][i] * a + 2.0 * beta[j] * d1[i]);
      }
    }
  }
}

template <int Dim>
struct ChunkResult {
  double flux = 0.0;
  double divergence = 0.0;
  double boundary = 0.0;
  std::vector<GradAccumulator<Dim>> grads;
};

template <int Dim, BasisForm Form, bool WithGrads>
LossGradients run(std::span<const RbfNetwork> nets, const InteriorBatch& interior, const BoundaryBatch& boundary,
                  const LossWeights& weights) {
  constexpr int kNets = Dim + 1;
  constexpr std::size_t stride = 1 + 2 * Dim;
  std::vector<Packed<Dim>> packed;
  packed.reserve(kNets);
  for (int k = 0; k < kNets; ++k) packed.emplace_back(nets[k]);

  const std::size_t m_int = interior.size();
  const std::size_t m_bnd = boundary.size();
  const double inv_int = 1.0 / static_cast<double>(m_int);
  const double inv_bnd = m_bnd > 0 ? 1.0 / static_cast<double>(m_bnd) : 0.0;
  const std::size_t int_chunks = (m_int + kChunk - 1) / kChunk;
  const std::size_t bnd_chunks = (m_bnd + kChunk - 1) / kChunk;

  std::vector<ChunkResult<Dim>> chunks(int_chunks + bnd_chunks);

  parallel_for(chunks.size(), [&](std::size_t t) {
    ChunkResult<Dim>& out = chunks[t];
    if constexpr (WithGrads) {
      out.grads.resize(kNets);
      for (int k = 0; k < kNets; ++k) out.grads[k].reset(packed[k].size);
    }
    std::array<Scratch<Dim>, kNets> sc;
    for (int k = 0; k < kNets; ++k) sc[k].resize(packed[k].size);

    if (t < int_chunks) {
      const std::size_t begin = t * kChunk;
      const std::size_t end = std::min(m_int, begin + kChunk);
      for (std::size_t m = begin; m < end; ++m) {
        const double* x = interior.coords.data() + m * Dim;
        const double a = interior.a[m];

        std::array<double, Dim> du;
        forward<Dim, Form>(packed[0], x, sc[0], du);
        std::array<double, Dim> flux;
        std::array<double, Dim> dp_k;
        double div = interior.f[m];
        for (int k = 0; k < Dim; ++k) {
          std::array<double, Dim> dp;
          const double p = forward<Dim, Form>(packed[k + 1], x, sc[k + 1], dp);
          flux[k] = a * du[k] - p;
          dp_k[k] = dp[k];
          out.flux += flux[k] * flux[k];
        }
        for (int k = 0; k < Dim; ++k) div += dp_k[k];
        out.divergence += div * div;

        if constexpr (WithGrads) {
          std::array<double, Dim> beta_u;
          for (int k = 0; k < Dim; ++k) beta_u[k] = 2.0 * inv_int * flux[k] * a;
          backward<Dim, Form>(packed[0], sc[0], 0.0, beta_u, out.grads[0]);
          for (int k = 0; k < Dim; ++k) {
            std::array<double, Dim> beta{};
            beta[k] = weights.lambda1 * 2.0 * inv_int * div;
            backward<Dim, Form>(packed[k + 1], sc[k + 1], -2.0 * inv_int * flux[k], beta, out.grads[k + 1]);
          }
        }
      }
    } else {
      const std::size_t begin = (t - int_chunks) * kChunk;
      const std::size_t end = std::min(m_bnd, begin + kChunk);
      for (std::size_t m = begin; m < end; ++m) {
        const double* x = boundary.coords.data() + m * Dim;
        const double e = forward_value<Dim, Form>(packed[0], x, sc[0]) - boundary.g[m];
        out.boundary += e * e;
        if constexpr (WithGrads) {
          const std::array<double, Dim> none{};
          backward<Dim, Form>(packed[0], sc[0], weights.lambda2 * 2.0 * inv_bnd * e, none, out.grads[0]);
        }
      }
    }
  });

  LossGradients result;
  LossBreakdown& loss = result.loss;
  double flux = 0.0;
  double div = 0.0;
  double bnd = 0.0;
  for (const auto& c : chunks) {
    flux += c.flux;
    div += c.divergence;
    bnd += c.boundary;
  }
  loss.flux = flux * inv_int;
  loss.divergence = div * inv_int;
  loss.boundary = bnd * inv_bnd;
  for (const auto& u : nets[0].units()) loss.l1 += std::abs(u.weight);
  loss.l2_total = loss.flux + weights.lambda1 * loss.divergence + weights.lambda2 * loss.boundary;
  loss.total = loss.l2_total + weights.lambda3 * loss.l1;

  if constexpr (WithGrads) {
    result.grads.resize(kNets);
    for (int k = 0; k < kNets; ++k) {
      GradAccumulator<Dim> sum;
      sum.reset(packed[k].size);
      for (const auto& c : chunks) {
        sum.w += c.grads[k].w;
        for (int j = 0; j < Dim; ++j) {
          sum.c[j] += c.grads[k].c[j];
          sum.d[j] += c.grads[k].d[j];
        }
      }
      auto& g = result.grads[k];
      g.resize(packed[k].size * stride);
      for (std::size_t i = 0; i < packed[k].size; ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        g[i * stride] = sum.w[e];
        for (int j = 0; j < Dim; ++j) {
          g[i * stride + 1 + j] = sum.c[j][e];
          g[i * stride + 1 + Dim + j] = sum.d[j][e];
        }
      }
    }
    if (weights.lambda3 != 0.0) {
      auto& g = result.grads[0];
      for (std::size_t i = 0; i < packed[0].size; ++i) {
        const double w = nets[0][i].weight;
        const double sign = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
        g[i * stride] += weights.lambda3 * sign;
      }
    }
  }
  return result;
}

void validate(std::span<const RbfNetwork> nets, const InteriorBatch& interior, const BoundaryBatch& boundary,
              const LossWeights& weights) {
  const int n = interior.dimension;
  if (n < 1 || n > kMaxDim) throw ConfigError("loss: dimension must be 1, 2 or 3");
  if (nets.size() != static_cast<std::size_t>(n + 1)) {
    throw ConfigError("loss: a " + std::to_string(n) + "D system needs " + std::to_string(n + 1) +
                      " networks, got " + std::to_string(nets.size()));
  }
  for (const auto& net : nets) {
    if (net.dimension() != n) throw ConfigError("loss: network dimension does not match the samples");
    if (net.form() != nets[0].form()) throw ConfigError("loss: networks use different basis forms");
  }
  if (boundary.dimension != n) throw ConfigError("loss: boundary samples have the wrong dimension");
  if (interior.size() == 0) throw ConfigError("loss: interior batch is empty");
  if (boundary.size() == 0) throw ConfigError("loss: boundary batch is empty");
  if (interior.coords.size() != interior.size() * static_cast<std::size_t>(n) ||
      interior.f.size() != interior.size()) {
    throw ConfigError("loss: interior batch arrays have inconsistent lengths");
  }
  if (boundary.coords.size() != boundary.size() * static_cast<std::size_t>(n)) {
    throw ConfigError("loss: boundary batch arrays have inconsistent lengths");
  }
  if (!(weights.lambda1 >= 0.0) || !(weights.lambda2 >= 0.0) || !(weights.lambda3 >= 0.0)) {
    throw ConfigError("loss: penalty weights must be non-negative");
  }
}

template <bool WithGrads>
LossGradients dispatch(std::span<const RbfNetwork> nets, const InteriorBatch& interior,
                       const BoundaryBatch& boundary, const LossWeights& weights) {
  validate(nets, interior, boundary, weights);
  const bool squared = nets[0].form() == BasisForm::squared;
  switch (interior.dimension) {
    case 1:
      return squared ? run<1, BasisForm::squared, WithGrads>(nets, interior, boundary, weights)
                     : run<1, BasisForm::literal, WithGrads>(nets, interior, boundary, weights);
    case 2:
      return squared ? run<2, BasisForm::squared, WithGrads>(nets, interior, boundary, weights)
                     : run<2, BasisForm::literal, WithGrads>(nets, interior, boundary, weights);
    default:
      return squared ? run<3, BasisForm::squared, WithGrads>(nets, interior, boundary, weights)
                     : run<3, BasisForm::literal, WithGrads>(nets, interior, boundary, weights);
  }
}

LossBreakdown from_points(std::span<const RbfNetwork> nets, const MultiscaleProblem& problem,
                          const PointSet& interior, const PointSet& boundary, const LossWeights& weights) {
  const auto ti = tabulate_interior(problem, interior);
  const auto tb = tabulate_boundary(problem, boundary);
  return system_loss(nets, ti.view(), tb.view(), weights);
}

}  // namespace

TabulatedInterior tabulate_interior(const MultiscaleProblem& problem, PointSet points) {
  if (points.dimension() != problem.dimension) throw ConfigError("interior points have the wrong dimension");
  TabulatedInterior t;
  t.a.resize(points.size());
  t.f.resize(points.size());
  for (std::size_t m = 0; m < points.size(); ++m) {
    t.a[m] = problem.a(points[m]);
    t.f[m] = problem.f(points[m]);
  }
  t.points = std::move(points);
  return t;
}

TabulatedBoundary tabulate_boundary(const MultiscaleProblem& problem, PointSet points) {
  if (points.dimension() != problem.dimension) throw ConfigError("boundary points have the wrong dimension");
  TabulatedBoundary t;
  t.g.resize(points.size());
  for (std::size_t m = 0; m < points.size(); ++m) t.g[m] = problem.g(points[m]);
  t.points = std::move(points);
  return t;
}

LossBreakdown system_loss(std::span<const RbfNetwork> nets, const InteriorBatch& interior,
                          const BoundaryBatch& boundary, const LossWeights& weights) {
  return dispatch<false>(nets, interior, boundary, weights).loss;
}

LossGradients loss_grads(std::span<const RbfNetwork> nets, const InteriorBatch& interior,
                         const BoundaryBatch& boundary, const LossWeights& weights) {
  return dispatch<true>(nets, interior, boundary, weights);
}

LossGradients loss_grads(std::span<const RbfNetwork> nets, const MultiscaleProblem& problem,
                         const PointSet& interior, const PointSet& boundary, const LossWeights& weights) {
  const auto ti = tabulate_interior(problem, interior);
  const auto tb = tabulate_boundary(problem, boundary);
  return loss_grads(nets, ti.view(), tb.view(), weights);
}

LossBreakdown loss_1d(const RbfNetwork& u, const RbfNetwork& p, const MultiscaleProblem& problem,
                      const PointSet& interior, const PointSet& boundary, const LossWeights& weights) {
  if (problem.dimension != 1) throw ConfigError("loss_1d: problem is not one-dimensional");
  bool has_left = false;
  bool has_right = false;
  for (std::size_t m = 0; m < boundary.size(); ++m) {
    has_left = has_left || boundary[m][0] == 0.0;
    has_right = has_right || boundary[m][0] == 1.0;
  }
  if (!has_left || !has_right) throw ConfigError("loss_1d: boundary batch must contain both endpoints");
  const std::array<RbfNetwork, 2> nets{u, p};
  return from_points(nets, problem, interior, boundary, weights);
}

LossBreakdown loss_2d(const RbfNetwork& u, const RbfNetwork& p, const RbfNetwork& q,
                      const MultiscaleProblem& problem, const PointSet& interior, const PointSet& boundary,
                      const LossWeights& weights) {
  if (problem.dimension != 2) throw ConfigError("loss_2d: problem is not two-dimensional");
  const std::array<RbfNetwork, 3> nets{u, p, q};
  return from_points(nets, problem, interior, boundary, weights);
}

LossBreakdown loss_3d(const RbfNetwork& u, const RbfNetwork& p, const RbfNetwork& q, const RbfNetwork& r,
                      const MultiscaleProblem& problem, const PointSet& interior, const PointSet& boundary,
                      const LossWeights& weights) {
  if (problem.dimension != 3) throw ConfigError("loss_3d: problem is not three-dimensional");
  const std::array<RbfNetwork, 4> nets{u, p, q, r};
  return from_points(nets, problem, interior, boundary, weights);
}

}  // namespace srbf
