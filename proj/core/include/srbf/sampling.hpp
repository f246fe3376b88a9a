#pragma once

#include <array>
#include <cstddef>

#include "srbf/common.hpp"

namespace srbf {

enum class SamplingMode { random, grid };

struct InteriorSampling {
  SamplingMode mode = SamplingMode::random;
  std::size_t count = 10000;  // random mode
  double spacing = 0.002;     // grid mode
};

/// Number of cells 1/h; throws ConfigError unless h divides 1 within 1e-12.
std::size_t cells_for_spacing(double h);

/// `count` i.i.d. uniform points strictly inside (0,1)^n.
PointSet sample_interior_random(int dimension, std::size_t count, Rng& rng);

/// Tensor grid with spacing h, boundary nodes excluded.
PointSet sample_interior_grid(int dimension, double h);

PointSet sample_interior(int dimension, const InteriorSampling& spec, Rng& rng);

/// Equispaced points on the boundary of [0,1]^n.
///  n=1: the two endpoints (per_face is ignored).
///  n=2: per_face points on each edge, walking the perimeter counter-clockwise
///       from the origin, 4*per_face in total.
///  n=3: a k-by-k cell-centred grid on each of the 6 faces, k = ceil(sqrt(per_face)).
PointSet sample_boundary(int dimension, std::size_t per_face);

/// Node lattice {i*h : i = 0..cells}^n covering the closed unit cube.
/// Flat node indices are row-major with x varying slowest.
class RegularGrid {
 public:
  RegularGrid(int dimension, std::size_t cells);

  int dimension() const { return dim_; }
  std::size_t cells() const { return cells_; }
  std::size_t nodes_per_axis() const { return cells_ + 1; }
  std::size_t node_count() const;
  double spacing() const { return 1.0 / static_cast<double>(cells_); }

  double coordinate(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(cells_); }
  std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<std::size_t, kMaxDim>& idx) const;
  std::array<double, kMaxDim> node(std::size_t flat) const;
  bool on_boundary(std::size_t flat) const;

  PointSet nodes() const;

 private:
  int dim_;
  std::size_t cells_;
};

}  // namespace srbf
