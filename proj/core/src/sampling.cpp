#include "srbf/sampling.hpp"

#include <cmath>
#include <string>

namespace srbf {

namespace {

void check_dimension(int dimension) {
  if (dimension < 1 || dimension > kMaxDim) throw ConfigError("dimension must be 1, 2 or 3");
}

}  // namespace

std::size_t cells_for_spacing(double h) {
  if (!(h > 0.0) || !(h <= 1.0)) throw ConfigError("mesh size must lie in (0, 1]");
  const double inv = 1.0 / h;
  const auto cells = static_cast<std::size_t>(std::llround(inv));
  if (cells == 0 || std::abs(static_cast<double>(cells) * h - 1.0) > 1e-12) {
    throw ConfigError("mesh size " + std::to_string(h) + " does not divide [0,1] into whole cells");
  }
  return cells;
}

PointSet sample_interior_random(int dimension, std::size_t count, Rng& rng) {
  check_dimension(dimension);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointSet points(dimension);
  points.reserve(count);
  std::array<double, kMaxDim> x{};
  for (std::size_t m = 0; m < count; ++m) {
    for (int j = 0; j < dimension; ++j) {
      do {
        x[j] = unit(rng);
      } while (x[j] == 0.0);
    }
    points.push_back({x.data(), static_cast<std::size_t>(dimension)});
  }
  return points;
}

PointSet sample_interior_grid(int dimension, double h) {
  check_dimension(dimension);
  const std::size_t cells = cells_for_spacing(h);
  PointSet points(dimension);
  if (cells < 2) return points;
  const std::size_t inner = cells - 1;
  std::size_t total = 1;
  for (int j = 0; j < dimension; ++j) total *= inner;
  points.reserve(total);

  std::array<double, kMaxDim> x{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int j = dimension - 1; j >= 0; --j) {
      x[j] = static_cast<double>(rest % inner + 1) / static_cast<double>(cells);
      rest /= inner;
    }
    points.push_back({x.data(), static_cast<std::size_t>(dimension)});
  }
  return points;
}

PointSet sample_interior(int dimension, const InteriorSampling& spec, Rng& rng) {
  return spec.mode == SamplingMode::random ? sample_interior_random(dimension, spec.count, rng)
                                           : sample_interior_grid(dimension, spec.spacing);
}

PointSet sample_boundary(int dimension, std::size_t per_face) {
  check_dimension(dimension);
  PointSet points(dimension);
  if (dimension == 1) {
    points.push_back(std::array<double, 1>{0.0});
    points.push_back(std::array<double, 1>{1.0});
    return points;
  }
  if (per_face == 0) throw ConfigError("boundary sample count must be positive");

  if (dimension == 2) {
    points.reserve(4 * per_face);
    const double n = static_cast<double>(per_face);
    for (std::size_t k = 0; k < per_face; ++k) points.push_back(std::array{static_cast<double>(k) / n, 0.0});
    for (std::size_t k = 0; k < per_face; ++k) points.push_back(std::array{1.0, static_cast<double>(k) / n});
    for (std::size_t k = 0; k < per_face; ++k) {
      points.push_back(std::array{1.0 - static_cast<double>(k) / n, 1.0});
    }
    for (std::size_t k = 0; k < per_face; ++k) {
      points.push_back(std::array{0.0, 1.0 - static_cast<double>(k) / n});
    }
    return points;
  }

  auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(per_face))));
  const double inv = 1.0 / static_cast<double>(side);
  points.reserve(6 * side * side);
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (double fixed : {0.0, 1.0}) {
      for (std::size_t a = 0; a < side; ++a) {
        for (std::size_t b = 0; b < side; ++b) {
          std::array<double, 3> x{};
          x[axis] = fixed;
          x[u] = (static_cast<double>(a) + 0.5) * inv;
          x[v] = (static_cast<double>(b) + 0.5) * inv;
          points.push_back(x);
        }
      }
    }
  }
  return points;
}

RegularGrid::RegularGrid(int dimension, std::size_t cells) : dim_(dimension), cells_(cells) {
  check_dimension(dimension);
  if (cells < 1) throw ConfigError("grid needs at least one cell");
}

std::size_t RegularGrid::node_count() const {
  std::size_t total = 1;
  for (int j = 0; j < dim_; ++j) total *= nodes_per_axis();
  return total;
}

std::array<std::size_t, kMaxDim> RegularGrid::unflatten(std::size_t flat) const {
  std::array<std::size_t, kMaxDim> idx{};
  const std::size_t m = nodes_per_axis();
  for (int j = dim_ - 1; j >= 0; --j) {
    idx[j] = flat % m;
    flat /= m;
  }
  return idx;
}

std::size_t RegularGrid::flatten(const std::array<std::size_t, kMaxDim>& idx) const {
  std::size_t flat = 0;
  for (int j = 0; j < dim_; ++j) flat = flat * nodes_per_axis() + idx[j];
  return flat;
}

std::array<double, kMaxDim> RegularGrid::node(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::array<double, kMaxDim> x{};
  for (int j = 0; j < dim_; ++j) x[j] = coordinate(idx[j]);
  return x;
}

bool RegularGrid::on_boundary(std::size_t flat) const {
  const auto idx = unflatten(flat);
  for (int j = 0; j < dim_; ++j) {
    if (idx[j] == 0 || idx[j] == cells_) return true;
  }
  return false;
}

PointSet RegularGrid::nodes() const {
  PointSet points(dim_);
  points.reserve(node_count());
  for (std::size_t flat = 0; flat < node_count(); ++flat) {
    const auto x = node(flat);
    points.push_back({x.data(), static_cast<std::size_t>(dim_)});
  }
  return points;
}

}  // namespace srbf
