#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srbf {

inline constexpr int kMaxDim = 3;

/// Seeded generator used for every random draw in the library.
using Rng = std::mt19937_64;

/// Derives an independent stream from a run seed; `stream` separates
/// initialisation, sampling and shuffling so they do not share state.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: configuration files, expressions, arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation not supported for the given input (e.g. a 3D reference solve).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, singular systems, solver breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A batch of points in [0,1]^n stored row-major (point-major).
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int dimension) : dim_(dimension) {}
  PointSet(int dimension, std::vector<double> coords);

  int dimension() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  void push_back(std::span<const double> x);
  void reserve(std::size_t n) { coords_.reserve(n * static_cast<std::size_t>(dim_)); }

  std::span<const double> coords() const { return coords_; }
  std::vector<double>& raw() { return coords_; }

 private:
  int dim_ = 0;
  std::vector<double> coords_;
};

}  // namespace srbf
