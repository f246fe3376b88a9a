#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srbf {

/// Moment estimates for one parameter vector.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}

  /// Keeps only the parameter blocks of the listed units (ascending), each
  /// `block` entries wide. Used after pruning so moments stay aligned.
  void retain_blocks(std::span<const std::size_t> kept, std::size_t block);
};

/// One bias-corrected Adam update in place:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g*g,
///   theta <- theta - lr * (m / (1-b1^k)) / (sqrt(v / (1-b2^k)) + eps).
/// Throws NumericalError (leaving everything untouched) if any gradient is
/// not finite, ConfigError on shape mismatch or lr <= 0.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr);

/// Step decay: initial * factor^floor(iter / every), never below the floor.
struct LrSchedule {
  double initial = 0.1;
  std::size_t decay_every = 300;
  double decay_factor = 0.1;
  double floor = 1e-5;
};

double lr_at(const LrSchedule& schedule, std::size_t iter);

}  // namespace srbf
