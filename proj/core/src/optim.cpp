#include "srbf/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srbf/common.hpp"

namespace srbf {

void AdamState::retain_blocks(std::span<const std::size_t> kept, std::size_t block) {
  std::vector<double> new_m;
  std::vector<double> new_v;
  new_m.reserve(kept.size() * block);
  new_v.reserve(kept.size() * block);
  for (std::size_t unit : kept) {
    const std::size_t off = unit * block;
    if (off + block > m.size()) throw ConfigError("retain_blocks: unit index out of range");
    new_m.insert(new_m.end(), m.begin() + static_cast<std::ptrdiff_t>(off),
                 m.begin() + static_cast<std::ptrdiff_t>(off + block));
    new_v.insert(new_v.end(), v.begin() + static_cast<std::ptrdiff_t>(off),
                 v.begin() + static_cast<std::ptrdiff_t>(off + block));
  }
  m = std::move(new_m);
  v = std::move(new_v);
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ConfigError("adam_step: shape mismatch (params " + std::to_string(params.size()) + ", grads " +
                      std::to_string(grads.size()) + ", moments " + std::to_string(state.m.size()) + ")");
  }
  if (!(lr > 0.0)) throw ConfigError("adam_step: learning rate must be positive");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericalError("adam_step: non-finite gradient at parameter " + std::to_string(i));
    }
  }

  state.step += 1;
  const double k = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, k);
  const double c2 = 1.0 - std::pow(state.beta2, k);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

double lr_at(const LrSchedule& schedule, std::size_t iter) {
  if (schedule.decay_every == 0) throw ConfigError("lr schedule: decay_every must be positive");
  const auto decays = static_cast<double>(iter / schedule.decay_every);
  const double lr = schedule.initial * std::pow(schedule.decay_factor, decays);
  return std::max(lr, std::min(schedule.floor, schedule.initial));
}

}  // namespace srbf
