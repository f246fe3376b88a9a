#include "srbf/common.hpp"

namespace srbf {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

PointSet::PointSet(int dimension, std::vector<double> coords) : dim_(dimension), coords_(std::move(coords)) {
  if (dimension < 1 || dimension > kMaxDim) throw ConfigError("point dimension must be 1, 2 or 3");
  if (coords_.size() % static_cast<std::size_t>(dimension) != 0) {
    throw ConfigError("coordinate count is not a multiple of the dimension");
  }
}

void PointSet::push_back(std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(dim_)) throw ConfigError("point dimension mismatch");
  coords_.insert(coords_.end(), x.begin(), x.end());
}

}  // namespace srbf
