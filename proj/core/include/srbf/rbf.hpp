#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "srbf/common.hpp"

namespace srbf {

/// Exponent of the ellipse Gaussian. `squared` is exp(-|D(x-c)|^2);
/// `literal` is exp(-|D(x-c)|), whose derivatives at the centre are taken as 0.
enum class BasisForm { squared, literal };

std::string_view to_string(BasisForm form);
BasisForm basis_form_from_string(std::string_view text);

/// One term w * Phi(x; c, D) with D = diag(shape). Entries past the owning
/// network's dimension are unused and kept at zero.
struct RbfUnit {
  double weight = 0.0;
  std::array<double, kMaxDim> center{};
  std::array<double, kMaxDim> shape{};

  friend bool operator==(const RbfUnit&, const RbfUnit&) = default;
};

/// Sum of ellipse-Gaussian units approximating one scalar field on R^n.
class RbfNetwork {
 public:
  RbfNetwork() = default;
  explicit RbfNetwork(int dimension, BasisForm form = BasisForm::squared);
  RbfNetwork(int dimension, std::vector<RbfUnit> units, BasisForm form = BasisForm::squared);

  int dimension() const { return dim_; }
  BasisForm form() const { return form_; }
  std::size_t size() const { return units_.size(); }
  bool empty() const { return units_.empty(); }

  const std::vector<RbfUnit>& units() const { return units_; }
  std::vector<RbfUnit>& units() { return units_; }
  const RbfUnit& operator[](std::size_t i) const { return units_[i]; }
  RbfUnit& operator[](std::size_t i) { return units_[i]; }

  void add(const RbfUnit& unit) { units_.push_back(unit); }

  friend bool operator==(const RbfNetwork&, const RbfNetwork&) = default;

 private:
  int dim_ = 1;
  BasisForm form_ = BasisForm::squared;
  std::vector<RbfUnit> units_;
};

/// Phi(x; c, D) for a single unit, ignoring its weight.
double eval_basis(const RbfUnit& unit, std::span<const double> x, int dimension,
                  BasisForm form = BasisForm::squared);

/// sum_i w_i Phi_i(x), accumulated in ascending unit order.
double eval(const RbfNetwork& net, std::span<const double> x);

/// Batched evaluation; identical to calling eval() per point.
std::vector<double> eval(const RbfNetwork& net, const PointSet& points);

/// Spatial gradient of eval().
std::vector<double> grad_x(const RbfNetwork& net, std::span<const double> x);

/// Derivatives of one scalar output with respect to one unit's parameters.
struct UnitGradient {
  double weight = 0.0;
  std::array<double, kMaxDim> center{};
  std::array<double, kMaxDim> shape{};
};

/// Parameter derivatives at a point: `value[i]` differentiates eval() with
/// respect to unit i, `gradient[k][i]` differentiates component k of grad_x().
struct ParamGradients {
  std::vector<UnitGradient> value;
  std::array<std::vector<UnitGradient>, kMaxDim> gradient;
};

ParamGradients param_grads(const RbfNetwork& net, std::span<const double> x);

/// Radial profile phi(s) of the basis as a function of s = |D(x-c)|^2,
/// with its first two derivatives in s.
struct Profile {
  double value;
  double d1;
  double d2;
};

Profile basis_profile(BasisForm form, double s);

/// Centres uniform on [0,1]^n, weights U(0,1), shapes U(0, 1/epsilon).
RbfNetwork init_network(std::size_t count, int dimension, double epsilon, Rng& rng,
                        BasisForm form = BasisForm::squared);

struct PruneResult {
  RbfNetwork network;
  std::size_t removed = 0;
  /// Indices (into the input network) of the surviving units, ascending.
  std::vector<std::size_t> kept;
  /// True when every weight was below tolerance and the largest |w| was kept.
  bool kept_largest = false;
};

/// Drops units with |w| < tol2. Never returns an empty network.
PruneResult prune(const RbfNetwork& net, double tol2);

/// Flat parameter layout used by the optimiser: per unit, in order,
/// [w, c_0..c_{n-1}, d_0..d_{n-1}].
inline std::size_t params_per_unit(int dimension) { return 1 + 2 * static_cast<std::size_t>(dimension); }

std::vector<double> flatten(const RbfNetwork& net);
void assign_parameters(RbfNetwork& net, std::span<const double> params);

}  // namespace srbf
