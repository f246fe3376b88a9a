#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srbf/common.hpp"
#include "srbf/loss.hpp"
#include "srbf/optim.hpp"
#include "srbf/problem.hpp"
#include "srbf/rbf.hpp"
#include "srbf/sampling.hpp"

namespace srbf {

/// How the l1 penalty enters the update: as the subgradient lambda3*sign(w)
/// inside Adam, or as a soft-threshold applied after the Adam step.
enum class L1Mode { subgradient, proximal };

struct TrainConfig {
  std::size_t initial_basis = 100;
  std::size_t max_niter = 3000;
  std::size_t sparse_niter = 2000;
  std::size_t check_iter = 100;
  double tol1 = 1e-3;
  double tol2 = 1e-5;
  std::size_t batch_interior = 2048;
  std::size_t batch_boundary = 2;
  double lambda1 = 1.0;
  double lambda2 = 100.0;
  double lambda3 = 1e-3;  // value used while the sparse phase is active
  LrSchedule lr{};
  InteriorSampling interior{};
  std::size_t boundary_per_face = 1;
  std::uint64_t seed = 0;
  BasisForm basis_form = BasisForm::squared;
  L1Mode l1_mode = L1Mode::subgradient;
  /// Restart every network's Adam moments at each prune check, as happens when
  /// the optimiser is rebuilt around the pruned parameter set.
  bool reset_moments_on_prune = false;

  /// Every violated constraint, as "field: message" strings.
  std::vector<std::string> validate() const;
};

/// Default hyper-parameters for the given dimension and
/// scale (initial basis count, penalties, schedule, sampling).
TrainConfig default_settings(int dimension, double epsilon);

/// Parses a "train" object over `defaults`, reporting every bad field at once.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig defaults = {},
                                   const std::string& path = "train");
nlohmann::json to_json(const TrainConfig& config);

enum class Phase { dense, sparse };
std::string_view to_string(Phase phase);

struct HistoryRecord {
  std::size_t niter = 0;
  LossBreakdown loss;         // last batch of the iteration; drives control
  double epoch_mean_l2 = 0.0;  // diagnostics only
  std::size_t basis_count = 0;
  double lr = 0.0;
  Phase phase = Phase::dense;
};

struct PruneEvent {
  std::size_t niter = 0;
  std::size_t unit = 0;  // index in the network before this prune
  double weight = 0.0;
};

/// Bookkeeping for the l1 phase switch and prune cadence.
///
/// Per batch: lambda3 is zero when L_s > thres or niter > sparse_niter.
/// At every check iteration: if |L_rec - L_s| < tol1 and the threshold has
/// not been set yet, thres = L_s + tol1; then prune if the threshold is set
/// and niter < sparse_niter; finally L_rec = L_s.
class SparsityController {
 public:
  explicit SparsityController(const TrainConfig& config);

  double lambda3_for(double l2_loss, std::size_t niter) const;
  bool is_check(std::size_t niter) const { return niter % check_iter_ == 0; }

  struct CheckOutcome {
    bool threshold_set = false;
    bool prune = false;
  };
  CheckOutcome on_check(std::size_t niter, double l2_loss);

  double threshold() const { return thres_; }
  double recorded_loss() const { return l_rec_; }
  int stage() const { return j_; }

 private:
  double lambda3_;
  std::size_t sparse_niter_;
  std::size_t check_iter_;
  double tol1_;
  double thres_ = 0.0;
  double l_rec_ = 0.0;
  int j_ = 0;
};

/// Index batches of one epoch: a shuffle of [0, count) cut into consecutive
/// chunks of `batchsize` (the last may be short).
std::vector<std::vector<std::size_t>> minibatches(std::size_t count, std::size_t batchsize, Rng& rng);

/// Walks a fixed index range in order, wrapping around; returns the whole
/// range every time when batch >= total.
class CyclicSampler {
 public:
  CyclicSampler(std::size_t total, std::size_t batch);
  std::vector<std::size_t> next();

 private:
  std::size_t total_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
};

struct TrainResult {
  std::vector<RbfNetwork> networks;  // [u, p, q, r][0..n]
  std::vector<HistoryRecord> history;
  std::vector<PruneEvent> prunes;
  std::optional<std::size_t> threshold_set_at;
  double threshold = 0.0;
  std::size_t iterations = 0;
  double runtime_seconds = 0.0;
};

struct TrainObserver {
  /// Called after each check iteration (and the final one) with the current networks.
  std::function<void(const HistoryRecord&, std::span<const RbfNetwork>)> on_record;
};

/// Trains the n+1 networks. Throws NumericalError naming the iteration if a
/// loss or gradient becomes non-finite.
TrainResult train(const MultiscaleProblem& problem, const TrainConfig& config, const TrainObserver& observer = {});

}  // namespace srbf
