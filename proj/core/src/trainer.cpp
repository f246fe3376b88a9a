#include "srbf/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

namespace srbf {

namespace {

// Independent random streams derived from the run seed.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamSampling = 100;
constexpr std::uint64_t kStreamShuffle = 101;

std::size_t nearest_entry(double epsilon, std::initializer_list<std::pair<double, std::size_t>> table) {
  std::size_t best = table.begin()->second;
  double gap = INFINITY;
  for (const auto& [eps, n] : table) {
    const double d = std::abs(std::log(eps) - std::log(epsilon));
    if (d < gap) {
      gap = d;
      best = n;
    }
  }
  return best;
}

}  // namespace

std::vector<std::string> TrainConfig::validate() const {
  std::vector<std::string> errors;
  if (initial_basis < 1) errors.emplace_back("initial_basis: must be at least 1");
  if (max_niter < 1) errors.emplace_back("max_niter: must be at least 1");
  if (sparse_niter > max_niter) errors.emplace_back("sparse_niter: must not exceed max_niter");
  if (check_iter < 1) errors.emplace_back("check_iter: must be at least 1");
  if (!(tol1 > 0.0)) errors.emplace_back("tol1: must be positive");
  if (!(tol2 >= 0.0)) errors.emplace_back("tol2: must be non-negative");
  if (batch_interior < 1) errors.emplace_back("batch_interior: must be at least 1");
  if (batch_boundary < 1) errors.emplace_back("batch_boundary: must be at least 1");
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) errors.emplace_back("lambda1: must be finite and >= 0");
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) errors.emplace_back("lambda2: must be finite and >= 0");
  if (!(lambda3 >= 0.0) || !std::isfinite(lambda3)) errors.emplace_back("lambda3: must be finite and >= 0");
  if (!(lr.initial > 0.0)) errors.emplace_back("lr.initial: must be positive");
  if (lr.decay_every < 1) errors.emplace_back("lr.decay_every: must be at least 1");
  if (!(lr.decay_factor > 0.0 && lr.decay_factor <= 1.0)) errors.emplace_back("lr.decay_factor: must lie in (0, 1]");
  if (!(lr.floor > 0.0)) errors.emplace_back("lr.floor: must be positive");
  if (interior.mode == SamplingMode::random && interior.count < 1) {
    errors.emplace_back("interior.count: must be at least 1");
  }
  if (interior.mode == SamplingMode::grid) {
    try {
      if (cells_for_spacing(interior.spacing) < 2) errors.emplace_back("interior.spacing: grid has no interior nodes");
    } catch (const ConfigError& e) {
      errors.emplace_back(std::string("interior.spacing: ") + e.what());
    }
  }
  if (boundary_per_face < 1) errors.emplace_back("boundary_per_face: must be at least 1");
  return errors;
}

TrainConfig default_settings(int dimension, double epsilon) {
  TrainConfig c;
  switch (dimension) {
    case 1:
      c.initial_basis = nearest_entry(epsilon, {{0.5, 100}, {0.1, 200}, {0.05, 300}, {0.01, 500},
                                                {0.005, 1000}, {0.002, 1500}});
      c.max_niter = 3000;
      c.sparse_niter = 2000;
      c.check_iter = 100;
      c.tol1 = 1e-3;
      c.tol2 = 1e-5;
      c.batch_interior = 2048;
      c.batch_boundary = 2;
      c.lambda1 = 1.0;
      c.lambda2 = 100.0;
      c.lambda3 = 1e-3;
      c.lr = {0.1, 300, 0.1, 1e-5};
      c.interior = {SamplingMode::random, 10000, 0.0};
      c.boundary_per_face = 1;
      break;
    case 2:
      c.initial_basis = nearest_entry(epsilon, {{0.5, 1000}, {0.2, 1000}, {0.1, 2000}, {0.05, 5000},
                                                {0.02, 15000}, {0.01, 30000}});
      c.max_niter = 300;
      c.sparse_niter = 250;
      c.check_iter = 10;
      c.tol1 = 0.1;
      c.tol2 = 1e-5;
      c.batch_interior = 1024;
      c.batch_boundary = 2048;
      c.lambda1 = epsilon >= 0.1 - 1e-12 ? 0.1 : (epsilon >= 0.02 - 1e-12 ? 0.02 : 0.004);
      c.lambda2 = 20.0;
      c.lambda3 = 1e-3;
      c.lr = {0.1, 40, 0.1, 1e-5};
      c.interior = {SamplingMode::grid, 0, 0.002};
      c.boundary_per_face = 512;
      break;
    case 3:
      c.initial_basis = nearest_entry(epsilon, {{0.5, 1000}, {0.2, 2000}, {0.1, 5000}, {0.05, 10000}});
      c.max_niter = 150;
      c.sparse_niter = 120;
      c.check_iter = 10;
      c.tol1 = 0.05;
      c.tol2 = 1e-5;
      c.batch_interior = 1024;
      c.batch_boundary = 1600;
      c.lambda1 = 0.1;
      c.lambda2 = 50.0;
      c.lambda3 = 1e-3;
      c.lr = {0.1, 30, 0.1, 1e-5};
      c.interior = {SamplingMode::grid, 0, 0.01};
      c.boundary_per_face = 267;  // ceil(200 * 8 / 6)
      break;
    default:
      throw ConfigError("dimension must be 1, 2 or 3");
  }
  return c;
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c, const std::string& path) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw ConfigError(path + ": expected an object");

  static const std::set<std::string> known{
      "initial_basis", "max_niter", "sparse_niter", "check_iter", "tol1", "tol2", "batch_interior",
      "batch_boundary", "lambda1", "lambda2", "lambda3", "lr", "interior", "boundary_per_face", "seed",
      "basis_form", "l1_mode", "reset_moments_on_prune"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) errors.push_back(path + "." + key + ": unknown field");
  }

  auto count = [&](const nlohmann::json& obj, const std::string& p, const char* key, auto& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj[key];
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      errors.push_back(p + "." + key + ": expected a non-negative integer");
      return;
    }
    out = static_cast<std::remove_reference_t<decltype(out)>>(v.get<unsigned long long>());
  };
  auto real = [&](const nlohmann::json& obj, const std::string& p, const char* key, double& out) {
    if (!obj.contains(key)) return;
    if (!obj[key].is_number()) {
      errors.push_back(p + "." + key + ": expected a number");
      return;
    }
    out = obj[key].get<double>();
  };

  count(j, path, "initial_basis", c.initial_basis);
  count(j, path, "max_niter", c.max_niter);
  count(j, path, "sparse_niter", c.sparse_niter);
  count(j, path, "check_iter", c.check_iter);
  real(j, path, "tol1", c.tol1);
  real(j, path, "tol2", c.tol2);
  count(j, path, "batch_interior", c.batch_interior);
  count(j, path, "batch_boundary", c.batch_boundary);
  real(j, path, "lambda1", c.lambda1);
  real(j, path, "lambda2", c.lambda2);
  real(j, path, "lambda3", c.lambda3);
  count(j, path, "boundary_per_face", c.boundary_per_face);
  count(j, path, "seed", c.seed);

  if (j.contains("lr")) {
    const auto& lr = j["lr"];
    if (!lr.is_object()) {
      errors.push_back(path + ".lr: expected an object");
    } else {
      real(lr, path + ".lr", "initial", c.lr.initial);
      count(lr, path + ".lr", "decay_every", c.lr.decay_every);
      real(lr, path + ".lr", "decay_factor", c.lr.decay_factor);
      real(lr, path + ".lr", "floor", c.lr.floor);
    }
  }
  if (j.contains("interior")) {
    const auto& in = j["interior"];
    if (!in.is_object()) {
      errors.push_back(path + ".interior: expected an object");
    } else {
      if (in.contains("mode")) {
        const auto mode = in["mode"].is_string() ? in["mode"].get<std::string>() : "";
        if (mode == "random") {
          c.interior.mode = SamplingMode::random;
        } else if (mode == "grid") {
          c.interior.mode = SamplingMode::grid;
        } else {
          errors.push_back(path + ".interior.mode: expected \"random\" or \"grid\"");
        }
      }
      count(in, path + ".interior", "count", c.interior.count);
      real(in, path + ".interior", "spacing", c.interior.spacing);
    }
  }
  if (j.contains("basis_form")) {
    try {
      c.basis_form = basis_form_from_string(j["basis_form"].is_string() ? j["basis_form"].get<std::string>() : "");
    } catch (const ConfigError& e) {
      errors.push_back(path + "." + e.what());
    }
  }
  if (j.contains("l1_mode")) {
    const auto mode = j["l1_mode"].is_string() ? j["l1_mode"].get<std::string>() : "";
    if (mode == "subgradient") {
      c.l1_mode = L1Mode::subgradient;
    } else if (mode == "proximal") {
      c.l1_mode = L1Mode::proximal;
    } else {
      errors.push_back(path + ".l1_mode: expected \"subgradient\" or \"proximal\"");
    }
  }

  if (j.contains("reset_moments_on_prune")) {
    if (j["reset_moments_on_prune"].is_boolean()) {
      c.reset_moments_on_prune = j["reset_moments_on_prune"].get<bool>();
    } else {
      errors.push_back(path + ".reset_moments_on_prune: expected true or false");
    }
  }

  for (const auto& e : c.validate()) errors.push_back(path + "." + e);
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
    throw ConfigError(msg);
  }
  return c;
}

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json j;
  j["initial_basis"] = c.initial_basis;
  j["max_niter"] = c.max_niter;
  j["sparse_niter"] = c.sparse_niter;
  j["check_iter"] = c.check_iter;
  j["tol1"] = c.tol1;
  j["tol2"] = c.tol2;
  j["batch_interior"] = c.batch_interior;
  j["batch_boundary"] = c.batch_boundary;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["lambda3"] = c.lambda3;
  j["lr"] = {{"initial", c.lr.initial},
             {"decay_every", c.lr.decay_every},
             {"decay_factor", c.lr.decay_factor},
             {"floor", c.lr.floor}};
  if (c.interior.mode == SamplingMode::random) {
    j["interior"] = {{"mode", "random"}, {"count", c.interior.count}};
  } else {
    j["interior"] = {{"mode", "grid"}, {"spacing", c.interior.spacing}};
  }
  j["boundary_per_face"] = c.boundary_per_face;
  j["seed"] = c.seed;
  j["basis_form"] = std::string(to_string(c.basis_form));
  j["l1_mode"] = c.l1_mode == L1Mode::subgradient ? "subgradient" : "proximal";
  j["reset_moments_on_prune"] = c.reset_moments_on_prune;
  return j;
}

std::string_view to_string(Phase phase) { return phase == Phase::dense ? "dense" : "sparse"; }

SparsityController::SparsityController(const TrainConfig& config)
    : lambda3_(config.lambda3),
      sparse_niter_(config.sparse_niter),
      check_iter_(config.check_iter),
      tol1_(config.tol1) {}

double SparsityController::lambda3_for(double l2_loss, std::size_t niter) const {
  if (l2_loss > thres_ || niter > sparse_niter_) return 0.0;
  return lambda3_;
}

SparsityController::CheckOutcome SparsityController::on_check(std::size_t niter, double l2_loss) {
  CheckOutcome out;
  if (std::abs(l_rec_ - l2_loss) < tol1_ && j_ == 0) {
    thres_ = l2_loss + tol1_;
    j_ += 1;
    out.threshold_set = true;
  }
  out.prune = j_ > 0 && niter < sparse_niter_;
  l_rec_ = l2_loss;
  return out;
}

std::vector<std::vector<std::size_t>> minibatches(std::size_t count, std::size_t batchsize, Rng& rng) {
  if (batchsize < 1) throw ConfigError("batch size must be at least 1");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t begin = 0; begin < count; begin += batchsize) {
    const std::size_t end = std::min(count, begin + batchsize);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

CyclicSampler::CyclicSampler(std::size_t total, std::size_t batch) : total_(total), batch_(batch) {
  if (total == 0 || batch == 0) throw ConfigError("cyclic sampler needs a non-empty range and batch");
}

std::vector<std::size_t> CyclicSampler::next() {
  std::vector<std::size_t> out;
  if (batch_ >= total_) {
    out.resize(total_);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  out.reserve(batch_);
  for (std::size_t k = 0; k < batch_; ++k) {
    out.push_back(cursor_);
    cursor_ = (cursor_ + 1) % total_;
  }
  return out;
}

TrainResult train(const MultiscaleProblem& problem, const TrainConfig& config, const TrainObserver& observer) {
  if (const auto errors = config.validate(); !errors.empty()) {
    std::string msg = "invalid training configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  const int n = problem.dimension;
  if (n < 1 || n > kMaxDim) throw ConfigError("problem dimension must be 1, 2 or 3");
  const auto started = std::chrono::steady_clock::now();
  const std::size_t block = params_per_unit(n);

  TrainResult result;
  for (int k = 0; k <= n; ++k) {
    Rng init_rng = make_rng(config.seed, kStreamInit + static_cast<std::uint64_t>(k));
    result.networks.push_back(init_network(config.initial_basis, n, problem.epsilon, init_rng, config.basis_form));
  }

  Rng sampling_rng = make_rng(config.seed, kStreamSampling);
  Rng shuffle_rng = make_rng(config.seed, kStreamShuffle);
  const TabulatedInterior interior = tabulate_interior(problem, sample_interior(n, config.interior, sampling_rng));
  const TabulatedBoundary boundary = tabulate_boundary(problem, sample_boundary(n, config.boundary_per_face));
  if (interior.points.empty()) throw ConfigError("interior sampling produced no points");

  std::vector<AdamState> adam;
  for (const auto& net : result.networks) adam.emplace_back(net.size() * block);

  SparsityController control(config);
  CyclicSampler boundary_sampler(boundary.points.size(), config.batch_boundary);
  const LossWeights dense_weights{config.lambda1, config.lambda2, 0.0};

  std::vector<double> batch_x, batch_a, batch_f, bnd_x, bnd_g;
  std::vector<std::vector<double>> params(result.networks.size());

  for (std::size_t niter = 1; niter <= config.max_niter; ++niter) {
    const double lr = lr_at(config.lr, niter - 1);
    bool any_sparse = false;
    double l2_sum = 0.0;
    std::size_t batch_count = 0;
    LossBreakdown last;

    for (const auto& batch : minibatches(interior.points.size(), config.batch_interior, shuffle_rng)) {
      batch_x.clear();
      batch_a.clear();
      batch_f.clear();
      for (std::size_t idx : batch) {
        const auto x = interior.points[idx];
        batch_x.insert(batch_x.end(), x.begin(), x.end());
        batch_a.push_back(interior.a[idx]);
        batch_f.push_back(interior.f[idx]);
      }
      bnd_x.clear();
      bnd_g.clear();
      for (std::size_t idx : boundary_sampler.next()) {
        const auto x = boundary.points[idx];
        bnd_x.insert(bnd_x.end(), x.begin(), x.end());
        bnd_g.push_back(boundary.g[idx]);
      }
      const InteriorBatch ib{n, batch_x, batch_a, batch_f};
      const BoundaryBatch bb{n, bnd_x, bnd_g};

      // L_s before the update decides whether the l1 term is active.
      LossGradients lg = loss_grads(result.networks, ib, bb, dense_weights);
      const double l2 = lg.loss.l2_total;
      if (!std::isfinite(l2)) {
        throw NumericalError("non-finite loss at iteration " + std::to_string(niter));
      }
      const double lambda3 = control.lambda3_for(l2, niter);
      lg.loss.total = l2 + lambda3 * lg.loss.l1;
      any_sparse = any_sparse || lambda3 > 0.0;

      RbfNetwork& u = result.networks[0];
      if (lambda3 > 0.0 && config.l1_mode == L1Mode::subgradient) {
        for (std::size_t i = 0; i < u.size(); ++i) {
          const double w = u[i].weight;
          lg.grads[0][i * block] += lambda3 * (w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0));
        }
      }

      for (std::size_t k = 0; k < result.networks.size(); ++k) {
        params[k] = flatten(result.networks[k]);
        try {
          adam_step(adam[k], params[k], lg.grads[k], lr);
        } catch (const NumericalError& e) {
          throw NumericalError(std::string(e.what()) + " (network " + std::to_string(k) + ", iteration " +
                               std::to_string(niter) + ")");
        }
        assign_parameters(result.networks[k], params[k]);
      }

      if (lambda3 > 0.0 && config.l1_mode == L1Mode::proximal) {
        const double shrink = lr * lambda3;
        for (auto& unit : u.units()) {
          const double mag = std::max(std::abs(unit.weight) - shrink, 0.0);
          unit.weight = std::copysign(mag, unit.weight);
        }
      }

      last = lg.loss;
      l2_sum += l2;
      ++batch_count;
    }

    const bool check = control.is_check(niter);
    if (check) {
      const auto outcome = control.on_check(niter, last.l2_total);
      if (outcome.threshold_set) {
        result.threshold_set_at = niter;
        result.threshold = control.threshold();
      }
      if (outcome.prune) {
        const RbfNetwork& u = result.networks[0];
        PruneResult pr = prune(u, config.tol2);
        if (pr.removed > 0) {
          std::size_t next_kept = 0;
          for (std::size_t i = 0; i < u.size(); ++i) {
            if (next_kept < pr.kept.size() && pr.kept[next_kept] == i) {
              ++next_kept;
              continue;
            }
            result.prunes.push_back({niter, i, u[i].weight});
          }
          adam[0].retain_blocks(pr.kept, block);
          result.networks[0] = std::move(pr.network);
        }
        if (config.reset_moments_on_prune) {
          for (std::size_t k = 0; k < adam.size(); ++k) adam[k] = AdamState(result.networks[k].size() * block);
        }
      }
    }

    if (check || niter == config.max_niter) {
      HistoryRecord rec;
      rec.niter = niter;
      rec.loss = last;
      rec.epoch_mean_l2 = l2_sum / static_cast<double>(batch_count);
      rec.basis_count = result.networks[0].size();
      rec.lr = lr;
      rec.phase = any_sparse ? Phase::sparse : Phase::dense;
      result.history.push_back(rec);
      if (observer.on_record) observer.on_record(rec, result.networks);
    }
    result.iterations = niter;
  }

  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace srbf
