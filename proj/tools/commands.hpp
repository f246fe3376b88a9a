#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "srbf/fdm.hpp"
#include "srbf/metrics.hpp"
#include "srbf/problem.hpp"
#include "srbf/trainer.hpp"

namespace srbf::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kUnsupported = 3, kNumerical = 4 };

struct ReferenceSettings {
  std::optional<double> h;  // default depends on dimension
  FaceAveraging averaging = FaceAveraging::midpoint;
};

/// A run configuration file: {"problem": {...}, "train": {...}, "reference": {...}}.
/// A bare problem object is accepted wherever only the problem is needed.
struct RunConfig {
  ProblemDefinition problem;
  TrainConfig train;
  ReferenceSettings reference;
};

/// Parses and validates everything at once; the ConfigError lists every bad field.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// Mesh size used when the configuration does not set one.
double default_reference_h(int dimension);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct TrainSummary {
  std::filesystem::path run_dir;
  std::size_t iterations = 0;
  std::size_t basis_count = 0;
  double runtime_seconds = 0.0;
};

/// Trains and writes history.csv, prunes.csv, u/p/q/r.json, config.json and
/// manifest.json under `out`. Checkpoints are refreshed at every check
/// iteration, so a failed run keeps its last good state.
TrainSummary run_train(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Writes reference.csv and reference.bin under `out`.
FdmSolution run_reference(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Loads a run directory and a reference dump, appends one error row to
/// `csv_out` (header written when the file is new) and returns it.
ErrorReport run_evaluate(const std::filesystem::path& run_dir, const std::filesystem::path& reference,
                         const std::filesystem::path& csv_out, const std::string& example);

struct SweepOptions {
  int example = 1;
  std::vector<double> epsilons;
  nlohmann::json template_config = nlohmann::json::object();
  std::filesystem::path out;
};

struct SweepOutcome {
  std::vector<ErrorReport> rows;
  std::vector<std::pair<double, std::string>> failures;
  std::vector<std::pair<double, double>> self_convergence;  // (epsilon, distance), 3D only
  std::optional<SlopeFit> fit;
};

/// train + reference + evaluate per epsilon, then the slope of ln N on
/// ln 1/eps. In 3D the reference is replaced by self-convergence against
/// the smallest epsilon. A failing epsilon is recorded and skipped.
SweepOutcome run_sweep(const SweepOptions& options, std::ostream& log);

/// "0.5:17,0.1:38" -> {(0.5,17),(0.1,38)}
std::vector<std::pair<double, double>> parse_pairs(const std::string& text);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace srbf::cli
