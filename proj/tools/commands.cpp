#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "srbf/io.hpp"

namespace srbf::cli {

namespace fs = std::filesystem;

namespace {

nlohmann::json parse_json_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string join_errors(const std::vector<std::string>& errors) {
  std::string msg;
  for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
  return msg;
}

void split_lines(const std::string& text, std::vector<std::string>& into) {
  std::istringstream s(text);
  for (std::string line; std::getline(s, line);) into.push_back(line);
}

TrainConfig defaults_for(const ProblemDefinition& def) {
  TrainConfig c = default_settings(def.dimension, def.epsilon);
  if (def.a == "builtin:7") {
    c.initial_basis = 30000;
    c.lambda1 = 0.02;
    c.lr.floor = 1e-6;
  }
  return c;
}

ReferenceSettings parse_reference(const nlohmann::json& j, std::vector<std::string>& errors) {
  ReferenceSettings r;
  if (!j.is_object()) {
    errors.emplace_back("reference: expected an object");
    return r;
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "h" && key != "averaging") errors.push_back("reference." + key + ": unknown field");
  }
  if (j.contains("h")) {
    if (!j["h"].is_number() || !(j["h"].get<double>() > 0.0)) {
      errors.emplace_back("reference.h: expected a positive number");
    } else {
      r.h = j["h"].get<double>();
      try {
        cells_for_spacing(*r.h);
      } catch (const ConfigError& e) {
        errors.push_back(std::string("reference.h: ") + e.what());
      }
    }
  }
  if (j.contains("averaging")) {
    try {
      r.averaging = face_averaging_from_string(j["averaging"].is_string() ? j["averaging"].get<std::string>() : "");
    } catch (const ConfigError& e) {
      errors.push_back(std::string("reference.") + e.what());
    }
  }
  return r;
}

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

std::string epsilon_label(double eps) { return "eps_" + format_double(eps); }

void append_csv_row(const fs::path& path, const std::string& header, const std::string& row) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot write " + path.string());
  if (fresh) out << header << '\n';
  out << row << '\n';
}

}  // namespace

double default_reference_h(int dimension) {
  switch (dimension) {
    case 1:
      return 1e-3;
    case 2:
      return 1.0 / 512.0;
    default:
      return 0.05;
  }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration: expected a JSON object");
  std::vector<std::string> errors;
  const bool wrapped = j.contains("problem");
  if (wrapped) {
    for (const auto& [key, value] : j.items()) {
      if (key != "problem" && key != "train" && key != "reference") errors.push_back(key + ": unknown section");
    }
  }
  RunConfig config;
  bool problem_ok = false;
  try {
    config.problem = problem_definition_from_json(wrapped ? j["problem"] : j, "problem");
    problem_ok = true;
  } catch (const ConfigError& e) {
    split_lines(e.what(), errors);
  }
  const TrainConfig defaults = problem_ok ? defaults_for(config.problem) : TrainConfig{};
  config.train = defaults;
  if (wrapped && j.contains("train")) {
    try {
      config.train = train_config_from_json(j["train"], defaults, "train");
    } catch (const ConfigError& e) {
      split_lines(e.what(), errors);
    }
  }
  if (wrapped && j.contains("reference")) config.reference = parse_reference(j["reference"], errors);
  if (!errors.empty()) throw ConfigError(join_errors(errors));
  return config;
}

RunConfig load_run_config(const fs::path& path) { return parse_run_config(parse_json_file(path)); }

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json ref{{"averaging", std::string(to_string(config.reference.averaging))}};
  if (config.reference.h) ref["h"] = *config.reference.h;
  return {{"problem", to_json(config.problem)}, {"train", to_json(config.train)}, {"reference", ref}};
}

TrainSummary run_train(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const MultiscaleProblem problem = make_problem(config.problem);
  fs::create_directories(out);
  const std::string resolved = to_json(config).dump(2) + "\n";
  const std::string hash = fnv1a_hex(resolved);
  write_text(out / "config.json", resolved);

  nlohmann::json manifest{{"seed", config.train.seed}, {"config_hash", hash}, {"status", "running"}};
  write_text(out / "manifest.json", manifest.dump(2) + "\n");

  std::vector<HistoryRecord> history;
  TrainObserver observer;
  observer.on_record = [&](const HistoryRecord& rec, std::span<const RbfNetwork> nets) {
    history.push_back(rec);
    for (std::size_t k = 0; k < nets.size(); ++k) save_network(out / (network_role(k) + ".json"), nets[k]);
    write_text(out / "history.csv", render([&](std::ostream& s) { write_history_csv(s, history); }));
    log << "niter " << rec.niter << "  L_s " << format_double(rec.loss.l2_total) << "  N " << rec.basis_count
        << "  lr " << format_double(rec.lr) << "  " << to_string(rec.phase) << '\n';
  };

  const auto started = std::chrono::steady_clock::now();
  TrainResult result;
  try {
    result = train(problem, config.train, observer);
  } catch (const std::exception& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    throw;
  }

  write_text(out / "prunes.csv", render([&](std::ostream& s) { write_prunes_csv(s, result.prunes); }));
  manifest["status"] = "complete";
  manifest["wall_time_s"] = result.runtime_seconds;
  manifest["iterations"] = result.iterations;
  manifest["basis_count"] = result.networks[0].size();
  manifest["threshold_set_at"] =
      result.threshold_set_at ? nlohmann::json(*result.threshold_set_at) : nlohmann::json(nullptr);
  manifest["threshold"] = result.threshold;
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  return {out, result.iterations, result.networks[0].size(), result.runtime_seconds};
}

FdmSolution run_reference(const RunConfig& config, const fs::path& out, std::ostream& log) {
  const MultiscaleProblem problem = make_problem(config.problem);
  const double h = config.reference.h.value_or(default_reference_h(problem.dimension));
  FdmSolution sol = solve_reference(problem, h, config.reference.averaging);
  fs::create_directories(out);
  write_text(out / "reference.csv", render([&](std::ostream& s) { write_csv(s, sol); }));
  write_text(out / "reference.bin", render([&](std::ostream& s) { write_binary(s, sol); }));
  log << "reference: " << sol.values.size() << " nodes, h = " << format_double(sol.spacing()) << '\n';
  return sol;
}

ErrorReport run_evaluate(const fs::path& run_dir, const fs::path& reference, const fs::path& csv_out,
                         const std::string& example) {
  const RunConfig config = load_run_config(run_dir / "config.json");
  const MultiscaleProblem problem = make_problem(config.problem);
  const fs::path bin = fs::is_directory(reference) ? reference / "reference.bin" : reference;
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw ConfigError("cannot open reference " + bin.string());
  const FdmSolution ref = read_binary(in);
  if (ref.dimension != problem.dimension) {
    throw ConfigError("reference is " + std::to_string(ref.dimension) + "D but the run is " +
                      std::to_string(problem.dimension) + "D");
  }
  std::vector<RbfNetwork> nets;
  for (int k = 0; k <= problem.dimension; ++k) {
    nets.push_back(load_network(run_dir / (network_role(static_cast<std::size_t>(k)) + ".json")));
  }
  ErrorReport report = relative_errors(nets, ref, problem);
  report.example = example;
  const fs::path manifest_path = run_dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    const auto manifest = parse_json_file(manifest_path);
    report.runtime_seconds = manifest.value("wall_time_s", 0.0);
  }
  append_csv_row(csv_out, error_report_csv_header(), to_csv_row(report));
  return report;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<double, double>> pairs;
  std::istringstream s(text);
  for (std::string item; std::getline(s, item, ',');) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("pairs: expected eps:N, got \"" + item + "\"");
    try {
      pairs.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("pairs: cannot read \"" + item + "\"");
    }
  }
  return pairs;
}

SweepOutcome run_sweep(const SweepOptions& options, std::ostream& log) {
  if (options.epsilons.empty()) throw ConfigError("sweep: no epsilon values given");
  const int dim = builtin_dimension(options.example);
  const auto& tmpl = options.template_config;
  if (!tmpl.is_object()) throw ConfigError("sweep template: expected an object");

  std::map<double, std::size_t> basis_by_eps;
  if (tmpl.contains("initial_basis_by_epsilon")) {
    for (const auto& [key, value] : tmpl["initial_basis_by_epsilon"].items()) {
      basis_by_eps[std::stod(key)] = value.get<std::size_t>();
    }
  }

  fs::create_directories(options.out);
  SweepOutcome outcome;
  std::vector<std::pair<double, std::vector<RbfNetwork>>> bundles;
  for (double eps : options.epsilons) {
    const fs::path dir = options.out / epsilon_label(eps);
    try {
      nlohmann::json problem{{"dimension", dim}, {"epsilon", eps}, {"a", "builtin:" + std::to_string(options.example)}};
      if (tmpl.contains("problem")) {
        for (const auto& [key, value] : tmpl["problem"].items()) {
          if (key != "epsilon" && key != "dimension" && key != "a") problem[key] = value;
        }
      }
      nlohmann::json run{{"problem", problem}};
      run["train"] = tmpl.value("train", nlohmann::json::object());
      for (const auto& [e, n] : basis_by_eps) {
        if (std::abs(e - eps) <= 1e-12 * eps) run["train"]["initial_basis"] = n;
      }
      if (tmpl.contains("reference")) run["reference"] = tmpl["reference"];
      const RunConfig config = parse_run_config(run);

      log << "== example " << options.example << ", eps " << format_double(eps) << " ==\n";
      const TrainSummary summary = run_train(config, dir, log);
      if (dim <= 2) {
        run_reference(config, dir / "reference", log);
        ErrorReport row = run_evaluate(dir, dir / "reference", options.out / "table.csv",
                                       std::to_string(options.example));
        outcome.rows.push_back(row);
      } else {
        std::vector<RbfNetwork> nets;
        for (int k = 0; k <= dim; ++k) nets.push_back(load_network(dir / (network_role(static_cast<std::size_t>(k)) + ".json")));
        bundles.emplace_back(eps, std::move(nets));
        ErrorReport row;
        row.example = std::to_string(options.example);
        row.epsilon = eps;
        row.basis_count = summary.basis_count;
        row.runtime_seconds = summary.runtime_seconds;
        outcome.rows.push_back(row);
      }
    } catch (const std::exception& e) {
      log << "eps " << format_double(eps) << " failed: " << e.what() << '\n';
      outcome.failures.emplace_back(eps, e.what());
    }
  }

  if (dim == 3 && !bundles.empty()) {
    std::sort(bundles.begin(), bundles.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    double h = default_reference_h(3);
    if (tmpl.contains("reference") && tmpl["reference"].contains("h")) h = tmpl["reference"]["h"].get<double>();
    const RegularGrid grid(3, cells_for_spacing(h));
    std::vector<std::vector<RbfNetwork>> others;
    for (const auto& b : bundles) others.push_back(b.second);
    const auto distances = self_convergence(bundles.front().second, others, grid);
    std::ostringstream csv;
    csv << "# sqrt(h^3 * sum over grid nodes of (u_eps - u_ref)^2), reference eps = "
        << format_double(bundles.front().first) << ", h = " << format_double(h) << "\n";
    csv << "epsilon,distance\n";
    for (std::size_t i = 0; i < bundles.size(); ++i) {
      outcome.self_convergence.emplace_back(bundles[i].first, distances[i]);
      csv << format_double(bundles[i].first) << ',' << format_double(distances[i]) << '\n';
    }
    write_text(options.out / "self_convergence.csv", csv.str());
    std::ostringstream table;
    table << error_report_csv_header() << '\n';
    for (const auto& r : outcome.rows) table << to_csv_row(r) << '\n';
    write_text(options.out / "table.csv", table.str());
  }

  std::vector<std::pair<double, double>> pairs;
  for (const auto& r : outcome.rows) pairs.emplace_back(r.epsilon, static_cast<double>(r.basis_count));
  if (pairs.size() >= 2) {
    outcome.fit = slope_fit(pairs);
    write_text(options.out / "slope.csv", slope_fit_csv_header() + "\n" + to_csv_row(*outcome.fit) + "\n");
  } else {
    log << "slope fit skipped: needs at least two successful epsilon values\n";
  }
  if (!outcome.failures.empty()) {
    std::ostringstream f;
    f << "epsilon,error\n";
    for (const auto& [eps, msg] : outcome.failures) {
      std::string one_line = msg;
      std::replace(one_line.begin(), one_line.end(), '\n', ' ');
      std::replace(one_line.begin(), one_line.end(), ',', ';');
      f << format_double(eps) << ',' << one_line << '\n';
    }
    write_text(options.out / "failures.csv", f.str());
  }
  return outcome;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse RBF network solver for multiscale elliptic problems"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, reference_path, eval_out, example_label, pairs_text, averaging;
  std::optional<double> h;
  int example = 1;
  std::vector<double> eps_list;
  bool fit_only = false;
  std::string basis_override;

  auto* train_cmd = app.add_subcommand("train", "Train the networks for one problem");
  train_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  train_cmd->add_option("--out", out_dir, "Run directory")->required();

  auto* ref_cmd = app.add_subcommand("reference", "Finite-difference reference solution (1D/2D)");
  ref_cmd->add_option("--config", config_path, "Problem or run configuration (JSON)")->required();
  ref_cmd->set_help_flag("--help", "Print this help message and exit");
  ref_cmd->add_option("--h", h, "Mesh size (must divide 1)");
  ref_cmd->add_option("--averaging", averaging, "Face coefficient: midpoint or harmonic");
  ref_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "Relative errors of a run against a reference");
  eval_cmd->add_option("--run", run_dir, "Run directory")->required();
  eval_cmd->add_option("--reference", reference_path, "Reference directory or .bin dump")->required();
  eval_cmd->add_option("--out", eval_out, "CSV file to append to (default <run>/errors.csv)");
  eval_cmd->add_option("--example", example_label, "Label for the example column");

  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate over several epsilon values");
  sweep_cmd->add_option("--example", example, "Built-in example id (1-8)");
  sweep_cmd->add_option("--eps", eps_list, "Epsilon values")->delimiter(',');
  sweep_cmd->add_option("--config", config_path, "Template configuration (JSON)");
  sweep_cmd->add_option("--out", out_dir, "Output directory");
  sweep_cmd->add_option("--basis", basis_override, "Basis form: squared or literal");
  sweep_cmd->add_flag("--fit-only", fit_only, "Only fit the slope of the given pairs");
  sweep_cmd->add_option("--pairs", pairs_text, "eps:N pairs for --fit-only, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (train_cmd->parsed()) {
      const RunConfig config = load_run_config(config_path);
      const TrainSummary s = run_train(config, out_dir, err);
      out << "run written to " << s.run_dir.string() << " (N = " << s.basis_count << ", "
          << format_double(s.runtime_seconds) << " s)\n";
    } else if (ref_cmd->parsed()) {
      RunConfig config = load_run_config(config_path);
      if (h) config.reference.h = *h;
      if (!averaging.empty()) config.reference.averaging = face_averaging_from_string(averaging);
      if (config.reference.h) cells_for_spacing(*config.reference.h);
      const FdmSolution sol = run_reference(config, out_dir, err);
      out << "reference written to " << out_dir << " (" << sol.values.size() << " nodes)\n";
    } else if (eval_cmd->parsed()) {
      const fs::path csv = eval_out.empty() ? fs::path(run_dir) / "errors.csv" : fs::path(eval_out);
      const ErrorReport r = run_evaluate(run_dir, reference_path, csv, example_label);
      out << error_report_csv_header() << '\n' << to_csv_row(r) << '\n';
    } else if (sweep_cmd->parsed()) {
      if (fit_only) {
        if (pairs_text.empty()) throw ConfigError("--fit-only needs --pairs");
        const auto pairs = parse_pairs(pairs_text);
        const SlopeFit fit = slope_fit(pairs);
        out << slope_fit_csv_header() << '\n' << to_csv_row(fit) << '\n';
        if (!out_dir.empty()) {
          fs::create_directories(out_dir);
          write_text(fs::path(out_dir) / "slope.csv", slope_fit_csv_header() + "\n" + to_csv_row(fit) + "\n");
        }
        return kOk;
      }
      if (eps_list.empty()) throw ConfigError("sweep: --eps is required");
      if (out_dir.empty()) throw ConfigError("sweep: --out is required");
      SweepOptions options;
      options.example = example;
      options.epsilons = eps_list;
      options.out = out_dir;
      if (!config_path.empty()) options.template_config = parse_json_file(config_path);
      if (!basis_override.empty()) {
        basis_form_from_string(basis_override);
        options.template_config["train"]["basis_form"] = basis_override;
      }
      const SweepOutcome outcome = run_sweep(options, err);
      out << error_report_csv_header() << '\n';
      for (const auto& r : outcome.rows) out << to_csv_row(r) << '\n';
      for (const auto& [eps, d] : outcome.self_convergence) {
        out << "self_convergence," << format_double(eps) << ',' << format_double(d) << '\n';
      }
      if (outcome.fit) out << slope_fit_csv_header() << '\n' << to_csv_row(*outcome.fit) << '\n';
      if (!outcome.failures.empty()) err << outcome.failures.size() << " epsilon value(s) failed\n";
    }
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << '\n';
    return kUnsupported;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

}  // namespace srbf::cli
