// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
//
//   acceptance [--work DIR] [N ...]     run only the listed criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "loss_oracle.hpp"
#include "srbf/fdm.hpp"
#include "srbf/io.hpp"
#include "srbf/metrics.hpp"
#include "srbf/optim.hpp"
#include "srbf/problem.hpp"

using namespace srbf;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path g_work;
const fs::path kConfigs = SRBF_CONFIG_DIR;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "srbf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string c; std::getline(s, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

// --- 1 ----------------------------------------------------------------------

Verdict gradients() {
  std::mt19937_64 rng(20240101);
  int failures = 0;
  int instances = 0;
  for (int dim = 1; dim <= 3; ++dim) {
    for (int i = 0; i < 100; ++i, ++instances) {
      const int bad = test::gradient_mismatches(test::random_instance(rng, dim), 1e-5, 1e-9);
      failures += bad < 0 ? 1 : bad;
    }
  }
  return {failures == 0, std::to_string(instances) + " instances, " + std::to_string(failures) + " mismatched entries"};
}

// --- 2 ----------------------------------------------------------------------

MultiscaleProblem custom(int dim, const std::string& a, const std::string& f, const std::string& g) {
  ProblemDefinition def;
  def.dimension = dim;
  def.epsilon = 1.0;
  def.a = a;
  def.f = f;
  def.g = g;
  return make_problem(def);
}

Verdict fdm_oracle() {
  const FdmSolution one = solve_1d(custom(1, "1", "1", "1"), 1e-3);
  double e1 = 0.0;
  for (std::size_t i = 0; i <= one.cells; ++i) {
    const double x = static_cast<double>(i) * one.spacing();
    e1 = std::max(e1, std::abs(one.values[i] - (1.0 + x * (1.0 - x) / 2.0)));
  }
  const MultiscaleProblem p = custom(2, "1", "2*pi^2*sin(pi*x)*sin(pi*y)", "0");
  auto max_err = [&](double h) {
    const FdmSolution s = solve_2d(p, h);
    const RegularGrid g = s.grid();
    double worst = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      const auto x = g.node(k);
      const double exact = std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]);
      worst = std::max(worst, std::abs(s.values[k] - exact));
    }
    return worst;
  };
  const double ratio = max_err(1.0 / 32) / max_err(1.0 / 64);
  return {e1 < 1e-12 && ratio >= 3.5 && ratio <= 4.5,
          "1D max error " + fmt(e1) + ", 2D error ratio " + fmt(ratio)};
}

// --- 3 ----------------------------------------------------------------------

Verdict adam() {
  AdamState s(1);
  std::vector<double> theta{0.0};
  const std::vector<double> g{2.0};
  adam_step(s, theta, g, 0.1);
  const double t1 = theta[0];
  adam_step(s, theta, g, 0.1);
  const double t2 = theta[0];
  const bool ok = std::abs(t1 + 0.09999999) < 1e-7 && std::abs(t2 + 0.19999998) < 1e-7;
  std::ostringstream d;
  d.precision(10);
  d << "theta1 " << t1 << ", theta2 " << t2;
  return {ok, d.str()};
}

// --- 4, 5 -------------------------------------------------------------------

struct Ex1Run {
  double eps;
  std::size_t n0 = 0;
  std::size_t n = 0;
  double err2 = NAN;
  double seconds = 0.0;
  bool ok = false;
};

std::map<double, Ex1Run> g_ex1;

Ex1Run ex1_run(double eps) {
  if (auto it = g_ex1.find(eps); it != g_ex1.end()) return it->second;
  Ex1Run r{eps};
  const std::string name = eps == 0.5 ? "ex1_eps0.5" : "ex1_eps0.1";
  const fs::path cfg = kConfigs / "desk" / (name + ".json");
  const fs::path dir = g_work / name;
  fs::remove_all(dir);
  const auto t0 = std::chrono::steady_clock::now();
  if (cli({"train", "--config", cfg.string(), "--out", dir.string()}) == 0) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cli({"reference", "--config", cfg.string(), "--out", (dir / "reference").string()}) == 0 &&
        cli({"evaluate", "--run", dir.string(), "--reference", (dir / "reference").string(), "--out",
             (dir / "errors.csv").string(), "--example", "1"}) == 0) {
      const auto rows = read_csv(dir / "errors.csv");
      r.n = std::stoul(rows.back()[2]);
      r.err2 = std::stod(rows.back()[3]);
      const auto config = nlohmann::json::parse(read_file(dir / "config.json"));
      r.n0 = config["train"]["initial_basis"].get<std::size_t>();
      r.ok = true;
    }
  }
  g_ex1[eps] = r;
  return r;
}

Verdict table_reproduction() {
  struct Target {
    double eps, err2;
    std::size_t n;
  };
  bool pass = true;
  std::string detail;
  for (const Target t : {Target{0.5, 1e-3, 60}, Target{0.1, 5e-3, 120}}) {
    const Ex1Run r = ex1_run(t.eps);
    const bool ok = r.ok && r.err2 <= t.err2 && r.n <= t.n && r.seconds <= 15 * 60;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "eps " + fmt(t.eps) + ": err2 " + fmt(r.err2) + " (<= " + fmt(t.err2) + "), N " + std::to_string(r.n) +
              " (<= " + std::to_string(t.n) + "), " + fmt(r.seconds) + " s" + (ok ? "" : " [miss]");
  }
  return {pass, detail};
}

Verdict sparsity() {
  bool pass = true;
  std::string detail;
  for (double eps : {0.5, 0.1}) {
    const Ex1Run r = ex1_run(eps);
    const fs::path dir = g_work / (eps == 0.5 ? "ex1_eps0.5" : "ex1_eps0.1");
    bool ok = r.ok && r.n < r.n0;
    const auto history = read_csv(dir / "history.csv");
    const auto prunes = read_csv(dir / "prunes.csv");
    std::size_t first_prune = prunes.empty() ? SIZE_MAX : std::stoul(prunes.front()[0]);
    std::size_t prev = SIZE_MAX;
    for (const auto& row : history) {
      const std::size_t niter = std::stoul(row[0]);
      const std::size_t n = std::stoul(row[6]);
      if (niter >= first_prune && n > prev) ok = false;
      prev = n;
    }
    double largest = 0.0;
    for (const auto& row : prunes) largest = std::max(largest, std::abs(std::stod(row[2])));
    ok = ok && largest < 1e-5 && !prunes.empty();
    if (r.ok && prunes.size() != r.n0 - r.n) ok = false;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "eps " + fmt(eps) + ": N0 " + std::to_string(r.n0) + " -> " + std::to_string(r.n) + ", " +
              std::to_string(prunes.size()) + " prunes, max |w| pruned " + fmt(largest);
  }
  return {pass, detail};
}

// --- 6 ----------------------------------------------------------------------

Verdict slope() {
  const std::vector<std::pair<double, double>> table = {{0.5, 17},  {0.1, 38},    {0.05, 66},
                                                        {0.01, 186}, {0.005, 367}, {0.002, 750}};
  const SlopeFit fit = slope_fit(table);
  return {std::abs(fit.slope - 0.693) <= 0.005, "slope " + fmt(fit.slope)};
}

// --- 7 ----------------------------------------------------------------------

Verdict two_d() {
  const fs::path cfg = kConfigs / "desk" / "ex5_eps0.5.json";
  const fs::path dir = g_work / "ex5_eps0.5";
  fs::remove_all(dir);
  const auto t0 = std::chrono::steady_clock::now();
  if (cli({"train", "--config", cfg.string(), "--out", dir.string()}) != 0) return {false, "training failed"};
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cli({"reference", "--config", cfg.string(), "--out", (dir / "reference").string()}) != 0 ||
      cli({"evaluate", "--run", dir.string(), "--reference", (dir / "reference").string(), "--out",
           (dir / "errors.csv").string(), "--example", "5"}) != 0) {
    return {false, "reference or evaluation failed"};
  }
  const auto row = read_csv(dir / "errors.csv").back();
  const double err2 = std::stod(row[3]);
  const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  const std::size_t iters = manifest["iterations"].get<std::size_t>();
  return {err2 <= 5e-3 && iters <= 300 && seconds <= 30 * 60,
          "err2 " + fmt(err2) + ", N " + row[2] + ", " + std::to_string(iters) + " iterations, " + fmt(seconds) +
              " s"};
}

// --- 8 ----------------------------------------------------------------------

Verdict three_d() {
  const fs::path dir = g_work / "ex8_sweep";
  fs::remove_all(dir);
  if (cli({"sweep", "--example", "8", "--eps", "0.5,0.2,0.1", "--config",
           (kConfigs / "desk" / "ex8_sweep.json").string(), "--out", dir.string()}) != 0) {
    return {false, "sweep failed"};
  }
  std::ifstream in(dir / "self_convergence.csv");
  std::map<double, double> dist;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#' || line[0] == 'e') continue;
    const auto comma = line.find(',');
    dist[std::stod(line.substr(0, comma))] = std::stod(line.substr(comma + 1));
  }
  if (dist.size() != 3) return {false, "expected three distances"};
  const double d5 = dist[0.5], d2 = dist[0.2], d1 = dist[0.1];
  return {d5 > d2 && d2 > d1, "distances eps 0.5: " + fmt(d5) + ", 0.2: " + fmt(d2) + ", 0.1: " + fmt(d1)};
}

// --- 9 ----------------------------------------------------------------------

Verdict determinism() {
  const fs::path cfg = g_work / "determinism.json";
  std::ofstream(cfg) << R"({
    "problem": {"dimension": 2, "epsilon": 0.5, "a": "builtin:5"},
    "train": {"initial_basis": 60, "max_niter": 40, "sparse_niter": 30, "check_iter": 5, "tol1": 0.5,
              "interior": {"mode": "grid", "spacing": 0.05}, "boundary_per_face": 16, "batch_interior": 100,
              "batch_boundary": 20, "seed": 7, "reset_moments_on_prune": true}
  })";
  std::vector<fs::path> dirs = {g_work / "det_a", g_work / "det_b"};
  for (const auto& d : dirs) {
    fs::remove_all(d);
    if (cli({"train", "--config", cfg.string(), "--out", d.string()}) != 0) return {false, "training failed"};
  }
  std::size_t compared = 0;
  for (const char* f : {"u.json", "p.json", "q.json", "history.csv", "prunes.csv", "config.json"}) {
    if (read_file(dirs[0] / f) != read_file(dirs[1] / f)) return {false, std::string(f) + " differs"};
    ++compared;
  }
  return {true, std::to_string(compared) + " files byte-identical"};
}

// --- 10 ---------------------------------------------------------------------

Verdict expressions() {
  const std::map<int, std::vector<double>> sweeps = {
      {1, {0.5, 0.1, 0.05, 0.01, 0.005, 0.002}}, {2, {0.5, 0.1, 0.05, 0.01, 0.005, 0.002}},
      {3, {0.5, 0.1, 0.05, 0.01, 0.005, 0.002}}, {4, {0.5, 0.1, 0.05, 0.01, 0.005, 0.002}},
      {5, {0.5, 0.2, 0.1, 0.05, 0.02, 0.01}},    {6, {0.5, 0.2, 0.1, 0.05, 0.02, 0.01}},
      {7, {1.0}},                                {8, {0.5, 0.2, 0.1, 0.05}},
  };
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t checks = 0;
  for (const auto& [id, list] : sweeps) {
    for (double eps : list) {
      const MultiscaleProblem native = builtin(id, eps);
      ProblemDefinition def = native.definition;
      def.a = builtin_coefficient_text(id);
      if (id == 7) def.scales.assign(kExample7Scales.begin(), kExample7Scales.end());
      MultiscaleProblem parsed;
      try {
        parsed = make_problem(def);
        check_ellipticity(native);
      } catch (const Error& e) {
        return {false, "example " + std::to_string(id) + " eps " + fmt(eps) + ": " + e.what()};
      }
      for (int i = 0; i < 10000; ++i) {
        const double x[3] = {u(rng), u(rng), u(rng)};
        const std::span<const double> p(x, static_cast<std::size_t>(native.dimension));
        worst = std::max(worst, std::abs(native.a(p) - parsed.a(p)));
      }
      ++checks;
    }
  }
  return {worst <= 1e-15, std::to_string(checks) + " (example, eps) pairs, max difference " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  g_work = fs::temp_directory_path() / "srbf_acceptance";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--work" && i + 1 < argc) {
      g_work = argv[++i];
    } else {
      only.insert(std::atoi(a.c_str()));
    }
  }
  fs::create_directories(g_work);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient correctness", gradients},
      {"finite-difference oracle", fdm_oracle},
      {"Adam two-step trace", adam},
      {"Example 1 desk-scale table", table_reproduction},
      {"sparsification audit", sparsity},
      {"slope fit of tabulated pairs", slope},
      {"Example 5 desk-scale 2D run", two_d},
      {"Example 8 self-convergence", three_d},
      {"determinism", determinism},
      {"expression equivalence and ellipticity", expressions},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << v.detail << " (" << fmt(s) << " s)" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
