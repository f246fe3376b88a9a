#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "srbf/io.hpp"

using namespace srbf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "srbf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("srbf_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

double slope_from(const std::string& out) {
  const auto line = out.substr(out.find('\n') + 1);
  return std::stod(line.substr(0, line.find(',')));
}

}  // namespace

TEST_CASE("missing epsilon is a configuration error naming the field") {
  const fs::path dir = scratch("noeps");
  const auto cfg = write(dir / "c.json", R"({"problem": {"dimension": 1, "a": "builtin:1"}})");
  const Outcome o = run({"train", "--config", cfg.string(), "--out", (dir / "run").string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("problem.epsilon") != std::string::npos);
}

TEST_CASE("several bad fields are reported together") {
  const fs::path dir = scratch("many");
  const auto cfg = write(dir / "c.json",
                         R"({"problem": {"dimension": 1, "epsilon": 0.5, "a": "builtin:1"},
                             "train": {"tol1": -1, "batch_interior": 0, "bogus": 1}})");
  const Outcome o = run({"train", "--config", cfg.string(), "--out", (dir / "run").string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("train.tol1") != std::string::npos);
  CHECK(o.err.find("batch_interior") != std::string::npos);
  CHECK(o.err.find("train.bogus") != std::string::npos);
}

TEST_CASE("3D reference is unsupported") {
  const fs::path dir = scratch("ref3d");
  const auto cfg = write(dir / "c.json", R"({"dimension": 3, "epsilon": 0.5, "a": "builtin:8"})");
  const Outcome o = run({"reference", "--config", cfg.string(), "--out", (dir / "ref").string()});
  CHECK(o.code == 3);
  CHECK(o.err.find("self-convergence") != std::string::npos);
}

TEST_CASE("1D reference files") {
  const fs::path dir = scratch("ref1d");
  const auto cfg = write(dir / "c.json", R"({"dimension": 1, "epsilon": 0.5, "a": "builtin:1"})");
  const Outcome o = run({"reference", "--config", cfg.string(), "--h", "0.001", "--out", (dir / "ref").string()});
  REQUIRE(o.code == 0);
  std::ifstream csv(dir / "ref" / "reference.csv");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 1002);

  const auto unit = write(dir / "u.json", R"({"dimension": 1, "epsilon": 0.5, "a": "1", "f": "1", "g": "1"})");
  REQUIRE(run({"reference", "--config", unit.string(), "--h", "0.01", "--out", (dir / "unit").string()}).code == 0);
  std::ifstream in(dir / "unit" / "reference.bin", std::ios::binary);
  const FdmSolution s = read_binary(in);
  for (std::size_t i = 0; i <= s.cells; ++i) {
    const double x = static_cast<double>(i) / 100.0;
    CHECK(std::abs(s.values[i] - (1 + x * (1 - x) / 2)) < 1e-12);
  }
}

TEST_CASE("train, evaluate and determinism on a short run") {
  const fs::path dir = scratch("train");
  const auto cfg = write(dir / "c.json",
                         R"({"problem": {"dimension": 1, "epsilon": 0.5, "a": "builtin:1"},
                             "train": {"initial_basis": 10, "max_niter": 30, "sparse_niter": 20, "check_iter": 10,
                                       "interior": {"count": 300}, "batch_interior": 128, "seed": 4}})");
  const Outcome a = run({"train", "--config", cfg.string(), "--out", (dir / "a").string()});
  REQUIRE(a.code == 0);
  const Outcome b = run({"train", "--config", cfg.string(), "--out", (dir / "b").string()});
  REQUIRE(b.code == 0);
  for (const char* f : {"u.json", "p.json", "history.csv", "prunes.csv", "config.json"}) {
    INFO(f);
    CHECK(fs::exists(dir / "a" / f));
    CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
  }
  const auto manifest = nlohmann::json::parse(read_file(dir / "a" / "manifest.json"));
  CHECK(manifest["status"] == "complete");
  CHECK(manifest["seed"] == 4);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);

  REQUIRE(run({"reference", "--config", cfg.string(), "--h", "0.001", "--out", (dir / "ref").string()}).code == 0);
  const Outcome e = run({"evaluate", "--run", (dir / "a").string(), "--reference", (dir / "ref").string(), "--out",
                         (dir / "errors.csv").string(), "--example", "ex1"});
  REQUIRE(e.code == 0);
  const std::string table = read_file(dir / "errors.csv");
  CHECK(table.rfind("example,epsilon,N,err2", 0) == 0);
  const std::size_t n = load_network(dir / "a" / "u.json").size();
  CHECK(table.find("ex1,0.5," + std::to_string(n) + ",") != std::string::npos);

  const auto cfg2 = write(dir / "c2.json", R"({"dimension": 2, "epsilon": 0.5, "a": "builtin:5"})");
  REQUIRE(run({"reference", "--config", cfg2.string(), "--h", "0.125", "--out", (dir / "ref2").string()}).code == 0);
  const Outcome m = run({"evaluate", "--run", (dir / "a").string(), "--reference", (dir / "ref2").string()});
  CHECK(m.code == 2);
}

TEST_CASE("fit-only sweeps") {
  const Outcome t = run({"sweep", "--fit-only", "--pairs", "0.5:17,0.1:38,0.05:66,0.01:186,0.005:367,0.002:750"});
  REQUIRE(t.code == 0);
  CHECK(std::abs(slope_from(t.out) - 0.693) <= 0.005);

  std::string pairs;
  for (double eps : {0.5, 0.2, 0.1, 0.05}) {
    if (!pairs.empty()) pairs += ",";
    std::ostringstream s;
    s.precision(17);
    s << eps << ":" << 10.0 * std::pow(eps, -1.5);
    pairs += s.str();
  }
  const Outcome syn = run({"sweep", "--fit-only", "--pairs", pairs});
  REQUIRE(syn.code == 0);
  CHECK(std::abs(slope_from(syn.out) - 1.5) < 1e-6);

  CHECK(run({"sweep", "--fit-only", "--pairs", "0.5:17"}).code == 2);
  CHECK(run({"sweep", "--fit-only", "--pairs", "0.5:x"}).code == 2);
}

TEST_CASE("pair parsing") {
  const auto p = cli::parse_pairs("0.5:17, 0.1:38");
  REQUIRE(p.size() == 2);
  CHECK(p[1].first == 0.1);
  CHECK(p[1].second == 38.0);
  CHECK_THROWS_AS(cli::parse_pairs("0.5"), ConfigError);
}

TEST_CASE("unknown subcommand options fail cleanly") {
  CHECK(run({"train", "--nope"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config hash") {
  CHECK(cli::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
}
