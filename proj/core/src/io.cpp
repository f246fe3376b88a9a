#include "srbf/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "srbf/common.hpp"

namespace srbf {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, end};
}

nlohmann::json to_json(const RbfNetwork& net) {
  const auto n = static_cast<std::size_t>(net.dimension());
  nlohmann::json units = nlohmann::json::array();
  for (const auto& u : net.units()) {
    units.push_back({{"w", u.weight},
                     {"c", std::vector<double>(u.center.begin(), u.center.begin() + n)},
                     {"d", std::vector<double>(u.shape.begin(), u.shape.begin() + n)}});
  }
  return {{"dimension", net.dimension()}, {"basis_form", std::string(to_string(net.form()))}, {"units", units}};
}

RbfNetwork network_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("dimension").get<int>();
    const BasisForm form = basis_form_from_string(j.value("basis_form", std::string("squared")));
    RbfNetwork net(n, form);
    for (const auto& item : j.at("units")) {
      RbfUnit u;
      u.weight = item.at("w").get<double>();
      const auto c = item.at("c").get<std::vector<double>>();
      const auto d = item.at("d").get<std::vector<double>>();
      if (c.size() != static_cast<std::size_t>(n) || d.size() != static_cast<std::size_t>(n)) {
        throw ConfigError("network unit " + std::to_string(net.size()) + ": c and d need " + std::to_string(n) +
                          " entries");
      }
      std::copy(c.begin(), c.end(), u.center.begin());
      std::copy(d.begin(), d.end(), u.shape.begin());
      net.add(u);
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("network file: ") + e.what());
  }
}

void save_network(const std::filesystem::path& path, const RbfNetwork& net) {
  write_file_atomic(path, to_json(net).dump(1) + "\n");
}

RbfNetwork load_network(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return network_from_json(j);
}

std::string network_role(std::size_t index) {
  static constexpr const char* roles[] = {"u", "p", "q", "r"};
  if (index >= 4) throw ConfigError("no network role for index " + std::to_string(index));
  return roles[index];
}

void write_history_csv(std::ostream& out, std::span<const HistoryRecord> history) {
  out << "niter,L_s,flux,divergence,boundary,l1,N,lr,phase,epoch_mean_L_s\n";
  for (const auto& h : history) {
    out << h.niter << ',' << format_double(h.loss.l2_total) << ',' << format_double(h.loss.flux) << ','
        << format_double(h.loss.divergence) << ',' << format_double(h.loss.boundary) << ','
        << format_double(h.loss.l1) << ',' << h.basis_count << ',' << format_double(h.lr) << ','
        << to_string(h.phase) << ',' << format_double(h.epoch_mean_l2) << '\n';
  }
}

void write_prunes_csv(std::ostream& out, std::span<const PruneEvent> prunes) {
  out << "niter,unit,w\n";
  for (const auto& p : prunes) out << p.niter << ',' << p.unit << ',' << format_double(p.weight) << '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace srbf
