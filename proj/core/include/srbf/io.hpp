#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "srbf/rbf.hpp"
#include "srbf/trainer.hpp"

namespace srbf {

/// {"dimension": n, "units": [{"w", "c": [...], "d": [...]}], "basis_form"}
nlohmann::json to_json(const RbfNetwork& net);
RbfNetwork network_from_json(const nlohmann::json& j);

void save_network(const std::filesystem::path& path, const RbfNetwork& net);
RbfNetwork load_network(const std::filesystem::path& path);

/// File names of the network roles in a run directory: u, p, q, r.
std::string network_role(std::size_t index);

void write_history_csv(std::ostream& out, std::span<const HistoryRecord> history);
void write_prunes_csv(std::ostream& out, std::span<const PruneEvent> prunes);

/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace srbf
