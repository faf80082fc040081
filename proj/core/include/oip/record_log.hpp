#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oip/provider.hpp"

namespace oip {

inline constexpr int kFormatVersion = 1;

nlohmann::json record_to_json(const AdministrationRecord& rec);
AdministrationRecord record_from_json(const nlohmann::json& j);

/// A persisted run: manifest plus the append-only record log.
struct RunArtifact {
  nlohmann::json manifest;
  std::vector<AdministrationRecord> records;

  std::set<std::string> cell_keys() const;
  std::filesystem::path dir;
};

/// Loads manifest.json and records.jsonl from a run directory. A trailing
/// partial line (torn write) is dropped; malformed interior lines are errors.
RunArtifact load_artifact(const std::filesystem::path& dir);

/// Physically removes a torn trailing line so appends stay well-formed.
/// Returns true when a repair happened.
bool trim_torn_tail(const std::filesystem::path& dir);

/// Append-only record writer; one fsync-friendly flush per record.
class RecordLogWriter {
 public:
  explicit RecordLogWriter(const std::filesystem::path& dir);
  void append(const AdministrationRecord& rec);

 private:
  std::ofstream out_;
};

std::filesystem::path records_path(const std::filesystem::path& dir);
std::filesystem::path manifest_path(const std::filesystem::path& dir);

}  // namespace oip
