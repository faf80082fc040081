#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oip/riasec.hpp"

namespace oip {

/// One work task of the 60-item interest profiler, bilingual.
struct Item {
  int id = 0;  // 1..60
  RiasecCategory category = RiasecCategory::Realistic;
  std::string text_en;
  std::string text_zh;

  const std::string& text(Language lang) const {
    return lang == Language::English ? text_en : text_zh;
  }
};

class ItemBank {
 public:
  /// Loads and validates a bank from CSV (header: id,category,text_en,text_zh).
  /// Throws MissingFile, SchemaViolation, or CategoryCountMismatch.
  static ItemBank load(const std::filesystem::path& path);

  /// Validates and adopts pre-built items (used by tests and fixtures).
  static ItemBank from_items(std::vector<Item> items);

  const std::vector<Item>& items() const { return items_; }
  const Item& by_id(int id) const;  // throws SchemaViolation on unknown id
  size_t size() const { return items_.size(); }

  /// 64-bit content fingerprint; manifests use it for compatibility checks.
  uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<Item> items_;  // sorted by id, ids contiguous 1..60
  uint64_t fingerprint_ = 0;
};

/// Parses one CSV line, honoring RFC-4180 quoting. Exposed for reuse by the
/// other CSV readers in this project.
std::vector<std::string> parse_csv_line(const std::string& line);

/// Reads a whole CSV file into records, skipping blank lines and joining
/// quoted fields that span multiple physical lines.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace oip
