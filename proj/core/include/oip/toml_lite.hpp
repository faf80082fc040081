#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace oip {

/// Minimal TOML reader covering the config grammar of this project:
/// [table] / [[array-of-table]] headers (dotted), dotted keys, basic and
/// literal strings, integers, floats, booleans, arrays, and inline tables.
/// Dates, multi-line strings, and key reopening rules beyond the above are
/// out of scope. Parsed values land in a JSON tree.
nlohmann::json parse_toml(const std::string& text);
nlohmann::json load_toml(const std::filesystem::path& path);

}  // namespace oip
