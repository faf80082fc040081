#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oip/runner.hpp"

namespace oip {

/// Loads a study config (TOML). Paths in the file resolve relative to the
/// file's directory. Throws ConfigError / MissingFile.
RunConfig load_config(const std::filesystem::path& path);

struct Diagnostic {
  bool fatal = false;
  std::string message;
};

/// Config + data sanity: item bank invariants, occupation table coverage,
/// prompt templates, provider credentials/reachability. `offline` skips the
/// live endpoint probe.
std::vector<Diagnostic> validate_config(const RunConfig& config, bool offline);

}  // namespace oip
