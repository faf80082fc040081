#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "oip/http_client.hpp"
#include "oip/mock_client.hpp"
#include "oip/record_log.hpp"

namespace oip {

struct ProviderConfig {
  enum class Kind { Mock, Http };
  ProviderParams params;
  Kind kind = Kind::Mock;
  MockSpec mock;
  HttpProviderConfig http;
};

struct RunConfig {
  std::vector<ProviderConfig> providers;
  std::vector<Language> languages{Language::English};
  std::vector<Mode> modes{Mode::Interest};
  int replications = 20;
  uint64_t seed = 0;
  int max_in_flight = 4;

  std::filesystem::path item_bank_path;
  std::filesystem::path occupation_path;  // optional; used by score/analyze
  std::filesystem::path prompt_dir;       // empty -> built-in templates
  std::filesystem::path expert_path;      // optional; used by analyze
  std::filesystem::path out_dir;

  void validate() const;  // throws ConfigError

  bool all_mock() const;
  /// Canonical compatibility snapshot stored in (and checked against) the
  /// artifact manifest.
  nlohmann::json manifest_config(const ItemBank& bank) const;
};

struct RunResult {
  std::filesystem::path dir;
  int administered = 0;  // cells newly administered in this call
  int skipped = 0;       // cells already present
  int64_t requests = 0;  // provider calls issued (attempt-level)
  std::vector<std::string> failed_providers;  // model ids aborted by AuthError
};

/// Administers every missing (provider, language, mode, item, replication)
/// cell, appending records durably in canonical order: providers, then
/// languages, modes, replications, and items innermost (item-major within a
/// replication). A fatal provider error aborts only that provider's cells.
RunResult run_survey(const RunConfig& config, const ItemBank& bank);

/// Same filling contract, but the artifact must already exist and its
/// manifest must match the supplied config (throws ManifestMismatch).
RunResult resume(const std::filesystem::path& artifact_dir, const RunConfig& config,
                 const ItemBank& bank);

/// Builds the client for one provider entry (exposed for validate/tests).
std::unique_ptr<ChatClient> make_client(const ProviderConfig& provider, const ItemBank& bank);

}  // namespace oip
