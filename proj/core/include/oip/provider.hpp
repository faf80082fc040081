#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "oip/item_bank.hpp"
#include "oip/prompts.hpp"
#include "oip/riasec.hpp"

namespace oip {

struct ProviderParams {
  std::string model_id;
  std::string version_tag;
  double temperature = 1.0;
  int max_attempts = 10;
  double rate_limit = 0.0;  // requests/second; 0 means unlimited

  void validate() const;  // throws ConfigError on bad values
};

/// Anything that can answer one prompt with text. Implementations must be
/// safe to share across administration workers.
class ChatClient {
 public:
  virtual ~ChatClient() = default;

  /// One completion request. Throws TransportError (retryable), AuthError
  /// (fatal), or RateLimitedError (backoff then retry) for networked clients.
  virtual std::string complete(const PromptText& prompt, const ProviderParams& params,
                               const struct AdministrationKey& key, int attempt) = 0;
};

/// Identifies one administration cell.
struct AdministrationKey {
  std::string model_id;
  std::string version_tag;
  Language language = Language::English;
  Mode mode = Mode::Interest;
  int item_id = 0;
  int replication = 0;  // 1..R

  std::string cell_string() const;  // stable "model|version|lang|mode|item|rep"
  bool operator<(const AdministrationKey& o) const { return cell_string() < o.cell_string(); }
  bool operator==(const AdministrationKey& o) const { return cell_string() == o.cell_string(); }
};

struct Attempt {
  std::string raw_text;
  std::optional<int> parsed;  // Likert numeric when the parse succeeded
};

/// One prompt/response exchange with its full attempt history.
struct AdministrationRecord {
  AdministrationKey key;
  std::vector<Attempt> attempts;
  std::optional<int> final_value;  // empty = Missing (all attempts failed)
  int64_t timestamp_ms = 0;
};

/// Simple token-interval limiter; the serialization point for one provider.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();  // blocks until a slot is available

 private:
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_;
  std::chrono::nanoseconds interval_{0};
};

/// Loops complete -> parse up to max_attempts, recording every attempt
/// verbatim; stops at the first successful parse. Transport and rate-limit
/// errors consume an attempt and are recorded; AuthError propagates.
AdministrationRecord administer_item(ChatClient& client, const PromptTemplates& templates,
                                     const Item& item, Mode mode, Language language,
                                     const ProviderParams& params, int replication,
                                     RateLimiter* limiter = nullptr);

}  // namespace oip
