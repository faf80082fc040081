#pragma once

#include <string>

#include "oip/provider.hpp"

namespace oip {

/// Generic chat-completion endpoint description. New providers are plain
/// config: URL, auth header, and a JSON body template with {prompt},
/// {temperature}, and {model} placeholders.
struct HttpProviderConfig {
  std::string base_url;   // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string api_key_env;                          // environment variable holding the key
  std::string auth_header = "Authorization";        // empty disables the header
  std::string auth_value_template = "Bearer {key}";
  std::string body_template;
  std::string response_text_path = "choices.0.message.content";
  double timeout_seconds = 60.0;
  int rate_limit_retries = 3;  // internal backoff-then-retry budget for 429s
};

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpProviderConfig config);

  std::string complete(const PromptText& prompt, const ProviderParams& params,
                       const AdministrationKey& key, int attempt) override;

 private:
  HttpProviderConfig config_;
  std::string api_key_;
};

/// JSON-escapes a string body (no surrounding quotes).
std::string json_escape(const std::string& s);

}  // namespace oip
