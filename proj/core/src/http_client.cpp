#include "oip/http_client.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oip/errors.hpp"

namespace oip {

namespace {

std::string replace_all(std::string s, const std::string& needle, const std::string& value) {
  size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) {
    s.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return s;
}

std::string format_temperature(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

const nlohmann::json* walk_path(const nlohmann::json& root, const std::string& dotted) {
  const nlohmann::json* cur = &root;
  std::istringstream in(dotted);
  std::string tok;
  while (std::getline(in, tok, '.')) {
    if (tok.empty()) continue;
    if (!tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos) {
      const size_t idx = std::stoul(tok);
      if (!cur->is_array() || idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
    } else {
      if (!cur->is_object() || !cur->contains(tok)) return nullptr;
      cur = &(*cur)[tok];
    }
  }
  return cur;
}

}  // namespace

std::string json_escape(const std::string& s) {
  const std::string dumped = nlohmann::json(s).dump();
  return dumped.substr(1, dumped.size() - 2);  // strip the surrounding quotes
}

HttpChatClient::HttpChatClient(HttpProviderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("http provider: base_url must not be empty");
  if (config_.body_template.empty())
    throw ConfigError("http provider: body_template must not be empty");
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key) api_key_ = key;
  }
}

std::string HttpChatClient::complete(const PromptText& prompt, const ProviderParams& params,
                                     const AdministrationKey& key, int attempt) {
  (void)key;
  (void)attempt;
  if (!config_.api_key_env.empty() && api_key_.empty())
    throw AuthError("environment variable " + config_.api_key_env + " is not set");

  std::string body = config_.body_template;
  body = replace_all(body, "{prompt}", json_escape(prompt.full_text()));
  body = replace_all(body, "{temperature}", format_temperature(params.temperature));
  body = replace_all(body, "{model}", json_escape(params.model_id));

  httplib::Client cli(config_.base_url);
  cli.set_connection_timeout(std::chrono::milliseconds(int64_t(config_.timeout_seconds * 1000)));
  cli.set_read_timeout(std::chrono::milliseconds(int64_t(config_.timeout_seconds * 1000)));
  httplib::Headers headers;
  if (!config_.auth_header.empty() && !api_key_.empty())
    headers.emplace(config_.auth_header,
                    replace_all(config_.auth_value_template, "{key}", api_key_));

  int backoff_ms = 500;
  for (int tries = 0;; ++tries) {
    auto res = cli.Post(config_.path, headers, body, "application/json");
    if (!res)
      throw TransportError("request to " + config_.base_url + config_.path + " failed: " +
                           httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
      throw AuthError("provider returned HTTP " + std::to_string(res->status));
    if (res->status == 429) {
      if (tries >= config_.rate_limit_retries)
        throw RateLimitedError("provider kept returning HTTP 429");
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = std::min(backoff_ms * 2, 8000);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw TransportError("provider returned HTTP " + std::to_string(res->status));

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("bad JSON in provider response: ") + e.what());
    }
    const nlohmann::json* text = walk_path(parsed, config_.response_text_path);
    if (!text || !text->is_string())
      throw TransportError("response lacks text at path " + config_.response_text_path);
    return text->get<std::string>();
  }
}

}  // namespace oip
