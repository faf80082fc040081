#include "oip/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <set>

#include "oip/analysis.hpp"
#include "oip/errors.hpp"
#include "oip/toml_lite.hpp"

namespace oip {

namespace {

double as_double(const nlohmann::json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  throw ConfigError(what + " must be a number");
}

std::array<double, kNumCategories> category_map(const nlohmann::json& j, const std::string& what,
                                                double fallback) {
  std::array<double, kNumCategories> out;
  out.fill(fallback);
  if (j.is_null()) return out;
  if (!j.is_object()) throw ConfigError(what + " must be a table of category letters");
  for (const auto& [key, value] : j.items()) {
    std::optional<RiasecCategory> cat;
    if (key.size() == 1) cat = category_from_letter(key[0]);
    if (!cat) cat = category_from_name(key);
    if (!cat) throw ConfigError(what + ": unknown category '" + key + "'");
    out[size_t(static_cast<int>(*cat))] = as_double(value, what + "." + key);
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

ProviderConfig parse_provider(const nlohmann::json& j, const std::filesystem::path& base,
                              uint64_t run_seed) {
  ProviderConfig pc;
  if (!j.contains("model_id")) throw ConfigError("provider needs a model_id");
  pc.params.model_id = j["model_id"].get<std::string>();
  pc.params.version_tag = j.value("version_tag", std::string{});
  if (j.contains("temperature")) pc.params.temperature = as_double(j["temperature"], "temperature");
  pc.params.max_attempts = int(j.value("max_attempts", 10));
  if (j.contains("rate_limit")) pc.params.rate_limit = as_double(j["rate_limit"], "rate_limit");

  std::string kind = j.value("kind", std::string{});
  if (kind.empty()) {
    if (j.contains("mock") && !j.contains("http"))
      kind = "mock";
    else if (j.contains("http") && !j.contains("mock"))
      kind = "http";
    else
      throw ConfigError("provider " + pc.params.model_id +
                        ": set kind = \"mock\" or \"http\" (or exactly one of [provider.mock] / "
                        "[provider.http])");
  }

  if (kind == "mock") {
    pc.kind = ProviderConfig::Kind::Mock;
    const nlohmann::json mock = j.value("mock", nlohmann::json::object());
    pc.mock.seed = run_seed;
    pc.mock.interest.means = category_map(mock.value("interest", nlohmann::json()), "interest", 3.0);
    pc.mock.competence.means =
        mock.contains("competence") ? category_map(mock["competence"], "competence", 3.0)
                                    : pc.mock.interest.means;
    pc.mock.zh_shift = category_map(mock.value("zh_shift", nlohmann::json()), "zh_shift", 0.0);
    const double noise = mock.contains("noise") ? as_double(mock["noise"], "noise") : 0.0;
    const double refusal = mock.contains("refusal") ? as_double(mock["refusal"], "refusal") : 0.0;
    pc.mock.interest.noise = noise;
    pc.mock.competence.noise = noise;
    pc.mock.interest.refusal_probability = refusal;
    pc.mock.competence.refusal_probability = refusal;
    if (mock.contains("item_sd")) pc.mock.item_sd = as_double(mock["item_sd"], "item_sd");
  } else if (kind == "http") {
    pc.kind = ProviderConfig::Kind::Http;
    if (!j.contains("http"))
      throw ConfigError("provider " + pc.params.model_id + ": missing [provider.http] table");
    const nlohmann::json& http = j["http"];
    pc.http.base_url = http.value("base_url", std::string{});
    pc.http.path = http.value("path", pc.http.path);
    pc.http.api_key_env = http.value("api_key_env", std::string{});
    pc.http.auth_header = http.value("auth_header", pc.http.auth_header);
    pc.http.auth_value_template = http.value("auth_value", pc.http.auth_value_template);
    pc.http.body_template = http.value("body", std::string{});
    pc.http.response_text_path = http.value("response_path", pc.http.response_text_path);
    if (http.contains("timeout_seconds"))
      pc.http.timeout_seconds = as_double(http["timeout_seconds"], "timeout_seconds");
    if (pc.http.base_url.empty())
      throw ConfigError("provider " + pc.params.model_id + ": http.base_url is required");
    if (pc.http.body_template.empty())
      throw ConfigError("provider " + pc.params.model_id + ": http.body is required");
  } else {
    throw ConfigError("provider " + pc.params.model_id + ": unknown kind '" + kind + "'");
  }
  (void)base;
  return pc;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  const nlohmann::json doc = load_toml(path);
  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");

  RunConfig config;
  const nlohmann::json run = doc.value("run", nlohmann::json::object());
  config.replications = int(run.value("replications", 20));
  config.seed = uint64_t(run.value("seed", 0));
  config.max_in_flight = int(run.value("max_in_flight", 4));

  config.languages.clear();
  for (const auto& l : run.value("languages", nlohmann::json::array({"en"}))) {
    const auto lang = language_from_code(l.get<std::string>());
    if (!lang) throw ConfigError("unknown language '" + l.get<std::string>() + "'");
    if (std::find(config.languages.begin(), config.languages.end(), *lang) ==
        config.languages.end())
      config.languages.push_back(*lang);
  }
  config.modes.clear();
  for (const auto& m : run.value("modes", nlohmann::json::array({"interest"}))) {
    const auto mode = mode_from_name(m.get<std::string>());
    if (!mode) throw ConfigError("unknown mode '" + m.get<std::string>() + "'");
    if (std::find(config.modes.begin(), config.modes.end(), *mode) == config.modes.end())
      config.modes.push_back(*mode);
  }

  if (!run.contains("item_bank")) throw ConfigError("[run].item_bank is required");
  config.item_bank_path = resolve(base, run["item_bank"].get<std::string>());
  if (run.contains("occupations"))
    config.occupation_path = resolve(base, run["occupations"].get<std::string>());
  if (run.contains("prompts")) config.prompt_dir = resolve(base, run["prompts"].get<std::string>());
  if (run.contains("expert_ratings"))
    config.expert_path = resolve(base, run["expert_ratings"].get<std::string>());
  config.out_dir = resolve(base, run.value("out_dir", std::string("artifact")));

  if (!doc.contains("provider") || !doc["provider"].is_array() || doc["provider"].empty())
    throw ConfigError("config needs at least one [[provider]]");
  for (const auto& p : doc["provider"])
    config.providers.push_back(parse_provider(p, base, config.seed));

  config.validate();
  return config;
}

std::vector<Diagnostic> validate_config(const RunConfig& config, bool offline) {
  std::vector<Diagnostic> out;
  auto fatal = [&](const std::string& m) { out.push_back({true, m}); };
  auto note = [&](const std::string& m) { out.push_back({false, m}); };

  try {
    config.validate();
  } catch (const Error& e) {
    fatal(e.what());
    return out;
  }

  std::optional<ItemBank> bank;
  try {
    bank = ItemBank::load(config.item_bank_path);
    note("item bank: 60 items, 10 per category (" + config.item_bank_path.string() + ")");
  } catch (const Error& e) {
    fatal(std::string("item bank: ") + e.what());
  }

  if (!config.prompt_dir.empty()) {
    try {
      PromptTemplates::load(config.prompt_dir);
      note("prompt templates: ok (" + config.prompt_dir.string() + ")");
    } catch (const Error& e) {
      fatal(std::string("prompt templates: ") + e.what());
    }
  }

  if (!config.occupation_path.empty()) {
    try {
      const auto table = scoring::OccupationTable::load(config.occupation_path);
      note("occupation table: " + std::to_string(table.size()) + " codes covered");
      if (table.size() == 0) fatal("occupation table is empty");
    } catch (const Error& e) {
      fatal(std::string("occupation table: ") + e.what());
    }
  } else {
    note("occupation table: not configured (holland codes will not be matched)");
  }

  if (!config.expert_path.empty()) {
    try {
      analysis::load_expert_ratings(config.expert_path);
      note("expert ratings: ok (" + config.expert_path.string() + ")");
    } catch (const Error& e) {
      fatal(std::string("expert ratings: ") + e.what());
    }
  }

  for (const auto& p : config.providers) {
    if (p.kind == ProviderConfig::Kind::Mock) {
      try {
        if (bank) MockClient(p.mock, *bank);
        note("provider " + p.params.model_id + ": mock ok");
      } catch (const Error& e) {
        fatal("provider " + p.params.model_id + ": " + e.what());
      }
      continue;
    }
    if (!p.http.api_key_env.empty() && std::getenv(p.http.api_key_env.c_str()) == nullptr) {
      fatal("provider " + p.params.model_id + ": environment variable " + p.http.api_key_env +
            " is not set");
      continue;
    }
    if (offline) {
      note("provider " + p.params.model_id + ": reachability skipped (--offline)");
      continue;
    }
    try {
      HttpChatClient client(p.http);
      PromptText probe{"ping", "ping", Mode::Interest, Language::English};
      client.complete(probe, p.params, AdministrationKey{}, 1);
      note("provider " + p.params.model_id + ": reachable");
    } catch (const AuthError& e) {
      fatal("provider " + p.params.model_id + ": " + e.what());
    } catch (const ProviderError& e) {
      fatal("provider " + p.params.model_id + ": unreachable: " + e.what());
    }
  }
  return out;
}

}  // namespace oip
