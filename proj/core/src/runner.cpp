#include "oip/runner.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "oip/errors.hpp"

namespace oip {

namespace {

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int64_t wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct Task {
  int64_t seq = 0;
  size_t provider = 0;
  Language language = Language::English;
  Mode mode = Mode::Interest;
  int replication = 0;
  int item_id = 0;
};

}  // namespace

bool RunConfig::all_mock() const {
  for (const auto& p : providers)
    if (p.kind != ProviderConfig::Kind::Mock) return false;
  return true;
}

void RunConfig::validate() const {
  if (providers.empty()) throw ConfigError("config needs at least one provider");
  if (languages.empty()) throw ConfigError("config needs at least one language");
  if (modes.empty()) throw ConfigError("config needs at least one mode");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (item_bank_path.empty()) throw ConfigError("config needs an item_bank path");
  if (out_dir.empty()) throw ConfigError("config needs an output directory");
  std::set<std::string> ids;
  for (const auto& p : providers) {
    p.params.validate();
    if (!ids.insert(p.params.model_id + "|" + p.params.version_tag).second)
      throw ConfigError("duplicate provider " + p.params.model_id + "/" + p.params.version_tag);
  }
}

nlohmann::json RunConfig::manifest_config(const ItemBank& bank) const {
  nlohmann::json providers_json = nlohmann::json::array();
  for (const auto& p : providers)
    providers_json.push_back({{"model_id", p.params.model_id},
                              {"version_tag", p.params.version_tag}});
  nlohmann::json langs = nlohmann::json::array();
  for (auto l : languages) langs.push_back(std::string(language_code(l)));
  nlohmann::json mode_list = nlohmann::json::array();
  for (auto m : modes) mode_list.push_back(std::string(mode_name(m)));
  char fp[32];
  std::snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(bank.fingerprint()));
  return nlohmann::json{{"providers", providers_json},
                        {"languages", langs},
                        {"modes", mode_list},
                        {"replications", replications},
                        {"seed", seed},
                        {"item_bank_fingerprint", std::string(fp)}};
}

std::unique_ptr<ChatClient> make_client(const ProviderConfig& provider, const ItemBank& bank) {
  if (provider.kind == ProviderConfig::Kind::Mock)
    return std::make_unique<MockClient>(provider.mock, bank);
  return std::make_unique<HttpChatClient>(provider.http);
}

namespace {

void check_manifest(const nlohmann::json& manifest, const RunConfig& config,
                    const ItemBank& bank) {
  if (!manifest.contains("config")) throw ManifestMismatch("manifest lacks a config snapshot");
  const nlohmann::json want = config.manifest_config(bank);
  const nlohmann::json& have = manifest["config"];
  for (const auto& [key, value] : want.items()) {
    if (!have.contains(key) || have[key] != value)
      throw ManifestMismatch("manifest field '" + key + "' does not match the supplied config");
  }
}

RunResult fill_missing(const RunConfig& config, const ItemBank& bank,
                       const std::set<std::string>& done) {
  RunResult result;
  result.dir = config.out_dir;
  result.skipped = int(done.size());

  PromptTemplates templates =
      config.prompt_dir.empty() ? PromptTemplates::builtin() : PromptTemplates::load(config.prompt_dir);

  // Clients, rate limiters, and per-provider abort flags.
  std::vector<std::unique_ptr<ChatClient>> clients;
  std::vector<std::unique_ptr<RateLimiter>> limiters;
  std::vector<MockClient*> mocks;
  for (const auto& p : config.providers) {
    clients.push_back(make_client(p, bank));
    limiters.push_back(std::make_unique<RateLimiter>(p.params.rate_limit));
    mocks.push_back(dynamic_cast<MockClient*>(clients.back().get()));
  }

  // Canonical cell order; the sequence index doubles as the logical clock.
  std::vector<Task> tasks;
  int64_t seq = 0;
  for (size_t pi = 0; pi < config.providers.size(); ++pi)
    for (Language lang : config.languages)
      for (Mode mode : config.modes)
        for (int rep = 1; rep <= config.replications; ++rep)
          for (const auto& item : bank.items()) {
            AdministrationKey key{config.providers[pi].params.model_id,
                                  config.providers[pi].params.version_tag,
                                  lang,
                                  mode,
                                  item.id,
                                  rep};
            const int64_t s = seq++;
            if (done.count(key.cell_string())) continue;
            tasks.push_back(Task{s, pi, lang, mode, rep, item.id});
          }

  if (tasks.empty()) return result;

  trim_torn_tail(config.out_dir);
  RecordLogWriter writer(config.out_dir);
  const bool logical_clock = config.all_mock();

  std::mutex mu;
  std::condition_variable cv;
  std::map<int64_t, std::optional<AdministrationRecord>> ready;  // seq -> outcome
  std::atomic<size_t> next_task{0};
  std::vector<std::atomic<bool>> aborted(config.providers.size());
  for (auto& a : aborted) a.store(false);
  std::vector<std::string> abort_errors(config.providers.size());

  auto worker = [&]() {
    while (true) {
      const size_t i = next_task.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      std::optional<AdministrationRecord> outcome;
      if (!aborted[task.provider].load()) {
        const auto& provider = config.providers[task.provider];
        try {
          AdministrationRecord rec = administer_item(
              *clients[task.provider], templates, bank.by_id(task.item_id), task.mode,
              task.language, provider.params, task.replication, limiters[task.provider].get());
          rec.timestamp_ms = logical_clock ? task.seq : wall_ms();
          outcome = std::move(rec);
        } catch (const AuthError& e) {
          bool expected = false;
          if (aborted[task.provider].compare_exchange_strong(expected, true)) {
            std::lock_guard<std::mutex> lock(mu);
            abort_errors[task.provider] = e.what();
          }
        }
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        ready.emplace(task.seq, std::move(outcome));
      }
      cv.notify_all();
    }
  };

  const int n_workers =
      int(std::min<size_t>(size_t(std::max(1, config.max_in_flight)), tasks.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);

  // Single writer, emitting records in canonical order.
  for (const Task& task : tasks) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return ready.count(task.seq) > 0; });
    auto node = ready.extract(task.seq);
    lock.unlock();
    if (node.mapped()) {
      writer.append(*node.mapped());
      result.administered++;
    }
  }
  for (auto& t : pool) t.join();

  for (size_t pi = 0; pi < config.providers.size(); ++pi)
    if (aborted[pi].load())
      result.failed_providers.push_back(config.providers[pi].params.model_id + ": " +
                                        abort_errors[pi]);
  for (MockClient* m : mocks)
    if (m) result.requests += m->requests_issued();
  return result;
}

}  // namespace

RunResult run_survey(const RunConfig& config, const ItemBank& bank) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);

  std::set<std::string> done;
  const auto mpath = manifest_path(config.out_dir);
  if (std::filesystem::exists(mpath)) {
    RunArtifact existing = load_artifact(config.out_dir);
    check_manifest(existing.manifest, config, bank);
    done = existing.cell_keys();
  } else {
    nlohmann::json manifest{{"format_version", kFormatVersion},
                            {"created_at", iso8601_now()},
                            {"config", config.manifest_config(bank)}};
    std::ofstream out(mpath, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + mpath.string());
    out << manifest.dump(2) << "\n";
  }
  return fill_missing(config, bank, done);
}

RunResult resume(const std::filesystem::path& artifact_dir, const RunConfig& config,
                 const ItemBank& bank) {
  RunConfig cfg = config;
  cfg.out_dir = artifact_dir;
  cfg.validate();
  if (!std::filesystem::exists(manifest_path(artifact_dir)))
    throw ManifestMismatch("no artifact at " + artifact_dir.string());
  RunArtifact existing = load_artifact(artifact_dir);
  check_manifest(existing.manifest, cfg, bank);
  return fill_missing(cfg, bank, existing.cell_keys());
}

}  // namespace oip
