#include "oip/provider.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "oip/errors.hpp"
#include "oip/likert_parse.hpp"

namespace oip {

void ProviderParams::validate() const {
  if (model_id.empty()) throw ConfigError("provider model_id must not be empty");
  if (!std::isfinite(temperature) || temperature < 0.0)
    throw ConfigError("provider " + model_id + ": temperature must be finite and >= 0");
  if (max_attempts < 1) throw ConfigError("provider " + model_id + ": max_attempts must be >= 1");
  if (!(rate_limit >= 0.0)) throw ConfigError("provider " + model_id + ": bad rate_limit");
}

std::string AdministrationKey::cell_string() const {
  std::ostringstream os;
  os << model_id << "|" << version_tag << "|" << language_code(language) << "|" << mode_name(mode)
     << "|" << item_id << "|" << replication;
  return os.str();
}

RateLimiter::RateLimiter(double requests_per_second) : next_(std::chrono::steady_clock::now()) {
  if (requests_per_second > 0.0)
    interval_ = std::chrono::nanoseconds(int64_t(1e9 / requests_per_second));
}

void RateLimiter::acquire() {
  if (interval_.count() == 0) return;
  std::chrono::steady_clock::time_point wake;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    wake = std::max(next_, now);
    next_ = wake + interval_;
  }
  std::this_thread::sleep_until(wake);
}

AdministrationRecord administer_item(ChatClient& client, const PromptTemplates& templates,
                                     const Item& item, Mode mode, Language language,
                                     const ProviderParams& params, int replication,
                                     RateLimiter* limiter) {
  AdministrationRecord rec;
  rec.key = {params.model_id, params.version_tag, language, mode, item.id, replication};
  const PromptText prompt = render_prompt(templates, item, mode, language);

  for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
    Attempt a;
    try {
      if (limiter) limiter->acquire();
      a.raw_text = client.complete(prompt, params, rec.key, attempt);
    } catch (const AuthError&) {
      throw;
    } catch (const ProviderError& e) {
      a.raw_text = std::string("<provider error: ") + e.what() + ">";
      rec.attempts.push_back(std::move(a));
      continue;
    }
    const auto parsed = parse_likert(a.raw_text, language);
    if (parsed) a.parsed = parsed->numeric();
    rec.attempts.push_back(std::move(a));
    if (parsed) {
      rec.final_value = parsed->numeric();
      break;
    }
  }
  return rec;
}

}  // namespace oip
