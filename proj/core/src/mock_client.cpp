#include "oip/mock_client.hpp"

#include <algorithm>
#include <cmath>

#include "oip/errors.hpp"
#include "oip/rng.hpp"

namespace oip {

void LatentProfile::validate() const {
  for (double m : means)
    if (!(m >= 1.0 && m <= 5.0)) throw ConfigError("mock profile mean outside [1, 5]");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("mock noise must be >= 0");
  if (!(refusal_probability >= 0.0 && refusal_probability < 1.0))
    throw ConfigError("mock refusal probability must be in [0, 1)");
}

std::string refusal_text(Language language) {
  return language == Language::English
             ? "As an AI language model, I do not have personal preferences or feelings "
               "about work tasks, so I cannot answer this question."
             : "作为一个人工智能语言模型，我没有个人偏好或感受，无法回答这个问题。";
}

MockClient::MockClient(MockSpec spec, const ItemBank& bank) : spec_(spec) {
  spec_.interest.validate();
  spec_.competence.validate();
  if (!(spec_.item_sd >= 0.0)) throw ConfigError("mock item_sd must be >= 0");
  category_by_id_.resize(bank.size());
  for (const auto& item : bank.items()) category_by_id_[size_t(item.id - 1)] = item.category;
}

std::string MockClient::complete(const PromptText& prompt, const ProviderParams& params,
                                 const AdministrationKey& key, int attempt) {
  (void)prompt;
  requests_.fetch_add(1);
  if (key.item_id < 1 || size_t(key.item_id) > category_by_id_.size())
    throw TransportError("mock: unknown item id " + std::to_string(key.item_id));
  Item stub;
  stub.id = key.item_id;
  stub.category = category_by_id_[size_t(key.item_id - 1)];
  return respond(params, stub, key.mode, key.language, key.replication, attempt);
}

std::string MockClient::respond(const ProviderParams& params, const Item& item, Mode mode,
                                Language language, int replication, int attempt) const {
  const LatentProfile& profile = mode == Mode::Interest ? spec_.interest : spec_.competence;

  StreamKey stream(spec_.seed);
  stream.mix(params.model_id)
      .mix(params.version_tag)
      .mix(language_code(language))
      .mix(mode_name(mode))
      .mix(uint64_t(item.id))
      .mix(uint64_t(replication))
      .mix(uint64_t(attempt));

  if (profile.refusal_probability > 0.0 && stream.uniform(0) < profile.refusal_probability)
    return refusal_text(language);

  double mean = profile.means[size_t(static_cast<int>(item.category))];
  if (language == Language::Chinese) mean += spec_.zh_shift[size_t(static_cast<int>(item.category))];

  if (spec_.item_sd > 0.0) {
    // Latent per-item offset, stable across replications and attempts.
    StreamKey item_stream(spec_.seed);
    item_stream.mix(params.model_id)
        .mix(params.version_tag)
        .mix(mode_name(mode))
        .mix("item-bias")
        .mix(uint64_t(item.id));
    mean += spec_.item_sd * item_stream.normal(0);
  }

  double value = mean;
  if (profile.noise > 0.0) value += profile.noise * stream.normal(1);
  value = std::clamp(value, double(kLikertMin), double(kLikertMax));
  const int rounded = std::clamp(int(std::lround(value)), kLikertMin, kLikertMax);

  if (mode == Mode::Competence) return std::to_string(rounded);
  return std::string(likert_label(rounded, language));
}

}  // namespace oip
