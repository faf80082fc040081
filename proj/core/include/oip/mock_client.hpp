#pragma once

#include <array>
#include <atomic>
#include <cstdint>

#include "oip/provider.hpp"

namespace oip {

/// Latent response tendencies of a simulated respondent: a mean per category
/// on the 1..5 scale, per-response noise, and a refusal probability.
struct LatentProfile {
  std::array<double, kNumCategories> means{3.0, 3.0, 3.0, 3.0, 3.0, 3.0};
  double noise = 0.0;
  double refusal_probability = 0.0;

  void validate() const;  // throws ConfigError when out of bounds
};

/// Full configuration of one mock provider. Interest and competence draw from
/// separate profiles; zh_shift is added to the category means when the item
/// is administered in Chinese; item_sd adds a per-item latent offset shared
/// across replications (drawn once per item/mode from the seed).
struct MockSpec {
  LatentProfile interest;
  LatentProfile competence;
  std::array<double, kNumCategories> zh_shift{0, 0, 0, 0, 0, 0};
  double item_sd = 0.0;
  uint64_t seed = 0;
};

/// Deterministic offline respondent. Every reply is a pure function of
/// (seed, model_id, version_tag, language, mode, item_id, replication,
/// attempt), so runs replay byte-identically.
class MockClient : public ChatClient {
 public:
  MockClient(MockSpec spec, const ItemBank& bank);

  std::string complete(const PromptText& prompt, const ProviderParams& params,
                       const AdministrationKey& key, int attempt) override;

  /// Raw response text for one draw; exposed so tests can replay the
  /// generator by hand.
  std::string respond(const ProviderParams& params, const Item& item, Mode mode,
                      Language language, int replication, int attempt) const;

  int64_t requests_issued() const { return requests_.load(); }

  const MockSpec& spec() const { return spec_; }

 private:
  MockSpec spec_;
  std::vector<RiasecCategory> category_by_id_;  // index = item_id - 1
  std::atomic<int64_t> requests_{0};
};

/// The refusal boilerplate the mock emits; guaranteed unparseable.
std::string refusal_text(Language language);

}  // namespace oip
