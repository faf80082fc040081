#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "oip/item_bank.hpp"
#include "oip/record_log.hpp"

namespace oip::scoring {

struct ScoreKey {
  std::string model_id;
  std::string version_tag;
  Language language = Language::English;
  Mode mode = Mode::Interest;
  int replication = 0;

  bool operator<(const ScoreKey& o) const;
  bool operator==(const ScoreKey& o) const;
};

/// Per-replication sums of the six category subscales.
struct CategoryScores {
  ScoreKey key;
  std::array<int, kNumCategories> sums{};
  int missing_count = 0;

  /// Highest-sum category per the instrument's per-replication rule;
  /// exact ties are all reported, in R-I-A-S-E-C order.
  std::vector<RiasecCategory> top_categories() const;
};

/// Sums one replication's records into category scores. Records must agree on
/// (model, version, language, mode, replication) and contain at most one
/// record per item; duplicates are a DuplicateItem error.
CategoryScores score_replication(const std::vector<AdministrationRecord>& records,
                                 const ItemBank& bank);

/// All per-replication scores of an artifact, in key order.
std::vector<CategoryScores> replication_scores(const RunArtifact& artifact, const ItemBank& bank);

/// One row of the replication-aggregated item table.
struct ItemMean {
  std::string model_id;
  std::string version_tag;
  Language language = Language::English;
  Mode mode = Mode::Interest;
  int item_id = 0;
  RiasecCategory category = RiasecCategory::Realistic;
  double mean = 0.0;
  int n = 0;        // replications with a parsed value
  int missing = 0;  // replications with all attempts failed

  bool operator<(const ItemMean& o) const;
};

/// Mean of non-missing values per (provider, version, language, mode, item).
/// Throws EmptyCell when every replication of an item is missing.
std::vector<ItemMean> aggregate_item_scores(const RunArtifact& artifact, const ItemBank& bank);

/// Three-letter Holland code with rank-equivalence bookkeeping.
struct HollandCode {
  std::array<RiasecCategory, 3> categories{};
  /// Partition of the three letters into rank-equivalence classes, in rank
  /// order; members listed in R-I-A-S-E-C order.
  std::vector<std::vector<RiasecCategory>> tie_sets;
  /// True when the class containing rank 3 also contains rank 4: the cut
  /// between code and non-code letters is statistically arbitrary.
  bool tie_beyond_top3 = false;

  std::string letters() const;  // e.g. "SAI"
};

/// Ranks the six means (descending; exact ties broken by R-I-A-S-E-C order)
/// and groups the top three letters into tie sets. `equivalence` adds
/// externally derived indistinguishability (e.g. nonsignificant pairwise
/// comparisons); exact numeric ties always count.
HollandCode holland_code(const std::array<double, kNumCategories>& means,
                         const std::vector<std::vector<RiasecCategory>>& equivalence = {});

struct OccupationMatch {
  std::vector<std::string> occupations;     // union over admissible orderings
  std::vector<std::string> covered_codes;   // orderings found in the table
  std::vector<std::string> uncovered_codes; // admissible orderings absent from the table
};

class OccupationTable {
 public:
  /// CSV with header code,occupation; codes are three distinct RIASEC letters.
  static OccupationTable load(const std::filesystem::path& path);
  static OccupationTable from_rows(const std::vector<std::pair<std::string, std::string>>& rows);

  /// Union of occupations over every letter ordering consistent with the
  /// code's tie sets. Missing orderings are reported, not errors.
  OccupationMatch match(const HollandCode& code) const;

  size_t size() const { return by_code_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> by_code_;
};

}  // namespace oip::scoring
