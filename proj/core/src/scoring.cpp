#include "oip/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "oip/errors.hpp"

namespace oip::scoring {

namespace {

std::tuple<const std::string&, const std::string&, int, int, int> key_tuple(const ScoreKey& k) {
  return {k.model_id, k.version_tag, int(k.language), int(k.mode), k.replication};
}

ScoreKey key_of(const AdministrationRecord& rec) {
  return ScoreKey{rec.key.model_id, rec.key.version_tag, rec.key.language, rec.key.mode,
                  rec.key.replication};
}

}  // namespace

bool ScoreKey::operator<(const ScoreKey& o) const { return key_tuple(*this) < key_tuple(o); }
bool ScoreKey::operator==(const ScoreKey& o) const { return key_tuple(*this) == key_tuple(o); }

std::vector<RiasecCategory> CategoryScores::top_categories() const {
  const int best = *std::max_element(sums.begin(), sums.end());
  std::vector<RiasecCategory> out;
  for (int c = 0; c < kNumCategories; ++c)
    if (sums[size_t(c)] == best) out.push_back(static_cast<RiasecCategory>(c));
  return out;
}

CategoryScores score_replication(const std::vector<AdministrationRecord>& records,
                                 const ItemBank& bank) {
  if (records.empty()) throw DegenerateInput("score_replication: no records");
  if (records.size() > bank.size())
    throw DuplicateItem("score_replication: more records than items");

  CategoryScores out;
  out.key = key_of(records.front());
  std::set<int> seen;
  for (const auto& rec : records) {
    if (!(key_of(rec) == out.key))
      throw DegenerateInput("score_replication: records span multiple keys");
    if (!seen.insert(rec.key.item_id).second)
      throw DuplicateItem("duplicate record for item " + std::to_string(rec.key.item_id));
    const auto& item = bank.by_id(rec.key.item_id);
    if (rec.final_value)
      out.sums[size_t(static_cast<int>(item.category))] += *rec.final_value;
    else
      out.missing_count++;
  }
  return out;
}

std::vector<CategoryScores> replication_scores(const RunArtifact& artifact, const ItemBank& bank) {
  std::map<ScoreKey, std::vector<AdministrationRecord>> grouped;
  for (const auto& rec : artifact.records) grouped[key_of(rec)].push_back(rec);
  std::vector<CategoryScores> out;
  out.reserve(grouped.size());
  for (const auto& [key, records] : grouped) out.push_back(score_replication(records, bank));
  return out;
}

bool ItemMean::operator<(const ItemMean& o) const {
  return std::tie(model_id, version_tag, language, mode, item_id) <
         std::tie(o.model_id, o.version_tag, o.language, o.mode, o.item_id);
}

std::vector<ItemMean> aggregate_item_scores(const RunArtifact& artifact, const ItemBank& bank) {
  struct Acc {
    double sum = 0.0;
    int n = 0;
    int missing = 0;
  };
  std::map<std::tuple<std::string, std::string, int, int, int>, Acc> acc;
  for (const auto& rec : artifact.records) {
    auto& a = acc[{rec.key.model_id, rec.key.version_tag, int(rec.key.language),
                   int(rec.key.mode), rec.key.item_id}];
    if (rec.final_value) {
      a.sum += *rec.final_value;
      a.n++;
    } else {
      a.missing++;
    }
  }
  std::vector<ItemMean> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    ItemMean row;
    row.model_id = std::get<0>(key);
    row.version_tag = std::get<1>(key);
    row.language = static_cast<Language>(std::get<2>(key));
    row.mode = static_cast<Mode>(std::get<3>(key));
    row.item_id = std::get<4>(key);
    row.category = bank.by_id(row.item_id).category;
    if (a.n == 0) {
      std::ostringstream os;
      os << "all replications missing for " << row.model_id << "/" << row.version_tag << " "
         << language_code(row.language) << " " << mode_name(row.mode) << " item " << row.item_id;
      throw EmptyCell(os.str());
    }
    row.mean = a.sum / a.n;
    row.n = a.n;
    row.missing = a.missing;
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string HollandCode::letters() const {
  std::string s;
  for (auto c : categories) s += category_letter(c);
  return s;
}

HollandCode holland_code(const std::array<double, kNumCategories>& means,
                         const std::vector<std::vector<RiasecCategory>>& equivalence) {
  for (double m : means)
    if (!std::isfinite(m)) throw DegenerateInput("holland_code: non-finite mean");

  // Union-find over the six categories: exact numeric ties always merge;
  // supplied equivalence classes merge on top.
  std::array<int, kNumCategories> parent;
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[size_t(a)] != a) a = parent[size_t(a)] = parent[size_t(parent[size_t(a)])];
    return a;
  };
  auto unite = [&](int a, int b) { parent[size_t(find(a))] = find(b); };
  for (int a = 0; a < kNumCategories; ++a)
    for (int b = a + 1; b < kNumCategories; ++b)
      if (means[size_t(a)] == means[size_t(b)]) unite(a, b);
  for (const auto& cls : equivalence)
    for (size_t i = 1; i < cls.size(); ++i)
      unite(static_cast<int>(cls[0]), static_cast<int>(cls[i]));

  // Rank: mean descending, R-I-A-S-E-C order on exact ties.
  std::array<int, kNumCategories> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (means[size_t(a)] != means[size_t(b)]) return means[size_t(a)] > means[size_t(b)];
    return a < b;
  });

  HollandCode code;
  for (int i = 0; i < 3; ++i) code.categories[size_t(i)] = static_cast<RiasecCategory>(order[size_t(i)]);

  // Tie sets: classes restricted to the top three, in rank order.
  std::vector<int> assigned;
  for (int i = 0; i < 3; ++i) {
    const int root = find(order[size_t(i)]);
    if (std::find(assigned.begin(), assigned.end(), root) != assigned.end()) continue;
    assigned.push_back(root);
    std::vector<RiasecCategory> members;
    for (int c = 0; c < kNumCategories; ++c) {
      if (find(c) != root) continue;
      const bool in_top3 = std::find(order.begin(), order.begin() + 3, c) != order.begin() + 3;
      if (in_top3)
        members.push_back(static_cast<RiasecCategory>(c));  // R-I-A-S-E-C order by construction
      else
        code.tie_beyond_top3 = true;
    }
    code.tie_sets.push_back(std::move(members));
  }
  return code;
}

OccupationTable OccupationTable::load(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"code", "occupation"})
    throw SchemaViolation("occupation table header must be code,occupation: " + path.string());
  std::vector<std::pair<std::string, std::string>> pairs;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw SchemaViolation("occupation table row " + std::to_string(i + 1) + " needs 2 fields");
    pairs.emplace_back(rows[i][0], rows[i][1]);
  }
  return from_rows(pairs);
}

OccupationTable OccupationTable::from_rows(
    const std::vector<std::pair<std::string, std::string>>& rows) {
  OccupationTable table;
  for (const auto& [code, occupation] : rows) {
    if (code.size() != 3) throw SchemaViolation("bad occupation code '" + code + "'");
    std::set<char> letters;
    for (char ch : code) {
      const auto cat = category_from_letter(ch);
      if (!cat) throw SchemaViolation("bad occupation code '" + code + "'");
      letters.insert(category_letter(*cat));
    }
    if (letters.size() != 3)
      throw SchemaViolation("occupation code letters must be distinct: '" + code + "'");
    std::string canon;
    for (char ch : code) canon += category_letter(*category_from_letter(ch));
    table.by_code_[canon].push_back(occupation);
  }
  return table;
}

OccupationMatch OccupationTable::match(const HollandCode& code) const {
  // Orderings consistent with the tie sets: permute only within each set.
  std::vector<std::string> orderings{""};
  for (const auto& set : code.tie_sets) {
    std::vector<int> idx(set.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::string> grown;
    std::sort(idx.begin(), idx.end());
    do {
      for (const auto& prefix : orderings) {
        std::string s = prefix;
        for (int i : idx) s += category_letter(set[size_t(i)]);
        grown.push_back(std::move(s));
      }
    } while (std::next_permutation(idx.begin(), idx.end()));
    orderings = std::move(grown);
  }
  std::sort(orderings.begin(), orderings.end());

  OccupationMatch match;
  std::set<std::string> seen;
  for (const auto& ordering : orderings) {
    auto it = by_code_.find(ordering);
    if (it == by_code_.end()) {
      match.uncovered_codes.push_back(ordering);
      continue;
    }
    match.covered_codes.push_back(ordering);
    for (const auto& occ : it->second)
      if (seen.insert(occ).second) match.occupations.push_back(occ);
  }
  return match;
}

}  // namespace oip::scoring
