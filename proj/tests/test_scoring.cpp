#include <doctest.h>

#include <algorithm>
#include <random>

#include "oip/errors.hpp"
#include "oip/mock_client.hpp"
#include "oip/likert_parse.hpp"
#include "oip/rng.hpp"
#include "oip/scoring.hpp"

using namespace oip;
using namespace oip::scoring;

namespace {

const std::filesystem::path kDataDir = OIP_DATA_DIR;

const ItemBank& bank() {
  static ItemBank b = ItemBank::load(kDataDir / "oip_items.csv");
  return b;
}

AdministrationRecord make_record(int item, std::optional<int> value, int rep = 1) {
  AdministrationRecord rec;
  rec.key = {"m", "v", Language::English, Mode::Interest, item, rep};
  if (value) {
    rec.attempts.push_back({std::string(likert_label(*value, Language::English)), value});
    rec.final_value = value;
  } else {
    rec.attempts.push_back({"cannot answer", std::nullopt});
  }
  return rec;
}

std::vector<AdministrationRecord> constant_replication(int value, int rep = 1) {
  std::vector<AdministrationRecord> records;
  for (int item = 1; item <= 60; ++item) records.push_back(make_record(item, value, rep));
  return records;
}

}  // namespace

TEST_CASE("constant responses sum to 10x the value per category") {
  const auto s3 = score_replication(constant_replication(3), bank());
  for (int c = 0; c < kNumCategories; ++c) CHECK(s3.sums[size_t(c)] == 30);
  CHECK(s3.missing_count == 0);

  const auto s4 = score_replication(constant_replication(4), bank());
  for (int c = 0; c < kNumCategories; ++c) CHECK(s4.sums[size_t(c)] == 40);
}

TEST_CASE("category separation: Artistic fives against ones") {
  std::vector<AdministrationRecord> records;
  for (const auto& item : bank().items())
    records.push_back(
        make_record(item.id, item.category == RiasecCategory::Artistic ? 5 : 1));
  const auto scores = score_replication(records, bank());
  CHECK(scores.sums[size_t(int(RiasecCategory::Artistic))] == 50);
  for (auto c : all_categories())
    if (c != RiasecCategory::Artistic) CHECK(scores.sums[size_t(int(c))] == 10);
  CHECK(scores.top_categories() ==
        std::vector<RiasecCategory>{RiasecCategory::Artistic});
}

TEST_CASE("duplicate items are rejected; missing values are counted") {
  auto records = constant_replication(3);
  records.push_back(make_record(1, 4));
  CHECK_THROWS_AS(score_replication(records, bank()), DuplicateItem);

  auto with_missing = constant_replication(2);
  with_missing[4] = make_record(5, std::nullopt);  // item 5 is Artistic
  const auto scores = score_replication(with_missing, bank());
  CHECK(scores.missing_count == 1);
  CHECK(scores.sums[size_t(int(RiasecCategory::Artistic))] == 18);
}

TEST_CASE("sum of category sums equals the sum of item values") {
  StreamKey key(31);
  std::vector<AdministrationRecord> records;
  int total = 0;
  for (int item = 1; item <= 60; ++item) {
    const int v = 1 + int(key.uniform(uint64_t(item)) * 5) % 5;
    total += v;
    records.push_back(make_record(item, v));
  }
  const auto scores = score_replication(records, bank());
  int cat_total = 0;
  for (int c = 0; c < kNumCategories; ++c) cat_total += scores.sums[size_t(c)];
  CHECK(cat_total == total);
}

TEST_CASE("aggregate_item_scores averages non-missing replications") {
  RunArtifact artifact;
  for (int rep = 1; rep <= 4; ++rep)
    for (int item = 1; item <= 60; ++item) artifact.records.push_back(make_record(item, 4, rep));
  // item 1: values 4,4,4,4 -> 4.0 with n=4; item 2: 3,5 in two extra reps
  artifact.records.push_back(make_record(1, std::nullopt, 5));
  artifact.records[1].final_value = 3;               // item 2, rep 1
  artifact.records[61].final_value = 5;              // item 2, rep 2
  artifact.records[121].final_value = std::nullopt;  // item 2 rep 3 missing
  artifact.records[181].final_value = std::nullopt;  // item 2 rep 4 missing

  const auto means = aggregate_item_scores(artifact, bank());
  const auto find_item = [&](int id) {
    for (const auto& m : means)
      if (m.item_id == id) return m;
    throw std::runtime_error("not found");
  };
  const auto m1 = find_item(1);
  CHECK(m1.mean == doctest::Approx(4.0));
  CHECK(m1.n == 4);
  CHECK(m1.missing == 1);
  const auto m2 = find_item(2);
  CHECK(m2.mean == doctest::Approx(4.0));  // (3+5)/2
  CHECK(m2.n == 2);
  CHECK(m2.missing == 2);
}

TEST_CASE("aggregate_item_scores rejects an all-missing item") {
  RunArtifact artifact;
  for (int item = 1; item <= 60; ++item)
    artifact.records.push_back(make_record(item, item == 7 ? std::optional<int>() : 3, 1));
  CHECK_THROWS_AS(aggregate_item_scores(artifact, bank()), EmptyCell);
}

TEST_CASE("aggregates are invariant to replication order") {
  StreamKey key(55);
  RunArtifact artifact;
  uint64_t draw = 0;
  for (int rep = 1; rep <= 5; ++rep)
    for (int item = 1; item <= 60; ++item)
      artifact.records.push_back(make_record(item, 1 + int(key.uniform(draw++) * 5) % 5, rep));
  const auto base = aggregate_item_scores(artifact, bank());

  std::mt19937 shuffler(17);
  std::shuffle(artifact.records.begin(), artifact.records.end(), shuffler);
  const auto shuffled = aggregate_item_scores(artifact, bank());
  REQUIRE(base.size() == shuffled.size());
  for (size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].item_id == shuffled[i].item_id);
    CHECK(base[i].mean == doctest::Approx(shuffled[i].mean));
  }
}

TEST_CASE("noise-free mock scoring recovers round(mean) x 10 per category") {
  // Bridges the mock generator to the scoring rules: with zero noise and no
  // refusals, every response is round(mean[c]), so each category sum is
  // exactly 10x that.
  MockSpec spec;
  spec.interest.means = {3.2, 3.9, 4.6, 2.2, 1.4, 5.0};
  MockClient client(spec, bank());
  ProviderParams p;
  p.model_id = "m";
  p.version_tag = "v";

  std::vector<AdministrationRecord> records;
  for (const auto& item : bank().items()) {
    const std::string text = client.respond(p, item, Mode::Interest, Language::English, 1, 1);
    const auto v = parse_likert(text, Language::English);
    REQUIRE(v.has_value());
    AdministrationRecord rec;
    rec.key = {"m", "v", Language::English, Mode::Interest, item.id, 1};
    rec.attempts.push_back({text, v->numeric()});
    rec.final_value = v->numeric();
    records.push_back(std::move(rec));
  }
  const auto scores = score_replication(records, bank());
  const int expected[6] = {30, 40, 50, 20, 10, 50};
  for (int c = 0; c < kNumCategories; ++c) CHECK(scores.sums[size_t(c)] == expected[c]);
}

TEST_CASE("holland code ranks by mean with R-I-A-S-E-C tiebreak") {
  // Estimated means of one of the published profiles: S, A, I in that order.
  const std::array<double, 6> means{3.530, 3.555, 3.830, 3.920, 3.270, 3.420};
  const auto code = holland_code(means);
  CHECK(code.letters() == "SAI");
  REQUIRE(code.tie_sets.size() == 3);
  CHECK(code.tie_sets[0].size() == 1);
  CHECK_FALSE(code.tie_beyond_top3);
}

TEST_CASE("all-equal means fall back to the canonical order, fully tied") {
  const std::array<double, 6> means{3.5, 3.5, 3.5, 3.5, 3.5, 3.5};
  const auto code = holland_code(means);
  CHECK(code.letters() == "RIA");
  REQUIRE(code.tie_sets.size() == 1);
  CHECK(code.tie_sets[0].size() == 3);
  CHECK(code.tie_beyond_top3);
}

TEST_CASE("supplied equivalence groups the top letters into one tie set") {
  const std::array<double, 6> means{3.530, 3.555, 3.830, 3.920, 3.270, 3.420};
  const auto code = holland_code(
      means, {{RiasecCategory::Social, RiasecCategory::Artistic, RiasecCategory::Investigative}});
  CHECK(code.letters() == "SAI");
  REQUIRE(code.tie_sets.size() == 1);
  // Members print in R-I-A-S-E-C order.
  CHECK(code.tie_sets[0] == std::vector<RiasecCategory>{RiasecCategory::Investigative,
                                                        RiasecCategory::Artistic,
                                                        RiasecCategory::Social});
  CHECK_FALSE(code.tie_beyond_top3);
}

TEST_CASE("holland code is invariant under positive affine transforms") {
  StreamKey key(71);
  int checked = 0;
  for (uint64_t i = 0; i < 100; ++i) {
    std::array<double, 6> means;
    for (int c = 0; c < 6; ++c) means[size_t(c)] = 1.0 + 4.0 * key.uniform(i * 6 + uint64_t(c));
    const auto base = holland_code(means);
    for (auto [shift, scale] : {std::pair{0.7, 2.0}, {-0.3, 0.25}}) {
      std::array<double, 6> t;
      for (int c = 0; c < 6; ++c) t[size_t(c)] = shift + scale * means[size_t(c)];
      const auto transformed = holland_code(t);
      CHECK(transformed.letters() == base.letters());
      CHECK(transformed.tie_sets == base.tie_sets);
      ++checked;
    }
  }
  CHECK(checked == 200);
}

TEST_CASE("occupation matching honors tie sets and reports uncovered codes") {
  const auto table = OccupationTable::load(kDataDir / "occupations.csv");

  const auto sai = holland_code({3.5, 3.6, 3.8, 3.9, 3.2, 3.4});
  REQUIRE(sai.letters() == "SAI");
  const auto match = table.match(sai);
  CHECK(std::find(match.occupations.begin(), match.occupations.end(), "Art Therapists") !=
        match.occupations.end());
  CHECK(match.uncovered_codes.empty());

  // ASI is deliberately absent from the table.
  const auto asi = holland_code({3.5, 3.6, 3.95, 3.9, 3.2, 3.4});
  REQUIRE(asi.letters() == "ASI");
  const auto asi_match = table.match(asi);
  CHECK(asi_match.occupations.empty());
  CHECK(asi_match.uncovered_codes == std::vector<std::string>{"ASI"});

  // A full tie over {S, A, I} unions all six orderings; four are covered.
  const auto tied = holland_code(
      {3.5, 3.6, 3.8, 3.9, 3.2, 3.4},
      {{RiasecCategory::Social, RiasecCategory::Artistic, RiasecCategory::Investigative}});
  const auto tied_match = table.match(tied);
  CHECK(tied_match.covered_codes.size() == 4);
  CHECK(tied_match.uncovered_codes == std::vector<std::string>{"AIS", "ASI"});
  for (const char* occ : {"Art Therapists", "Genetic Counselors", "Psychiatrists",
                          "Political Scientists"})
    CHECK(std::find(tied_match.occupations.begin(), tied_match.occupations.end(), occ) !=
          tied_match.occupations.end());
}

TEST_CASE("per-replication top categories surface exact ties") {
  CategoryScores scores;
  scores.sums = {40, 35, 40, 28, 30, 22};
  const auto top = scores.top_categories();
  CHECK(top == std::vector<RiasecCategory>{RiasecCategory::Realistic, RiasecCategory::Artistic});
}

TEST_CASE("replication_scores groups an artifact by key") {
  RunArtifact artifact;
  for (int rep = 1; rep <= 3; ++rep)
    for (int item = 1; item <= 60; ++item) artifact.records.push_back(make_record(item, 3, rep));
  const auto scores = replication_scores(artifact, bank());
  REQUIRE(scores.size() == 3);
  for (const auto& s : scores)
    for (int c = 0; c < kNumCategories; ++c) CHECK(s.sums[size_t(c)] == 30);
}
