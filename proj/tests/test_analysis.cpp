#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oip/analysis.hpp"
#include "oip/errors.hpp"
#include "oip/mock_client.hpp"
#include "oip/report_render.hpp"

using namespace oip;
using namespace oip::analysis;

namespace {

const std::filesystem::path kDataDir = OIP_DATA_DIR;

const ItemBank& bank() {
  static ItemBank b = ItemBank::load(kDataDir / "oip_items.csv");
  return b;
}

const scoring::OccupationTable& occupations() {
  static auto t = scoring::OccupationTable::load(kDataDir / "occupations.csv");
  return t;
}

struct MockProvider {
  std::string model_id;
  std::string version_tag = "v1";
  MockSpec spec;
};

/// In-memory artifact straight from the mock respondents.
RunArtifact mock_artifact(const std::vector<MockProvider>& providers,
                          const std::vector<Language>& languages, const std::vector<Mode>& modes,
                          int reps) {
  RunArtifact artifact;
  const PromptTemplates templates = PromptTemplates::builtin();
  for (const auto& mp : providers) {
    MockClient client(mp.spec, bank());
    ProviderParams params;
    params.model_id = mp.model_id;
    params.version_tag = mp.version_tag;
    params.max_attempts = 10;
    for (Language lang : languages)
      for (Mode mode : modes)
        for (int rep = 1; rep <= reps; ++rep)
          for (const auto& item : bank().items())
            artifact.records.push_back(
                administer_item(client, templates, item, mode, lang, params, rep));
  }
  return artifact;
}

MockProvider sa_provider(const std::string& id, uint64_t seed,
                         std::array<double, 6> interest = {3.2, 3.9, 4.3, 4.45, 2.9, 3.1}) {
  MockProvider p;
  p.model_id = id;
  p.spec.seed = seed;
  p.spec.interest.means = interest;
  p.spec.interest.noise = 0.5;
  p.spec.interest.refusal_probability = 0.02;
  p.spec.competence = p.spec.interest;
  p.spec.item_sd = 0.2;
  return p;
}

double table_value(const Table& t, const std::string& key_col, const std::string& key,
                   const std::string& value_col) {
  size_t ki = t.columns.size(), vi = t.columns.size();
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == key_col) ki = i;
    if (t.columns[i] == value_col) vi = i;
  }
  REQUIRE(ki < t.columns.size());
  REQUIRE(vi < t.columns.size());
  for (const auto& row : t.rows)
    if (row[ki] == key) return std::stod(row[vi]);
  FAIL("no row with ", key_col, " = ", key, " in table ", t.name);
  return 0.0;
}

}  // namespace

TEST_CASE("riasec pipeline recovers seeded S/A-elevated profiles") {
  const auto artifact = mock_artifact(
      {sa_provider("alpha", 1), sa_provider("beta", 2, {3.0, 4.0, 4.4, 4.3, 3.1, 3.3}),
       sa_provider("gamma", 3, {3.3, 3.8, 4.2, 4.5, 3.0, 3.2}),
       sa_provider("delta", 4, {2.9, 4.1, 4.5, 4.2, 2.8, 3.0})},
      {Language::English}, {Mode::Interest}, 6);

  const auto report =
      analyze_riasec_by_llm(artifact, bank(), occupations(), {}, Language::English);

  const Table* f = report.table("f_tests");
  REQUIRE(f != nullptr);
  CHECK(table_value(*f, "effect", "category", "df_num") == 5.0);
  CHECK(table_value(*f, "effect", "category", "df_den") == 216.0);
  CHECK(table_value(*f, "effect", "category", "p") < 0.001);
  CHECK(table_value(*f, "effect", "llm", "df_num") == 3.0);
  CHECK(table_value(*f, "effect", "llm:category", "df_num") == 15.0);

  const Table* emm = report.table("emm_llm_by_category");
  REQUIRE(emm != nullptr);
  CHECK(emm->rows.size() == 24);

  const Table* codes = report.table("holland_codes");
  REQUIRE(codes != nullptr);
  REQUIRE(codes->rows.size() == 4);
  for (const auto& row : codes->rows) {
    for (char letter : row[1])
      CHECK((letter == 'S' || letter == 'A' || letter == 'I'));
    CHECK_FALSE(row[4].empty());  // occupations matched for SAI-family codes
  }

  const Table* grouped = report.table("grouped_top3_vs_bottom3");
  REQUIRE(grouped != nullptr);
  CHECK(grouped->rows.size() == 4);
  for (const auto& row : grouped->rows) CHECK(std::stod(row[7]) < 0.001);  // p

  CHECK(report.figures.size() == 5);  // radar + 4 heatmaps
}

TEST_CASE("single provider drops the llm factor") {
  const auto artifact =
      mock_artifact({sa_provider("solo", 9)}, {Language::English}, {Mode::Interest}, 4);
  const auto report =
      analyze_riasec_by_llm(artifact, bank(), occupations(), {}, Language::English);
  const Table* f = report.table("f_tests");
  REQUIRE(f != nullptr);
  for (const auto& row : f->rows) CHECK(row[0] == "category");
  const Table* summary = report.table("model_summary");
  CHECK(table_value(*summary, "n_obs", "60", "rank_x") == 6.0);
}

TEST_CASE("incomplete artifacts are named, not silently analyzed") {
  auto artifact = mock_artifact({sa_provider("alpha", 1)}, {Language::English},
                                {Mode::Interest}, 3);
  artifact.records.pop_back();
  CHECK_THROWS_AS(
      analyze_riasec_by_llm(artifact, bank(), occupations(), {}, Language::English),
      IncompleteArtifact);
  try {
    analyze_riasec_by_llm(artifact, bank(), occupations(), {}, Language::English);
  } catch (const IncompleteArtifact& e) {
    CHECK(std::string(e.what()).find("alpha") != std::string::npos);
  }
}

TEST_CASE("language pipeline: identical profiles produce a null language effect") {
  auto p1 = sa_provider("alpha", 21);
  auto p2 = sa_provider("beta", 22);
  const auto artifact = mock_artifact({p1, p2}, {Language::English, Language::Chinese},
                                      {Mode::Interest}, 5);
  const auto report = analyze_language_effect(artifact, bank(), {});
  const Table* f = report.table("f_tests");
  REQUIRE(f != nullptr);
  CHECK(table_value(*f, "effect", "language", "p") > 0.05);

  const Table* by_llm = report.table("language_contrast_by_llm");
  REQUIRE(by_llm != nullptr);
  for (const auto& row : by_llm->rows) CHECK(std::abs(std::stod(row[4])) < 3.5);  // t
}

TEST_CASE("language pipeline: a shifted Chinese profile is detected for that provider only") {
  auto shifted = sa_provider("shifty", 31);
  shifted.spec.zh_shift = {0.1, 0.6, 0.2, 0.7, 0.1, 0.7};
  auto plain = sa_provider("plain", 32);
  const auto artifact = mock_artifact({shifted, plain},
                                      {Language::English, Language::Chinese}, {Mode::Interest}, 6);
  const auto report = analyze_language_effect(artifact, bank(), {});

  const Table* by_llm = report.table("language_contrast_by_llm");
  REQUIRE(by_llm != nullptr);
  REQUIRE(by_llm->rows.size() == 2);
  double p_shifted = 0, p_plain = 0;
  for (const auto& row : by_llm->rows)
    (row[0] == "shifty" ? p_shifted : p_plain) = std::stod(row[6]);  // p_unadjusted
  CHECK(p_shifted < 0.001);
  CHECK(p_plain > 0.01);

  // 2 llms x 2 languages x 60 items: 240 rows minus 24 cells.
  const Table* f = report.table("f_tests");
  CHECK(table_value(*f, "effect", "llm:category:language", "df_num") == 5.0);
  CHECK(table_value(*f, "effect", "llm:category:language", "df_den") == 216.0);
  CHECK(table_value(*f, "effect", "language", "df_den") == 216.0);
  // Interaction detectable because the shift varies by category.
  CHECK(table_value(*f, "effect", "llm:category:language", "p") < 0.05);
}

TEST_CASE("version pipeline dfs for three- and four-version lines") {
  auto make_version = [](const std::string& tag, uint64_t seed) {
    MockProvider p = sa_provider("family", seed);
    p.version_tag = tag;
    return p;
  };
  {
    const auto artifact = mock_artifact(
        {make_version("0301", 41), make_version("0613", 42), make_version("1222", 43)},
        {Language::English, Language::Chinese}, {Mode::Interest}, 4);
    const auto report = analyze_version_effect(artifact, bank(), occupations(), "family");
    const Table* f = report.table("f_tests");
    CHECK(table_value(*f, "effect", "version", "df_num") == 2.0);
    CHECK(table_value(*f, "effect", "version", "df_den") == 324.0);
    // identical latent profiles: version effect stays quiet
    CHECK(table_value(*f, "effect", "version", "p") > 0.05);
    const Table* codes = report.table("holland_codes");
    CHECK(codes->rows.size() == 3);
  }
  {
    const auto artifact = mock_artifact(
        {make_version("0301", 51), make_version("0613", 52), make_version("1106", 53),
         make_version("0125", 54)},
        {Language::English, Language::Chinese}, {Mode::Interest}, 4);
    const auto report = analyze_version_effect(artifact, bank(), occupations(), "family");
    const Table* f = report.table("f_tests");
    CHECK(table_value(*f, "effect", "version", "df_num") == 3.0);
    CHECK(table_value(*f, "effect", "version", "df_den") == 432.0);
  }
  CHECK_THROWS_AS(
      analyze_version_effect(mock_artifact({sa_provider("family", 61)}, {Language::English},
                                           {Mode::Interest}, 2),
                             bank(), occupations(), "family"),
      IncompleteArtifact);
}

TEST_CASE("competence pipeline: aligned and inverted profiles at the item level") {
  auto aligned = sa_provider("aligned", 71);
  aligned.spec.item_sd = 0.0;  // item means driven by category profile alone
  aligned.spec.interest.noise = 0.3;
  aligned.spec.competence = aligned.spec.interest;

  auto inverted = sa_provider("inverted", 72);
  inverted.spec.item_sd = 0.0;
  inverted.spec.interest.noise = 0.3;
  inverted.spec.interest.means = {3.0, 4.2, 4.5, 3.9, 2.6, 3.1};
  inverted.spec.competence.noise = 0.3;
  inverted.spec.competence.means = {3.0, 1.8, 1.5, 2.1, 3.4, 2.9};

  const auto artifact = mock_artifact({aligned, inverted}, {Language::English},
                                      {Mode::Interest, Mode::Competence}, 10);
  const auto report = analyze_interest_vs_competence(artifact, bank(), {});

  const Table* cors = report.table("correlations");
  REQUIRE(cors != nullptr);
  double r_aligned = 0, r_inverted = 0;
  for (const auto& row : cors->rows) {
    if (row[0] == "interest_vs_self_competence" && row[1] == "aligned")
      r_aligned = std::stod(row[2]);
    if (row[0] == "interest_vs_self_competence" && row[1] == "inverted")
      r_inverted = std::stod(row[2]);
  }
  CHECK(r_aligned > 0.85);
  CHECK(r_inverted < -0.85);

  const Table* f = report.table("f_tests");
  CHECK(table_value(*f, "effect", "mode", "df_num") == 1.0);
  //2 llms x 6 categories x 2 modes on 60 items: 240 rows - 24 cells.
  CHECK(table_value(*f, "effect", "mode", "df_den") == 216.0);
}

TEST_CASE("competence pipeline needs both modes") {
  const auto artifact =
      mock_artifact({sa_provider("alpha", 81)}, {Language::English}, {Mode::Interest}, 2);
  CHECK_THROWS_AS(analyze_interest_vs_competence(artifact, bank(), {}), ModeMissing);
}

TEST_CASE("expert correlations run on the shipped demo file") {
  auto p = sa_provider("alpha", 91);
  p.spec.item_sd = 0.0;
  const auto artifact =
      mock_artifact({p}, {Language::English}, {Mode::Interest, Mode::Competence}, 5);
  const auto report = analyze_interest_vs_competence(artifact, bank(), {},
                                                     kDataDir / "expert_ratings.csv");
  const Table* cors = report.table("correlations");
  REQUIRE(cors != nullptr);
  bool has_self_expert = false, has_interest_expert = false;
  for (const auto& row : cors->rows) {
    if (row[0] == "self_vs_expert_competence") {
      has_self_expert = true;
      CHECK(std::stod(row[5]) == 58.0);  // df = 60 - 2
    }
    if (row[0] == "interest_vs_expert_competence") has_interest_expert = true;
  }
  CHECK(has_self_expert);
  CHECK(has_interest_expert);
}

TEST_CASE("expert rating files are validated") {
  const auto dir = std::filesystem::temp_directory_path() / "oip_expert";
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    return dir / name;
  };
  CHECK_THROWS_AS(load_expert_ratings(write("bad_header.csv", "a,b,c\n")), SchemaViolation);
  CHECK_THROWS_AS(
      load_expert_ratings(write("bad_score.csv", "rater,item_id,score\ne1,1,9\n")),
      SchemaViolation);
  CHECK_THROWS_AS(
      load_expert_ratings(
          write("dup.csv", "rater,item_id,score\ne1,1,3\ne1,1,4\n")),
      SchemaViolation);
  const auto ok = load_expert_ratings(write("ok.csv", "rater,item_id,score\ne1,1,3\ne2,1,4\n"));
  const auto means = expert_item_means(ok);
  CHECK(means.at(1) == doctest::Approx(3.5));
}

TEST_CASE("rendering is deterministic and traceable") {
  const auto artifact = mock_artifact({sa_provider("alpha", 95), sa_provider("beta", 96)},
                                      {Language::English}, {Mode::Interest}, 3);
  const auto report =
      analyze_riasec_by_llm(artifact, bank(), occupations(), {}, Language::English);

  const auto dir = std::filesystem::temp_directory_path() / "oip_render";
  std::filesystem::remove_all(dir);
  const std::set<RenderFormat> formats{RenderFormat::Csv, RenderFormat::Markdown,
                                       RenderFormat::Svg};
  const auto files_a = render_report(report, formats, dir / "a");
  const auto files_b = render_report(report, formats, dir / "b");
  REQUIRE(files_a.size() == files_b.size());
  for (size_t i = 0; i < files_a.size(); ++i) {
    std::ifstream ia(files_a[i], std::ios::binary), ib(files_b[i], std::ios::binary);
    const std::string ca((std::istreambuf_iterator<char>(ia)), std::istreambuf_iterator<char>());
    const std::string cb((std::istreambuf_iterator<char>(ib)), std::istreambuf_iterator<char>());
    CHECK(ca == cb);
    CHECK_FALSE(ca.empty());
  }

  // The EMM CSV keeps the documented schema.
  std::ifstream emm(dir / "a" / "riasec" / "emm_category.csv");
  std::string header;
  std::getline(emm, header);
  CHECK(header == "level,estimate,se");

  // The radar figure carries six axes and an embedded data table.
  std::ifstream radar_in(dir / "a" / "riasec" / "interest_radar.svg");
  const std::string radar((std::istreambuf_iterator<char>(radar_in)),
                          std::istreambuf_iterator<char>());
  for (const char* axis : {">R<", ">I<", ">A<", ">S<", ">E<", ">C<"})
    CHECK(radar.find(axis) != std::string::npos);
  CHECK(radar.find("<!--") != std::string::npos);
  const size_t lines = size_t(std::count(radar.begin(), radar.end(), '\n'));
  CHECK(lines > 10);
}

TEST_CASE("null fixtures stay quiet in at least 95 of 100 seeded runs") {
  // Calibration property: flat identical profiles, alpha = .01 omnibus tests
  // (llm, category, and their interaction), straight from the fitted model.
  int quiet = 0;
  for (int i = 0; i < 100; ++i) {
    MockProvider a = sa_provider("a", 1000 + uint64_t(i) * 2, {3.4, 3.4, 3.4, 3.4, 3.4, 3.4});
    MockProvider b = sa_provider("b", 1001 + uint64_t(i) * 2, {3.4, 3.4, 3.4, 3.4, 3.4, 3.4});
    a.spec.item_sd = 0.0;
    b.spec.item_sd = 0.0;
    a.spec.interest.refusal_probability = 0.0;
    b.spec.interest.refusal_probability = 0.0;
    const auto artifact = mock_artifact({a, b}, {Language::English}, {Mode::Interest}, 3);

    std::vector<stats::ObsRow> rows;
    for (const auto& rec : artifact.records) {
      if (!rec.final_value) continue;
      stats::ObsRow r;
      r.y = *rec.final_value;
      r.group = std::to_string(rec.key.item_id);
      r.levels = {rec.key.model_id,
                  std::string(category_name(bank().by_id(rec.key.item_id).category))};
      rows.push_back(std::move(r));
    }
    const auto frame =
        stats::build_frame(rows, {"llm", "category"}, stats::AnalysisMode::ItemAggregated);
    const auto fit = stats::fit_lmm(frame);
    bool all_quiet = true;
    for (const auto& f :
         {stats::wald_f(fit, stats::main_effect_hypothesis(fit, "llm")),
          stats::wald_f(fit, stats::main_effect_hypothesis(fit, "category")),
          stats::wald_f(fit, stats::interaction_hypothesis(fit, {"llm", "category"}))})
      all_quiet = all_quiet && f.p_value > 0.01;
    quiet += all_quiet ? 1 : 0;
  }
  CHECK(quiet >= 95);
}
