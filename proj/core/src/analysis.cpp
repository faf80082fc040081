#include "oip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "oip/distributions.hpp"
#include "oip/errors.hpp"

namespace oip::analysis {

namespace {

using stats::Adjustment;
using stats::AnalysisMode;
using stats::Conditioning;
using stats::ContrastResult;
using stats::FTestResult;
using stats::LmmFit;
using stats::ObsRow;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::vector<std::string> category_level_names() {
  std::vector<std::string> names;
  for (auto c : all_categories()) names.emplace_back(category_name(c));
  return names;
}

struct ProviderEntry {
  std::string label;
  std::string model_id;
  std::string version_tag;
};

/// Resolves "model" / "model:version" selectors against the artifact.
std::vector<ProviderEntry> select_providers(const RunArtifact& artifact,
                                            const std::vector<std::string>& selectors) {
  std::vector<std::pair<std::string, std::string>> present;  // insertion-ordered
  for (const auto& rec : artifact.records) {
    std::pair<std::string, std::string> pv{rec.key.model_id, rec.key.version_tag};
    if (std::find(present.begin(), present.end(), pv) == present.end()) present.push_back(pv);
  }

  std::vector<ProviderEntry> out;
  if (selectors.empty()) {
    std::map<std::string, int> model_counts;
    for (const auto& [m, v] : present) model_counts[m]++;
    for (const auto& [m, v] : present)
      out.push_back({model_counts[m] > 1 ? m + ":" + v : m, m, v});
    if (out.empty()) throw IncompleteArtifact("artifact contains no records");
    return out;
  }

  for (const auto& sel : selectors) {
    const auto colon = sel.find(':');
    const std::string model = colon == std::string::npos ? sel : sel.substr(0, colon);
    const std::string version = colon == std::string::npos ? "" : sel.substr(colon + 1);
    std::vector<std::pair<std::string, std::string>> hits;
    for (const auto& pv : present)
      if (pv.first == model && (version.empty() || pv.second == version)) hits.push_back(pv);
    if (hits.empty()) throw IncompleteArtifact("no records for provider selector '" + sel + "'");
    if (hits.size() > 1)
      throw IncompleteArtifact("selector '" + sel + "' matches " + std::to_string(hits.size()) +
                               " versions; qualify as model:version");
    out.push_back({sel, hits[0].first, hits[0].second});
  }
  return out;
}

int manifest_replications(const RunArtifact& artifact) {
  if (artifact.manifest.contains("config") &&
      artifact.manifest["config"].contains("replications"))
    return artifact.manifest["config"]["replications"].get<int>();
  int max_rep = 0;
  for (const auto& rec : artifact.records) max_rep = std::max(max_rep, rec.key.replication);
  return max_rep;
}

void check_complete(const RunArtifact& artifact, const ItemBank& bank,
                    const std::vector<ProviderEntry>& entries,
                    const std::vector<Language>& languages, const std::vector<Mode>& modes) {
  const int reps = manifest_replications(artifact);
  const auto keys = artifact.cell_keys();
  std::vector<std::string> missing;
  for (const auto& entry : entries)
    for (Language lang : languages)
      for (Mode mode : modes)
        for (int rep = 1; rep <= reps; ++rep)
          for (const auto& item : bank.items()) {
            AdministrationKey key{entry.model_id, entry.version_tag, lang, mode, item.id, rep};
            if (!keys.count(key.cell_string())) {
              missing.push_back(key.cell_string());
              if (missing.size() >= 5) {
                std::ostringstream os;
                os << "artifact incomplete; first missing cells:";
                for (const auto& m : missing) os << " " << m;
                os << " ...";
                throw IncompleteArtifact(os.str());
              }
            }
          }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "artifact incomplete; missing cells:";
    for (const auto& m : missing) os << " " << m;
    throw IncompleteArtifact(os.str());
  }
}

std::vector<Language> languages_present(const RunArtifact& artifact) {
  std::set<int> seen;
  for (const auto& rec : artifact.records) seen.insert(int(rec.key.language));
  std::vector<Language> out;
  if (seen.count(int(Language::English))) out.push_back(Language::English);
  if (seen.count(int(Language::Chinese))) out.push_back(Language::Chinese);
  return out;
}

/// Observation rows for the mixed model. Factor values are filled per the
/// requested factor names; missing final values are skipped (they are
/// excluded from means, never imputed).
std::vector<ObsRow> build_rows(const RunArtifact& artifact, const ItemBank& bank,
                               const std::vector<ProviderEntry>& entries,
                               const std::vector<Language>& languages,
                               const std::vector<Mode>& modes,
                               const std::vector<std::string>& factor_names) {
  std::map<std::pair<std::string, std::string>, std::string> label_of;
  for (const auto& e : entries) label_of[{e.model_id, e.version_tag}] = e.label;
  std::set<int> lang_set, mode_set;
  for (auto l : languages) lang_set.insert(int(l));
  for (auto m : modes) mode_set.insert(int(m));

  std::vector<ObsRow> rows;
  for (const auto& rec : artifact.records) {
    auto it = label_of.find({rec.key.model_id, rec.key.version_tag});
    if (it == label_of.end()) continue;
    if (!lang_set.count(int(rec.key.language)) || !mode_set.count(int(rec.key.mode))) continue;
    if (!rec.final_value) continue;
    ObsRow row;
    row.y = *rec.final_value;
    row.group = std::to_string(rec.key.item_id);
    for (const auto& f : factor_names) {
      if (f == "llm")
        row.levels.push_back(it->second);
      else if (f == "version")
        row.levels.push_back(rec.key.version_tag);
      else if (f == "category")
        row.levels.emplace_back(category_name(bank.by_id(rec.key.item_id).category));
      else if (f == "language")
        row.levels.emplace_back(language_code(rec.key.language));
      else if (f == "mode")
        row.levels.emplace_back(mode_name(rec.key.mode));
      else
        throw DegenerateInput("unknown factor: " + f);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, std::vector<std::string>> level_orders(
    const std::vector<ProviderEntry>& entries, const std::vector<Language>& languages,
    const std::vector<Mode>& modes) {
  std::map<std::string, std::vector<std::string>> order;
  order["category"] = category_level_names();
  std::vector<std::string> llms, versions;
  for (const auto& e : entries) {
    llms.push_back(e.label);
    if (std::find(versions.begin(), versions.end(), e.version_tag) == versions.end())
      versions.push_back(e.version_tag);
  }
  order["llm"] = llms;
  order["version"] = versions;
  std::vector<std::string> langs;
  for (auto l : languages) langs.emplace_back(language_code(l));
  order["language"] = langs;
  std::vector<std::string> mode_names;
  for (auto m : modes) mode_names.emplace_back(mode_name(m));
  order["mode"] = mode_names;
  return order;
}

Table model_summary_table(const LmmFit& fit) {
  Table t;
  t.name = "model_summary";
  t.columns = {"n_obs", "rank_x",  "n_groups",       "residual_df", "sigma2",
               "tau2",  "theta",   "reml_criterion"};
  t.rows.push_back({fmt(fit.n_obs), fmt(fit.rank_x), fmt(fit.n_groups), fmt(fit.residual_df()),
                    fmt(fit.sigma2), fmt(fit.tau2), fmt(fit.theta), fmt(fit.reml_criterion)});
  return t;
}

Table f_table() {
  Table t;
  t.name = "f_tests";
  t.columns = {"effect", "F", "df_num", "df_den", "p"};
  return t;
}

void push_f(Table& t, const FTestResult& f) {
  t.rows.push_back({f.description, fmt(f.statistic), fmt(f.df_num), fmt(f.df_den), fmt(f.p_value)});
}

Table contrast_table(const std::string& name, const std::vector<std::string>& extra_cols) {
  Table t;
  t.name = name;
  t.columns = extra_cols;
  for (const auto& c :
       {"contrast", "estimate", "se", "t", "df", "p_unadjusted", "p_adjusted", "adjustment",
        "family_size"})
    t.columns.emplace_back(c);
  return t;
}

const char* adjustment_name(Adjustment a) {
  switch (a) {
    case Adjustment::Tukey:
      return "tukey";
    case Adjustment::Bonferroni:
      return "bonferroni";
    default:
      return "none";
  }
}

void push_contrast(Table& t, const ContrastResult& c, std::vector<std::string> extra = {}) {
  extra.push_back(c.description);
  extra.push_back(fmt(c.estimate));
  extra.push_back(fmt(c.se));
  extra.push_back(fmt(c.t));
  extra.push_back(fmt(c.df));
  extra.push_back(fmt(c.p_unadjusted));
  extra.push_back(fmt(c.p_adjusted));
  extra.emplace_back(adjustment_name(c.adjustment));
  extra.push_back(std::to_string(c.family_size));
  t.rows.push_back(std::move(extra));
}

/// Category EMMs inside one conditioning slice, in R-I-A-S-E-C order.
std::array<double, kNumCategories> category_emms(const LmmFit& fit, const Conditioning& within) {
  std::array<double, kNumCategories> means{};
  const auto names = category_level_names();
  for (int c = 0; c < kNumCategories; ++c) {
    Conditioning cond = within;
    cond["category"] = names[size_t(c)];
    means[size_t(c)] = stats::emm_weights(fit, cond).dot(fit.beta);
  }
  return means;
}

/// Equivalence classes among categories from nonsignificant Tukey pairs.
std::vector<std::vector<RiasecCategory>> tie_grouping(const LmmFit& fit,
                                                      const Conditioning& within, double alpha) {
  std::array<int, kNumCategories> parent;
  for (int i = 0; i < kNumCategories; ++i) parent[size_t(i)] = i;
  auto find = [&](int a) {
    while (parent[size_t(a)] != a) a = parent[size_t(a)] = parent[size_t(parent[size_t(a)])];
    return a;
  };
  const auto names = category_level_names();
  const double df = fit.residual_df();
  for (int a = 0; a < kNumCategories; ++a) {
    for (int b = a + 1; b < kNumCategories; ++b) {
      Conditioning ca = within, cb = within;
      ca["category"] = names[size_t(a)];
      cb["category"] = names[size_t(b)];
      const Eigen::RowVectorXd row = stats::emm_weights(fit, ca) - stats::emm_weights(fit, cb);
      const auto c = stats::contrast_from_row(fit, row, df, "");
      const double p_tukey =
          1.0 - stats::studentized_range_cdf(std::abs(c.t) * std::sqrt(2.0), kNumCategories, df);
      if (p_tukey >= alpha) parent[size_t(find(a))] = find(b);
    }
  }
  std::map<int, std::vector<RiasecCategory>> classes;
  for (int i = 0; i < kNumCategories; ++i)
    classes[find(i)].push_back(static_cast<RiasecCategory>(i));
  std::vector<std::vector<RiasecCategory>> out;
  for (auto& [root, members] : classes)
    if (members.size() > 1) out.push_back(std::move(members));
  return out;
}

std::string tie_sets_string(const scoring::HollandCode& code) {
  std::string s;
  for (const auto& set : code.tie_sets) {
    s += "(";
    for (auto c : set) s += category_letter(c);
    s += ")";
  }
  return s;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

void append_holland_row(Table& t, const std::string& label, const LmmFit& fit,
                        const Conditioning& within, double alpha,
                        const scoring::OccupationTable& occupations) {
  const auto means = category_emms(fit, within);
  const auto grouping = tie_grouping(fit, within, alpha);
  const auto code = scoring::holland_code(means, grouping);
  const auto match = occupations.match(code);
  t.rows.push_back({label, code.letters(), tie_sets_string(code),
                    code.tie_beyond_top3 ? "yes" : "no", join(match.occupations, "; "),
                    join(match.uncovered_codes, " ")});
}

Table holland_table() {
  Table t;
  t.name = "holland_codes";
  t.columns = {"level", "code", "tie_sets", "tie_beyond_top3", "occupations", "uncovered_codes"};
  return t;
}

Figure radar_figure(const std::string& name, const std::string& title,
                    const std::vector<std::pair<std::string, std::array<double, 6>>>& series) {
  Figure fig;
  fig.kind = Figure::Kind::Radar;
  fig.name = name;
  fig.title = title;
  for (auto c : all_categories()) fig.axes.emplace_back(1, category_letter(c));
  for (const auto& [label, values] : series) {
    Figure::Series s;
    s.label = label;
    s.values.assign(values.begin(), values.end());
    fig.series.push_back(std::move(s));
  }
  return fig;
}

}  // namespace

const Table* AnalysisReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

std::vector<ExpertRating> load_expert_ratings(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"rater", "item_id", "score"})
    throw SchemaViolation("expert ratings header must be rater,item_id,score: " + path.string());
  std::vector<ExpertRating> out;
  std::set<std::pair<std::string, int>> seen;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 3)
      throw SchemaViolation("expert ratings row " + std::to_string(i + 1) + " needs 3 fields");
    ExpertRating r;
    r.rater = rows[i][0];
    try {
      r.item_id = std::stoi(rows[i][1]);
      r.score = std::stoi(rows[i][2]);
    } catch (const std::exception&) {
      throw SchemaViolation("expert ratings row " + std::to_string(i + 1) + ": bad number");
    }
    if (r.score < kLikertMin || r.score > kLikertMax)
      throw SchemaViolation("expert ratings row " + std::to_string(i + 1) + ": score out of 1..5");
    if (!seen.insert({r.rater, r.item_id}).second)
      throw SchemaViolation("duplicate expert rating for rater " + r.rater + " item " +
                            std::to_string(r.item_id));
    out.push_back(std::move(r));
  }
  if (out.empty()) throw SchemaViolation("expert ratings file has no rows");
  return out;
}

std::map<int, double> expert_item_means(const std::vector<ExpertRating>& ratings) {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& r : ratings) {
    acc[r.item_id].first += r.score;
    acc[r.item_id].second += 1;
  }
  std::map<int, double> out;
  for (const auto& [item, sums] : acc) out[item] = sums.first / sums.second;
  return out;
}

AnalysisReport analyze_riasec_by_llm(const RunArtifact& artifact, const ItemBank& bank,
                                     const scoring::OccupationTable& occupations,
                                     const std::vector<std::string>& providers, Language language,
                                     const AnalysisOptions& options) {
  const auto entries = select_providers(artifact, providers);
  const std::vector<Language> langs{language};
  const std::vector<Mode> modes{Mode::Interest};
  check_complete(artifact, bank, entries, langs, modes);

  const bool multi_llm = entries.size() > 1;
  std::vector<std::string> factors =
      multi_llm ? std::vector<std::string>{"llm", "category"} : std::vector<std::string>{"category"};
  auto rows = build_rows(artifact, bank, entries, langs, modes, factors);
  auto frame =
      stats::build_frame(rows, factors, options.frame_mode, level_orders(entries, langs, modes));
  const LmmFit fit = stats::fit_lmm(frame);

  AnalysisReport report;
  report.name = "riasec";
  for (const auto& e : entries) report.input_keys.push_back(e.label);
  report.input_keys.emplace_back(language_code(language));
  report.tables.push_back(model_summary_table(fit));

  Table f = f_table();
  if (multi_llm) push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "llm"),
                                         options.df_method, "llm"));
  push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "category"), options.df_method,
                          "category"));
  if (multi_llm)
    push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"llm", "category"}),
                            options.df_method, "llm:category"));
  report.tables.push_back(std::move(f));

  // Table-1-style estimated-mean grid.
  Table emm_grid;
  emm_grid.name = "emm_llm_by_category";
  emm_grid.columns = {"llm", "category", "estimate", "se"};
  std::vector<std::pair<std::string, std::array<double, 6>>> radar_series;
  for (const auto& e : entries) {
    Conditioning within;
    if (multi_llm) within["llm"] = e.label;
    std::array<double, 6> values{};
    const auto names = category_level_names();
    for (int c = 0; c < kNumCategories; ++c) {
      Conditioning cond = within;
      cond["category"] = names[size_t(c)];
      const auto w = stats::emm_weights(fit, cond);
      const double est = w.dot(fit.beta);
      const double se = std::sqrt(std::max(0.0, (w * fit.cov_beta * w.transpose())(0, 0)));
      emm_grid.rows.push_back({e.label, names[size_t(c)], fmt(est), fmt(se)});
      values[size_t(c)] = est;
    }
    radar_series.emplace_back(e.label, values);
  }
  report.tables.push_back(std::move(emm_grid));

  Table emm_cat;
  emm_cat.name = "emm_category";
  emm_cat.columns = {"level", "estimate", "se"};
  for (const auto& emm : stats::emmeans(fit, {"category"}))
    emm_cat.rows.push_back({emm.levels[0], fmt(emm.estimate), fmt(emm.se)});
  report.tables.push_back(std::move(emm_cat));

  Table cat_pairs = contrast_table("tukey_category_pairs_marginal", {});
  for (const auto& c : stats::pairwise_contrasts(fit, "category", Adjustment::Tukey, {},
                                                 options.df_method))
    push_contrast(cat_pairs, c);
  report.tables.push_back(std::move(cat_pairs));

  if (multi_llm) {
    Table llm_pairs = contrast_table("tukey_llm_pairs", {});
    for (const auto& c :
         stats::pairwise_contrasts(fit, "llm", Adjustment::Tukey, {}, options.df_method))
      push_contrast(llm_pairs, c);
    report.tables.push_back(std::move(llm_pairs));

    Table llm_pairs_by_cat = contrast_table("tukey_llm_pairs_by_category", {"category"});
    for (const auto& cat : category_level_names())
      for (const auto& c : stats::pairwise_contrasts(fit, "llm", Adjustment::Tukey,
                                                     {{"category", cat}}, options.df_method))
        push_contrast(llm_pairs_by_cat, c, {cat});
    report.tables.push_back(std::move(llm_pairs_by_cat));
  }

  Table by_llm_pairs = contrast_table("tukey_category_pairs_by_llm", {"llm"});
  Table grouped;
  grouped.name = "grouped_top3_vs_bottom3";
  grouped.columns = {"llm", "top3", "bottom3", "estimate", "se", "t", "df", "p"};
  Table holland = holland_table();

  const auto names = category_level_names();
  for (const auto& e : entries) {
    Conditioning within;
    if (multi_llm) within["llm"] = e.label;

    for (const auto& c : stats::pairwise_contrasts(fit, "category", Adjustment::Tukey, within,
                                                   options.df_method))
      push_contrast(by_llm_pairs, c, {e.label});

    // Top-3 vs bottom-3 split by the slice's estimated means.
    const auto means = category_emms(fit, within);
    std::array<int, kNumCategories> order;
    for (int i = 0; i < kNumCategories; ++i) order[size_t(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (means[size_t(a)] != means[size_t(b)]) return means[size_t(a)] > means[size_t(b)];
      return a < b;
    });
    std::vector<std::string> top, bottom;
    for (int i = 0; i < kNumCategories; ++i)
      (i < 3 ? top : bottom).push_back(names[size_t(order[size_t(i)])]);
    const auto gc =
        stats::grouped_contrast(fit, "category", top, bottom, within, options.df_method);
    std::string top_letters, bottom_letters;
    for (int i = 0; i < 3; ++i) {
      top_letters += category_letter(*category_from_name(top[size_t(i)]));
      bottom_letters += category_letter(*category_from_name(bottom[size_t(i)]));
    }
    grouped.rows.push_back({e.label, top_letters, bottom_letters, fmt(gc.estimate), fmt(gc.se),
                            fmt(gc.t), fmt(gc.df), fmt(gc.p_unadjusted)});

    append_holland_row(holland, e.label, fit, within, options.alpha, occupations);

    // Pairwise-difference heatmap for the slice.
    Figure heat;
    heat.kind = Figure::Kind::Heatmap;
    heat.name = "category_diff_heatmap_" + e.label;
    heat.title = "Estimated category differences (row - column): " + e.label;
    for (auto c : all_categories()) heat.axes.emplace_back(1, category_letter(c));
    heat.matrix.assign(kNumCategories, std::vector<double>(kNumCategories, 0.0));
    for (int a = 0; a < kNumCategories; ++a)
      for (int b = 0; b < kNumCategories; ++b)
        heat.matrix[size_t(a)][size_t(b)] = means[size_t(a)] - means[size_t(b)];
    report.figures.push_back(std::move(heat));
  }
  report.tables.push_back(std::move(by_llm_pairs));
  report.tables.push_back(std::move(grouped));
  report.tables.push_back(std::move(holland));

  report.figures.insert(report.figures.begin(),
                        radar_figure("interest_radar", "Estimated interest by category",
                                     radar_series));
  return report;
}

AnalysisReport analyze_language_effect(const RunArtifact& artifact, const ItemBank& bank,
                                       const std::vector<std::string>& providers,
                                       const AnalysisOptions& options) {
  const auto entries = select_providers(artifact, providers);
  const auto langs = languages_present(artifact);
  if (langs.size() < 2)
    throw IncompleteArtifact("language analysis needs records in both languages");
  const std::vector<Mode> modes{Mode::Interest};
  check_complete(artifact, bank, entries, langs, modes);

  const bool multi_llm = entries.size() > 1;
  std::vector<std::string> factors{"category", "language"};
  if (multi_llm) factors.insert(factors.begin(), "llm");
  auto rows = build_rows(artifact, bank, entries, langs, modes, factors);
  auto frame =
      stats::build_frame(rows, factors, options.frame_mode, level_orders(entries, langs, modes));
  const LmmFit fit = stats::fit_lmm(frame);

  AnalysisReport report;
  report.name = "language";
  for (const auto& e : entries) report.input_keys.push_back(e.label);
  report.tables.push_back(model_summary_table(fit));

  Table f = f_table();
  push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "language"), options.df_method,
                          "language"));
  push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "category"), options.df_method,
                          "category"));
  if (multi_llm) {
    push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "llm"), options.df_method,
                            "llm"));
    push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"llm", "category"}),
                            options.df_method, "llm:category"));
    push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"llm", "language"}),
                            options.df_method, "llm:language"));
  }
  push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"category", "language"}),
                          options.df_method, "category:language"));
  if (multi_llm)
    push_f(f,
           stats::wald_f(fit, stats::interaction_hypothesis(fit, {"llm", "category", "language"}),
                         options.df_method, "llm:category:language"));
  report.tables.push_back(std::move(f));

  Table emm;
  emm.name = "emm_llm_by_language";
  emm.columns = {"llm", "language", "estimate", "se"};
  const std::vector<std::string> emm_factors =
      multi_llm ? std::vector<std::string>{"llm", "language"} : std::vector<std::string>{"language"};
  for (const auto& e : stats::emmeans(fit, emm_factors)) {
    std::vector<std::string> row;
    if (!multi_llm) row.push_back(entries[0].label);
    for (const auto& l : e.levels) row.push_back(l);
    row.push_back(fmt(e.estimate));
    row.push_back(fmt(e.se));
    emm.rows.push_back(std::move(row));
  }
  report.tables.push_back(std::move(emm));

  // Marginal zh - en contrast per provider.
  Table lang_by_llm = contrast_table("language_contrast_by_llm", {"llm"});
  for (const auto& e : entries) {
    Conditioning within;
    if (multi_llm) within["llm"] = e.label;
    auto cs = stats::pairwise_contrasts(fit, "language", Adjustment::None, within,
                                        options.df_method);
    for (auto& c : cs) {
      // report as zh - en
      c.estimate = -c.estimate;
      c.t = -c.t;
      c.description = "zh - en";
      push_contrast(lang_by_llm, c, {e.label});
    }
  }
  report.tables.push_back(std::move(lang_by_llm));

  // Per-category zh - en differences (the difference chart).
  Table diff;
  diff.name = "language_diff_by_llm_category";
  diff.columns = {"llm", "category", "estimate", "se", "t", "df", "p"};
  Figure diff_fig;
  diff_fig.kind = Figure::Kind::GroupedBars;
  diff_fig.name = "language_diff_bars";
  diff_fig.title = "Estimated zh - en difference by category";
  for (auto c : all_categories()) diff_fig.axes.emplace_back(1, category_letter(c));
  for (const auto& e : entries) {
    Figure::Series series;
    series.label = e.label;
    for (const auto& cat : category_level_names()) {
      Conditioning zh{{"language", "zh"}, {"category", cat}};
      Conditioning en{{"language", "en"}, {"category", cat}};
      if (multi_llm) {
        zh["llm"] = e.label;
        en["llm"] = e.label;
      }
      const Eigen::RowVectorXd row = stats::emm_weights(fit, zh) - stats::emm_weights(fit, en);
      const auto c = stats::contrast_from_row(
          fit, row,
          options.df_method == stats::DfMethod::Satterthwaite ? stats::satterthwaite_df(fit, row)
                                                              : double(fit.residual_df()),
          "zh - en");
      diff.rows.push_back({e.label, cat, fmt(c.estimate), fmt(c.se), fmt(c.t), fmt(c.df),
                           fmt(c.p_unadjusted)});
      series.values.push_back(c.estimate);
    }
    diff_fig.series.push_back(std::move(series));
  }
  report.tables.push_back(std::move(diff));
  report.figures.push_back(std::move(diff_fig));

  if (multi_llm) {
    Table pairs = contrast_table("tukey_llm_pairs_within_language", {"language"});
    for (const auto& lang : {std::string("en"), std::string("zh")})
      for (const auto& c : stats::pairwise_contrasts(fit, "llm", Adjustment::Tukey,
                                                     {{"language", lang}}, options.df_method))
        push_contrast(pairs, c, {lang});
    report.tables.push_back(std::move(pairs));
  }

  // Per-provider EMM bars by language.
  for (const auto& e : entries) {
    Figure bars;
    bars.kind = Figure::Kind::GroupedBars;
    bars.name = "language_bars_" + e.label;
    bars.title = "Estimated interest by category and language: " + e.label;
    for (auto c : all_categories()) bars.axes.emplace_back(1, category_letter(c));
    for (const auto& lang : {std::string("en"), std::string("zh")}) {
      Figure::Series series;
      series.label = lang;
      for (const auto& cat : category_level_names()) {
        Conditioning cond{{"language", lang}, {"category", cat}};
        if (multi_llm) cond["llm"] = e.label;
        series.values.push_back(stats::emm_weights(fit, cond).dot(fit.beta));
      }
      bars.series.push_back(std::move(series));
    }
    report.figures.push_back(std::move(bars));
  }
  return report;
}

AnalysisReport analyze_version_effect(const RunArtifact& artifact, const ItemBank& bank,
                                      const scoring::OccupationTable& occupations,
                                      const std::string& family, const AnalysisOptions& options) {
  auto all = select_providers(artifact, {});
  std::vector<ProviderEntry> entries;
  for (const auto& e : all)
    if (e.model_id == family) entries.push_back({e.version_tag, e.model_id, e.version_tag});
  if (entries.size() < 2)
    throw IncompleteArtifact("version analysis needs >= 2 versions of " + family);

  const auto langs = languages_present(artifact);
  const std::vector<Mode> modes{Mode::Interest};
  check_complete(artifact, bank, entries, langs, modes);

  const bool multi_lang = langs.size() > 1;
  std::vector<std::string> factors{"version", "category"};
  if (multi_lang) factors.push_back("language");
  auto rows = build_rows(artifact, bank, entries, langs, modes, factors);
  auto frame =
      stats::build_frame(rows, factors, options.frame_mode, level_orders(entries, langs, modes));
  const LmmFit fit = stats::fit_lmm(frame);

  AnalysisReport report;
  report.name = "version";
  report.input_keys.push_back(family);
  for (const auto& e : entries) report.input_keys.push_back(e.label);
  report.tables.push_back(model_summary_table(fit));

  Table f = f_table();
  push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "version"), options.df_method,
                          "version"));
  push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "category"), options.df_method,
                          "category"));
  push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"version", "category"}),
                          options.df_method, "version:category"));
  if (multi_lang) {
    push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "language"), options.df_method,
                            "language"));
    push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"version", "language"}),
                            options.df_method, "version:language"));
  }
  report.tables.push_back(std::move(f));

  Table emm;
  emm.name = "emm_version_by_category";
  emm.columns = {"version", "category", "estimate", "se"};
  for (const auto& e : stats::emmeans(fit, {"version", "category"})) {
    emm.rows.push_back({e.levels[0], e.levels[1], fmt(e.estimate), fmt(e.se)});
  }
  report.tables.push_back(std::move(emm));

  Table pairs = contrast_table("tukey_version_pairs", {});
  for (const auto& c :
       stats::pairwise_contrasts(fit, "version", Adjustment::Tukey, {}, options.df_method))
    push_contrast(pairs, c);
  report.tables.push_back(std::move(pairs));

  if (multi_lang) {
    Table within = contrast_table("tukey_version_pairs_within_language", {"language"});
    for (const auto& lang : {std::string("en"), std::string("zh")})
      for (const auto& c : stats::pairwise_contrasts(fit, "version", Adjustment::Tukey,
                                                     {{"language", lang}}, options.df_method))
        push_contrast(within, c, {lang});
    report.tables.push_back(std::move(within));

    Table lang_contrast = contrast_table("language_contrast", {});
    auto cs = stats::pairwise_contrasts(fit, "language", Adjustment::None, {}, options.df_method);
    for (auto& c : cs) {
      c.estimate = -c.estimate;
      c.t = -c.t;
      c.description = "zh - en";
      push_contrast(lang_contrast, c);
    }
    report.tables.push_back(std::move(lang_contrast));
  }

  Table holland = holland_table();
  Figure bars;
  bars.kind = Figure::Kind::GroupedBars;
  bars.name = "version_bars";
  bars.title = "Estimated interest by category and version: " + family;
  for (auto c : all_categories()) bars.axes.emplace_back(1, category_letter(c));
  for (const auto& e : entries) {
    append_holland_row(holland, e.label, fit, {{"version", e.label}}, options.alpha, occupations);
    Figure::Series series;
    series.label = e.label;
    const auto means = category_emms(fit, {{"version", e.label}});
    series.values.assign(means.begin(), means.end());
    bars.series.push_back(std::move(series));
  }
  report.tables.push_back(std::move(holland));
  report.figures.push_back(std::move(bars));
  return report;
}

AnalysisReport analyze_interest_vs_competence(
    const RunArtifact& artifact, const ItemBank& bank,
    const std::vector<std::string>& providers,
    const std::optional<std::filesystem::path>& expert_file, const AnalysisOptions& options) {
  const auto entries = select_providers(artifact, providers);
  std::set<int> modes_present;
  for (const auto& rec : artifact.records) modes_present.insert(int(rec.key.mode));
  if (modes_present.size() < 2)
    throw ModeMissing("interest-vs-competence analysis needs both modes in the artifact");
  const auto langs = languages_present(artifact);
  const std::vector<Mode> modes{Mode::Interest, Mode::Competence};
  check_complete(artifact, bank, entries, langs, modes);

  const bool multi_llm = entries.size() > 1;
  const bool multi_lang = langs.size() > 1;
  std::vector<std::string> factors{"category", "mode"};
  if (multi_llm) factors.insert(factors.begin(), "llm");
  if (multi_lang) factors.push_back("language");
  auto rows = build_rows(artifact, bank, entries, langs, modes, factors);
  auto frame =
      stats::build_frame(rows, factors, options.frame_mode, level_orders(entries, langs, modes));
  const LmmFit fit = stats::fit_lmm(frame);

  AnalysisReport report;
  report.name = "competence";
  for (const auto& e : entries) report.input_keys.push_back(e.label);
  report.tables.push_back(model_summary_table(fit));

  Table f = f_table();
  push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "mode"), options.df_method,
                          "mode"));
  push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "category"), options.df_method,
                          "category"));
  if (multi_llm)
    push_f(f, stats::wald_f(fit, stats::main_effect_hypothesis(fit, "llm"), options.df_method,
                            "llm"));
  push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"mode", "category"}),
                          options.df_method, "mode:category"));
  if (multi_llm)
    push_f(f, stats::wald_f(fit, stats::interaction_hypothesis(fit, {"mode", "llm"}),
                            options.df_method, "mode:llm"));
  report.tables.push_back(std::move(f));

  if (multi_lang) {
    Table lang_contrast = contrast_table("language_contrast", {});
    auto cs = stats::pairwise_contrasts(fit, "language", Adjustment::None, {}, options.df_method);
    for (auto& c : cs) {
      c.estimate = -c.estimate;
      c.t = -c.t;
      c.description = "zh - en";
      push_contrast(lang_contrast, c);
    }
    report.tables.push_back(std::move(lang_contrast));
  }

  Table emm;
  emm.name = "emm_mode_by_category";
  emm.columns = {"mode", "category", "estimate", "se"};
  for (const auto& e : stats::emmeans(fit, {"mode", "category"}))
    emm.rows.push_back({e.levels[0], e.levels[1], fmt(e.estimate), fmt(e.se)});
  report.tables.push_back(std::move(emm));

  // Tukey category pairs within each mode (competence-side orderings).
  Table mode_pairs = contrast_table("tukey_category_pairs_by_mode", {"mode"});
  for (const auto& m : {std::string("interest"), std::string("competence")})
    for (const auto& c : stats::pairwise_contrasts(fit, "category", Adjustment::Tukey,
                                                   {{"mode", m}}, options.df_method))
      push_contrast(mode_pairs, c, {m});
  report.tables.push_back(std::move(mode_pairs));

  // Item-level means per (provider, language, item) and mode.
  const auto item_means = scoring::aggregate_item_scores(artifact, bank);
  std::map<std::pair<std::string, std::string>, std::string> label_of;
  for (const auto& e : entries) label_of[{e.model_id, e.version_tag}] = e.label;
  struct PairCell {
    double interest = 0.0, competence = 0.0;
    bool has_i = false, has_c = false;
    int item = 0;
    std::string label;
  };
  std::map<std::tuple<std::string, int, int>, PairCell> cells;  // (label, lang, item)
  for (const auto& im : item_means) {
    auto it = label_of.find({im.model_id, im.version_tag});
    if (it == label_of.end()) continue;
    auto& cell = cells[{it->second, int(im.language), im.item_id}];
    cell.item = im.item_id;
    cell.label = it->second;
    if (im.mode == Mode::Interest) {
      cell.interest = im.mean;
      cell.has_i = true;
    } else {
      cell.competence = im.mean;
      cell.has_c = true;
    }
  }

  Table cors;
  cors.name = "correlations";
  cors.columns = {"pair", "scope", "r", "n", "t", "df", "p", "ci_low", "ci_high"};
  auto push_cor = [&](const std::string& pair, const std::string& scope,
                      const stats::CorrelationResult& c) {
    cors.rows.push_back({pair, scope, fmt(c.r), std::to_string(c.n), fmt(c.t), fmt(c.df), fmt(c.p),
                         fmt(c.ci_low), fmt(c.ci_high)});
  };

  std::vector<double> xi, yi;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_label;
  for (const auto& [key, cell] : cells) {
    if (!cell.has_i || !cell.has_c) continue;
    xi.push_back(cell.interest);
    yi.push_back(cell.competence);
    per_label[cell.label].first.push_back(cell.interest);
    per_label[cell.label].second.push_back(cell.competence);
  }
  push_cor("interest_vs_self_competence", "all", stats::pearson(xi, yi));
  for (const auto& e : entries) {
    const auto& [x, y] = per_label[e.label];
    push_cor("interest_vs_self_competence", e.label, stats::pearson(x, y));
  }

  if (expert_file) {
    const auto ratings = load_expert_ratings(*expert_file);
    const auto expert = expert_item_means(ratings);
    std::vector<double> self_v, expert_v, interest_v, expert_v2;
    for (const auto& [key, cell] : cells) {
      auto it = expert.find(cell.item);
      if (it == expert.end()) continue;
      if (cell.has_c) {
        self_v.push_back(cell.competence);
        expert_v.push_back(it->second);
      }
      if (cell.has_i) {
        interest_v.push_back(cell.interest);
        expert_v2.push_back(it->second);
      }
    }
    push_cor("self_vs_expert_competence", "all", stats::pearson(self_v, expert_v));
    push_cor("interest_vs_expert_competence", "all", stats::pearson(interest_v, expert_v2));
  }
  report.tables.push_back(std::move(cors));

  // Paired interest/competence bars per provider.
  for (const auto& e : entries) {
    Figure bars;
    bars.kind = Figure::Kind::GroupedBars;
    bars.name = "interest_vs_competence_bars_" + e.label;
    bars.title = "Estimated interest and competence by category: " + e.label;
    for (auto c : all_categories()) bars.axes.emplace_back(1, category_letter(c));
    for (const auto& m : {std::string("interest"), std::string("competence")}) {
      Figure::Series series;
      series.label = m;
      for (const auto& cat : category_level_names()) {
        Conditioning cond{{"mode", m}, {"category", cat}};
        if (multi_llm) cond["llm"] = e.label;
        series.values.push_back(stats::emm_weights(fit, cond).dot(fit.beta));
      }
      bars.series.push_back(std::move(series));
    }
    report.figures.push_back(std::move(bars));
  }
  return report;
}

}  // namespace oip::analysis
