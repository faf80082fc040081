// Command-line entry point: run / resume / score / analyze / validate.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "oip/analysis.hpp"
#include "oip/errors.hpp"
#include "oip/config.hpp"
#include "oip/report_render.hpp"
#include "oip/runner.hpp"
#include "oip/scoring.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitProvider = 3;

struct SharedFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> replications;
};

oip::RunConfig load_with_overrides(const SharedFlags& flags) {
  oip::RunConfig config = oip::load_config(flags.config_path);
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.seed) {
    config.seed = *flags.seed;
    for (auto& p : config.providers) p.mock.seed = *flags.seed;
  }
  if (flags.replications) config.replications = *flags.replications;
  config.validate();
  return config;
}

void report_run(const oip::RunResult& result) {
  std::cout << "artifact: " << result.dir.string() << "\n"
            << "administered: " << result.administered << "\n"
            << "skipped (already present): " << result.skipped << "\n";
  for (const auto& f : result.failed_providers)
    std::cerr << "error: provider aborted: " << f << "\n";
}

int cmd_run(const SharedFlags& flags, bool is_resume, const std::string& artifact_dir) {
  oip::RunConfig config = load_with_overrides(flags);
  const oip::ItemBank bank = oip::ItemBank::load(config.item_bank_path);
  const oip::RunResult result =
      is_resume ? oip::resume(artifact_dir.empty() ? config.out_dir : std::filesystem::path(artifact_dir), config, bank)
                : oip::run_survey(config, bank);
  report_run(result);
  return result.failed_providers.empty() ? kExitOk : kExitProvider;
}

int cmd_score(const SharedFlags& flags, const std::string& artifact_dir) {
  oip::RunConfig config = load_with_overrides(flags);
  const oip::ItemBank bank = oip::ItemBank::load(config.item_bank_path);
  const std::filesystem::path dir = artifact_dir.empty() ? config.out_dir : std::filesystem::path(artifact_dir);
  const oip::RunArtifact artifact = oip::load_artifact(dir);

  const auto item_means = oip::scoring::aggregate_item_scores(artifact, bank);
  const auto rep_scores = oip::scoring::replication_scores(artifact, bank);

  oip::analysis::Table items;
  items.name = "item_means";
  items.columns = {"provider", "version", "language", "mode", "item_id",
                   "category", "mean",    "n",        "missing"};
  char buf[40];
  for (const auto& im : item_means) {
    std::snprintf(buf, sizeof(buf), "%.10g", im.mean);
    items.rows.push_back({im.model_id, im.version_tag, std::string(oip::language_code(im.language)),
                          std::string(oip::mode_name(im.mode)), std::to_string(im.item_id),
                          std::string(oip::category_name(im.category)), buf,
                          std::to_string(im.n), std::to_string(im.missing)});
  }

  oip::analysis::Table reps;
  reps.name = "replication_scores";
  reps.columns = {"provider", "version", "language", "mode", "replication",
                  "R",        "I",       "A",        "S",    "E",
                  "C",        "missing", "top_categories"};
  for (const auto& rs : rep_scores) {
    std::string top;
    for (auto c : rs.top_categories()) top += oip::category_letter(c);
    std::vector<std::string> row{rs.key.model_id,
                                 rs.key.version_tag,
                                 std::string(oip::language_code(rs.key.language)),
                                 std::string(oip::mode_name(rs.key.mode)),
                                 std::to_string(rs.key.replication)};
    for (int c = 0; c < oip::kNumCategories; ++c) row.push_back(std::to_string(rs.sums[size_t(c)]));
    row.push_back(std::to_string(rs.missing_count));
    row.push_back(top);
    reps.rows.push_back(std::move(row));
  }

  const std::filesystem::path score_dir = dir / "scores";
  std::filesystem::create_directories(score_dir);
  for (const auto* t : {&items, &reps}) {
    std::ofstream out(score_dir / (t->name + ".csv"), std::ios::binary);
    out << oip::analysis::table_to_csv(*t);
    std::cout << (score_dir / (t->name + ".csv")).string() << "\n";
  }
  return kExitOk;
}

int cmd_analyze(const SharedFlags& flags, const std::string& artifact_dir,
                const std::string& pipeline, const std::string& language,
                const std::vector<std::string>& providers, const std::string& family,
                const std::string& expert_override) {
  oip::RunConfig config = load_with_overrides(flags);
  const oip::ItemBank bank = oip::ItemBank::load(config.item_bank_path);
  const std::filesystem::path dir = artifact_dir.empty() ? config.out_dir : std::filesystem::path(artifact_dir);
  const oip::RunArtifact artifact = oip::load_artifact(dir);

  oip::scoring::OccupationTable occupations;
  if (!config.occupation_path.empty())
    occupations = oip::scoring::OccupationTable::load(config.occupation_path);

  const auto lang = oip::language_from_code(language);
  if (!lang) throw oip::UsageError("unknown language '" + language + "'");

  std::optional<std::filesystem::path> expert;
  if (!expert_override.empty())
    expert = expert_override;
  else if (!config.expert_path.empty())
    expert = config.expert_path;

  std::vector<oip::analysis::AnalysisReport> reports;
  const bool all = pipeline == "all";
  if (all || pipeline == "riasec")
    reports.push_back(
        oip::analysis::analyze_riasec_by_llm(artifact, bank, occupations, providers, *lang));
  if (all || pipeline == "language")
    reports.push_back(oip::analysis::analyze_language_effect(artifact, bank, providers));
  if (all || pipeline == "version") {
    if (family.empty() && pipeline == "version")
      throw oip::UsageError("--family is required for the version pipeline");
    if (!family.empty())
      reports.push_back(oip::analysis::analyze_version_effect(artifact, bank, occupations, family));
  }
  if (all || pipeline == "competence")
    reports.push_back(
        oip::analysis::analyze_interest_vs_competence(artifact, bank, providers, expert));

  const std::filesystem::path report_dir = dir / "reports";
  const std::set<oip::analysis::RenderFormat> formats{oip::analysis::RenderFormat::Csv,
                                                      oip::analysis::RenderFormat::Markdown,
                                                      oip::analysis::RenderFormat::Svg};
  for (const auto& report : reports) {
    const auto files = oip::analysis::render_report(report, formats, report_dir);
    std::cout << "report " << report.name << ": " << files.size() << " files under "
              << (report_dir / report.name).string() << "\n";
  }
  return kExitOk;
}

int cmd_validate(const SharedFlags& flags, bool offline) {
  oip::RunConfig config = load_with_overrides(flags);
  const auto diagnostics = oip::validate_config(config, offline);
  int fatals = 0;
  for (const auto& d : diagnostics) {
    if (d.fatal) {
      ++fatals;
      std::cerr << "error: " << d.message << "\n";
    } else {
      std::cout << d.message << "\n";
    }
  }
  std::cout << fatals << " errors\n";
  return fatals == 0 ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O*NET Interest Profiler harness for chat endpoints"};
  app.require_subcommand(1);

  SharedFlags flags;
  std::string artifact_dir, pipeline = "all", language = "en", family, expert;
  std::vector<std::string> providers;
  bool offline = false;

  auto add_shared = [&](CLI::App* cmd, bool config_required = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "study config (TOML)");
    if (config_required) opt->required();
    cmd->add_option("--out", flags.out_dir, "override the output/artifact directory");
    cmd->add_option("--seed", flags.seed, "override the run seed");
    cmd->add_option("--replications", flags.replications, "override the replication count");
  };

  auto* run = app.add_subcommand("run", "administer the survey per the config");
  add_shared(run);

  auto* resume = app.add_subcommand("resume", "fill the missing cells of an existing artifact");
  add_shared(resume);
  resume->add_option("--artifact", artifact_dir, "artifact directory (defaults to config out_dir)");

  auto* score = app.add_subcommand("score", "write item means and replication scores");
  add_shared(score);
  score->add_option("--artifact", artifact_dir, "artifact directory (defaults to config out_dir)");

  auto* analyze = app.add_subcommand("analyze", "run the inferential pipelines");
  add_shared(analyze);
  analyze->add_option("--artifact", artifact_dir, "artifact directory (defaults to config out_dir)");
  analyze->add_option("--pipeline", pipeline, "riasec|language|version|competence|all")
      ->check(CLI::IsMember({"riasec", "language", "version", "competence", "all"}));
  analyze->add_option("--language", language, "language for the riasec pipeline (en|zh)");
  analyze->add_option("--provider", providers, "provider selector model[:version] (repeatable)");
  analyze->add_option("--family", family, "model_id whose versions form the version line");
  analyze->add_option("--expert", expert, "expert ratings CSV override");

  auto* validate = app.add_subcommand("validate", "check config and data files");
  add_shared(validate);
  validate->add_flag("--offline", offline, "skip provider reachability probes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(flags, false, "");
    if (resume->parsed()) return cmd_run(flags, true, artifact_dir);
    if (score->parsed()) return cmd_score(flags, artifact_dir);
    if (analyze->parsed())
      return cmd_analyze(flags, artifact_dir, pipeline, language, providers, family, expert);
    if (validate->parsed()) return cmd_validate(flags, offline);
  } catch (const oip::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const oip::ProviderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const oip::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
