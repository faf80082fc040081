#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oip/inference.hpp"
#include "oip/scoring.hpp"

namespace oip::analysis {

struct ExpertRating {
  std::string rater;
  int item_id = 0;
  int score = 0;  // 1..5
};

/// CSV with header rater,item_id,score. Requires at least one rater and at
/// most one score per (rater, item).
std::vector<ExpertRating> load_expert_ratings(const std::filesystem::path& path);

/// Unweighted mean over raters, per item.
std::map<int, double> expert_item_means(const std::vector<ExpertRating>& ratings);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Figure {
  enum class Kind { Radar, Heatmap, GroupedBars };
  Kind kind = Kind::Radar;
  std::string name;
  std::string title;
  std::vector<std::string> axes;  // radar axes / bar group labels / heatmap labels
  struct Series {
    std::string label;
    std::vector<double> values;
  };
  std::vector<Series> series;                // radar + bars
  std::vector<std::vector<double>> matrix;   // heatmap (axes x axes)
};

struct AnalysisReport {
  std::string name;
  std::vector<std::string> input_keys;
  std::vector<Table> tables;
  std::vector<Figure> figures;

  const Table* table(const std::string& name) const;
};

struct AnalysisOptions {
  double alpha = 0.05;  // tie grouping threshold for Holland codes
  stats::AnalysisMode frame_mode = stats::AnalysisMode::ItemAggregated;
  stats::DfMethod df_method = stats::DfMethod::Residual;
};

/// Provider selectors are "model_id" or "model_id:version_tag"; empty selects
/// every provider present in the artifact.
AnalysisReport analyze_riasec_by_llm(const RunArtifact& artifact, const ItemBank& bank,
                                     const scoring::OccupationTable& occupations,
                                     const std::vector<std::string>& providers, Language language,
                                     const AnalysisOptions& options = {});

AnalysisReport analyze_language_effect(const RunArtifact& artifact, const ItemBank& bank,
                                       const std::vector<std::string>& providers,
                                       const AnalysisOptions& options = {});

/// `family` is the model_id whose version_tags form the version line.
AnalysisReport analyze_version_effect(const RunArtifact& artifact, const ItemBank& bank,
                                      const scoring::OccupationTable& occupations,
                                      const std::string& family,
                                      const AnalysisOptions& options = {});

AnalysisReport analyze_interest_vs_competence(
    const RunArtifact& artifact, const ItemBank& bank,
    const std::vector<std::string>& providers,
    const std::optional<std::filesystem::path>& expert_file = std::nullopt,
    const AnalysisOptions& options = {});

}  // namespace oip::analysis
