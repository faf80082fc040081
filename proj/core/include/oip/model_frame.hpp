#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace oip::stats {

enum class AnalysisMode { ItemAggregated, ReplicationLevel };

/// One observation before encoding: response, grouping label (the item), and
/// one level string per fixed factor.
struct ObsRow {
  double y = 0.0;
  std::string group;
  std::vector<std::string> levels;
};

struct Factor {
  std::string name;
  std::vector<std::string> levels;
};

/// Cell-means encoded design: X has one indicator column per combination of
/// factor levels, so fixed effects are directly the cell means.
struct ModelFrame {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;                        // n x n_cells
  std::vector<int> group;                   // per-row group index
  std::vector<std::string> group_labels;    // group index -> label
  std::vector<Factor> factors;
  std::vector<std::vector<int>> cell_levels;  // cell -> level index per factor

  int n_obs() const { return static_cast<int>(y.size()); }
  int n_cells() const { return static_cast<int>(x.cols()); }
  int n_groups() const { return static_cast<int>(group_labels.size()); }

  int factor_index(const std::string& name) const;      // -1 when absent
  int level_index(int factor, const std::string& level) const;  // -1 when absent
};

/// Encodes rows into a full-interaction cell-means frame.
///
/// ItemAggregated averages the replications of each (group, cell) pair into a
/// single row; ReplicationLevel keeps every row. Throws EmptyCell when a
/// factor-level combination has no data and RankDeficientDesign when the
/// encoded design loses rank.
ModelFrame build_frame(const std::vector<ObsRow>& rows,
                       const std::vector<std::string>& factor_names, AnalysisMode mode,
                       const std::map<std::string, std::vector<std::string>>& level_order = {});

}  // namespace oip::stats
