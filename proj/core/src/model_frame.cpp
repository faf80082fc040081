#include "oip/model_frame.hpp"

#include <algorithm>
#include <sstream>

#include "oip/errors.hpp"

namespace oip::stats {

int ModelFrame::factor_index(const std::string& name) const {
  for (size_t i = 0; i < factors.size(); ++i)
    if (factors[i].name == name) return static_cast<int>(i);
  return -1;
}

int ModelFrame::level_index(int factor, const std::string& level) const {
  const auto& ls = factors[size_t(factor)].levels;
  auto it = std::find(ls.begin(), ls.end(), level);
  return it == ls.end() ? -1 : static_cast<int>(it - ls.begin());
}

namespace {

std::vector<std::string> collect_levels(const std::vector<ObsRow>& rows, size_t f,
                                        const std::map<std::string, std::vector<std::string>>& order,
                                        const std::string& name) {
  auto it = order.find(name);
  if (it != order.end()) return it->second;
  std::vector<std::string> levels;
  for (const auto& r : rows)
    if (std::find(levels.begin(), levels.end(), r.levels[f]) == levels.end())
      levels.push_back(r.levels[f]);
  return levels;
}

}  // namespace

ModelFrame build_frame(const std::vector<ObsRow>& rows,
                       const std::vector<std::string>& factor_names, AnalysisMode mode,
                       const std::map<std::string, std::vector<std::string>>& level_order) {
  if (rows.empty()) throw DegenerateInput("build_frame: no rows");
  const size_t nf = factor_names.size();
  for (const auto& r : rows)
    if (r.levels.size() != nf)
      throw DegenerateInput("build_frame: row has wrong number of factor levels");

  ModelFrame frame;
  frame.factors.resize(nf);
  for (size_t f = 0; f < nf; ++f) {
    frame.factors[f].name = factor_names[f];
    frame.factors[f].levels = collect_levels(rows, f, level_order, factor_names[f]);
    if (frame.factors[f].levels.empty())
      throw DegenerateInput("build_frame: factor " + factor_names[f] + " has no levels");
  }

  // Cell index = row-major multi-index over the factors' levels.
  int n_cells = 1;
  for (const auto& fac : frame.factors) n_cells *= static_cast<int>(fac.levels.size());
  frame.cell_levels.resize(size_t(n_cells), std::vector<int>(nf, 0));
  for (int c = 0; c < n_cells; ++c) {
    int rem = c;
    for (int f = static_cast<int>(nf) - 1; f >= 0; --f) {
      const int k = static_cast<int>(frame.factors[size_t(f)].levels.size());
      frame.cell_levels[size_t(c)][size_t(f)] = rem % k;
      rem /= k;
    }
  }

  auto cell_of = [&](const ObsRow& r) {
    int c = 0;
    for (size_t f = 0; f < nf; ++f) {
      const auto& levels = frame.factors[f].levels;
      auto it = std::find(levels.begin(), levels.end(), r.levels[f]);
      if (it == levels.end())
        throw DegenerateInput("build_frame: level '" + r.levels[f] + "' not in factor " +
                              factor_names[f]);
      c = c * static_cast<int>(levels.size()) + static_cast<int>(it - levels.begin());
    }
    return c;
  };

  std::map<std::string, int> group_ids;
  auto group_of = [&](const std::string& label) {
    auto [it, inserted] = group_ids.emplace(label, static_cast<int>(frame.group_labels.size()));
    if (inserted) frame.group_labels.push_back(label);
    return it->second;
  };

  struct Keyed {
    int group, cell;
    double sum = 0;
    int n = 0;
  };

  std::vector<double> ys;
  std::vector<int> cells, groups;
  if (mode == AnalysisMode::ReplicationLevel) {
    for (const auto& r : rows) {
      ys.push_back(r.y);
      cells.push_back(cell_of(r));
      groups.push_back(group_of(r.group));
    }
  } else {
    std::map<std::pair<int, int>, Keyed> agg;  // (group, cell) -> mean accumulator
    for (const auto& r : rows) {
      const int g = group_of(r.group);
      const int c = cell_of(r);
      auto& k = agg[{g, c}];
      k.group = g;
      k.cell = c;
      k.sum += r.y;
      k.n += 1;
    }
    for (const auto& [key, k] : agg) {
      ys.push_back(k.sum / k.n);
      cells.push_back(k.cell);
      groups.push_back(k.group);
    }
  }

  std::vector<int> cell_counts(size_t(n_cells), 0);
  for (int c : cells) cell_counts[size_t(c)]++;
  for (int c = 0; c < n_cells; ++c) {
    if (cell_counts[size_t(c)] == 0) {
      std::ostringstream os;
      os << "empty design cell:";
      for (size_t f = 0; f < nf; ++f)
        os << " " << factor_names[f] << "="
           << frame.factors[f].levels[size_t(frame.cell_levels[size_t(c)][f])];
      throw EmptyCell(os.str());
    }
  }

  const int n = static_cast<int>(ys.size());
  frame.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  frame.x = Eigen::MatrixXd::Zero(n, n_cells);
  for (int r = 0; r < n; ++r) frame.x(r, cells[size_t(r)]) = 1.0;
  frame.group = std::move(groups);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(frame.x);
  if (qr.rank() < n_cells)
    throw RankDeficientDesign("design matrix rank " + std::to_string(qr.rank()) + " < " +
                              std::to_string(n_cells) + " columns");
  return frame;
}

}  // namespace oip::stats
