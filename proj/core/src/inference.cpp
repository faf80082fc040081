#include "oip/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "oip/distributions.hpp"
#include "oip/errors.hpp"

namespace oip::stats {

namespace {

constexpr double kHugeDf = 1e8;

int require_factor(const LmmFit& fit, const std::string& name) {
  for (size_t i = 0; i < fit.factors.size(); ++i)
    if (fit.factors[i].name == name) return int(i);
  throw InestimableCombination("unknown factor: " + name);
}

int require_level(const Factor& factor, const std::string& level) {
  for (size_t i = 0; i < factor.levels.size(); ++i)
    if (factor.levels[i] == level) return int(i);
  throw InestimableCombination("unknown level '" + level + "' of factor " + factor.name);
}

std::string describe(const Conditioning& fixed) {
  std::string s;
  for (const auto& [k, v] : fixed) {
    if (!s.empty()) s += ",";
    s += k + "=" + v;
  }
  return s;
}

}  // namespace

Eigen::RowVectorXd emm_weights(const LmmFit& fit, const Conditioning& fixed) {
  const int p = int(fit.cell_levels.size());
  if (p == 0) throw InestimableCombination("fit has no cell structure");
  std::vector<std::pair<int, int>> constraints;  // (factor index, level index)
  for (const auto& [fname, lname] : fixed) {
    const int f = require_factor(fit, fname);
    constraints.emplace_back(f, require_level(fit.factors[size_t(f)], lname));
  }
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(p);
  int matched = 0;
  for (int c = 0; c < p; ++c) {
    bool ok = true;
    for (auto [f, l] : constraints)
      if (fit.cell_levels[size_t(c)][size_t(f)] != l) {
        ok = false;
        break;
      }
    if (ok) {
      row(c) = 1.0;
      ++matched;
    }
  }
  if (matched == 0) throw InestimableCombination("no design cell matches " + describe(fixed));
  row /= double(matched);
  return row;
}

std::vector<EmmResult> emmeans(const LmmFit& fit, const std::vector<std::string>& factor_names,
                               const Conditioning& fixed) {
  std::vector<int> fidx;
  for (const auto& n : factor_names) fidx.push_back(require_factor(fit, n));

  std::vector<EmmResult> out;
  std::vector<int> counter(fidx.size(), 0);
  while (true) {
    Conditioning all = fixed;
    EmmResult emm;
    for (size_t i = 0; i < fidx.size(); ++i) {
      const auto& factor = fit.factors[size_t(fidx[i])];
      all[factor.name] = factor.levels[size_t(counter[i])];
      emm.levels.push_back(factor.levels[size_t(counter[i])]);
    }
    const Eigen::RowVectorXd w = emm_weights(fit, all);
    emm.estimate = w.dot(fit.beta);
    emm.se = std::sqrt(std::max(0.0, (w * fit.cov_beta * w.transpose())(0, 0)));
    out.push_back(std::move(emm));

    // advance the odometer
    int i = int(fidx.size()) - 1;
    for (; i >= 0; --i) {
      if (++counter[size_t(i)] < int(fit.factors[size_t(fidx[size_t(i)])].levels.size())) break;
      counter[size_t(i)] = 0;
    }
    if (i < 0) break;
    if (fidx.empty()) break;
  }
  return out;
}

Eigen::MatrixXd main_effect_hypothesis(const LmmFit& fit, const std::string& factor) {
  const int f = require_factor(fit, factor);
  const auto& levels = fit.factors[size_t(f)].levels;
  const int k = int(levels.size());
  if (k < 2) throw SingularHypothesis("factor " + factor + " has fewer than 2 levels");
  Eigen::MatrixXd L(k - 1, fit.cell_levels.size());
  const Eigen::RowVectorXd last = emm_weights(fit, {{factor, levels[size_t(k - 1)]}});
  for (int i = 0; i < k - 1; ++i)
    L.row(i) = emm_weights(fit, {{factor, levels[size_t(i)]}}) - last;
  return L;
}

Eigen::MatrixXd interaction_hypothesis(const LmmFit& fit,
                                       const std::vector<std::string>& factor_names) {
  if (factor_names.size() < 2)
    throw SingularHypothesis("interaction needs at least two factors");
  std::vector<int> fidx;
  std::vector<int> sizes;
  int rows = 1;
  for (const auto& n : factor_names) {
    const int f = require_factor(fit, n);
    fidx.push_back(f);
    const int k = int(fit.factors[size_t(f)].levels.size());
    if (k < 2) throw SingularHypothesis("factor " + n + " has fewer than 2 levels");
    sizes.push_back(k - 1);
    rows *= k - 1;
  }

  Eigen::MatrixXd L(rows, fit.cell_levels.size());
  std::vector<int> tuple(fidx.size(), 0);
  for (int r = 0; r < rows; ++r) {
    // Alternating sum over subsets replacing tuple levels by the last level.
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(fit.cell_levels.size());
    const int subsets = 1 << fidx.size();
    for (int mask = 0; mask < subsets; ++mask) {
      Conditioning cond;
      int sign = 1;
      for (size_t i = 0; i < fidx.size(); ++i) {
        const auto& factor = fit.factors[size_t(fidx[i])];
        const int k = int(factor.levels.size());
        const bool use_last = (mask >> i) & 1;
        if (use_last) sign = -sign;
        cond[factor.name] = factor.levels[size_t(use_last ? k - 1 : tuple[i])];
      }
      row += double(sign) * emm_weights(fit, cond);
    }
    L.row(r) = row;

    int i = int(tuple.size()) - 1;
    for (; i >= 0; --i) {
      if (++tuple[size_t(i)] < sizes[size_t(i)]) break;
      tuple[size_t(i)] = 0;
    }
    (void)i;
  }
  return L;
}

double satterthwaite_df(const LmmFit& fit, const Eigen::RowVectorXd& row) {
  if (!fit.vc_cov_valid) return fit.residual_df();
  const Eigen::VectorXd c = row.transpose();
  const Eigen::VectorXd ac = fit.cov_beta * c;
  const double f = c.dot(ac);
  if (!(f > 0.0)) return fit.residual_df();
  Eigen::Vector2d grad;
  grad(0) = ac.dot(fit.s_ident * ac);
  grad(1) = ac.dot(fit.s_group * ac);
  const double denom = grad.dot(fit.vc_cov * grad);
  if (!(denom > 0.0)) return kHugeDf;
  const double df = 2.0 * f * f / denom;
  return std::min(df, kHugeDf);
}

FTestResult wald_f(const LmmFit& fit, const Eigen::MatrixXd& hypothesis, DfMethod df_method,
                   const std::string& description) {
  if (hypothesis.cols() != fit.beta.size())
    throw SingularHypothesis("hypothesis matrix has wrong number of columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(hypothesis.transpose());
  const int r = int(qr.rank());
  if (r < hypothesis.rows())
    throw SingularHypothesis("hypothesis matrix is row-rank deficient (rank " +
                             std::to_string(r) + " of " + std::to_string(hypothesis.rows()) + ")");

  const Eigen::VectorXd lb = hypothesis * fit.beta;
  const Eigen::MatrixXd lvl = hypothesis * fit.cov_beta * hypothesis.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lvl);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
    throw SingularHypothesis("hypothesis covariance is singular");

  FTestResult res;
  res.description = description;
  res.statistic = lb.dot(ldlt.solve(lb)) / r;
  res.df_num = r;

  if (df_method == DfMethod::Residual || !fit.vc_cov_valid) {
    res.df_den = fit.residual_df();
  } else {
    // Moment matching per principal direction of the contrast covariance.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lvl);
    const Eigen::MatrixXd pl = eig.eigenvectors().transpose() * hypothesis;
    double e_sum = 0.0;
    int used = 0;
    for (int i = 0; i < pl.rows(); ++i) {
      if (eig.eigenvalues()(i) <= 0.0) continue;
      const double nu = satterthwaite_df(fit, pl.row(i));
      if (nu > 2.0) {
        e_sum += nu / (nu - 2.0);
        ++used;
      }
    }
    if (used == r && e_sum > double(r))
      res.df_den = 2.0 * e_sum / (e_sum - double(r));
    else
      res.df_den = kHugeDf;
  }
  res.p_value = 1.0 - f_cdf(res.statistic, res.df_num, res.df_den);
  return res;
}

ContrastResult contrast_from_row(const LmmFit& fit, const Eigen::RowVectorXd& row, double df,
                                 const std::string& description) {
  ContrastResult c;
  c.description = description;
  c.estimate = row.dot(fit.beta);
  c.se = std::sqrt(std::max(0.0, (row * fit.cov_beta * row.transpose())(0, 0)));
  c.t = c.se > 0.0 ? c.estimate / c.se : 0.0;
  c.df = df;
  c.p_unadjusted = t_two_sided_p(c.t, df);
  c.p_adjusted = c.p_unadjusted;
  c.family_size = 1;
  return c;
}

std::vector<ContrastResult> pairwise_contrasts(const LmmFit& fit, const std::string& factor,
                                               Adjustment adjust, const Conditioning& within,
                                               DfMethod df_method) {
  const int f = require_factor(fit, factor);
  const auto& levels = fit.factors[size_t(f)].levels;
  const int k = int(levels.size());
  if (k < 2) throw SingularHypothesis("pairwise contrasts need at least 2 levels");
  const int m = k * (k - 1) / 2;

  std::vector<ContrastResult> out;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      Conditioning a = within, b = within;
      a[factor] = levels[size_t(i)];
      b[factor] = levels[size_t(j)];
      const Eigen::RowVectorXd row = emm_weights(fit, a) - emm_weights(fit, b);
      const double df = df_method == DfMethod::Satterthwaite ? satterthwaite_df(fit, row)
                                                             : double(fit.residual_df());
      std::string desc = levels[size_t(i)] + " - " + levels[size_t(j)];
      if (!within.empty()) desc += " | " + describe(within);
      ContrastResult c = contrast_from_row(fit, row, df, desc);
      c.adjustment = adjust;
      c.family_size = k;
      switch (adjust) {
        case Adjustment::None:
          c.p_adjusted = c.p_unadjusted;
          break;
        case Adjustment::Bonferroni:
          c.p_adjusted = std::min(1.0, c.p_unadjusted * m);
          break;
        case Adjustment::Tukey:
          c.p_adjusted =
              1.0 - studentized_range_cdf(std::abs(c.t) * std::sqrt(2.0), k, c.df);
          break;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

ContrastResult grouped_contrast(const LmmFit& fit, const std::string& factor,
                                const std::vector<std::string>& group_a,
                                const std::vector<std::string>& group_b,
                                const Conditioning& within, DfMethod df_method) {
  if (group_a.empty() || group_b.empty())
    throw OverlappingGroups("grouped contrast needs two nonempty level sets");
  std::set<std::string> sa(group_a.begin(), group_a.end());
  for (const auto& l : group_b)
    if (sa.count(l)) throw OverlappingGroups("level '" + l + "' appears in both groups");

  auto mean_weights = [&](const std::vector<std::string>& levels) {
    Eigen::RowVectorXd row;
    for (const auto& l : levels) {
      Conditioning cond = within;
      cond[factor] = l;
      const Eigen::RowVectorXd w = emm_weights(fit, cond);
      row = row.size() == 0 ? w : Eigen::RowVectorXd(row + w);
    }
    return Eigen::RowVectorXd(row / double(levels.size()));
  };

  const Eigen::RowVectorXd row = mean_weights(group_a) - mean_weights(group_b);
  const double df = df_method == DfMethod::Satterthwaite ? satterthwaite_df(fit, row)
                                                         : double(fit.residual_df());
  std::ostringstream desc;
  desc << "{";
  for (size_t i = 0; i < group_a.size(); ++i) desc << (i ? "," : "") << group_a[i];
  desc << "} - {";
  for (size_t i = 0; i < group_b.size(); ++i) desc << (i ? "," : "") << group_b[i];
  desc << "}";
  if (!within.empty()) desc << " | " << describe(within);
  return contrast_from_row(fit, row, df, desc.str());
}

CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateInput("pearson: length mismatch");
  const int n = int(x.size());
  if (n < 3) throw DegenerateInput("pearson: need at least 3 observations");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[size_t(i)];
    my += y[size_t(i)];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[size_t(i)] - mx;
    const double dy = y[size_t(i)] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DegenerateInput("pearson: zero variance input");

  CorrelationResult res;
  res.n = n;
  res.df = n - 2;
  res.r = sxy / std::sqrt(sxx * syy);
  res.r = std::clamp(res.r, -1.0, 1.0);
  const double denom = 1.0 - res.r * res.r;
  if (denom <= 0.0) {
    res.t = res.r > 0 ? kHugeDf : -kHugeDf;
    res.p = 0.0;
  } else {
    res.t = res.r * std::sqrt(res.df) / std::sqrt(denom);
    res.p = t_two_sided_p(res.t, res.df);
  }
  const double z = std::atanh(res.r);
  const double half = 1.96 / std::sqrt(double(n - 3));
  res.ci_low = std::tanh(z - half);
  res.ci_high = std::tanh(z + half);
  return res;
}

}  // namespace oip::stats
