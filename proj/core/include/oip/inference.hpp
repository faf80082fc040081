#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "oip/lmm.hpp"

namespace oip::stats {

enum class DfMethod { Residual, Satterthwaite };
enum class Adjustment { None, Tukey, Bonferroni };

struct FTestResult {
  std::string description;
  double statistic = 0.0;
  double df_num = 0.0;
  double df_den = 0.0;
  double p_value = 1.0;
};

struct EmmResult {
  std::vector<std::string> levels;  // one label per requested factor
  double estimate = 0.0;
  double se = 0.0;
};

struct ContrastResult {
  std::string description;
  double estimate = 0.0;
  double se = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p_unadjusted = 1.0;
  double p_adjusted = 1.0;
  Adjustment adjustment = Adjustment::None;
  int family_size = 0;
};

struct CorrelationResult {
  double r = 0.0;
  int n = 0;
  double t = 0.0;
  double df = 0.0;  // n - 2
  double p = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Fixed conditioning: factor name -> level name. Every returned quantity
/// averages, with equal weights, over the levels of factors not mentioned.
using Conditioning = std::map<std::string, std::string>;

/// Weight row over the cells for the marginal mean of one level combination.
Eigen::RowVectorXd emm_weights(const LmmFit& fit, const Conditioning& fixed);

std::vector<EmmResult> emmeans(const LmmFit& fit, const std::vector<std::string>& factor_names,
                               const Conditioning& fixed = {});

/// Hypothesis rows testing "all marginal means of `factor` equal".
Eigen::MatrixXd main_effect_hypothesis(const LmmFit& fit, const std::string& factor);

/// Hypothesis rows for the full interaction among the named factors
/// (difference-of-differences over marginal means).
Eigen::MatrixXd interaction_hypothesis(const LmmFit& fit,
                                       const std::vector<std::string>& factor_names);

/// F = (L beta)' [L cov L']^-1 (L beta) / rank(L). Residual df_den is
/// n_obs - rank(X); Satterthwaite moment-matches from the variance-component
/// covariance. Throws SingularHypothesis when L is row-rank deficient.
FTestResult wald_f(const LmmFit& fit, const Eigen::MatrixXd& hypothesis,
                   DfMethod df_method = DfMethod::Residual, const std::string& description = "");

/// All k(k-1)/2 pairwise level differences of `factor`, optionally inside a
/// conditioning slice. Tukey p uses the studentized range with family size k.
std::vector<ContrastResult> pairwise_contrasts(const LmmFit& fit, const std::string& factor,
                                               Adjustment adjust,
                                               const Conditioning& within = {},
                                               DfMethod df_method = DfMethod::Residual);

/// Unweighted mean of marginal means over `group_a` minus over `group_b`,
/// unadjusted t. Throws OverlappingGroups on intersecting level sets.
ContrastResult grouped_contrast(const LmmFit& fit, const std::string& factor,
                                const std::vector<std::string>& group_a,
                                const std::vector<std::string>& group_b,
                                const Conditioning& within = {},
                                DfMethod df_method = DfMethod::Residual);

/// Single custom contrast row (helper used by the pipelines).
ContrastResult contrast_from_row(const LmmFit& fit, const Eigen::RowVectorXd& row, double df,
                                 const std::string& description);

/// Pearson correlation with Fisher-transform 95% CI.
CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Satterthwaite denominator df for a single contrast row.
double satterthwaite_df(const LmmFit& fit, const Eigen::RowVectorXd& row);

}  // namespace oip::stats
