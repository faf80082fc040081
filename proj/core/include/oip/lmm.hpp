#pragma once

#include <Eigen/Dense>

#include "oip/model_frame.hpp"

namespace oip::stats {

/// Random-intercept linear mixed model fit: y = X beta + Z gamma + eps with a
/// single grouping factor, estimated by profiled REML over
/// theta = tau2 / sigma2.
struct LmmFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd se_beta;
  Eigen::MatrixXd cov_beta;  // sigma2 * (X' Sigma(theta)^-1 X)^-1

  double sigma2 = 0.0;  // residual variance
  double tau2 = 0.0;    // group-intercept variance
  double theta = 0.0;   // tau2 / sigma2; 0 is an admissible boundary solution
  double reml_criterion = 0.0;  // -2 * restricted log-likelihood at the optimum

  int n_obs = 0;
  int rank_x = 0;
  int n_groups = 0;

  // Satterthwaite machinery: X' V^-1 V_a V^-1 X for V_a in {I, ZZ'} and the
  // asymptotic covariance of (sigma2, tau2) from the expected REML information.
  Eigen::MatrixXd s_ident;
  Eigen::MatrixXd s_group;
  Eigen::Matrix2d vc_cov;
  bool vc_cov_valid = false;

  // Carried over from the frame so downstream inference needs only the fit.
  std::vector<Factor> factors;
  std::vector<std::vector<int>> cell_levels;

  int residual_df() const { return n_obs - rank_x; }

  /// Best linear unbiased predictions of the per-group intercepts, read-only
  /// diagnostics (nothing downstream consumes them).
  Eigen::VectorXd group_intercepts;
};

/// Evaluates the profiled REML criterion (-2 restricted log-likelihood) at a
/// fixed theta >= 0. Exposed so oracle tests can scan it densely.
double reml_criterion_at(const ModelFrame& frame, double theta);

/// Maximizes the profiled REML criterion over theta in [0, 1e4] by coarse
/// scan plus golden-section refinement, with the boundary theta = 0 always
/// evaluated explicitly. Throws NonConvergence when the criterion is not
/// finite anywhere on the bracket.
LmmFit fit_lmm(const ModelFrame& frame);

}  // namespace oip::stats
