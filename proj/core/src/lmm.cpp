#include "oip/lmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "oip/errors.hpp"

namespace oip::stats {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kThetaMax = 1e4;

// Sufficient statistics for the single-grouping GLS: with
// Sigma(theta)^-1 = I - theta/(1+m theta) J per group, every REML quantity
// reduces to the global Gram pieces plus per-group column sums.
struct Sufficient {
  Eigen::MatrixXd xtx;             // X'X
  Eigen::VectorXd xty;             // X'y
  double yty = 0.0;                // y'y
  std::vector<Eigen::VectorXd> s;  // group -> X_g' 1
  std::vector<double> t;           // group -> sum of y in group
  std::vector<Eigen::MatrixXd> gram;  // group -> X_g'X_g
  std::vector<int> sizes;
  std::vector<std::vector<int>> rows;
};

Sufficient accumulate(const ModelFrame& frame) {
  const int p = frame.n_cells();
  const int q = frame.n_groups();
  if (q <= 0) throw DegenerateInput("fit_lmm: frame has no groups");
  Sufficient suf;
  suf.xtx = frame.x.transpose() * frame.x;
  suf.xty = frame.x.transpose() * frame.y;
  suf.yty = frame.y.squaredNorm();
  suf.s.assign(size_t(q), Eigen::VectorXd::Zero(p));
  suf.t.assign(size_t(q), 0.0);
  suf.gram.assign(size_t(q), Eigen::MatrixXd::Zero(p, p));
  suf.sizes.assign(size_t(q), 0);
  suf.rows.resize(size_t(q));
  for (int r = 0; r < frame.n_obs(); ++r) {
    const int g = frame.group[size_t(r)];
    if (g < 0 || g >= q) throw DegenerateInput("fit_lmm: group index out of range");
    suf.s[size_t(g)] += frame.x.row(r).transpose();
    suf.t[size_t(g)] += frame.y(r);
    suf.gram[size_t(g)].noalias() += frame.x.row(r).transpose() * frame.x.row(r);
    suf.sizes[size_t(g)]++;
    suf.rows[size_t(g)].push_back(r);
  }
  return suf;
}

struct Profiled {
  double criterion = std::numeric_limits<double>::infinity();
  double sigma2 = 0.0;
  Eigen::VectorXd beta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

Profiled profile(const Sufficient& suf, double theta, int n, int rank_x) {
  Profiled out;
  const double resid_df = n - rank_x;
  Eigen::MatrixXd xtsx = suf.xtx;
  Eigen::VectorXd xtsy = suf.xty;
  double ytsy = suf.yty;
  double logdet_sigma = 0.0;
  for (size_t g = 0; g < suf.sizes.size(); ++g) {
    const int m = suf.sizes[g];
    const double w = theta / (1.0 + m * theta);
    logdet_sigma += std::log1p(m * theta);
    if (w == 0.0) continue;
    xtsx.noalias() -= w * (suf.s[g] * suf.s[g].transpose());
    xtsy.noalias() -= w * suf.s[g] * suf.t[g];
    ytsy -= w * suf.t[g] * suf.t[g];
  }
  out.ldlt.compute(xtsx);
  if (out.ldlt.info() != Eigen::Success) return out;
  out.beta = out.ldlt.solve(xtsy);
  const double q = std::max(ytsy - xtsy.dot(out.beta), 1e-300);
  out.sigma2 = q / resid_df;
  double logdet_xtsx = 0.0;
  for (int i = 0; i < xtsx.rows(); ++i) {
    const double d = out.ldlt.vectorD()(i);
    if (!(d > 0.0)) return out;
    logdet_xtsx += std::log(d);
  }
  out.criterion =
      resid_df * (std::log(2.0 * kPi * out.sigma2) + 1.0) + logdet_sigma + logdet_xtsx;
  return out;
}

// Per-group algebra on the span {I, J}, J = 11'. Closed under products:
// (aI + bJ)(cI + dJ) = acI + (ad + bc + bdm)J on a group of size m.
struct Span {
  double a = 0.0, b = 0.0;
  Span mul(const Span& o, double m) const {
    return Span{a * o.a, a * o.b + b * o.a + b * o.b * m};
  }
  double trace(double m) const { return m * a + m * b; }
};

}  // namespace

double reml_criterion_at(const ModelFrame& frame, double theta) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(frame.x);
  const Sufficient suf = accumulate(frame);
  return profile(suf, theta, frame.n_obs(), int(qr.rank())).criterion;
}

LmmFit fit_lmm(const ModelFrame& frame) {
  const int n = frame.n_obs();
  const int p = frame.n_cells();
  if (n <= 0) throw DegenerateInput("fit_lmm: empty frame");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(frame.x);
  const int rank_x = int(qr.rank());
  if (rank_x < p)
    throw RankDeficientDesign("fit_lmm: design rank " + std::to_string(rank_x) + " < " +
                              std::to_string(p));
  if (n <= rank_x)
    throw DegenerateInput("fit_lmm: no residual degrees of freedom (n = " + std::to_string(n) +
                          ", rank = " + std::to_string(rank_x) + ")");

  const Sufficient suf = accumulate(frame);
  auto crit = [&](double theta) { return profile(suf, theta, n, rank_x).criterion; };

  // Coarse scan (boundary plus log grid), then golden-section between the
  // best point's neighbors.
  std::vector<double> grid{0.0};
  for (double t = 1e-6; t <= kThetaMax * 1.0000001; t *= 1.34992)
    grid.push_back(std::min(t, kThetaMax));
  int best = -1;
  double best_val = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    const double v = crit(grid[i]);
    if (v < best_val) {
      best_val = v;
      best = int(i);
    }
  }
  if (best < 0 || !std::isfinite(best_val)) {
    std::ostringstream os;
    os << "fit_lmm: REML criterion not finite on [0, " << kThetaMax << "]";
    throw NonConvergence(os.str());
  }

  double a = grid[size_t(std::max(0, best - 1))];
  double b = grid[size_t(std::min(int(grid.size()) - 1, best + 1))];

  constexpr double inv_phi = 0.6180339887498948482;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = crit(x1), f2 = crit(x2);
  while (b - a > 1e-10 * (1.0 + b)) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = crit(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = crit(x2);
    }
  }
  double theta_hat = 0.5 * (a + b);
  double val_inner = crit(theta_hat);

  // The boundary is always an admissible answer.
  if (crit(0.0) <= val_inner) theta_hat = 0.0;

  Profiled opt = profile(suf, theta_hat, n, rank_x);
  if (!std::isfinite(opt.criterion)) {
    std::ostringstream os;
    os << "fit_lmm: criterion not finite at theta = " << theta_hat << " (bracket [" << a << ", "
       << b << "], last values " << f1 << ", " << f2 << ")";
    throw NonConvergence(os.str());
  }

  LmmFit fit;
  fit.beta = opt.beta;
  fit.sigma2 = opt.sigma2;
  fit.theta = theta_hat;
  fit.tau2 = theta_hat * opt.sigma2;
  fit.reml_criterion = opt.criterion;
  fit.n_obs = n;
  fit.rank_x = rank_x;
  fit.n_groups = frame.n_groups();
  fit.factors = frame.factors;
  fit.cell_levels = frame.cell_levels;

  const Eigen::MatrixXd unit_cov = opt.ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  fit.cov_beta = fit.sigma2 * unit_cov;
  fit.se_beta = fit.cov_beta.diagonal().cwiseMax(0.0).cwiseSqrt();

  // BLUPs of the group intercepts (read-only diagnostics).
  fit.group_intercepts = Eigen::VectorXd::Zero(fit.n_groups);
  Eigen::VectorXd resid = frame.y - frame.x * fit.beta;
  for (size_t g = 0; g < suf.rows.size(); ++g) {
    double sum = 0.0;
    for (int r : suf.rows[g]) sum += resid(r);
    fit.group_intercepts(int(g)) = theta_hat / (1.0 + suf.sizes[g] * theta_hat) * sum;
  }

  // Satterthwaite preparation on the actual scale V = sigma2 I + tau2 ZZ'.
  // Per group V^-1 = (1/sigma2)(I - w J) with w = theta/(1+m theta).
  const double s2 = fit.sigma2;
  Eigen::MatrixXd s_ident = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd s_group = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd t_ii = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd t_ig = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd t_gg = Eigen::MatrixXd::Zero(p, p);
  double tr_ii = 0.0, tr_ig = 0.0, tr_gg = 0.0;

  for (size_t g = 0; g < suf.sizes.size(); ++g) {
    const double m = suf.sizes[g];
    const Span vinv{1.0 / s2, -(theta_hat / (1.0 + m * theta_hat)) / s2};
    const Span ident{1.0, 0.0};
    const Span grp{0.0, 1.0};

    auto quad = [&](const Span& mat, Eigen::MatrixXd* out) {
      out->noalias() += mat.a * suf.gram[g] + mat.b * (suf.s[g] * suf.s[g].transpose());
    };

    const Span vi_vi = vinv.mul(vinv, m);                  // V^-1 I V^-1
    const Span vi_g_vi = vinv.mul(grp, m).mul(vinv, m);    // V^-1 G V^-1
    quad(vi_vi, &s_ident);
    quad(vi_g_vi, &s_group);

    tr_ii += vi_vi.trace(m);
    tr_ig += vi_vi.mul(grp, m).trace(m);
    tr_gg += vi_g_vi.mul(grp, m).trace(m);

    quad(vi_vi.mul(vinv, m), &t_ii);                       // X'V^-3X
    quad(vi_vi.mul(grp, m).mul(vinv, m), &t_ig);           // X'V^-1 V^-1 G V^-1 X
    quad(vi_g_vi.mul(grp, m).mul(vinv, m), &t_gg);         // X'V^-1 G V^-1 G V^-1 X
  }
  fit.s_ident = s_ident;
  fit.s_group = s_group;

  const Eigen::MatrixXd& cov = fit.cov_beta;  // (X'V^-1X)^-1
  auto info_entry = [&](double tr_ab, const Eigen::MatrixXd& t_ab, const Eigen::MatrixXd& s_a,
                        const Eigen::MatrixXd& s_b) {
    const double mid = (cov * t_ab).trace();
    const double last = (cov * s_a * cov * s_b).trace();
    return 0.5 * (tr_ab - 2.0 * mid + last);
  };
  Eigen::Matrix2d info;
  info(0, 0) = info_entry(tr_ii, t_ii, s_ident, s_ident);
  info(0, 1) = info(1, 0) = info_entry(tr_ig, t_ig, s_ident, s_group);
  info(1, 1) = info_entry(tr_gg, t_gg, s_group, s_group);

  const double det = info.determinant();
  if (std::isfinite(det) && std::abs(det) > 1e-300) {
    fit.vc_cov = info.inverse();
    fit.vc_cov_valid = fit.vc_cov.allFinite();
  }
  return fit;
}

}  // namespace oip::stats
