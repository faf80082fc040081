#pragma once

namespace oip::stats {

// Probability machinery behind every p-value and Tukey adjustment in this
// project. All functions are pure; accuracy notes are on the definitions.

double normal_pdf(double x);
double normal_cdf(double x);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
/// Relative accuracy ~1e-14 for moderate (a, b).
double regularized_incomplete_beta(double x, double a, double b);

double t_cdf(double x, double df);
double t_two_sided_p(double t, double df);
double f_cdf(double x, double df1, double df2);

/// CDF of the studentized range with k groups and df error degrees of
/// freedom, by double quadrature: outer over the scale (chi) distribution,
/// inner over the normal range. Absolute accuracy target 1e-6.
double studentized_range_cdf(double q, int k, double df);

/// Inverse of studentized_range_cdf in q (bisection).
double studentized_range_quantile(double p, int k, double df);

/// CDF of the range of k iid standard normals (the df -> infinity limit).
double normal_range_cdf(double w, int k);

}  // namespace oip::stats
