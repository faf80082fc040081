#include <doctest.h>

#include <cmath>
#include <vector>

#include "oip/distributions.hpp"
#include "oip/errors.hpp"
#include "oip/inference.hpp"

using namespace oip::stats;

namespace {

// Independent quadrature oracle for the studentized range CDF: same
// definition, different numerical route (composite Simpson instead of
// Gauss-Legendre), written only for tests.
namespace oracle {

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

template <typename F>
double simpson(F&& f, double a, double b, int n) {  // n even
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  auto f = [w, k](double z) {
    const double p = Phi(z + w) - Phi(z);
    return p <= 0.0 ? 0.0 : phi(z) * std::pow(p, k - 1);
  };
  return k * simpson(f, -9.0, 9.0, 1800);
}

double srange_cdf(double q, int k, double df) {
  if (q <= 0.0) return 0.0;
  auto f = [q, k, df](double s) {
    if (s <= 0.0) return 0.0;
    const double logpdf = std::log(2.0) + 0.5 * df * std::log(0.5 * df) - std::lgamma(0.5 * df) +
                          (df - 1.0) * std::log(s) - 0.5 * df * s * s;
    return std::exp(logpdf) * range_cdf(q * s, k);
  };
  const double hi = std::sqrt((df + 12.0 * std::sqrt(2.0 * df) + 80.0) / df);
  return simpson(f, 1e-9, hi, 600);
}

double srange_quantile(double p, int k, double df) {
  double lo = 0.0, hi = 16.0;
  for (int i = 0; i < 34; ++i) {
    const double mid = 0.5 * (lo + hi);
    (srange_cdf(mid, k, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle

}  // namespace

TEST_CASE("regularized incomplete beta against closed forms") {
  // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a.
  for (double x : {0.01, 0.2, 0.5, 0.8, 0.99}) {
    for (double b : {0.5, 1.0, 2.0, 7.5, 30.0}) {
      CHECK(regularized_incomplete_beta(x, 1.0, b) ==
            doctest::Approx(1.0 - std::pow(1.0 - x, b)).epsilon(1e-12));
      CHECK(regularized_incomplete_beta(x, b, 1.0) ==
            doctest::Approx(std::pow(x, b)).epsilon(1e-12));
    }
    // symmetry: I_1/2(a, a) = 1/2
    for (double a : {0.5, 1.0, 3.0, 12.0, 100.0})
      CHECK(regularized_incomplete_beta(0.5, a, a) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
}

TEST_CASE("t cdf basics") {
  for (double df : {1.0, 5.0, 30.0, 478.0}) CHECK(t_cdf(0.0, df) == doctest::Approx(0.5));
  // symmetry
  for (double x : {0.3, 1.0, 2.5})
    for (double df : {3.0, 10.0, 100.0})
      CHECK(t_cdf(x, df) + t_cdf(-x, df) == doctest::Approx(1.0).epsilon(1e-12));
  // normal limit
  CHECK(t_cdf(1.96, 1e6) == doctest::Approx(0.975).epsilon(1e-3));
  // classical two-sided 5% critical values
  CHECK(t_cdf(2.228, 10.0) == doctest::Approx(0.975).epsilon(2e-4));
  CHECK(t_cdf(2.086, 20.0) == doctest::Approx(0.975).epsilon(2e-4));
  CHECK(t_cdf(12.706, 1.0) == doctest::Approx(0.975).epsilon(2e-4));
}

TEST_CASE("F cdf and the t-squared identity") {
  for (double t : {0.2, 1.0, 2.0, 3.5}) {
    for (double df : {4.0, 16.0, 216.0}) {
      const double lhs = f_cdf(t * t, 1.0, df);
      const double rhs = 2.0 * t_cdf(t, df) - 1.0;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
  CHECK(f_cdf(0.0, 3.0, 10.0) == 0.0);
  CHECK(f_cdf(1e9, 3.0, 10.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("studentized range: q=0 and monotonicity in q") {
  CHECK(studentized_range_cdf(0.0, 4, 12.0) == 0.0);
  for (int k : {2, 3, 6}) {
    double prev = -1.0;
    for (double q = 0.0; q <= 8.0; q += 0.4) {
      const double c = studentized_range_cdf(q, k, 10.0);
      CHECK(c >= prev - 1e-12);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      prev = c;
    }
  }
}

TEST_CASE("studentized range k=2 identity with the t distribution") {
  for (double df : {5.0, 10.0, 30.0, 120.0}) {
    for (double q = 0.25; q <= 10.0; q += 0.25) {
      const double lhs = studentized_range_cdf(q, 2, df);
      const double rhs = 2.0 * t_cdf(q / std::sqrt(2.0), df) - 1.0;
      CHECK(std::abs(lhs - rhs) < 1e-6);
    }
  }
}

TEST_CASE("studentized range increases in df toward the normal-range limit") {
  // The df-ordering holds in the upper region (it can reverse by ~1e-4 below
  // the distribution's center); convergence to the normal-range limit holds
  // everywhere.
  for (int k : {3, 6}) {
    for (double q : {3.5, 4.5, 6.0}) {
      double prev = 0.0;
      for (double df : {5.0, 10.0, 30.0, 120.0, 1000.0}) {
        const double c = studentized_range_cdf(q, k, df);
        CHECK(c >= prev - 1e-9);
        prev = c;
      }
      CHECK(std::abs(prev - normal_range_cdf(q, k)) < 2e-3);
    }
    for (double q : {1.5, 2.5}) {
      CHECK(std::abs(studentized_range_cdf(q, k, 5000.0) - normal_range_cdf(q, k)) < 2e-3);
    }
  }
}

TEST_CASE("studentized range CDF matches the independent Simpson oracle") {
  for (int k : {2, 3, 4, 6}) {
    for (double df : {5.0, 10.0, 60.0}) {
      for (double q : {1.0, 2.5, 3.877, 5.0}) {
        const double mine = studentized_range_cdf(q, k, df);
        const double ref = oracle::srange_cdf(q, k, df);
        CHECK(std::abs(mine - ref) < 1e-6);
      }
    }
  }
}

TEST_CASE("0.95 quantile for k=3, df=10 matches published tables") {
  const double q = studentized_range_quantile(0.95, 3, 10.0);
  CHECK(std::abs(q - 3.877) < 1e-3);
  const double ref = oracle::srange_quantile(0.95, 3, 10.0);
  CHECK(std::abs(q - ref) < 1e-4);
}

TEST_CASE("pearson on exactly collinear input") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto res = pearson(x, x);
  CHECK(res.r == doctest::Approx(1.0));
  CHECK(res.df == 1.0);
}

namespace {

// Two zero-mean orthogonal unit patterns of length n (n divisible by 4);
// x = u, y = r u + sqrt(1-r^2) v has sample correlation exactly r.
std::pair<std::vector<double>, std::vector<double>> correlated_pair(int n, double r) {
  std::vector<double> x(static_cast<size_t>(n));
  std::vector<double> y(static_cast<size_t>(n));
  const double s = std::sqrt(1.0 - r * r);
  for (int i = 0; i < n; ++i) {
    const double u = (i % 2 == 0) ? 1.0 : -1.0;
    const double v = (i % 4 < 2) ? 1.0 : -1.0;
    x[size_t(i)] = u;
    y[size_t(i)] = r * u + s * v;
  }
  return {x, y};
}

}  // namespace

TEST_CASE("pearson reproduces the published correlation statistics") {
  {
    auto [x, y] = correlated_pair(480, 0.215);
    const auto res = pearson(x, y);
    CHECK(res.r == doctest::Approx(0.215).epsilon(1e-12));
    CHECK(res.n == 480);
    CHECK(res.df == 478.0);
    CHECK(std::abs(res.t - 4.804) < 0.01);
    CHECK(std::abs(res.ci_low - 0.128) < 0.002);
    CHECK(std::abs(res.ci_high - 0.298) < 0.002);
  }
  {
    auto [x, y] = correlated_pair(480, -0.060);
    const auto res = pearson(x, y);
    CHECK(std::abs(res.t - (-1.31)) < 0.01);
    CHECK(std::abs(res.p - 0.190) < 0.005);
    CHECK(res.ci_low < -0.060);
    CHECK(res.ci_high > -0.060);
  }
}

TEST_CASE("pearson degenerate input") {
  CHECK_THROWS_AS(pearson({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), oip::DegenerateInput);
  CHECK_THROWS_AS(pearson({1.0, 2.0}, {1.0, 2.0}), oip::DegenerateInput);
}
