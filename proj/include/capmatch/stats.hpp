#pragma once

#include <span>
#include <vector>

namespace capmatch {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);

// Regularized incomplete beta function I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double dof);

// Welch's unequal-variance t-test of H1: mean(a) > mean(b).
struct WelchResult {
  double t_statistic = 0.0;
  double dof = 0.0;
  double p_one_tailed = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};
WelchResult welch_one_tailed(std::span<const double> a, std::span<const double> b);

// Sorted copy of the samples: the empirical CDF jumps at these points.
std::vector<double> ecdf_points(std::span<const double> xs);

}  // namespace capmatch
