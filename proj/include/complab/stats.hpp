#pragma once

#include <cstdint>

namespace complab::stats {

// One-sided (greater) binomial proportion test settings.
struct TestConfig {
  double alpha = 0.01;
  uint64_t num_tests = 1;     // Bonferroni family size
  uint64_t min_count = 20;    // floor for the normal approximation
  void validate() const;
};

struct ProportionTest {
  double p_hat = 0.0;
  double p0 = 0.5;
  uint64_t n = 0;
  double z = 0.0;
};

// z = (p_hat - p0) / sqrt(p0 (1 - p0) / n)
double z_statistic(double p_hat, double p0, uint64_t n);

// Inverse of z_statistic at p0 = 0.5: p_hat = z / (2 sqrt(n)) + 1/2.
double critical_p_hat(double z_star, uint64_t n);

// One-sided Bonferroni-corrected threshold: Phi^-1(1 - alpha / num_tests).
double z_threshold(const TestConfig& config);

// Standard normal quantile (Wichura's AS241 rational approximation,
// relative accuracy ~1e-15).  Throws std::domain_error outside (0, 1).
double inverse_normal_cdf(double p);

// Standard normal CDF.
double normal_cdf(double x);

// log(p_y_given_x / p_y).  Returns -infinity when p_y_given_x == 0;
// exporters render that as "undefined".
double pmi(double p_y_given_x, double p_y);

ProportionTest make_test(double p_hat, double p0, uint64_t n);

}  // namespace complab::stats
