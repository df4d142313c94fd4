#include "complab/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace complab::stats {

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("TestConfig: alpha must be in (0,1)");
  if (num_tests < 1) throw std::domain_error("TestConfig: num_tests must be >= 1");
  if (min_count < 1) throw std::domain_error("TestConfig: min_count must be >= 1");
}

double z_statistic(double p_hat, double p0, uint64_t n) {
  if (n == 0) throw std::domain_error("z_statistic: n must be >= 1");
  if (!(p0 > 0.0 && p0 < 1.0))
    throw std::domain_error("z_statistic: p0 must be in (0,1)");
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw std::domain_error("z_statistic: p_hat must be in [0,1]");
  return (p_hat - p0) / std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
}

double critical_p_hat(double z_star, uint64_t n) {
  if (n == 0) throw std::domain_error("critical_p_hat: n must be >= 1");
  return z_star / (2.0 * std::sqrt(static_cast<double>(n))) + 0.5;
}

double z_threshold(const TestConfig& config) {
  config.validate();
  const double per_test = config.alpha / static_cast<double>(config.num_tests);
  if (per_test >= 1.0)
    throw std::domain_error("z_threshold: alpha/num_tests must be < 1");
  return inverse_normal_cdf(1.0 - per_test);
}

namespace {

// Wichura (1988), algorithm AS241, PPND16.
double ppnd16(double p) {
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("inverse_normal_cdf: p must be in (0,1)");
  return ppnd16(p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double pmi(double p_y_given_x, double p_y) {
  if (!(p_y > 0.0)) throw std::domain_error("pmi: p_y must be > 0");
  if (p_y_given_x == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(p_y_given_x / p_y);
}

ProportionTest make_test(double p_hat, double p0, uint64_t n) {
  return ProportionTest{p_hat, p0, n, z_statistic(p_hat, p0, n)};
}

}  // namespace complab::stats
