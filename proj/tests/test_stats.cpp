#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "complab/rng.hpp"
#include "complab/stats.hpp"

using namespace complab;
using namespace complab::stats;

TEST_CASE("z_statistic matches hand arithmetic") {
  CHECK(z_statistic(0.5, 0.5, 100) == doctest::Approx(0.0));
  CHECK(z_statistic(0.6, 0.5, 100) == doctest::Approx(2.0));
  // 0.5 / sqrt(0.25/20), frozen from arbitrary-precision arithmetic
  CHECK(z_statistic(1.0, 0.5, 20) == doctest::Approx(4.4721359549995793).epsilon(1e-10));
}

TEST_CASE("z_statistic domain errors") {
  CHECK_THROWS_AS(z_statistic(0.5, 0.5, 0), std::domain_error);
  CHECK_THROWS_AS(z_statistic(0.5, 0.0, 10), std::domain_error);
  CHECK_THROWS_AS(z_statistic(0.5, 1.0, 10), std::domain_error);
  CHECK_THROWS_AS(z_statistic(1.5, 0.5, 10), std::domain_error);
}

TEST_CASE("critical_p_hat") {
  CHECK(critical_p_hat(0.0, 100) == doctest::Approx(0.5));
  CHECK(critical_p_hat(2.0, 100) == doctest::Approx(0.6));
  CHECK(critical_p_hat(4.0, 400) == doctest::Approx(0.6));
  CHECK_THROWS_AS(critical_p_hat(1.0, 0), std::domain_error);
}

TEST_CASE("round trip z -> p_hat -> z") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    // keep z / (2 sqrt(n)) inside (-0.5, 0.5) so the critical p_hat is valid
    const uint64_t n = 100 + rng.next_below(100000);
    const double z = -9.0 + 18.0 * rng.next_double();
    const double back = z_statistic(critical_p_hat(z, n), 0.5, n);
    CHECK(back == doctest::Approx(z).epsilon(1e-9));
  }
}

TEST_CASE("z_statistic monotone in p_hat and scales as sqrt(n)") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const uint64_t n = 1 + rng.next_below(10000);
    const double p0 = 0.05 + 0.9 * rng.next_double();
    const double a = rng.next_double(), b = rng.next_double();
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (lo == hi) continue;
    CHECK(z_statistic(lo, p0, n) < z_statistic(hi, p0, n));
    CHECK(z_statistic(hi, p0, 4 * n) ==
          doctest::Approx(2.0 * z_statistic(hi, p0, n)).epsilon(1e-12));
  }
}

TEST_CASE("inverse_normal_cdf frozen quantiles") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.9599639845400545).epsilon(1e-9));
  CHECK(inverse_normal_cdf(0.999999) == doctest::Approx(4.753424308822899).epsilon(1e-9));
  CHECK(inverse_normal_cdf(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-9));
  CHECK(inverse_normal_cdf(0.0001) == doctest::Approx(-3.7190164854556806).epsilon(1e-9));
  CHECK(inverse_normal_cdf(1e-9) == doctest::Approx(-5.997807015007687).epsilon(1e-9));
  CHECK(inverse_normal_cdf(0.3) == doctest::Approx(-0.5244005127080407).epsilon(1e-9));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("forward CDF recovers p from the quantile") {
  Rng rng(13);
  for (int i = 0; i < 10000; ++i) {
    // log-uniform over (1e-9, 1-1e-9), hitting both tails
    const double u = rng.next_double();
    double p;
    if (u < 0.5)
      p = std::pow(10.0, -9.0 * rng.next_double());
    else
      p = 1.0 - std::pow(10.0, -9.0 * rng.next_double());
    p = std::min(std::max(p, 1e-9), 1.0 - 1e-9);
    CHECK(normal_cdf(inverse_normal_cdf(p)) == doctest::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("z_threshold frozen values and monotonicity") {
  CHECK(z_threshold({0.5, 1, 20}) == doctest::Approx(0.0));
  CHECK(z_threshold({0.01, 1, 20}) == doctest::Approx(2.3263478740408411).epsilon(1e-6));
  // alpha = 0.01 over 28000 tests, frozen from a high-precision oracle
  CHECK(z_threshold({0.01, 28000, 20}) == doctest::Approx(4.9574386911264145).epsilon(1e-6));

  double prev = -100.0;
  for (uint64_t m : {1ull, 10ull, 100ull, 1000ull, 28000ull, 1000000ull}) {
    const double z = z_threshold({0.01, m, 20});
    CHECK(z > prev);
    prev = z;
  }
  CHECK(z_threshold({0.05, 100, 20}) < z_threshold({0.01, 100, 20}));
  CHECK_THROWS_AS(z_threshold({0.9999, 0, 20}), std::domain_error);
}

TEST_CASE("pmi") {
  CHECK(pmi(0.5, 0.5) == doctest::Approx(0.0));
  CHECK(pmi(1.0, 0.5) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(pmi(0.25, 0.5) == doctest::Approx(-0.6931471805599453).epsilon(1e-12));
  CHECK(std::isinf(pmi(0.0, 0.5)));
  CHECK(pmi(0.0, 0.5) < 0);
  CHECK_THROWS_AS(pmi(0.5, 0.0), std::domain_error);
}

TEST_CASE("TestConfig validation") {
  CHECK_THROWS_AS((TestConfig{0.0, 1, 20}.validate()), std::domain_error);
  CHECK_THROWS_AS((TestConfig{1.0, 1, 20}.validate()), std::domain_error);
  CHECK_THROWS_AS((TestConfig{0.01, 0, 20}.validate()), std::domain_error);
  CHECK_THROWS_AS((TestConfig{0.01, 1, 0}.validate()), std::domain_error);
  CHECK_NOTHROW((TestConfig{0.01, 28000, 20}.validate()));
}
