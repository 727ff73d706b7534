#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "eabpsk/special_functions.hpp"

namespace {

using eabpsk::reg_inc_beta;

TEST(RegIncBeta, UniformCaseIsIdentity) { EXPECT_NEAR(reg_inc_beta(0.3, 1.0, 1.0), 0.3, 1e-15); }

TEST(RegIncBeta, SymmetricAtOneHalf) { EXPECT_NEAR(reg_inc_beta(0.5, 2.0, 2.0), 0.5, 1e-15); }

TEST(RegIncBeta, BinomialTailIdentity) {
  // sum_{k=3}^{8} C(8,k) / 2^8 = 219/256
  EXPECT_NEAR(reg_inc_beta(0.5, 3.0, 6.0), 219.0 / 256.0, 1e-14);
}

TEST(RegIncBeta, Endpoints) {
  EXPECT_EQ(reg_inc_beta(0.0, 2.5, 3.5), 0.0);
  EXPECT_EQ(reg_inc_beta(1.0, 2.5, 3.5), 1.0);
}

TEST(RegIncBeta, RejectsOutOfDomain) {
  EXPECT_THROW(reg_inc_beta(-0.1, 1.0, 1.0), eabpsk::DomainError);
  EXPECT_THROW(reg_inc_beta(1.1, 1.0, 1.0), eabpsk::DomainError);
  EXPECT_THROW(reg_inc_beta(0.5, 0.0, 1.0), eabpsk::DomainError);
  EXPECT_THROW(reg_inc_beta(0.5, 1.0, -2.0), eabpsk::DomainError);
  EXPECT_THROW(reg_inc_beta(std::nan(""), 1.0, 1.0), eabpsk::DomainError);
}

TEST(RegIncBeta, MatchesBoostOnRandomArguments) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> log_shape(-1.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = std::pow(10.0, log_shape(rng));
    const double b = std::pow(10.0, log_shape(rng));
    const double x = unit(rng);
    const double expected = boost::math::ibeta(a, b, x);
    const double got = reg_inc_beta(x, a, b);
    EXPECT_NEAR(got, expected, 1e-12 + 1e-10 * expected) << "a=" << a << " b=" << b << " x=" << x;
  }
}

TEST(RegIncBeta, ComplementSumsToOne) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> shape(0.2, 200.0);
  for (int i = 0; i < 500; ++i) {
    const double a = shape(rng);
    const double b = shape(rng);
    const double x = unit(rng);
    EXPECT_NEAR(reg_inc_beta(x, a, b) + eabpsk::reg_inc_beta_complement(x, a, b), 1.0, 1e-12);
  }
}

TEST(RegIncBeta, MonotoneInX) {
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = reg_inc_beta(i / 1000.0, 40.0, 7.5);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(LogGamma, MatchesBoost) {
  for (double x : {1e-8, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 171.3, 1e4, 1e6, 4.37e6}) {
    const double expected = boost::math::lgamma(x);
    EXPECT_NEAR(eabpsk::log_gamma(x), expected, 1e-13 * std::max(1.0, std::fabs(expected)))
        << "x=" << x;
  }
}

TEST(LogGamma, IntegerFactorials) {
  double log_fact = 0.0;
  for (int n = 1; n <= 30; ++n) {
    EXPECT_NEAR(eabpsk::log_gamma(n), log_fact, 1e-13 * std::max(1.0, log_fact)) << n;
    log_fact += std::log(static_cast<double>(n));
  }
}

TEST(LogGamma, RejectsNonPositive) {
  EXPECT_THROW(eabpsk::log_gamma(0.0), eabpsk::DomainError);
  EXPECT_THROW(eabpsk::log_gamma(-1.5), eabpsk::DomainError);
}

TEST(StdNormal, ReferenceValues) {
  // 50-digit reference values
  EXPECT_NEAR(eabpsk::std_normal_cdf(1.0), 0.84134474606854294859, 1e-15);
  EXPECT_NEAR(eabpsk::std_normal_cdf(1.96), 0.97500210485177956586, 1e-15);
  EXPECT_EQ(eabpsk::std_normal_cdf(0.0), 0.5);
}

TEST(StdNormal, TailsStayAccurate) {
  EXPECT_NEAR(eabpsk::std_normal_sf(10.0) / boost::math::erfc(10.0 / std::sqrt(2.0)) * 2.0, 1.0,
              1e-13);
  EXPECT_NEAR(eabpsk::std_normal_cdf(-10.0), eabpsk::std_normal_sf(10.0), 1e-35);
}

}  // namespace
