#include <cmath>

#include <gtest/gtest.h>

#include "cvtele/channel.hpp"

using namespace cvtele;

TEST(Channel, TmsvCovariance) {
  const auto cov = tmsv_covariance(1.0);
  EXPECT_NEAR(cov.eta, 0.5 * std::cosh(2.0), 1e-15);
  EXPECT_NEAR(cov.c, 0.5 * std::sinh(2.0), 1e-15);
  EXPECT_TRUE(cov.physical());
  EXPECT_NEAR(cov.eta * cov.eta - cov.c * cov.c, 0.25, 1e-13);  // pure state
}

TEST(Channel, LossyCovarianceValues) {
  const auto cov = apply_symmetric_loss(tmsv_covariance(1.0), 0.5);
  EXPECT_NEAR(cov.eta, 1.1905489227709078, 1e-13);
  EXPECT_NEAR(cov.c, 0.9067151019617548, 1e-13);
  EXPECT_NEAR(noise_kernel(cov).delta, 1.1353352832366128, 1e-13);
  EXPECT_TRUE(cov.physical());
}

TEST(Channel, DeltaLimits) {
  EXPECT_DOUBLE_EQ(noise_kernel(ChannelSpec{0.0, 0.0}).delta, 2.0);
  EXPECT_DOUBLE_EQ(noise_kernel(ChannelSpec{1.7, 1.0}).delta, 2.0);
  EXPECT_NEAR(noise_kernel(ChannelSpec{1.0, 0.0}).delta, 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_LT(noise_kernel(ChannelSpec{20.0, 0.0}).delta, 1e-16);
}

TEST(Channel, CovariancePathMatchesClosedDelta) {
  for (double r : {0.0, 0.3, 1.0, 2.5})
    for (double R : {0.0, 0.05, 0.4, 0.9, 1.0})
      EXPECT_NEAR(noise_kernel(apply_symmetric_loss(tmsv_covariance(r), R)).delta, noise_kernel(ChannelSpec{r, R}).delta, 1e-12);
}

TEST(Channel, DeltaMonotone) {
  double prev = 3.0;
  for (double r = 0.0; r <= 3.0; r += 0.1) {
    const double d = noise_kernel(ChannelSpec{r, 0.0}).delta;
    EXPECT_LT(d, prev);
    prev = d;
  }
  prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    const double d = noise_kernel(ChannelSpec{1.5, 0.05 * i}).delta;
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(Channel, LossComposes) {
  // two beam splitters of transmissivity T1, T2 act as one of T1 T2
  const auto once = apply_symmetric_loss(apply_symmetric_loss(tmsv_covariance(1.2), 0.3), 0.5);
  const auto twice = apply_symmetric_loss(tmsv_covariance(1.2), 1.0 - 0.7 * 0.5);
  EXPECT_NEAR(once.eta, twice.eta, 1e-14);
  EXPECT_NEAR(once.c, twice.c, 1e-14);
}

TEST(Channel, Validation) {
  EXPECT_THROW(noise_kernel(ChannelSpec{-0.1, 0.0}), std::invalid_argument);
  EXPECT_THROW(noise_kernel(ChannelSpec{1.0, 1.5}), std::invalid_argument);
  EXPECT_THROW(noise_kernel(CovarianceMatrix{0.5, 0.3}), std::invalid_argument);
  EXPECT_THROW(apply_symmetric_loss(tmsv_covariance(1.0), -0.2), std::invalid_argument);
}

TEST(Channel, KernelFactor) {
  const NoiseKernel k{0.5};
  EXPECT_NEAR(k.factor(2.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(k.beta(), 0.4, 1e-15);
}
