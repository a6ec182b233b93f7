#include <cmath>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "cvtele/quadrature.hpp"

using namespace cvtele;

TEST(GaussHermite, Moments) {
  // \int x^{2k} e^{-x^2} dx = Gamma(k + 1/2)
  for (int n : {5, 20, 60}) {
    const auto r = gauss_hermite(n);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
    for (int k = 0; k < n && k <= 8; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * k);
      EXPECT_NEAR(s / std::tgamma(k + 0.5), 1.0, 1e-12) << n << " " << k;
    }
  }
}

TEST(GaussHermite, Symmetric) {
  const auto r = gauss_hermite(11);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_NEAR(r.nodes[i], -r.nodes[r.size() - 1 - i], 1e-14);
    EXPECT_NEAR(r.weights[i], r.weights[r.size() - 1 - i], 1e-14);
  }
}

TEST(GaussLegendre, PolynomialExactness) {
  const auto r = gauss_legendre(8, 0.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 15);
  EXPECT_NEAR(s, std::pow(2.0, 16) / 16.0, 1e-9);
}

TEST(PeriodicUniform, TrigonometricExactness) {
  const auto r = periodic_uniform(8);
  EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 1.0, 1e-15);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(std::cos(r.nodes[i]), 2);
  EXPECT_NEAR(s, 0.5, 1e-15);
}

TEST(Quadrature, RejectsBadSizes) {
  EXPECT_THROW(gauss_hermite(0), std::invalid_argument);
}
