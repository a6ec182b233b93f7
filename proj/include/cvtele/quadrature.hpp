#pragma once

// Gauss-Hermite and Gauss-Legendre nodes by Newton iteration on the
// orthonormal recurrences, plus the uniform periodic rule.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cvtele {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Nodes and weights for \int_{-inf}^{inf} e^{-x^2} f(x) dx.
inline QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
  constexpr int kMaxIter = 100;
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  double x = 0.0;
  for (int i = 0; i < half; ++i) {
    // Initial guesses for the largest roots first, then walk inward.
    if (i == 0) {
      x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      x -= 1.14 * std::pow(static_cast<double>(n), 0.426) / x;
    } else if (i == 2) {
      x = 1.86 * x - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      x = 1.91 * x - 0.91 * rule.nodes[1];
    } else {
      x = 2.0 * x - rule.nodes[static_cast<std::size_t>(i - 2)];
    }
    double dp = 0.0;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt(static_cast<double>(j - 1) / j) * p3;
      }
      dp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    if (iter == kMaxIter) throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / (dp * dp);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = rule.weights[static_cast<std::size_t>(i)];
  }
  return rule;
}

/// Nodes and weights for \int_a^b f(x) dx.
inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const double mid = 0.5 * (a + b);
  const double half_len = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = mid - half_len * x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = mid + half_len * x;
    rule.weights[static_cast<std::size_t>(i)] = half_len * w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = half_len * w;
  }
  return rule;
}

/// Equispaced nodes on [0, 2pi) with weights summing to 1 (an average, not an integral).
inline QuadratureRule periodic_uniform(int n) {
  if (n < 1) throw std::invalid_argument("periodic_uniform: need at least one node");
  QuadratureRule rule;
  for (int j = 0; j < n; ++j) {
    rule.nodes.push_back(2.0 * std::numbers::pi * j / n);
    rule.weights.push_back(1.0 / n);
  }
  return rule;
}

}  // namespace cvtele
