#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvtele/fidelity_engine.hpp"

using namespace cvtele;
using EK = ElementaryKet;

// Reference values below come from a brute-force oracle that builds D(z) as a
// matrix exponential on a 40-photon truncated Fock space and integrates on a
// 141 x 141 trapezoid grid over [-7, 7]^2; agreement is ~1e-8.
constexpr double kOracleTol = 1e-7;

TEST(ModeIntegral, VacuumAndSinglePhoton) {
  const NoiseKernel k{2.0};
  // \int d^2z/pi e^{-a|z|^2} (1 - |z|^2)^n-type moments with a = 2
  EXPECT_NEAR(std::abs(mode_overlap_integral(EK::fock(0), EK::fock(0), EK::fock(0), EK::fock(0), k) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mode_overlap_integral(EK::fock(1), EK::fock(1), EK::fock(1), EK::fock(1), k) - 0.25), 0.0, 1e-15);
  // general delta: 1/a - 2/a^2 + 2/a^3
  const double a = 1.3;
  EXPECT_NEAR(mode_overlap_integral(EK::fock(1), EK::fock(1), EK::fock(1), EK::fock(1), NoiseKernel{0.6}).real(),
              1 / a - 2 / (a * a) + 2 / (a * a * a), 1e-14);
}

TEST(ModeIntegral, CoherentIsExactAtLowOrder) {
  // Gaussian integrand: the shifted rule is exact even with 4 points.
  const NoiseKernel k{0.7};
  const auto lo = mode_overlap_integral(EK::coherent({1.2, 0.4}), EK::coherent({-0.8, 0.1}), EK::coherent({0.3, -1}),
                                        EK::coherent({1.5, 0.2}), k, gauss_hermite(4));
  const auto hi = mode_overlap_integral(EK::coherent({1.2, 0.4}), EK::coherent({-0.8, 0.1}), EK::coherent({0.3, -1}),
                                        EK::coherent({1.5, 0.2}), k, gauss_hermite(60));
  EXPECT_NEAR(std::abs(lo - hi), 0.0, 1e-14);
}

TEST(Fidelity, SimpleInputs) {
  EXPECT_NEAR(fidelity_fixed(QubitSpec{Family::spq, 0, 1.0, 0}, NoiseKernel{2.0}).value, 0.125, 1e-15);
  // a coherent state through the channel: F = 2/(2 + delta) = 1/(1 + e^{-2r})
  for (double r : {0.0, 0.5, 1.3}) {
    const double d = 2 * std::exp(-2 * r);
    EXPECT_NEAR(fidelity_fixed(QubitSpec{Family::coherent, 1.1, 1.0, 0}, NoiseKernel{d}).value, 1 / (1 + std::exp(-2 * r)), 1e-14);
  }
}

TEST(Fidelity, OracleValues) {
  EXPECT_NEAR(fidelity_fixed(QubitSpec{Family::hqA, 1.0, 0.3, 0.7}, NoiseKernel{0.5}).value, 0.3696630765309076, kOracleTol);
  EXPECT_NEAR(fidelity_fixed(QubitSpec{Family::hqB, 0.8, 0.6, 2.0}, NoiseKernel{0.3}).value, 0.5918102092451835, kOracleTol);
  EXPECT_NEAR(fidelity_fixed(QubitSpec{Family::coherent, 1.0, 0.25, 1.0}, NoiseKernel{0.4}).value, 0.7036457836361372, kOracleTol);
  const double d = 2 * std::exp(-2.0);
  EXPECT_NEAR(fidelity_average({Family::coherent, 0.5}, NoiseKernel{d}, {}, AveragingMethod::numeric_grid).value,
              0.8475369798548664, kOracleTol);
  EXPECT_NEAR(fidelity_average({Family::hqB, 1.0}, NoiseKernel{d}).value, 0.5643039094595181, kOracleTol);
}

TEST(Fidelity, ZeroZeroOneOneAverage) {
  using EK = ElementaryKet;
  const TermDecomposition s({{1.0, Branch::first, {EK::fock(0), EK::fock(0)}}, {1.0, Branch::second, {EK::fock(1), EK::fock(1)}}},
                            0.5, 0.0);
  EXPECT_NEAR(fidelity_average(s, NoiseKernel{2.0}).value, 7.0 / 48.0, 1e-14);
}

TEST(Fidelity, IdealChannel) {
  for (auto f : kAllFamilies)
    for (double a : {0.5, 2.0}) {
      const auto r = fidelity_fixed(QubitSpec{f, a, 0.37, 2.2}, NoiseKernel{1e-8});
      EXPECT_NEAR(r.raw, 1.0, 1e-6) << to_string(f);
      EXPECT_EQ(r.status, Status::ok);
    }
}

TEST(Fidelity, DecreasesWithNoise) {
  for (auto f : kAllFamilies) {
    double prev = 1.0 + 1e-12;
    for (double d = 0.0; d <= 2.0; d += 0.1) {
      const double v = fidelity_average_auto({f, 0.9}, NoiseKernel{d}).value;
      EXPECT_LE(v, prev) << to_string(f) << " " << d;
      prev = v;
    }
  }
}

TEST(Fidelity, CatAndExpandedPathsAgree) {
  for (double a : {0.3, 0.9}) {
    const auto s = make_qubit({Family::hqB, a, 0.7, 0.4});
    EXPECT_NEAR(fidelity_fixed(s, NoiseKernel{0.6}).raw, fidelity_fixed(expand_cats(s), NoiseKernel{0.6}).raw, 1e-12);
  }
}

TEST(Averaging, MomentsMatchGrid) {
  for (auto f : {Family::spq, Family::hqA, Family::hqB, Family::singlerail})
    for (double d : {0.2, 1.5}) {
      const double m = fidelity_average({f, 0.7}, NoiseKernel{d}, {}, AveragingMethod::analytic_moments).raw;
      const double g = fidelity_average({f, 0.7}, NoiseKernel{d}, {}, AveragingMethod::numeric_grid).raw;
      EXPECT_NEAR(m, g, 1e-12) << to_string(f);
    }
  EXPECT_THROW(fidelity_average({Family::coherent, 0.5}, NoiseKernel{1.0}, {}, AveragingMethod::analytic_moments),
               std::invalid_argument);
}

TEST(Averaging, BranchGroupsSumToAverage) {
  const auto g = branch_group_contributions({Family::hqA, 0.8}, NoiseKernel{0.4});
  EXPECT_NEAR(g.total(), fidelity_average({Family::hqA, 0.8}, NoiseKernel{0.4}).raw, 1e-14);
}

TEST(Convergence, LowOrderIsFlagged) {
  QuadratureConfig q;
  q.order = 4;
  const auto r = fidelity_average_auto({Family::hqB, 2.0}, NoiseKernel{0.05}, q);
  EXPECT_EQ(r.status, Status::not_converged);
  EXPECT_GT(r.error_estimate, kConvergenceThreshold);
  const auto ok = fidelity_average_auto({Family::hqB, 2.0}, NoiseKernel{0.05});
  EXPECT_EQ(ok.status, Status::ok);
}

TEST(Convergence, OutOfRangeThrows) {
  EXPECT_THROW(detail::finish(1.2, 1e-12, Method::quadrature, 0.1), NumericalError);
  EXPECT_THROW(detail::finish(std::nan(""), 0.0, Method::quadrature, 0.1), NumericalError);
  EXPECT_DOUBLE_EQ(detail::finish(1.0 + 1e-12, 0.0, Method::quadrature, 0.1).value, 1.0);
}

TEST(MonteCarlo, AgreesAndIsDeterministic) {
  const auto s = make_qubit({Family::hqA, 0.6, 0.3, 1.0});
  const NoiseKernel k{1.0};
  const auto a = fidelity_monte_carlo(s, k, 200000, 42);
  const auto b = fidelity_monte_carlo(s, k, 200000, 42);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.error_estimate, b.error_estimate);
  EXPECT_LT(std::abs(a.raw - fidelity_fixed(s, k).raw), 4 * a.error_estimate);
  EXPECT_NE(fidelity_monte_carlo(s, k, 200000, 43).raw, a.raw);
  EXPECT_THROW(fidelity_monte_carlo(s, k, 100, 1), std::invalid_argument);
}
