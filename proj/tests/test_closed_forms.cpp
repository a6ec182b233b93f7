#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cvtele/closed_forms.hpp"
#include "cvtele/fidelity_engine.hpp"

using namespace cvtele;

TEST(ClosedForms, VacuumChannelValues) {
  EXPECT_NEAR(avg_fidelity_spq(2.0), 0.125, 1e-15);
  EXPECT_NEAR(avg_fidelity_singlerail(2.0), 5.0 / 12.0, 1e-15);
  // hqA at alpha = 0 factorizes: F_singlerail * 2/(2+delta)
  EXPECT_NEAR(avg_fidelity_hqA(2.0, 0.0), 5.0 / 24.0, 1e-15);
}

TEST(ClosedForms, IdealChannel) {
  EXPECT_NEAR(avg_fidelity_spq(0.0), 1.0, 1e-15);
  EXPECT_NEAR(avg_fidelity_singlerail(0.0), 1.0, 1e-15);
  for (double a : {0.3, 0.5, 0.8, 1.0, 1.5, 2.0}) {
    EXPECT_NEAR(avg_fidelity_hqA(0.0, a, FormulaVariant::corrected), 1.0, 1e-12) << a;
    EXPECT_NEAR(avg_fidelity_hqB(0.0, a, FormulaVariant::printed), 1.0, 1e-12) << a;
    EXPECT_NEAR(avg_fidelity_hqB(0.0, a, FormulaVariant::corrected), 1.0, 1e-12) << a;
  }
  // the printed hqA exponent breaks the identity
  EXPECT_GT(std::abs(avg_fidelity_hqA(0.0, 1.0, FormulaVariant::printed) - 1.0), 1e-2);
}

TEST(ClosedForms, CorrectedFormsMatchQuadrature) {
  for (double d : {1e-6, 0.05, 0.3, 1.0, 2.0})
    for (double a : {0.3, 1.0, 2.0}) {
      const NoiseKernel k{d};
      EXPECT_NEAR(avg_fidelity_hqA(d, a), fidelity_average({Family::hqA, a}, k).raw, 1e-10);
      EXPECT_NEAR(avg_fidelity_hqB(d, a, FormulaVariant::corrected), fidelity_average({Family::hqB, a}, k).raw, 1e-10);
    }
  for (double d : {0.05, 0.7, 2.0}) {
    EXPECT_NEAR(avg_fidelity_spq(d), fidelity_average({Family::spq, 0}, NoiseKernel{d}).raw, 1e-12);
    EXPECT_NEAR(avg_fidelity_singlerail(d), fidelity_average({Family::singlerail, 0}, NoiseKernel{d}).raw, 1e-12);
  }
}

TEST(ClosedForms, PrintedHqADeviation) {
  const double d = 2 * std::exp(-2.0);
  EXPECT_GT(std::abs(avg_fidelity_hqA(d, 1.0, FormulaVariant::printed) - avg_fidelity_hqA(d, 1.0, FormulaVariant::corrected)), 1e-2);
}

TEST(ClosedForms, HqBSmallAlpha) {
  // printed form -> 1/6 at delta = 2; the |0,0>/|1,1> limit state gives 7/48
  EXPECT_NEAR(avg_fidelity_hqB(2.0, 1e-4, FormulaVariant::printed), 1.0 / 6.0, 1e-7);
  EXPECT_NEAR(avg_fidelity_hqB(2.0, 1e-4, FormulaVariant::corrected), 7.0 / 48.0, 1e-7);
  EXPECT_THROW(avg_fidelity_hqB(1.0, 0.0), std::invalid_argument);
}

TEST(ClosedForms, HqBGroupsLocalizeThePrintedError) {
  const double d = 0.5, a = 1.0;
  const auto printed = hqB_terms(d, a, FormulaVariant::printed);
  const auto g = branch_group_contributions({Family::hqB, a}, NoiseKernel{d});
  EXPECT_NEAR(printed.even_diagonal, g.first_diagonal, 1e-12);
  EXPECT_NEAR(printed.cross, g.cross, 1e-12);
  EXPECT_GT(std::abs(printed.odd_diagonal - g.second_diagonal), 1e-3);
  EXPECT_NEAR(hqB_terms(d, a, FormulaVariant::corrected).odd_diagonal, g.second_diagonal, 1e-12);
}

TEST(ClosedForms, StableAtTinyAlpha) {
  // no cancellation blow-up as alpha -> 0
  const double v1 = avg_fidelity_hqB(0.8, 1e-3, FormulaVariant::corrected);
  const double v2 = avg_fidelity_hqB(0.8, 1e-5, FormulaVariant::corrected);
  EXPECT_NEAR(v1, v2, 1e-5);
  EXPECT_TRUE(std::isfinite(avg_fidelity_hqB(0.8, 1e-8)));
}

TEST(ClosedForms, CoherentQubitPrinted) {
  EXPECT_NEAR(avg_fidelity_coherent_qubit(0.0, 0.7, 1.0, 0.0), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_THROW(avg_fidelity_coherent_qubit(0.0, 0.7, 1.0, 0.0, FormulaVariant::corrected), std::invalid_argument);
  const double d = 2 * std::exp(-2.0);
  const double printed = avg_fidelity_coherent_qubit_input_average(d, 0.5);
  const double oracle = fidelity_average({Family::coherent, 0.5}, NoiseKernel{d}, {}, AveragingMethod::numeric_grid).raw;
  EXPECT_GT(std::abs(printed - oracle), 0.1);
}

TEST(ClosedForms, Validation) {
  EXPECT_THROW(avg_fidelity_spq(-0.1), std::invalid_argument);
  EXPECT_THROW(avg_fidelity_hqA(0.1, -1.0), std::invalid_argument);
  EXPECT_THROW(parse_variant("fixed"), std::invalid_argument);
}
