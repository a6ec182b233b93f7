#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "cvtele/special_functions.hpp"

using namespace cvtele;

TEST(Laguerre, KnownValues) {
  EXPECT_DOUBLE_EQ(laguerre_assoc(0, 3, 0.7), 1.0);
  EXPECT_NEAR(laguerre_assoc(1, 0, 0.5), 0.5, 1e-15);
  // L_2^(1)(x) = (x^2 - 6x + 6)/2
  EXPECT_NEAR(laguerre_assoc(2, 1, 0.5), 1.625, 1e-15);
  // L_3(x) = (-x^3 + 9x^2 - 18x + 6)/6 at x = 2
  EXPECT_NEAR(laguerre_assoc(3, 0, 2.0), (-8.0 + 36.0 - 36.0 + 6.0) / 6.0, 1e-14);
}

TEST(Laguerre, RejectsNegativeIndex) {
  EXPECT_THROW(laguerre_assoc(-1, 0, 1.0), std::invalid_argument);
  EXPECT_THROW(laguerre_assoc(1, -1, 1.0), std::invalid_argument);
}

TEST(FockElements, ClosedFormsForLowIndices) {
  const cplx z(0.3, -0.4);
  const double g = std::exp(-0.5 * std::norm(z));
  EXPECT_NEAR(std::abs(disp_elem_fock(0, 0, z) - g), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(disp_elem_fock(1, 0, z) - z * g), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(disp_elem_fock(0, 1, z) + std::conj(z) * g), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(disp_elem_fock(1, 1, z) - (1.0 - std::norm(z)) * g), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(disp_elem_fock(0, 1, cplx(0.5, 0)) - (-0.5 * std::exp(-0.125))), 0.0, 1e-15);
}

TEST(FockElements, ConjugationIdentity) {
  // <m|D(z)|n>^* = <n|D(-z)|m>
  const cplx z(0.7, 1.1);
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; n <= 6; ++n)
      EXPECT_NEAR(std::abs(std::conj(disp_elem_fock(m, n, z)) - disp_elem_fock(n, m, -z)), 0.0, 1e-13) << m << "," << n;
}

TEST(FockElements, UnitarityRowSum) {
  // sum_m |<m|D(z)|0>|^2 = 1; with |z|^2 = 0.5 the tail beyond m = 30 is negligible
  const cplx z(0.5, 0.5);
  double sum = 0.0;
  for (int m = 0; m <= kMaxFockIndex; ++m) sum += std::norm(disp_elem_fock(m, 0, z));
  EXPECT_NEAR(sum, 1.0, 1e-14);
  sum = 0.0;
  for (int m = 0; m <= kMaxFockIndex; ++m) sum += std::norm(disp_elem_fock(m, 2, z));
  EXPECT_NEAR(sum, 1.0, 1e-13);
}

TEST(FockElements, OutOfRange) {
  EXPECT_THROW(disp_elem_fock(31, 0, cplx(0.1, 0)), std::out_of_range);
  EXPECT_THROW(detail::factorial(31), std::out_of_range);
}

TEST(CoherentElements, DisplacementShiftsTheKet) {
  // D(z)|g> = e^{(z g^* - z^* g)/2} |g + z>, so <g+z|D(z)|g> is a pure phase.
  const cplx g(0.4, -0.2), z(-0.3, 0.9);
  const cplx v = disp_elem_coherent(g + z, g, z);
  EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
  EXPECT_NEAR(std::arg(v), std::imag(z * std::conj(g)), 1e-14);
  EXPECT_NEAR(std::abs(disp_elem_coherent(g, g, cplx(0, 0)) - 1.0), 0.0, 1e-15);
}

TEST(CoherentElements, OverlapModulus) {
  const cplx b(1.0, 0.5), g(-0.2, 0.3);
  EXPECT_NEAR(std::abs(coherent_overlap(b, g)), std::exp(-0.5 * std::norm(b - g)), 1e-15);
}

TEST(MixedElements, MatchFockExpansionOfCoherentState) {
  // <n|D(z)|g> = sum_m <n|D(z)|m><m|g>
  const cplx g(0.6, -0.3), z(0.2, 0.5);
  for (int n = 0; n <= 3; ++n) {
    cplx sum = 0.0;
    for (int m = 0; m <= kMaxFockIndex; ++m) {
      const cplx cm = std::exp(-0.5 * std::norm(g)) * std::pow(g, m) / std::sqrt(detail::factorial(m));
      sum += disp_elem_fock(n, m, z) * cm;
    }
    EXPECT_NEAR(std::abs(disp_elem_fock_coherent(n, g, z) - sum), 0.0, 1e-13) << n;
    // <b|D(z)|n> = <n|D(-z)|b>^*
    EXPECT_NEAR(std::abs(disp_elem_coherent_fock(g, n, z) - std::conj(disp_elem_fock_coherent(n, g, -z))), 0.0, 1e-14);
  }
}
