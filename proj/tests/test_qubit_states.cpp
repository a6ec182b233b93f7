#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "cvtele/qubit_states.hpp"

using namespace cvtele;

namespace {

std::vector<PhasePoint> sample_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<PhasePoint> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(g(rng), g(rng));
  return pts;
}

cplx chi(const TermDecomposition& s, PhasePoint a, PhasePoint b) {
  return s.modes() == 1 ? chi_in(s, a) : chi_in(s, a, b);
}

}  // namespace

TEST(Qubit, Normalized) {
  for (auto f : kAllFamilies)
    for (double a : {0.3, 1.0, 2.0})
      for (double p : {0.0, 0.2, 0.5, 1.0})
        for (double phi : {0.0, 1.3, 3.14159}) {
          const auto s = make_qubit({f, a, p, phi});
          EXPECT_NEAR(s.self_overlap(), 1.0, 1e-12) << to_string(f);
          EXPECT_NEAR(std::abs(chi(s, {0, 0}, {0, 0}) - 1.0), 0.0, 1e-12);
        }
}

TEST(Qubit, CharacteristicFunctionIsHermitianAndBounded) {
  const auto pts = sample_points(40, 11);
  for (auto f : kAllFamilies) {
    const auto s = make_qubit({f, 0.8, 0.35, 2.1});
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const cplx v = chi(s, pts[i], pts[i + 1]);
      const cplx w = chi(s, -pts[i], -pts[i + 1]);
      EXPECT_NEAR(std::abs(w - std::conj(v)), 0.0, 1e-13) << to_string(f);
      EXPECT_LE(std::abs(v), 1.0 + 1e-12);
    }
  }
}

TEST(Qubit, CoherentQubitNormalization) {
  // |sqrt(1/2)|a> + sqrt(1/2)|-a>|^2 = 1 + e^{-2a^2}; 1.60653 at a = 0.5
  const auto s = make_qubit({Family::coherent, 0.5, 0.5, 0.0});
  EXPECT_NEAR(s.quadratic_form(s.raw_coefficients_at(0.5, 0.0)), 1.0 + std::exp(-0.5), 1e-14);
  EXPECT_NEAR(1.0 + std::exp(-0.5), 1.60653066, 1e-8);
  EXPECT_FALSE(s.normalization_input_independent());
  EXPECT_TRUE(make_qubit({Family::hqA, 0.5, 0.5, 0.0}).normalization_input_independent());
}

TEST(Cat, CoefficientsAndLimits) {
  const auto even = cat_state_terms(1.0, Parity::even);
  EXPECT_NEAR(even[0].first.real(), 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0))), 1e-15);
  EXPECT_NEAR(even[0].first.real(), 0.66362, 1e-5);
  using EK = ElementaryKet;
  EXPECT_NEAR(std::abs(ket_overlap(EK::fock(0), EK::cat(1e-4, Parity::even))), 1.0, 1e-7);
  EXPECT_NEAR(std::abs(ket_overlap(EK::fock(1), EK::cat(1e-4, Parity::odd))), 1.0, 1e-7);
  EXPECT_NEAR(std::abs(ket_overlap(EK::cat(0.7, Parity::even), EK::cat(0.7, Parity::odd))), 0.0, 1e-15);
  EXPECT_THROW(EK::cat(0.0, Parity::odd), std::invalid_argument);
  EXPECT_THROW(cat_state_terms(0.0, Parity::odd), std::invalid_argument);
}

TEST(Cat, ReducedElementsMatchExpansion) {
  const auto pts = sample_points(20, 5);
  for (double a : {0.2, 0.45, 0.8, 1.5}) {
    const auto s = make_qubit({Family::hqB, a, 0.3, 0.9});
    const auto e = expand_cats(s);
    EXPECT_EQ(e.size(), 4u);
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
      EXPECT_NEAR(std::abs(chi_in(s, pts[i], pts[i + 1]) - chi_in(e, pts[i], pts[i + 1])), 0.0, 1e-12) << a;
  }
}

TEST(Cat, HqBSmallAlphaTendsToZeroZeroOneOne) {
  // even cat -> |0>, odd cat -> |1>: hqB becomes sqrt(p)|0,0> + sqrt(1-p) e^{i phi}|1,1>
  using EK = ElementaryKet;
  const TermDecomposition limit({{1.0, Branch::first, {EK::fock(0), EK::fock(0)}}, {1.0, Branch::second, {EK::fock(1), EK::fock(1)}}},
                                0.4, 0.6);
  const auto s = make_qubit({Family::hqB, 1e-4, 0.4, 0.6});
  for (const auto& z : sample_points(20, 9)) EXPECT_NEAR(std::abs(chi_in(s, z, -z) - chi_in(limit, z, -z)), 0.0, 1e-6);
  // and it is not the dual-rail qubit
  const auto spq = make_qubit({Family::spq, 0.0, 0.4, 0.6});
  EXPECT_GT(std::abs(chi_in(s, {0.5, 0}, PhasePoint(0.3, 0)) - chi_in(spq, {0.5, 0}, PhasePoint(0.3, 0))), 1e-2);
}

TEST(Qubit, HqAAtAlphaZeroIsSingleRailTimesVacuum) {
  const auto s = make_qubit({Family::hqA, 0.0, 0.3, 1.0});
  const auto sr = make_qubit({Family::singlerail, 0.0, 0.3, 1.0});
  for (const auto& z : sample_points(10, 3))
    EXPECT_NEAR(std::abs(chi_in(s, z, z) - chi_in(sr, z) * std::exp(-0.5 * std::norm(z.z))), 0.0, 1e-14);
}

TEST(Qubit, Parsing) {
  EXPECT_EQ(parse_family("hqA"), Family::hqA);
  EXPECT_EQ(parse_family("single-rail"), Family::singlerail);
  EXPECT_THROW(parse_family("hqC"), std::invalid_argument);
  EXPECT_EQ(mode_count(Family::coherent), 1);
  EXPECT_EQ(mode_count(Family::hqB), 2);
}

TEST(Qubit, Validation) {
  EXPECT_THROW(make_qubit({Family::spq, 0.0, 1.2, 0.0}), std::invalid_argument);
  EXPECT_THROW(make_qubit({Family::hqA, -1.0, 0.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(make_qubit({Family::coherent, 0.0, 0.5, 0.0}), std::invalid_argument);
  const auto s = make_qubit({Family::spq, 0.0, 0.5, 0.0});
  EXPECT_THROW(chi_in(s, {0.1, 0}), std::invalid_argument);
}
