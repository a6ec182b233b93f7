#pragma once

// Closed-form average fidelities as published, plus the corrected forms where
// a published expression fails a consistency check. Every function takes the
// noise strength delta of the per-mode kernel.
//
// "printed" always means the expression evaluated exactly as written;
// "corrected" is only offered where a specific check forces a change, and the
// note() of each variant says which.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cvtele/channel.hpp"
#include "cvtele/quadrature.hpp"

namespace cvtele {

enum class FormulaVariant { printed, corrected };

inline const char* to_string(FormulaVariant v) { return v == FormulaVariant::printed ? "printed" : "corrected"; }

inline FormulaVariant parse_variant(const std::string& s) {
  if (s == "printed") return FormulaVariant::printed;
  if (s == "corrected") return FormulaVariant::corrected;
  throw std::invalid_argument("unknown formula variant '" + s + "'");
}

namespace notes {
inline constexpr const char* kHqACorrected =
    "f(alpha) = 8 alpha^2/(2+delta) instead of 8 alpha^2/(2+delta)^4; the printed power breaks F(delta=0) = 1";
inline constexpr const char* kHqBCorrected =
    "odd-cat diagonal group carries the Fock-1 mode factor (4+delta^2)/(2+delta)^2; the printed form uses the "
    "vacuum-mode factor for it and disagrees with the quadrature for every delta > 0";
}  // namespace notes

inline void check_delta(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("closed form: delta must be finite and >= 0");
}

/// Dual-rail single-photon qubit: 4[(1-2b)^2 + 4b^2]/(2+delta)^2, b = 1/(2+delta).
inline double avg_fidelity_spq(double delta) {
  check_delta(delta);
  const double s = 2.0 + delta;
  const double b = 1.0 / s;
  return 4.0 * ((1.0 - 2.0 * b) * (1.0 - 2.0 * b) + 4.0 * b * b) / (s * s);
}

/// Hybrid qubit of type A (single photon entangled with |+/-alpha>).
inline double avg_fidelity_hqA(double delta, double alpha, FormulaVariant variant = FormulaVariant::corrected) {
  check_delta(delta);
  if (!(alpha >= 0.0)) throw std::invalid_argument("avg_fidelity_hqA: alpha must be >= 0");
  const double s = 2.0 + delta;
  const double a2 = alpha * alpha;
  const double f = variant == FormulaVariant::printed ? 8.0 * a2 / std::pow(s, 4) : 8.0 * a2 / s;
  const double bracket = s * s + (4.0 + delta * delta) + s * (delta * std::exp(-f) + 2.0 * std::exp(-4.0 * a2 + f));
  return 4.0 / (3.0 * std::pow(s, 4)) * bracket;
}

/// hqB contributions split by branch pattern of the 4-tuple sum, so a
/// disagreement with the quadrature can be localized.
struct HqBTerms {
  double even_diagonal = 0.0;  // terms with 1/N+^2
  double odd_diagonal = 0.0;   // terms with 1/N-^2
  double cross = 0.0;          // terms with 1/(N+ N-)

  double total() const { return even_diagonal + odd_diagonal + cross; }
};

/// Hybrid qubit of type B (single photon entangled with even/odd cats), with
/// N+/- = 2(1 +/- e^{-2 alpha^2}) as printed. The grouping
///
///   [(1+e^{-4a^2}) + (e^{-8a^2/(2+d)} + e^{-4 d a^2/(2+d)})] -/+ 4 e^{-2a^2}
///
/// is rewritten with expm1/sinh so that alpha -> 0 keeps full precision; the
/// value is algebraically identical to the printed expression.
inline HqBTerms hqB_terms(double delta, double alpha, FormulaVariant variant = FormulaVariant::printed) {
  check_delta(delta);
  if (!(alpha > 0.0)) throw std::invalid_argument("avg_fidelity_hqB: alpha must be > 0 (use the spq limit at 0)");
  const double s = 2.0 + delta;
  const double a2 = alpha * alpha;
  const double pref = 8.0 / (3.0 * s * s);
  const double em2 = std::exp(-2.0 * a2);
  const double n_plus = 2.0 * (1.0 + em2);
  const double n_minus = -2.0 * std::expm1(-2.0 * a2);
  // Exponents 8a^2/(2+d) and 4 d a^2/(2+d) are 2a^2 +/- h.
  const double h = 2.0 * a2 * (2.0 - delta) / s;
  const double sum_pair = std::exp(-8.0 * a2 / s) + std::exp(-4.0 * delta * a2 / s);
  const double bracket_plus = (1.0 + std::exp(-4.0 * a2)) + sum_pair + 4.0 * em2;
  const double sh = std::sinh(0.5 * h);
  const double bracket_minus = std::expm1(-2.0 * a2) * std::expm1(-2.0 * a2) + 4.0 * em2 * sh * sh;
  const double cross_bracket = -std::expm1(-4.0 * a2) + 2.0 * ((2.0 - delta) / s) * em2 * std::sinh(h);

  HqBTerms t;
  t.even_diagonal = pref * bracket_plus / (n_plus * n_plus);
  t.odd_diagonal = pref * bracket_minus / (n_minus * n_minus);
  t.cross = pref * cross_bracket / (n_plus * n_minus);
  if (variant == FormulaVariant::corrected) t.odd_diagonal *= (4.0 + delta * delta) / (s * s);
  return t;
}

inline double avg_fidelity_hqB(double delta, double alpha, FormulaVariant variant = FormulaVariant::printed) {
  return hqB_terms(delta, alpha, variant).total();
}

/// Single-rail qubit sqrt(p)|0> + sqrt(1-p)e^{i phi}|1> through one TMSV.
inline double avg_fidelity_singlerail(double delta) {
  check_delta(delta);
  const double s = 2.0 + delta;
  return 2.0 / (3.0 * s) * (2.0 + (4.0 + delta * delta) / (s * s));
}

/// Coherent-state qubit expression as printed. It depends on (p, phi) and
/// carries a 1/pi prefactor; N = 1 + 2 sqrt(p(1-p)) e^{-2 alpha^2} cos(phi)
/// enters squared. There is no corrected closed form; the numeric-grid
/// average from the engine is the reference.
inline double avg_fidelity_coherent_qubit(double delta, double alpha, double p, double phi,
                                          FormulaVariant variant = FormulaVariant::printed) {
  check_delta(delta);
  if (variant == FormulaVariant::corrected) {
    throw std::invalid_argument("coherent qubit: no corrected closed form; use the numeric-grid average");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("avg_fidelity_coherent_qubit: alpha must be > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("avg_fidelity_coherent_qubit: p must lie in [0, 1]");
  const double s = 2.0 + delta;
  const double a2 = alpha * alpha;
  const double root = std::sqrt(p * (1.0 - p));
  const double N = 1.0 + 2.0 * root * std::exp(-2.0 * a2) * std::cos(phi);
  const double bracket = p * p + (1.0 - p) * (1.0 - p) + 4.0 * root * std::exp(-a2) * std::cos(phi) +
                         2.0 * p * (1.0 - p) *
                             (std::exp(-8.0 * a2 / s) + std::exp(-4.0 * a2) * std::cos(2.0 * phi) +
                              std::exp(-4.0 * delta * a2 / s));
  return 2.0 / (std::numbers::pi * N * N * s) * bracket;
}

/// The printed coherent-qubit expression averaged over p ~ U[0,1], phi ~ U[0,2pi).
inline double avg_fidelity_coherent_qubit_input_average(double delta, double alpha, int p_nodes = 32, int phi_nodes = 64) {
  const auto theta_rule = gauss_legendre(p_nodes, 0.0, std::numbers::pi);
  const auto phi_rule = periodic_uniform(phi_nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < theta_rule.size(); ++i) {
    const double th = theta_rule.nodes[i];
    const double p = 0.5 * (1.0 - std::cos(th));
    const double wp = theta_rule.weights[i] * 0.5 * std::sin(th);
    for (std::size_t j = 0; j < phi_rule.size(); ++j) {
      sum += wp * phi_rule.weights[j] * avg_fidelity_coherent_qubit(delta, alpha, p, phi_rule.nodes[j]);
    }
  }
  return sum;
}

}  // namespace cvtele
