#pragma once

// Teleportation fidelity through a Gaussian channel,
//
//   F = \int prod_i d^2 z_i / pi  chi_in(Z) chi_in(-Z) prod_i exp(-(delta/2)|z_i|^2),
//
// for one or two teleported modes. Pure inputs are short term sums, so F is a
// sum over term 4-tuples (k, l, m, n) of c_k c_l^* c_m c_n^* times a product of
// per-mode 2D integrals. Each per-mode integral is Gaussian times polynomial
// times exp(linear), which a Gauss-Hermite rule centred on the complex saddle
// point integrates exactly once the order exceeds half the polynomial degree.
//
// A Monte Carlo estimator that samples Z directly and calls chi_in pointwise
// is kept alongside as an independent check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvtele/channel.hpp"
#include "cvtele/quadrature.hpp"
#include "cvtele/qubit_states.hpp"

namespace cvtele {

/// Raised when a computed fidelity falls outside the physical range by more
/// than its own error estimate allows.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureConfig {
  int order = 60;      // Gauss-Hermite points per real axis
  int p_nodes = 32;    // Gauss-Legendre points for the p-average
  int phi_nodes = 64;  // uniform periodic points for the phi-average

  void validate() const {
    if (order < 2 || p_nodes < 2 || phi_nodes < 2) throw std::invalid_argument("quadrature: all node counts must be >= 2");
  }
};

enum class Method { closed_form, quadrature, monte_carlo };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed";
    case Method::quadrature: return "quad";
    case Method::monte_carlo: return "mc";
  }
  return "?";
}

enum class AveragingMethod { analytic_moments, numeric_grid };

enum class Status { ok, not_converged };

inline const char* to_string(Status s) { return s == Status::ok ? "ok" : "not_converged"; }

struct FidelityResult {
  double value = 0.0;  // clamped to [0, 1]
  double raw = 0.0;    // as computed
  Method method = Method::quadrature;
  double error_estimate = 0.0;
  Status status = Status::ok;

  // Echo of the inputs that produced the value; unset fields were not known here.
  std::optional<Family> family;
  double alpha = 0.0;
  double delta = 0.0;
  std::optional<double> p;
  std::optional<double> phi;
  bool averaged = false;
};

inline constexpr double kConvergenceThreshold = 1e-6;

namespace detail {

inline FidelityResult finish(double raw, double err, Method method, double delta) {
  const double tol = std::max(10.0 * err, 1e-9);
  if (!std::isfinite(raw) || raw < -tol || raw > 1.0 + tol) {
    throw NumericalError("fidelity " + std::to_string(raw) + " outside [0, 1] beyond tolerance " + std::to_string(tol));
  }
  FidelityResult r;
  r.raw = raw;
  r.value = std::clamp(raw, 0.0, 1.0);
  r.method = method;
  r.error_estimate = err;
  r.delta = delta;
  r.status = err > kConvergenceThreshold ? Status::not_converged : Status::ok;
  return r;
}

}  // namespace detail

/// \int d^2z/pi exp(-(delta/2)|z|^2) f(z) g(-z) for two factored elements.
inline cplx factored_pair_integral(const FactoredElement& f, const FactoredElement& g, NoiseKernel kernel,
                                   const QuadratureRule& gh) {
  const double a = 1.0 + 0.5 * kernel.delta;
  const double sa = std::sqrt(a);
  // g(-z) contributes exp(-u_g z - v_g zbar).
  const cplx U = f.u - g.u;
  const cplx V = f.v - g.v;
  const cplx x0 = (U + V) / (2.0 * a);
  const cplx y0 = cplx(0.0, 1.0) * (U - V) / (2.0 * a);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < gh.size(); ++i) {
    const cplx x = gh.nodes[i] / sa + x0;
    cplx row = 0.0;
    for (std::size_t j = 0; j < gh.size(); ++j) {
      const cplx y = gh.nodes[j] / sa + y0;
      const cplx z = x + cplx(0.0, 1.0) * y;
      const cplx zbar = x - cplx(0.0, 1.0) * y;
      row += gh.weights[j] * f.poly_value(z, zbar) * g.poly_value(-z, -zbar);
    }
    sum += gh.weights[i] * row;
  }
  return f.scale * g.scale * std::exp(U * V / a) * sum / (std::numbers::pi * a);
}

/// \int d^2z/pi exp(-(delta/2)|z|^2) <lbra|D(z)|lket> <rbra|D(-z)|rket>
inline cplx mode_overlap_integral(const ElementaryKet& lbra, const ElementaryKet& lket, const ElementaryKet& rbra,
                                  const ElementaryKet& rket, NoiseKernel kernel, const QuadratureRule& gh) {
  cplx sum = 0.0;
  for (const auto& f : factor_element(lbra, lket)) {
    for (const auto& g : factor_element(rbra, rket)) sum += factored_pair_integral(f, g, kernel, gh);
  }
  return sum;
}

inline cplx mode_overlap_integral(const ElementaryKet& lbra, const ElementaryKet& lket, const ElementaryKet& rbra,
                                  const ElementaryKet& rket, NoiseKernel kernel, const QuadratureConfig& quad = {}) {
  return mode_overlap_integral(lbra, lket, rbra, rket, kernel, gauss_hermite(quad.order));
}

/// The (p, phi)-independent part of the fidelity for one term structure:
/// I[k][l][m][n] = prod_i \int <l_i|D|k_i>(z) <n_i|D|m_i>(-z) kernel.
class FidelityTensor {
 public:
  FidelityTensor(const TermDecomposition& state, NoiseKernel kernel, int order) : size_(state.size()) {
    const auto gh = gauss_hermite(order);
    const auto& t = state.terms();
    values_.assign(size_ * size_ * size_ * size_, 0.0);
    for (std::size_t k = 0; k < size_; ++k)
      for (std::size_t l = 0; l < size_; ++l)
        for (std::size_t m = 0; m < size_; ++m)
          for (std::size_t n = 0; n < size_; ++n) {
            cplx v = 1.0;
            for (int i = 0; i < state.modes(); ++i) {
              v *= mode_overlap_integral(t[l].modes[i], t[k].modes[i], t[n].modes[i], t[m].modes[i], kernel, gh);
            }
            values_[index(k, l, m, n)] = v;
          }
  }

  std::size_t size() const { return size_; }
  cplx operator()(std::size_t k, std::size_t l, std::size_t m, std::size_t n) const { return values_[index(k, l, m, n)]; }

  /// F for the given (normalized) coefficients.
  double fidelity(const std::vector<cplx>& c) const {
    cplx sum = 0.0;
    for (std::size_t k = 0; k < size_; ++k)
      for (std::size_t l = 0; l < size_; ++l) {
        const cplx ckl = c[k] * std::conj(c[l]);
        for (std::size_t m = 0; m < size_; ++m)
          for (std::size_t n = 0; n < size_; ++n) sum += ckl * c[m] * std::conj(c[n]) * values_[index(k, l, m, n)];
      }
    return sum.real();
  }

 private:
  std::size_t index(std::size_t k, std::size_t l, std::size_t m, std::size_t n) const {
    return ((k * size_ + l) * size_ + m) * size_ + n;
  }

  std::size_t size_;
  std::vector<cplx> values_;
};

/// F(p, phi) for a fixed normalized input.
inline FidelityResult fidelity_fixed(const TermDecomposition& state, NoiseKernel kernel, const QuadratureConfig& quad = {}) {
  quad.validate();
  const double tol = 1e-10;
  if (std::abs(state.self_overlap() - 1.0) > tol) throw std::invalid_argument("fidelity_fixed: state is not normalized");
  const double hi = FidelityTensor(state, kernel, quad.order).fidelity(state.coefficients());
  const double lo = FidelityTensor(state, kernel, std::max(2, quad.order / 2)).fidelity(state.coefficients());
  auto r = detail::finish(hi, std::abs(hi - lo), Method::quadrature, kernel.delta);
  r.p = state.p();
  r.phi = state.phi();
  return r;
}

inline FidelityResult fidelity_fixed(const QubitSpec& spec, NoiseKernel kernel, const QuadratureConfig& quad = {}) {
  auto r = fidelity_fixed(make_qubit(spec), kernel, quad);
  r.family = spec.family;
  r.alpha = spec.alpha;
  return r;
}

namespace detail {

// E over p ~ U[0,1], phi ~ U[0,2pi) of the coefficient monomial attached to
// the 4-tuple (k, l, m, n), given each index's branch.
inline double branch_moment(Branch k, Branch l, Branch m, Branch n) {
  const int s_ket = (k == Branch::second) + (m == Branch::second);
  const int s_bra = (l == Branch::second) + (n == Branch::second);
  if (s_ket != s_bra) return 0.0;   // leftover e^{i phi (s_ket - s_bra)} averages to zero
  return s_ket == 1 ? 1.0 / 6.0 : 1.0 / 3.0;  // E[p(1-p)] or E[p^2] = E[(1-p)^2]
}

inline double average_analytic(const TermDecomposition& state, const FidelityTensor& tensor) {
  if (!state.normalization_input_independent()) {
    throw std::invalid_argument("analytic-moments averaging needs a (p, phi)-independent normalization");
  }
  const auto& t = state.terms();
  cplx first_norm = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    for (std::size_t l = 0; l < t.size(); ++l)
      if (t[k].branch == Branch::first && t[l].branch == Branch::first) {
        first_norm += t[k].amplitude * std::conj(t[l].amplitude) * state.product_overlap(l, k);
      }
  const double inv_norm_sq = 1.0 / (first_norm.real() * first_norm.real());
  cplx sum = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    for (std::size_t l = 0; l < t.size(); ++l)
      for (std::size_t m = 0; m < t.size(); ++m)
        for (std::size_t n = 0; n < t.size(); ++n) {
          const double w = branch_moment(t[k].branch, t[l].branch, t[m].branch, t[n].branch);
          if (w == 0.0) continue;
          sum += w * t[k].amplitude * std::conj(t[l].amplitude) * t[m].amplitude * std::conj(t[n].amplitude) *
                 tensor(k, l, m, n);
        }
  return sum.real() * inv_norm_sq;
}

// p is uniform on [0,1]; integrate in theta with p = (1 - cos theta)/2 so that
// sqrt(p(1-p)) = sin(theta)/2 is smooth and Gauss-Legendre converges spectrally.
// The phi-average is the uniform periodic rule.
inline double average_grid(const TermDecomposition& state, const FidelityTensor& tensor, const QuadratureConfig& quad) {
  const auto theta_rule = gauss_legendre(quad.p_nodes, 0.0, std::numbers::pi);
  const auto phi_rule = periodic_uniform(quad.phi_nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < theta_rule.size(); ++i) {
    const double th = theta_rule.nodes[i];
    const double p = 0.5 * (1.0 - std::cos(th));
    const double wp = theta_rule.weights[i] * 0.5 * std::sin(th);
    for (std::size_t j = 0; j < phi_rule.size(); ++j) {
      sum += wp * phi_rule.weights[j] * tensor.fidelity(state.coefficients_at(p, phi_rule.nodes[j]));
    }
  }
  return sum;
}

}  // namespace detail

/// F^av = (1/2pi) \int_0^1 dp \int_0^{2pi} dphi F(p, phi) for the branch
/// structure of `state`; its stored (p, phi) are ignored.
inline FidelityResult fidelity_average(const TermDecomposition& state, NoiseKernel kernel, const QuadratureConfig& quad = {},
                                       AveragingMethod method = AveragingMethod::analytic_moments) {
  quad.validate();
  if (method == AveragingMethod::analytic_moments && !state.normalization_input_independent()) {
    throw std::invalid_argument("analytic-moments averaging needs a (p, phi)-independent normalization");
  }
  auto average = [&](int order) {
    const FidelityTensor tensor(state, kernel, order);
    return method == AveragingMethod::analytic_moments ? detail::average_analytic(state, tensor)
                                                       : detail::average_grid(state, tensor, quad);
  };
  const double hi = average(quad.order);
  const double lo = average(std::max(2, quad.order / 2));
  auto r = detail::finish(hi, std::abs(hi - lo), Method::quadrature, kernel.delta);
  r.averaged = true;
  return r;
}

inline FidelityResult fidelity_average(const FamilySpec& family, NoiseKernel kernel, const QuadratureConfig& quad = {},
                                       AveragingMethod method = AveragingMethod::analytic_moments) {
  const auto state = make_qubit({family.family, family.alpha, 0.5, 0.0});
  if (method == AveragingMethod::analytic_moments && !state.normalization_input_independent()) {
    throw std::invalid_argument(std::string("analytic-moments averaging is not available for family ") +
                                to_string(family.family));
  }
  auto r = fidelity_average(state, kernel, quad, method);
  r.family = family.family;
  r.alpha = family.alpha;
  return r;
}

/// Averaging path suited to the family: analytic moments where allowed, grid otherwise.
inline FidelityResult fidelity_average_auto(const FamilySpec& family, NoiseKernel kernel, const QuadratureConfig& quad = {}) {
  const auto method = family.family == Family::coherent ? AveragingMethod::numeric_grid : AveragingMethod::analytic_moments;
  return fidelity_average(family, kernel, quad, method);
}

/// Contributions to F^av from the three branch patterns of the 4-tuple sum:
/// all indices in the first branch, all in the second, and the mixed ones.
struct BranchGroups {
  double first_diagonal = 0.0;
  double second_diagonal = 0.0;
  double cross = 0.0;

  double total() const { return first_diagonal + second_diagonal + cross; }
};

inline BranchGroups branch_group_contributions(const FamilySpec& family, NoiseKernel kernel, const QuadratureConfig& quad = {}) {
  const auto state = make_qubit({family.family, family.alpha, 0.5, 0.0});
  if (!state.normalization_input_independent()) {
    throw std::invalid_argument("branch_group_contributions: family normalization depends on (p, phi)");
  }
  const FidelityTensor tensor(state, kernel, quad.order);
  const auto& t = state.terms();
  double first_norm = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    for (std::size_t l = 0; l < t.size(); ++l)
      if (t[k].branch == Branch::first && t[l].branch == Branch::first) {
        first_norm += (t[k].amplitude * std::conj(t[l].amplitude) * state.product_overlap(l, k)).real();
      }
  BranchGroups g;
  for (std::size_t k = 0; k < t.size(); ++k)
    for (std::size_t l = 0; l < t.size(); ++l)
      for (std::size_t m = 0; m < t.size(); ++m)
        for (std::size_t n = 0; n < t.size(); ++n) {
          const double w = detail::branch_moment(t[k].branch, t[l].branch, t[m].branch, t[n].branch);
          if (w == 0.0) continue;
          const double v = (w * t[k].amplitude * std::conj(t[l].amplitude) * t[m].amplitude * std::conj(t[n].amplitude) *
                            tensor(k, l, m, n)).real() / (first_norm * first_norm);
          const int seconds = (t[k].branch == Branch::second) + (t[l].branch == Branch::second) +
                              (t[m].branch == Branch::second) + (t[n].branch == Branch::second);
          if (seconds == 0) g.first_diagonal += v;
          else if (seconds == 4) g.second_diagonal += v;
          else g.cross += v;
        }
  return g;
}

inline constexpr std::size_t kMinMonteCarloSamples = 10000;

/// Importance-sampled estimate of F: each z_i is drawn from the density
/// (a/pi) exp(-a|z|^2), a = 1 + delta/2, and the remaining factor
/// chi(Z) chi(-Z) exp(|Z|^2) / a^modes is averaged.
inline FidelityResult fidelity_monte_carlo(const TermDecomposition& state, NoiseKernel kernel, std::size_t samples,
                                           std::uint64_t seed) {
  if (samples < kMinMonteCarloSamples) throw std::invalid_argument("fidelity_monte_carlo: need at least 10^4 samples");
  const double a = 1.0 + 0.5 * kernel.delta;
  const double sigma = 1.0 / std::sqrt(2.0 * a);
  const double norm = std::pow(a, -state.modes());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const PhasePoint z1(gauss(rng), gauss(rng));
    double value = 0.0;
    if (state.modes() == 1) {
      value = (chi_in(state, z1) * chi_in(state, -z1)).real() * std::exp(std::norm(z1.z)) * norm;
    } else {
      const PhasePoint z2(gauss(rng), gauss(rng));
      value = (chi_in(state, z1, z2) * chi_in(state, -z1, -z2)).real() *
              std::exp(std::norm(z1.z) + std::norm(z2.z)) * norm;
    }
    const double d = value - mean;
    mean += d / static_cast<double>(s + 1);
    m2 += d * (value - mean);
  }
  const double variance = m2 / static_cast<double>(samples - 1);
  FidelityResult r;
  r.raw = mean;
  r.value = std::clamp(mean, 0.0, 1.0);
  r.method = Method::monte_carlo;
  r.error_estimate = std::sqrt(variance / static_cast<double>(samples));
  r.delta = kernel.delta;
  r.p = state.p();
  r.phi = state.phi();
  return r;
}

}  // namespace cvtele
