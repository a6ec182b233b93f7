#pragma once

// Displacement-operator matrix elements in the Fock and coherent bases.
//
// D(z) = exp(z a^dag - z^* a). The factored forms used by the quadrature
// (FactoredElement in qubit_states.hpp) evaluate the polynomial parts here
// with z and zbar as independent complex variables.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace cvtele {

using cplx = std::complex<double>;

/// A phase-space displacement argument.
struct PhasePoint {
  cplx z{};

  constexpr PhasePoint() = default;
  constexpr PhasePoint(cplx value) : z(value) {}
  constexpr PhasePoint(double re, double im) : z(re, im) {}

  bool finite() const { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
  PhasePoint operator-() const { return PhasePoint(-z); }
};

namespace detail {

inline constexpr int kFactorialTableSize = 31;

inline constexpr std::array<double, kFactorialTableSize> kFactorials = [] {
  std::array<double, kFactorialTableSize> f{};
  f[0] = 1.0;
  for (int i = 1; i < kFactorialTableSize; ++i) f[i] = f[i - 1] * i;
  return f;
}();

inline double factorial(int n) {
  if (n < 0 || n >= kFactorialTableSize) {
    throw std::out_of_range("factorial: index outside the precomputed table");
  }
  return kFactorials[static_cast<std::size_t>(n)];
}

}  // namespace detail

// Qubit kets only use 0 and 1; the table reaches 30 so completeness sums can be checked.
inline constexpr int kMaxFockIndex = 30;

/// Associated Laguerre polynomial L_n^{(k)}(x) by upward three-term recurrence.
/// Templated so the same code serves real and complex arguments.
template <typename T>
T laguerre_assoc(int n, int k, T x) {
  if (n < 0 || k < 0) {
    throw std::invalid_argument("laguerre_assoc: n and k must be nonnegative");
  }
  T prev = T(1);
  if (n == 0) return prev;
  T curr = T(1 + k) - x;
  for (int j = 1; j < n; ++j) {
    T next = ((T(2 * j + 1 + k) - x) * curr - T(j + k) * prev) / T(j + 1);
    prev = curr;
    curr = next;
  }
  return curr;
}

/// Polynomial part of the Fock element <m|D(z)|n> with the Gaussian factor
/// exp(-|z|^2/2) removed; z and zbar are independent.
inline cplx fock_element_poly(int m, int n, cplx z, cplx zbar) {
  if (m < 0 || n < 0 || m > kMaxFockIndex || n > kMaxFockIndex) {
    throw std::out_of_range("fock_element_poly: Fock index outside the supported range");
  }
  const cplx t = z * zbar;
  if (m >= n) {
    const double norm = std::sqrt(detail::factorial(n) / detail::factorial(m));
    return norm * std::pow(z, m - n) * laguerre_assoc(n, m - n, t);
  }
  const double norm = std::sqrt(detail::factorial(m) / detail::factorial(n));
  return norm * std::pow(-zbar, n - m) * laguerre_assoc(m, n - m, t);
}

/// <m|D(z)|n>
inline cplx disp_elem_fock(int m, int n, PhasePoint p) {
  const cplx z = p.z;
  return std::exp(-0.5 * std::norm(z)) * fock_element_poly(m, n, z, std::conj(z));
}

/// <beta|gamma> for coherent kets.
inline cplx coherent_overlap(cplx beta, cplx gamma) {
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(gamma) + std::conj(beta) * gamma);
}

/// <beta|D(z)|gamma> = exp[(z gamma^* - z^* gamma)/2 - |beta|^2/2 - |gamma+z|^2/2 + beta^*(gamma+z)]
inline cplx disp_elem_coherent(cplx beta, cplx gamma, PhasePoint p) {
  const cplx z = p.z;
  const cplx shifted = gamma + z;
  return std::exp(0.5 * (z * std::conj(gamma) - std::conj(z) * gamma) - 0.5 * std::norm(beta) -
                  0.5 * std::norm(shifted) + std::conj(beta) * shifted);
}

/// <n|D(z)|gamma> with Fock bra and coherent ket.
inline cplx disp_elem_fock_coherent(int n, cplx gamma, PhasePoint p) {
  const cplx z = p.z;
  const cplx shifted = gamma + z;
  return std::exp(-0.5 * std::norm(gamma) - 0.5 * std::norm(z) - gamma * std::conj(z)) *
         std::pow(shifted, n) / std::sqrt(detail::factorial(n));
}

/// <beta|D(z)|n> with coherent bra and Fock ket.
inline cplx disp_elem_coherent_fock(cplx beta, int n, PhasePoint p) {
  const cplx z = p.z;
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(z) + std::conj(beta) * z) *
         std::pow(std::conj(beta) - std::conj(z), n) / std::sqrt(detail::factorial(n));
}

}  // namespace cvtele
