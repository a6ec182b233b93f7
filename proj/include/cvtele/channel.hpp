#pragma once

// Two-mode squeezed vacuum resource, symmetric photon loss, and the per-mode
// Gaussian noise kernel that the teleportation channel applies to the input
// characteristic function.
//
// Covariances use vacuum-variance-1/2 units.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cvtele {

enum class Topology { single, pair };

inline const char* to_string(Topology t) { return t == Topology::single ? "single" : "pair"; }

struct ChannelSpec {
  double r = 0.0;  // squeezing
  double R = 0.0;  // beam-splitter reflectivity; 1 is complete loss
  Topology topology = Topology::pair;

  void validate() const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("channel: squeezing r must be finite and >= 0");
    if (!(R >= 0.0 && R <= 1.0)) throw std::invalid_argument("channel: loss R must lie in [0, 1]");
  }
};

/// Variance matrix of one symmetric TMSV-type state:
///
///   [ eta   0    c    0 ]
///   [ 0    eta   0   -c ]
///   [ c     0   eta   0 ]
///   [ 0    -c    0   eta]
struct CovarianceMatrix {
  double eta = 0.5;
  double c = 0.0;

  bool physical(double tol = 1e-12) const {
    if (eta < 0.5 - tol) return false;
    return std::abs(c) <= std::sqrt(std::max(0.0, eta * eta - 0.25)) + tol;
  }

  std::array<std::array<double, 4>, 4> matrix() const {
    return {{{eta, 0.0, c, 0.0}, {0.0, eta, 0.0, -c}, {c, 0.0, eta, 0.0}, {0.0, -c, 0.0, eta}}};
  }
};

/// Effective noise strength delta = 4(eta - c). The channel multiplies the
/// characteristic function of each teleported mode by exp(-(delta/2)|z|^2).
struct NoiseKernel {
  double delta = 2.0;

  double beta() const { return 1.0 / (2.0 + delta); }
  double factor(double abs_z_sq) const { return std::exp(-0.5 * delta * abs_z_sq); }
};

inline CovarianceMatrix tmsv_covariance(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("tmsv_covariance: r must be finite and >= 0");
  return {0.5 * std::cosh(2.0 * r), 0.5 * std::sinh(2.0 * r)};
}

/// Both resource modes pass through beam splitters of reflectivity R with
/// vacuum in the other port; the ancilla outputs are traced out. For a TMSV
/// this gives eta' = (1 + 2(1-R) sinh^2 r)/2 and c' = (1-R) cosh r sinh r.
/// Written in terms of (eta, c) so that repeated application composes.
inline CovarianceMatrix apply_symmetric_loss(const CovarianceMatrix& cov, double R) {
  if (!(R >= 0.0 && R <= 1.0)) throw std::invalid_argument("apply_symmetric_loss: R must lie in [0, 1]");
  const double T = 1.0 - R;
  return {0.5 + T * (cov.eta - 0.5), T * cov.c};
}

inline NoiseKernel noise_kernel(const CovarianceMatrix& cov) {
  if (!cov.physical()) throw std::invalid_argument("noise_kernel: covariance is not physical");
  return {4.0 * (cov.eta - cov.c)};
}

/// delta = 2R + 2(1-R) exp(-2r). Same quantity as noise_kernel(apply_symmetric_loss(tmsv_covariance(r), R))
/// but free of the cosh/sinh cancellation at large r.
inline NoiseKernel noise_kernel(const ChannelSpec& spec) {
  spec.validate();
  return {2.0 * spec.R + 2.0 * (1.0 - spec.R) * std::exp(-2.0 * spec.r)};
}

}  // namespace cvtele
