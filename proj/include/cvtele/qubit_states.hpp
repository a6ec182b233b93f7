#pragma once

// Input qubits as short sums of product kets, and their characteristic
// functions chi(z) = Tr[rho D(z)].
//
// A state is stored as terms (amplitude, branch, kets-per-mode). The branch
// says which of the two logical components the term belongs to: the first
// component carries sqrt(p), the second sqrt(1-p) e^{i phi}. Keeping p and phi
// out of the stored amplitudes lets the averaging code re-weight a state
// without rebuilding it.

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvtele/special_functions.hpp"

namespace cvtele {

enum class Family { spq, hqA, hqB, singlerail, coherent };

inline constexpr Family kAllFamilies[] = {Family::spq, Family::hqA, Family::hqB, Family::singlerail,
                                          Family::coherent};

inline const char* to_string(Family f) {
  switch (f) {
    case Family::spq: return "spq";
    case Family::hqA: return "hqA";
    case Family::hqB: return "hqB";
    case Family::singlerail: return "singlerail";
    case Family::coherent: return "coherent";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  if (s == "spq") return Family::spq;
  if (s == "hqA") return Family::hqA;
  if (s == "hqB") return Family::hqB;
  if (s == "singlerail" || s == "single-rail") return Family::singlerail;
  if (s == "coherent" || s == "coherent-qubit") return Family::coherent;
  throw std::invalid_argument("unknown qubit family '" + std::string(s) + "'");
}

inline int mode_count(Family f) { return (f == Family::singlerail || f == Family::coherent) ? 1 : 2; }

inline bool uses_alpha(Family f) { return f == Family::hqA || f == Family::hqB || f == Family::coherent; }

/// Family plus amplitude; what remains of a QubitSpec once (p, phi) are averaged out.
struct FamilySpec {
  Family family = Family::spq;
  double alpha = 0.0;
};

struct QubitSpec {
  Family family = Family::spq;
  double alpha = 0.0;
  double p = 1.0;
  double phi = 0.0;

  FamilySpec family_spec() const { return {family, alpha}; }

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("qubit: p must lie in [0, 1]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("qubit: alpha must be finite and >= 0");
    if (!std::isfinite(phi)) throw std::invalid_argument("qubit: phi must be finite");
  }
};

enum class Parity { even, odd };

inline constexpr int kMaxKetFockIndex = 4;

/// |n>, |gamma>, or a normalized cat (|a> +/- |-a>)/sqrt(2(1 +/- e^{-2a^2})) with real a.
struct ElementaryKet {
  enum class Kind { fock, coherent, cat };

  Kind kind = Kind::fock;
  int n = 0;
  cplx amplitude{};
  Parity parity = Parity::even;

  static ElementaryKet fock(int n) {
    if (n < 0 || n > kMaxKetFockIndex) throw std::out_of_range("ElementaryKet: Fock index outside [0, 4]");
    ElementaryKet k;
    k.kind = Kind::fock;
    k.n = n;
    return k;
  }
  static ElementaryKet coherent(cplx amp) {
    ElementaryKet k;
    k.kind = Kind::coherent;
    k.amplitude = amp;
    return k;
  }
  static ElementaryKet cat(double alpha, Parity parity) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("cat: alpha must be >= 0");
    if (parity == Parity::odd && alpha == 0.0) throw std::invalid_argument("cat: odd cat is undefined at alpha = 0");
    ElementaryKet k;
    k.kind = Kind::cat;
    k.amplitude = alpha;
    k.parity = parity;
    return k;
  }

  double cat_alpha() const { return amplitude.real(); }
};

/// Coefficients of (|alpha> +/- |-alpha>) normalized to a unit-norm cat.
inline std::vector<std::pair<cplx, ElementaryKet>> cat_state_terms(double alpha, Parity parity) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("cat_state_terms: alpha must be >= 0");
  if (parity == Parity::odd && alpha == 0.0) {
    throw std::invalid_argument("cat_state_terms: odd cat is the zero vector at alpha = 0");
  }
  const double e = std::exp(-2.0 * alpha * alpha);
  const double norm_sq = parity == Parity::even ? 2.0 * (1.0 + e) : -2.0 * std::expm1(-2.0 * alpha * alpha);
  const double c = 1.0 / std::sqrt(norm_sq);
  const double sign = parity == Parity::even ? 1.0 : -1.0;
  return {{c, ElementaryKet::coherent(alpha)}, {sign * c, ElementaryKet::coherent(-alpha)}};
}

namespace detail {

// <cat_bra|D(z)|cat_ket> with exp(-|z|^2/2) removed, for cats sharing the
// same real alpha. Written so the odd-odd element keeps full relative
// precision as alpha -> 0, where it tends to the Fock-1 element 1 - |z|^2.
inline cplx cat_cat_reduced(double alpha, Parity bra, Parity ket, cplx z, cplx zbar) {
  const cplx x = 0.5 * (z + zbar);
  const cplx y = (z - zbar) / cplx(0.0, 2.0);
  const double a2 = alpha * alpha;
  const double e2 = std::exp(-2.0 * a2);
  if (bra == Parity::even && ket == Parity::even) {
    return (std::cos(2.0 * alpha * y) + e2 * std::cosh(2.0 * alpha * x)) / (1.0 + e2);
  }
  if (bra == Parity::odd && ket == Parity::odd) {
    const double gap = -std::expm1(-2.0 * a2);
    const cplx sy = std::sin(alpha * y);
    const cplx shx = std::sinh(alpha * x);
    return (gap - 2.0 * sy * sy - 2.0 * e2 * shx * shx) / gap;
  }
  const double nn = 2.0 * std::sqrt(-std::expm1(-4.0 * a2));
  const cplx osc = cplx(0.0, 2.0) * std::sin(2.0 * alpha * y);
  const cplx hyp = 2.0 * e2 * std::sinh(2.0 * alpha * x);
  return bra == Parity::even ? (osc - hyp) / nn : (osc + hyp) / nn;
}

inline bool same_cat_family(const ElementaryKet& a, const ElementaryKet& b) {
  return a.kind == ElementaryKet::Kind::cat && b.kind == ElementaryKet::Kind::cat && a.amplitude == b.amplitude;
}

}  // namespace detail

/// <bra|ket>
inline cplx ket_overlap(const ElementaryKet& bra, const ElementaryKet& ket) {
  using K = ElementaryKet::Kind;
  if (bra.kind == K::cat || ket.kind == K::cat) {
    if (detail::same_cat_family(bra, ket)) return bra.parity == ket.parity ? 1.0 : 0.0;
    cplx sum = 0.0;
    if (bra.kind == K::cat) {
      for (const auto& [c, k] : cat_state_terms(bra.cat_alpha(), bra.parity)) sum += std::conj(c) * ket_overlap(k, ket);
    } else {
      for (const auto& [c, k] : cat_state_terms(ket.cat_alpha(), ket.parity)) sum += c * ket_overlap(bra, k);
    }
    return sum;
  }
  if (bra.kind == K::fock && ket.kind == K::fock) return bra.n == ket.n ? 1.0 : 0.0;
  if (bra.kind == K::coherent && ket.kind == K::coherent) return coherent_overlap(bra.amplitude, ket.amplitude);
  if (bra.kind == K::fock) {
    return std::exp(-0.5 * std::norm(ket.amplitude)) * std::pow(ket.amplitude, bra.n) /
           std::sqrt(detail::factorial(bra.n));
  }
  return std::exp(-0.5 * std::norm(bra.amplitude)) * std::pow(std::conj(bra.amplitude), ket.n) /
         std::sqrt(detail::factorial(ket.n));
}

/// <bra|D(z)|ket>
inline cplx disp_elem(const ElementaryKet& bra, const ElementaryKet& ket, PhasePoint p) {
  using K = ElementaryKet::Kind;
  if (detail::same_cat_family(bra, ket)) {
    return std::exp(-0.5 * std::norm(p.z)) *
           detail::cat_cat_reduced(bra.cat_alpha(), bra.parity, ket.parity, p.z, std::conj(p.z));
  }
  if (bra.kind == K::cat) {
    cplx sum = 0.0;
    for (const auto& [c, k] : cat_state_terms(bra.cat_alpha(), bra.parity)) sum += std::conj(c) * disp_elem(k, ket, p);
    return sum;
  }
  if (ket.kind == K::cat) {
    cplx sum = 0.0;
    for (const auto& [c, k] : cat_state_terms(ket.cat_alpha(), ket.parity)) sum += c * disp_elem(bra, k, p);
    return sum;
  }
  if (bra.kind == K::fock && ket.kind == K::fock) return disp_elem_fock(bra.n, ket.n, p);
  if (bra.kind == K::coherent && ket.kind == K::coherent) return disp_elem_coherent(bra.amplitude, ket.amplitude, p);
  if (bra.kind == K::fock) return disp_elem_fock_coherent(bra.n, ket.amplitude, p);
  return disp_elem_coherent_fock(bra.amplitude, ket.n, p);
}

/// One matrix element written as scale * exp(-|z|^2/2) * exp(u z + v zbar) * P(z, zbar).
struct FactoredElement {
  enum class Poly { one, fock, fock_coherent, coherent_fock, cat_cat };

  cplx scale = 1.0;
  cplx u{};
  cplx v{};
  Poly poly = Poly::one;
  int m = 0;
  int n = 0;
  cplx shift{};  // coherent amplitude entering the polynomial factor
  double alpha = 0.0;
  Parity bra_parity = Parity::even;
  Parity ket_parity = Parity::even;

  cplx poly_value(cplx z, cplx zbar) const {
    switch (poly) {
      case Poly::one: return 1.0;
      case Poly::fock: return fock_element_poly(m, n, z, zbar);
      case Poly::fock_coherent: return std::pow(shift + z, n) / std::sqrt(detail::factorial(n));
      case Poly::coherent_fock: return std::pow(std::conj(shift) - zbar, n) / std::sqrt(detail::factorial(n));
      case Poly::cat_cat: return detail::cat_cat_reduced(alpha, bra_parity, ket_parity, z, zbar);
    }
    return 0.0;
  }

  cplx operator()(PhasePoint p) const {
    const cplx zbar = std::conj(p.z);
    return scale * std::exp(-0.5 * std::norm(p.z) + u * p.z + v * zbar) * poly_value(p.z, zbar);
  }
};

/// Below this amplitude, cat-cat elements are kept whole so the odd-cat
/// normalization does not cancel catastrophically; above it they are split
/// into coherent components, each a shifted Gaussian.
inline constexpr double kCatSplitAlpha = 0.5;

/// Decompose <bra|D(z)|ket> into a sum of factored elements.
inline std::vector<FactoredElement> factor_element(const ElementaryKet& bra, const ElementaryKet& ket) {
  using K = ElementaryKet::Kind;
  using P = FactoredElement::Poly;
  if (detail::same_cat_family(bra, ket) && bra.cat_alpha() < kCatSplitAlpha) {
    FactoredElement f;
    f.poly = P::cat_cat;
    f.alpha = bra.cat_alpha();
    f.bra_parity = bra.parity;
    f.ket_parity = ket.parity;
    return {f};
  }
  std::vector<FactoredElement> out;
  if (bra.kind == K::cat) {
    for (const auto& [c, k] : cat_state_terms(bra.cat_alpha(), bra.parity)) {
      for (auto f : factor_element(k, ket)) {
        f.scale *= std::conj(c);
        out.push_back(f);
      }
    }
    return out;
  }
  if (ket.kind == K::cat) {
    for (const auto& [c, k] : cat_state_terms(ket.cat_alpha(), ket.parity)) {
      for (auto f : factor_element(bra, k)) {
        f.scale *= c;
        out.push_back(f);
      }
    }
    return out;
  }
  FactoredElement f;
  if (bra.kind == K::fock && ket.kind == K::fock) {
    f.poly = P::fock;
    f.m = bra.n;
    f.n = ket.n;
  } else if (bra.kind == K::coherent && ket.kind == K::coherent) {
    f.scale = coherent_overlap(bra.amplitude, ket.amplitude);
    f.u = std::conj(bra.amplitude);
    f.v = -ket.amplitude;
  } else if (bra.kind == K::fock) {
    f.scale = std::exp(-0.5 * std::norm(ket.amplitude));
    f.v = -ket.amplitude;
    f.poly = P::fock_coherent;
    f.n = bra.n;
    f.shift = ket.amplitude;
  } else {
    f.scale = std::exp(-0.5 * std::norm(bra.amplitude));
    f.u = std::conj(bra.amplitude);
    f.poly = P::coherent_fock;
    f.n = ket.n;
    f.shift = bra.amplitude;
  }
  out.push_back(f);
  return out;
}

enum class Branch { first, second };

struct Term {
  cplx amplitude = 1.0;  // independent of (p, phi)
  Branch branch = Branch::first;
  std::vector<ElementaryKet> modes;
};

/// A pure input state sum_k c_k |ket_k>, with c_k = amplitude_k * w(branch_k; p, phi) / sqrt(norm).
class TermDecomposition {
 public:
  TermDecomposition() = default;
  TermDecomposition(std::vector<Term> terms, double p, double phi) : terms_(std::move(terms)), p_(p), phi_(phi) {
    if (terms_.empty()) throw std::invalid_argument("TermDecomposition: no terms");
    modes_ = static_cast<int>(terms_.front().modes.size());
    if (modes_ < 1 || modes_ > 2) throw std::invalid_argument("TermDecomposition: one or two modes supported");
    for (const auto& t : terms_) {
      if (static_cast<int>(t.modes.size()) != modes_) throw std::invalid_argument("TermDecomposition: ragged mode count");
    }
    coefficients_ = coefficients_at(p_, phi_);
  }

  int modes() const { return modes_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& term(std::size_t i) const { return terms_[i]; }
  double p() const { return p_; }
  double phi() const { return phi_; }

  /// Normalized coefficients at the stored (p, phi).
  const std::vector<cplx>& coefficients() const { return coefficients_; }

  /// Unnormalized coefficients amplitude * branch weight at arbitrary (p, phi).
  std::vector<cplx> raw_coefficients_at(double p, double phi) const {
    const cplx w_first = std::sqrt(p);
    const cplx w_second = std::sqrt(1.0 - p) * std::polar(1.0, phi);
    std::vector<cplx> c;
    c.reserve(terms_.size());
    for (const auto& t : terms_) c.push_back(t.amplitude * (t.branch == Branch::first ? w_first : w_second));
    return c;
  }

  /// Normalized coefficients at arbitrary (p, phi).
  std::vector<cplx> coefficients_at(double p, double phi) const {
    auto c = raw_coefficients_at(p, phi);
    const double ns = quadratic_form(c);
    if (!(ns > 0.0)) throw std::domain_error("TermDecomposition: state has zero norm");
    const double s = 1.0 / std::sqrt(ns);
    for (auto& x : c) x *= s;
    return c;
  }

  /// <psi|psi> for arbitrary coefficients over this term structure.
  double quadratic_form(const std::vector<cplx>& c) const {
    cplx sum = 0.0;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      for (std::size_t l = 0; l < terms_.size(); ++l) sum += c[k] * std::conj(c[l]) * product_overlap(l, k);
    }
    return sum.real();
  }

  double self_overlap() const { return quadratic_form(coefficients_); }

  /// <ket_l|ket_k> as a product over modes.
  cplx product_overlap(std::size_t l, std::size_t k) const {
    cplx v = 1.0;
    for (int i = 0; i < modes_; ++i) v *= ket_overlap(terms_[l].modes[i], terms_[k].modes[i]);
    return v;
  }

  /// True when the two branches are orthogonal and equally normed, i.e. the
  /// normalization does not depend on (p, phi).
  bool normalization_input_independent(double tol = 1e-12) const {
    cplx first = 0.0, second = 0.0, cross = 0.0;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      for (std::size_t l = 0; l < terms_.size(); ++l) {
        const cplx v = terms_[k].amplitude * std::conj(terms_[l].amplitude) * product_overlap(l, k);
        if (terms_[k].branch != terms_[l].branch) cross += v;
        else if (terms_[k].branch == Branch::first) first += v;
        else second += v;
      }
    }
    return std::abs(cross) <= tol && std::abs(first - second) <= tol;
  }

 private:
  std::vector<Term> terms_;
  std::vector<cplx> coefficients_;
  int modes_ = 0;
  double p_ = 1.0;
  double phi_ = 0.0;
};

/// Build the input state for a family at (p, phi).
///   spq:        sqrt(p)|0,1> + sqrt(1-p) e^{i phi}|1,0>
///   hqA:        sqrt(p)|0,a> + sqrt(1-p) e^{i phi}|1,-a>
///   hqB:        sqrt(p)|0,cat+> + sqrt(1-p) e^{i phi}|1,cat->
///   singlerail: sqrt(p)|0> + sqrt(1-p) e^{i phi}|1>
///   coherent:   (sqrt(p)|a> + sqrt(1-p) e^{i phi}|-a>)/N
inline TermDecomposition make_qubit(const QubitSpec& spec) {
  spec.validate();
  using EK = ElementaryKet;
  const double a = spec.alpha;
  std::vector<Term> terms;
  switch (spec.family) {
    case Family::spq:
      terms = {{1.0, Branch::first, {EK::fock(0), EK::fock(1)}}, {1.0, Branch::second, {EK::fock(1), EK::fock(0)}}};
      break;
    case Family::hqA:
      terms = {{1.0, Branch::first, {EK::fock(0), EK::coherent(a)}},
               {1.0, Branch::second, {EK::fock(1), EK::coherent(-a)}}};
      break;
    case Family::hqB:
      terms = {{1.0, Branch::first, {EK::fock(0), EK::cat(a, Parity::even)}},
               {1.0, Branch::second, {EK::fock(1), EK::cat(a, Parity::odd)}}};
      break;
    case Family::singlerail:
      terms = {{1.0, Branch::first, {EK::fock(0)}}, {1.0, Branch::second, {EK::fock(1)}}};
      break;
    case Family::coherent:
      if (a == 0.0) throw std::invalid_argument("coherent qubit: alpha must be > 0");
      terms = {{1.0, Branch::first, {EK::coherent(a)}}, {1.0, Branch::second, {EK::coherent(-a)}}};
      break;
  }
  return TermDecomposition(std::move(terms), spec.p, spec.phi);
}

/// Same state with every cat ket replaced by its two coherent components.
inline TermDecomposition expand_cats(const TermDecomposition& state) {
  std::vector<Term> out;
  for (const auto& t : state.terms()) {
    std::vector<Term> partial{{t.amplitude, t.branch, {}}};
    for (const auto& ket : t.modes) {
      std::vector<Term> next;
      for (const auto& pt : partial) {
        if (ket.kind == ElementaryKet::Kind::cat) {
          for (const auto& [c, k] : cat_state_terms(ket.cat_alpha(), ket.parity)) {
            Term nt = pt;
            nt.amplitude *= c;
            nt.modes.push_back(k);
            next.push_back(std::move(nt));
          }
        } else {
          Term nt = pt;
          nt.modes.push_back(ket);
          next.push_back(std::move(nt));
        }
      }
      partial = std::move(next);
    }
    for (auto& pt : partial) out.push_back(std::move(pt));
  }
  return TermDecomposition(std::move(out), state.p(), state.phi());
}

/// chi(z1[, z2]) = Tr[rho D(z1) (x) D(z2)] = sum_{k,l} c_k c_l^* prod_i <l_i|D(z_i)|k_i>.
inline cplx chi_in(const TermDecomposition& state, PhasePoint z1, std::optional<PhasePoint> z2 = std::nullopt) {
  if (z2.has_value() != (state.modes() == 2)) {
    throw std::invalid_argument("chi_in: number of phase points does not match the mode count");
  }
  const auto& c = state.coefficients();
  const auto& terms = state.terms();
  cplx sum = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    for (std::size_t l = 0; l < terms.size(); ++l) {
      cplx v = c[k] * std::conj(c[l]) * disp_elem(terms[l].modes[0], terms[k].modes[0], z1);
      if (z2) v *= disp_elem(terms[l].modes[1], terms[k].modes[1], *z2);
      sum += v;
    }
  }
  return sum;
}

}  // namespace cvtele
