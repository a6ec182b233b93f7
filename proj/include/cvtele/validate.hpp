#pragma once

// Validation: closed forms against the quadrature oracle, the limit
// identities, the threshold/crossover/loss claims and the Monte Carlo
// cross-check. Each acceptance criterion is a function returning its report
// items; validation_report() concatenates them with the module invariants.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvtele/channel.hpp"
#include "cvtele/closed_forms.hpp"
#include "cvtele/fidelity_engine.hpp"
#include "cvtele/qubit_states.hpp"
#include "cvtele/sweep.hpp"

namespace cvtele {

using json = nlohmann::json;

struct ReportItem {
  std::string check_id;
  std::string description;
  json expected;
  json computed;
  json tolerance;  // null when the item is informational
  bool pass = false;
};

inline void to_json(json& j, const ReportItem& it) {
  j = json{{"check_id", it.check_id},   {"description", it.description}, {"expected", it.expected},
           {"computed", it.computed},   {"tolerance", it.tolerance},     {"pass", it.pass}};
}

struct CriterionOutcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  std::vector<ReportItem> items;
};

struct ValidationOptions {
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = 20240917;
  QuadratureConfig quad;
};

namespace detail {

inline std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

/// Largest deviation seen so far and where it happened.
struct MaxDev {
  double value = 0.0;
  std::string where = "-";

  void update(double dev, const std::string& at) {
    if (!(dev <= value)) {  // NaN always wins
      value = dev;
      where = at;
    }
  }
};

inline ReportItem bound_item(std::string id, std::string desc, const MaxDev& d, double tol) {
  return {std::move(id), std::move(desc) + " (worst at " + d.where + ")", json(0.0), json(d.value), json(tol),
          d.value <= tol};
}

inline std::vector<double> squeezing_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 12; ++i) g.push_back(0.2 * i);
  return g;
}

inline std::vector<double> delta_step_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 20; ++i) g.push_back(0.1 * i);
  return g;
}

inline NoiseKernel lossless(double r) { return noise_kernel(ChannelSpec{r, 0.0}); }

inline double quad_avg(Family f, double alpha, NoiseKernel k, const QuadratureConfig& q) {
  return fidelity_average_auto({f, alpha}, k, q).raw;
}

inline const std::vector<double> kOracleAlphas{0.3, 0.6, 1.0, 1.5};
inline const std::vector<double> kInvariantAlphas{0.3, 0.5, 0.8, 1.0, 1.5, 2.0};

/// Threshold item; a bracket without sign change becomes a failing item.
inline ReportItem threshold_item(std::string id, std::string desc, const std::function<double(double)>& metric,
                                 double target, double lo, double hi, double window_lo, double window_hi,
                                 std::optional<double>* root_out = nullptr) {
  ReportItem it{std::move(id), std::move(desc), json::array({window_lo, window_hi}), nullptr, json(1e-4), false};
  try {
    const auto res = bisect(metric, target, lo, hi, 1e-4);
    it.computed = res.root;
    it.pass = res.root > window_lo && res.root < window_hi;
    if (root_out) *root_out = res.root;
  } catch (const std::exception& e) {
    it.computed = std::string(e.what());
  }
  return it;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Acceptance criteria

inline CriterionOutcome criterion_ideal_channel(const ValidationOptions& opt = {}) {
  CriterionOutcome out{1, "ideal-channel identity", true, "", {}};
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const NoiseKernel kernel{1e-8};
  detail::MaxDev overall;
  for (auto f : kAllFamilies) {
    const std::vector<double> alphas = uses_alpha(f) ? std::vector<double>{0.5, 1.0, 2.0} : std::vector<double>{0.0};
    detail::MaxDev d;
    for (double a : alphas) {
      for (int i = 0; i < 5; ++i) {
        const double p = unit(rng);
        const double phi = 2.0 * std::numbers::pi * unit(rng);
        const auto r = fidelity_fixed(QubitSpec{f, a, p, phi}, kernel, opt.quad);
        const std::string at = "alpha=" + detail::fmt(a) + " p=" + detail::fmt(p) + " phi=" + detail::fmt(phi);
        d.update(std::abs(1.0 - r.raw), at);
        overall.update(std::abs(1.0 - r.raw), std::string(to_string(f)) + " " + at);
      }
    }
    out.items.push_back(detail::bound_item(std::string("ideal_channel_") + to_string(f),
                                           std::string("|1 - F| at delta = 1e-8, quadrature, ") + to_string(f), d, 1e-6));
    out.pass = out.pass && out.items.back().pass;
  }
  out.summary = "max |1 - F| = " + detail::fmt(overall.value) + " (tol 1e-6)";
  return out;
}

inline CriterionOutcome criterion_spq_closed_form(const ValidationOptions& opt = {}) {
  CriterionOutcome out{2, "spq closed form vs quadrature", false, "", {}};
  detail::MaxDev d;
  for (double r : detail::squeezing_grid()) {
    const auto k = detail::lossless(r);
    d.update(std::abs(avg_fidelity_spq(k.delta) - detail::quad_avg(Family::spq, 0.0, k, opt.quad)), "r=" + detail::fmt(r));
  }
  out.items.push_back(detail::bound_item("spq_closed_vs_quad", "max |closed - quadrature| over r = 0.2..2.4, R = 0", d, 1e-8));
  out.pass = out.items.back().pass;
  out.summary = "max deviation " + detail::fmt(d.value) + " (tol 1e-8)";
  return out;
}

inline CriterionOutcome criterion_hqB_closed_form(const ValidationOptions& opt = {}) {
  CriterionOutcome out{3, "hqB closed form (literal N+/-) vs quadrature", false, "", {}};
  detail::MaxDev printed, corrected;
  std::optional<std::pair<double, double>> first_fail;
  for (double a : detail::kOracleAlphas) {
    for (double r : detail::squeezing_grid()) {
      const auto k = detail::lossless(r);
      const double q = detail::quad_avg(Family::hqB, a, k, opt.quad);
      const double dp = std::abs(avg_fidelity_hqB(k.delta, a, FormulaVariant::printed) - q);
      const std::string at = "alpha=" + detail::fmt(a) + " r=" + detail::fmt(r);
      printed.update(dp, at);
      corrected.update(std::abs(avg_fidelity_hqB(k.delta, a, FormulaVariant::corrected) - q), at);
      if (dp > 1e-8 && !first_fail) first_fail = {a, r};
    }
  }
  out.items.push_back(detail::bound_item("hqB_printed_vs_quad",
                                         "max |printed closed form - quadrature| over r = 0.2..2.4 x alpha in {0.3, 0.6, 1, 1.5}",
                                         printed, 1e-8));
  out.items.push_back(detail::bound_item("hqB_corrected_vs_quad",
                                         std::string("max |corrected closed form - quadrature| on the same grid; ") +
                                             notes::kHqBCorrected,
                                         corrected, 1e-8));
  const bool literal = printed.value <= 1e-8;
  if (literal) {
    out.pass = true;
    out.summary = "max deviation " + detail::fmt(printed.value) + " (tol 1e-8)";
    return out;
  }

  // Localize: compare the three branch-pattern groups at the first failing point.
  const auto [a, r] = *first_fail;
  const auto k = detail::lossless(r);
  const auto terms = hqB_terms(k.delta, a, FormulaVariant::printed);
  const auto groups = branch_group_contributions({Family::hqB, a}, k, opt.quad);
  const std::string at = " at alpha=" + detail::fmt(a) + " r=" + detail::fmt(r);
  struct G {
    const char* id;
    const char* desc;
    double closed, oracle;
  };
  const G gs[] = {{"even_diagonal", "even-cat diagonal group (1/N+^2 terms)", terms.even_diagonal, groups.first_diagonal},
                  {"odd_diagonal", "odd-cat diagonal group (1/N-^2 terms)", terms.odd_diagonal, groups.second_diagonal},
                  {"cross", "mixed group (1/(N+ N-) terms)", terms.cross, groups.cross}};
  std::string diverging;
  for (const auto& g : gs) {
    const double dev = std::abs(g.closed - g.oracle);
    out.items.push_back({std::string("hqB_printed_group_") + g.id, std::string("printed ") + g.desc + " vs quadrature" + at,
                         g.oracle, g.closed, 1e-8, dev <= 1e-8});
    if (dev > 1e-8 && diverging.empty()) diverging = g.id;
  }
  out.items.push_back({"hqB_first_diverging_term", "first branch group of the printed hqB form that disagrees with the oracle" + at,
                       "none", diverging.empty() ? "none" : diverging, nullptr, diverging.empty()});

  // Fallback: the oracle reproduces the figure data without numerical failures.
  bool figure_ok = true;
  std::size_t quad_rows = 0;
  for (const auto& row : reproduce_figure(2, 1).rows) {
    if (row.method != Method::quadrature) continue;
    ++quad_rows;
    figure_ok = figure_ok && row.status == "ok" && row.fidelity >= 0.0 && row.fidelity <= 1.0;
  }
  out.items.push_back({"hqB_figure_oracle", "oracle-based reproduction of the spq vs hqB lossless figure: all quadrature rows ok",
                       "all ok", std::to_string(quad_rows) + (figure_ok ? " rows ok" : " rows, some failed"), nullptr,
                       figure_ok});
  out.pass = !diverging.empty() && figure_ok && corrected.value <= 1e-8;
  out.summary = "literal form deviates by " + detail::fmt(printed.value) + " (tol 1e-8); first diverging term: " +
                (diverging.empty() ? "none" : diverging) + "; oracle figure " + (figure_ok ? "reproduced" : "FAILED") +
                "; corrected form max deviation " + detail::fmt(corrected.value);
  return out;
}

inline CriterionOutcome criterion_hqA_closed_form(const ValidationOptions& opt = {}) {
  CriterionOutcome out{4, "hqA closed form: corrected vs quadrature, printed deviation", false, "", {}};
  detail::MaxDev corrected;
  for (double a : detail::kOracleAlphas) {
    for (double r : detail::squeezing_grid()) {
      const auto k = detail::lossless(r);
      corrected.update(std::abs(avg_fidelity_hqA(k.delta, a, FormulaVariant::corrected) - detail::quad_avg(Family::hqA, a, k, opt.quad)),
                       "alpha=" + detail::fmt(a) + " r=" + detail::fmt(r));
    }
  }
  out.items.push_back(detail::bound_item("hqA_corrected_vs_quad",
                                         std::string("max |corrected closed form - quadrature|; ") + notes::kHqACorrected,
                                         corrected, 1e-8));
  const auto k = detail::lossless(1.0);
  const double oracle = detail::quad_avg(Family::hqA, 1.0, k, opt.quad);
  const double printed = avg_fidelity_hqA(k.delta, 1.0, FormulaVariant::printed);
  const double dev = std::abs(printed - oracle);
  out.items.push_back({"hqA_printed_vs_quad", "printed hqA form against the oracle at alpha = 1, r = 1 (flagged when it fails)",
                       oracle, printed, 1e-8, dev <= 1e-8});
  out.items.push_back({"hqA_printed_deviation_detected", "printed hqA form deviates from the oracle by more than 1e-2 at alpha = 1, r = 1",
                       "> 0.01", dev, 1e-2, dev > 1e-2});
  out.pass = corrected.value <= 1e-8 && dev > 1e-2;
  out.summary = "corrected max deviation " + detail::fmt(corrected.value) + " (tol 1e-8); printed deviation " +
                detail::fmt(dev) + " (> 1e-2 required)";
  return out;
}

inline CriterionOutcome criterion_factorization(const ValidationOptions& opt = {}) {
  CriterionOutcome out{5, "hqA(alpha=0) factorization", false, "", {}};
  detail::MaxDev closed, quad;
  for (double delta : detail::delta_step_grid()) {
    const NoiseKernel k{delta};
    const double factor = 2.0 / (2.0 + delta);
    const std::string at = "delta=" + detail::fmt(delta);
    closed.update(std::abs(avg_fidelity_hqA(delta, 0.0) - avg_fidelity_singlerail(delta) * factor), at);
    quad.update(std::abs(detail::quad_avg(Family::hqA, 0.0, k, opt.quad) -
                         detail::quad_avg(Family::singlerail, 0.0, k, opt.quad) * factor),
                at);
  }
  out.items.push_back(detail::bound_item("hqA_alpha0_factorization_closed",
                                         "|F_hqA(delta, 0) - F_singlerail(delta) 2/(2+delta)|, closed forms, delta = 0.1..2", closed, 1e-10));
  out.items.push_back(detail::bound_item("hqA_alpha0_factorization_quad",
                                         "|F_hqA(delta, 0) - F_singlerail(delta) 2/(2+delta)|, quadrature, delta = 0.1..2", quad, 1e-8));
  out.pass = closed.value <= 1e-10 && quad.value <= 1e-8;
  out.summary = "closed " + detail::fmt(closed.value) + " (tol 1e-10), quadrature " + detail::fmt(quad.value) + " (tol 1e-8)";
  return out;
}

/// The state sqrt(p)|0,0> + sqrt(1-p) e^{i phi}|1,1>, which is what hqB tends to as alpha -> 0.
inline TermDecomposition hqB_small_alpha_limit_state() {
  using EK = ElementaryKet;
  return TermDecomposition({{1.0, Branch::first, {EK::fock(0), EK::fock(0)}}, {1.0, Branch::second, {EK::fock(1), EK::fock(1)}}},
                           0.5, 0.0);
}

inline CriterionOutcome criterion_cat_bridge(const ValidationOptions& opt = {}) {
  CriterionOutcome out{6, "cat-limit bridge hqB(alpha=1e-4) -> spq", false, "", {}};
  const double a = 1e-4;
  const auto limit = hqB_small_alpha_limit_state();
  detail::MaxDev quad_vs_spq, printed_vs_spq, quad_vs_limit;
  for (double delta : detail::delta_step_grid()) {
    const NoiseKernel k{delta};
    const std::string at = "delta=" + detail::fmt(delta);
    const double q = detail::quad_avg(Family::hqB, a, k, opt.quad);
    quad_vs_spq.update(std::abs(q - avg_fidelity_spq(delta)), at);
    printed_vs_spq.update(std::abs(avg_fidelity_hqB(delta, a, FormulaVariant::printed) - avg_fidelity_spq(delta)), at);
    quad_vs_limit.update(std::abs(q - fidelity_average(limit, k, opt.quad).raw), at);
  }
  out.items.push_back(detail::bound_item("hqB_small_alpha_vs_spq_quad",
                                         "|F_hqB(delta, alpha=1e-4) - F_spq(delta)|, quadrature, delta = 0.1..2", quad_vs_spq, 1e-4));
  out.items.push_back(detail::bound_item("hqB_small_alpha_vs_spq_printed",
                                         "|printed F_hqB(delta, alpha=1e-4) - F_spq(delta)|, delta = 0.1..2", printed_vs_spq, 1e-4));
  out.items.push_back(detail::bound_item("hqB_small_alpha_vs_00_11",
                                         "|F_hqB(delta, alpha=1e-4) - F of sqrt(p)|0,0> + sqrt(1-p)e^{i phi}|1,1>|: even cat -> |0>, "
                                         "odd cat -> |1>, so the small-alpha limit is not the spq basis {|0,1>, |1,0>}",
                                         quad_vs_limit, 1e-4));
  out.pass = quad_vs_spq.value <= 1e-4;
  out.summary = "max |F_hqB - F_spq| = " + detail::fmt(quad_vs_spq.value) + " (tol 1e-4); hqB(1e-4) vs |00>/|11> limit " +
                detail::fmt(quad_vs_limit.value);
  return out;
}

inline CriterionOutcome criterion_thresholds(const ValidationOptions& opt = {}) {
  CriterionOutcome out{7, "classical-limit squeezing thresholds", false, "", {}};
  const double target = 2.0 / 3.0;
  auto closed = [](Family f, double a, FormulaVariant v) {
    return [=](double r) {
      const double d = detail::lossless(r).delta;
      switch (f) {
        case Family::hqA: return avg_fidelity_hqA(d, a, v);
        case Family::hqB: return avg_fidelity_hqB(d, a, v);
        default: return avg_fidelity_spq(d);
      }
    };
  };
  auto quad = [&opt](Family f, double a) { return [=, &opt](double r) { return detail::quad_avg(f, a, detail::lossless(r), opt.quad); }; };

  std::optional<double> spq, hqA, hqB;
  out.items.push_back(detail::threshold_item("threshold_spq_closed", "r* where the spq closed form reaches 2/3",
                                             closed(Family::spq, 0.0, FormulaVariant::printed), target, 0.5, 2.5, 1.0, 1.3, &spq));
  out.items.push_back(detail::threshold_item("threshold_hqA_quad", "r* for hqA, alpha = 1, quadrature", quad(Family::hqA, 1.0),
                                             target, 0.5, 2.5, 0.9, 1.4, &hqA));
  const bool hqA_ok = out.items.back().pass;
  out.items.push_back(detail::threshold_item("threshold_hqB_quad", "r* for hqB, alpha = 1, quadrature", quad(Family::hqB, 1.0),
                                             target, 0.5, 2.5, 0.9, 1.4, &hqB));
  const bool hqB_ok = out.items.back().pass;
  out.items.push_back(detail::threshold_item("threshold_hqA_printed", "r* for hqA, alpha = 1, printed closed form",
                                             closed(Family::hqA, 1.0, FormulaVariant::printed), target, 0.5, 2.5, 0.9, 1.4));
  out.items.push_back(detail::threshold_item("threshold_hqB_printed", "r* for hqB, alpha = 1, printed closed form",
                                             closed(Family::hqB, 1.0, FormulaVariant::printed), target, 0.5, 2.5, 0.9, 1.4));
  out.pass = out.items[0].pass && hqA_ok && hqB_ok;
  auto show = [](const std::optional<double>& v) { return v ? detail::fmt(*v, 5) : std::string("none"); };
  out.summary = "r* spq " + show(spq) + " in (1.0, 1.3); hqA " + show(hqA) + ", hqB " + show(hqB) + " in (0.9, 1.4)";
  return out;
}

inline CriterionOutcome criterion_crossovers(const ValidationOptions& opt = {}) {
  CriterionOutcome out{8, "alpha crossovers", false, "", {}};
  const auto k = detail::lossless(1.5);
  const double spq = avg_fidelity_spq(k.delta);
  auto quad_diff = [&](Family f) { return [&, f](double a) { return detail::quad_avg(f, a, k, opt.quad) - spq; }; };
  auto closed_diff = [&](Family f, FormulaVariant v) {
    return [&, f, v](double a) {
      return (f == Family::hqA ? avg_fidelity_hqA(k.delta, a, v) : avg_fidelity_hqB(k.delta, a, v)) - spq;
    };
  };
  std::optional<double> hqA, hqB, single;
  // The lower end reaches below 0.5 so that a root outside the expected window is still located.
  out.items.push_back(detail::threshold_item("crossover_hqA_quad", "alpha* where F_hqA = F_spq at r = 1.5, quadrature",
                                             quad_diff(Family::hqA), 0.0, 0.3, 1.5, 0.8, 1.2, &hqA));
  const bool hqA_ok = out.items.back().pass;
  out.items.push_back(detail::threshold_item("crossover_hqB_quad", "alpha* where F_hqB = F_spq at r = 1.5, quadrature",
                                             quad_diff(Family::hqB), 0.0, 0.3, 1.5, 0.8, 1.2, &hqB));
  const bool hqB_ok = out.items.back().pass;
  out.items.push_back(detail::threshold_item("crossover_hqA_printed", "alpha* where F_hqA = F_spq at r = 1.5, printed closed form",
                                             closed_diff(Family::hqA, FormulaVariant::printed), 0.0, 0.3, 1.5, 0.8, 1.2));
  out.items.push_back(detail::threshold_item("crossover_hqB_printed", "alpha* where F_hqB = F_spq at r = 1.5, printed closed form",
                                             closed_diff(Family::hqB, FormulaVariant::printed), 0.0, 0.3, 1.5, 0.8, 1.2));
  out.items.push_back(detail::threshold_item("crossover_hqB_corrected", "alpha* where F_hqB = F_spq at r = 1.5, corrected closed form",
                                             closed_diff(Family::hqB, FormulaVariant::corrected), 0.0, 0.3, 1.5, 0.8, 1.2));
  const double f0 = avg_fidelity_singlerail(k.delta);
  out.items.push_back(detail::threshold_item(
      "crossover_single_mode_quad", "alpha* where the single-rail fidelity equals the averaged coherent-qubit fidelity at r = 1.5, quadrature",
      [&](double a) { return detail::quad_avg(Family::coherent, a, k, opt.quad) - f0; }, 0.0, 0.4, 1.1, 0.6, 0.9, &single));
  const bool single_ok = out.items.back().pass;
  out.pass = hqA_ok && hqB_ok && single_ok;
  auto show = [](const std::optional<double>& v) { return v ? detail::fmt(*v, 5) : std::string("none"); };
  out.summary = "alpha* hqA " + show(hqA) + ", hqB " + show(hqB) + " in (0.8, 1.2); single-mode " + show(single) + " in (0.6, 0.9)";
  return out;
}

inline CriterionOutcome criterion_loss(const ValidationOptions& opt = {}) {
  CriterionOutcome out{9, "loss behaviour", true, "", {}};
  const auto losses = linear_grid(0.0, 1.0, 21);
  bool monotone = true;
  detail::MaxDev full_loss;
  for (auto f : kAllFamilies) {
    const std::vector<double> alphas =
        !uses_alpha(f) ? std::vector<double>{0.0} : (f == Family::coherent ? kSingleModeFigureAlphas : kFigureAlphas);
    double worst_rise = 0.0;
    std::string where = "-";
    for (double a : alphas) {
      const double vacuum = detail::quad_avg(f, a, NoiseKernel{2.0}, opt.quad);
      for (double r : {1.5, 2.0}) {
        double prev = 2.0;
        for (double R : losses) {
          const auto k = noise_kernel(apply_symmetric_loss(tmsv_covariance(r), R));
          const double v = detail::quad_avg(f, a, k, opt.quad);
          if (v - prev > worst_rise) {
            worst_rise = v - prev;
            where = "alpha=" + detail::fmt(a) + " r=" + detail::fmt(r) + " R=" + detail::fmt(R);
          }
          prev = v;
          if (R == 1.0) full_loss.update(std::abs(v - vacuum), std::string(to_string(f)) + " alpha=" + detail::fmt(a) + " r=" + detail::fmt(r));
        }
      }
    }
    out.items.push_back({std::string("loss_monotone_") + to_string(f),
                         std::string("largest increase of the averaged fidelity between consecutive R (step 0.05, r in {1.5, 2}), ") +
                             to_string(f) + " (worst at " + where + ")",
                         0.0, worst_rise, 1e-12, worst_rise <= 1e-12});
    monotone = monotone && out.items.back().pass;
  }
  out.items.push_back(detail::bound_item("loss_full_equals_vacuum", "|F(R = 1) - F(delta = 2)| over families, alphas and r", full_loss, 1e-8));

  // Loss cutoff at r = 2 (and r = 1.5 for information).
  const double target = 2.0 / 3.0;
  struct Path {
    const char* id;
    Family f;
    double a;
    std::optional<FormulaVariant> closed;  // nullopt: quadrature
  };
  const Path paths[] = {{"spq_closed", Family::spq, 0.0, FormulaVariant::printed},
                        {"spq_quad", Family::spq, 0.0, std::nullopt},
                        {"singlerail_closed", Family::singlerail, 0.0, FormulaVariant::printed},
                        {"singlerail_quad", Family::singlerail, 0.0, std::nullopt},
                        {"hqA_corrected", Family::hqA, 1.0, FormulaVariant::corrected},
                        {"hqA_printed", Family::hqA, 1.0, FormulaVariant::printed},
                        {"hqA_quad", Family::hqA, 1.0, std::nullopt},
                        {"hqB_corrected", Family::hqB, 1.0, FormulaVariant::corrected},
                        {"hqB_printed", Family::hqB, 1.0, FormulaVariant::printed},
                        {"hqB_quad", Family::hqB, 1.0, std::nullopt},
                        {"coherent_quad", Family::coherent, 0.5, std::nullopt}};
  bool cutoff_ok = true;
  std::string cutoffs;
  for (double r : {2.0, 1.5}) {
    std::vector<std::optional<double>> roots;
    for (const auto& p : paths) {
      auto metric = [&](double R) {
        const auto k = noise_kernel(ChannelSpec{r, R});
        Evaluator ev{p.closed ? Method::closed_form : Method::quadrature, p.closed};
        return evaluate_average(p.f, p.a, k, ev, opt.quad).value;
      };
      std::optional<double> root;
      try {
        root = bisect(metric, target, 0.0, 1.0, 1e-5).root;
      } catch (const std::exception&) {
      }
      roots.push_back(root);
      out.items.push_back({std::string("loss_cutoff_") + p.id + "_r" + detail::fmt(r),
                           std::string("R* where F = 2/3 at r = ") + detail::fmt(r) + ", " + p.id +
                               (p.a > 0 ? " alpha=" + detail::fmt(p.a) : std::string()) +
                               "; the quoted R ~ 0.35 is an annotation, not an assertion",
                           "R ~ 0.35 (quoted)", root ? json(*root) : json("no crossing in [0, 1]"), nullptr, root.has_value()});
    }
    if (r != 2.0) continue;
    // closed-form vs quadrature agreement pairs (closed index, quad index)
    const std::pair<int, int> pairs[] = {{0, 1}, {2, 3}, {4, 6}, {7, 9}};
    for (auto [c, q] : pairs) {
      const bool have = roots[c] && roots[q];
      const double dev = have ? std::abs(*roots[c] - *roots[q]) : std::numeric_limits<double>::infinity();
      out.items.push_back({std::string("loss_cutoff_agreement_") + paths[c].id, std::string("|R*(") + paths[c].id + ") - R*(" + paths[q].id + ")| at r = 2",
                           0.0, have ? json(dev) : json("missing root"), 0.005, dev <= 0.005});
      cutoff_ok = cutoff_ok && out.items.back().pass;
      if (have) cutoffs += std::string(cutoffs.empty() ? "" : ", ") + paths[q].id + " " + detail::fmt(*roots[q], 4);
    }
    const bool have = roots[8] && roots[9];
    out.items.push_back({"loss_cutoff_printed_hqB_vs_quad", "|R*(hqB printed) - R*(hqB quad)| at r = 2 (informational)", 0.0,
                         have ? json(std::abs(*roots[8] - *roots[9])) : json("missing root"), nullptr, true});
  }
  out.pass = monotone && full_loss.value <= 1e-8 && cutoff_ok;
  out.summary = std::string("monotone ") + (monotone ? "yes" : "NO") + "; |F(R=1) - F(delta=2)| " + detail::fmt(full_loss.value) +
                "; R* at r = 2: " + cutoffs + " (paper quotes R ~ 0.35, not asserted)";
  return out;
}

/// Parameter sets for the Monte Carlo cross-check. The prescribed proposal
/// leaves a polynomially growing weight, so the variance grows as delta -> 0
/// and with alpha; the sets stay where 10^6 samples give stderr <= 2e-3.
struct MonteCarloCase {
  Family family;
  double alpha, r, loss, p, phi;
  std::uint64_t seed;
};

inline std::vector<MonteCarloCase> monte_carlo_cases(std::uint64_t seed, int count = 20) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<MonteCarloCase> cases;
  for (int i = 0; i < count; ++i) {
    MonteCarloCase c;
    c.family = kAllFamilies[static_cast<std::size_t>(i) % std::size(kAllFamilies)];
    c.alpha = uses_alpha(c.family) ? 0.2 + 0.8 * unit(rng) : 0.0;
    c.r = 0.5 * unit(rng);
    c.loss = 0.3 * unit(rng);
    c.p = unit(rng);
    c.phi = 2.0 * std::numbers::pi * unit(rng);
    c.seed = seed + 1000 + static_cast<std::uint64_t>(i);
    cases.push_back(c);
  }
  return cases;
}

inline CriterionOutcome criterion_monte_carlo(const ValidationOptions& opt = {}) {
  CriterionOutcome out{10, "Monte Carlo vs quadrature", true, "", {}};
  double worst_z = 0.0, worst_se = 0.0;
  for (const auto& c : monte_carlo_cases(opt.seed)) {
    const auto k = noise_kernel(ChannelSpec{c.r, c.loss, mode_count(c.family) == 1 ? Topology::single : Topology::pair});
    const auto state = make_qubit({c.family, c.alpha, c.p, c.phi});
    const double q = fidelity_fixed(state, k, opt.quad).raw;
    const auto mc = fidelity_monte_carlo(state, k, opt.mc_samples, c.seed);
    const double z = std::abs(mc.raw - q) / mc.error_estimate;
    worst_z = std::max(worst_z, z);
    worst_se = std::max(worst_se, mc.error_estimate);
    const bool ok = z <= 3.0 && mc.error_estimate <= 2e-3;
    out.items.push_back({std::string("monte_carlo_") + to_string(c.family) + "_" + std::to_string(c.seed),
                         std::string("MC (") + std::to_string(opt.mc_samples) + " samples) vs quadrature, " + to_string(c.family) +
                             " alpha=" + detail::fmt(c.alpha) + " r=" + detail::fmt(c.r) + " R=" + detail::fmt(c.loss) +
                             " p=" + detail::fmt(c.p) + " phi=" + detail::fmt(c.phi) + ", stderr " + detail::fmt(mc.error_estimate, 3),
                         q, mc.raw, 3.0 * mc.error_estimate, ok});
    out.pass = out.pass && ok;
  }
  out.summary = "worst |MC - quad|/stderr " + detail::fmt(worst_z, 3) + " (<= 3), worst stderr " + detail::fmt(worst_se, 3) + " (<= 2e-3)";
  return out;
}

// ---------------------------------------------------------------------------
// Module invariants and printed-formula observations

inline std::vector<ReportItem> invariant_items(const ValidationOptions& opt = {}) {
  std::vector<ReportItem> items;
  std::vector<double> deltas{1e-6};
  for (int i = 1; i <= 40; ++i) deltas.push_back(0.05 * i);

  // Closed forms against the analytic-moments average.
  struct Closed {
    const char* id;
    Family f;
    std::optional<FormulaVariant> v;
  };
  const Closed closed[] = {{"spq", Family::spq, std::nullopt},
                           {"singlerail", Family::singlerail, std::nullopt},
                           {"hqA_corrected", Family::hqA, FormulaVariant::corrected},
                           {"hqA_printed", Family::hqA, FormulaVariant::printed},
                           {"hqB_corrected", Family::hqB, FormulaVariant::corrected},
                           {"hqB_printed", Family::hqB, FormulaVariant::printed}};
  for (const auto& c : closed) {
    detail::MaxDev d;
    const std::vector<double> alphas = uses_alpha(c.f) ? detail::kInvariantAlphas : std::vector<double>{0.0};
    for (double a : alphas) {
      for (double delta : deltas) {
        Evaluator ev{Method::closed_form, c.v.value_or(FormulaVariant::printed)};
        const double v = evaluate_average(c.f, a, NoiseKernel{delta}, ev, opt.quad).value;
        d.update(std::abs(v - fidelity_average({c.f, a}, NoiseKernel{delta}, opt.quad).raw),
                 "alpha=" + detail::fmt(a) + " delta=" + detail::fmt(delta));
      }
    }
    items.push_back(detail::bound_item(std::string("closed_vs_moments_") + c.id,
                                       std::string("closed form ") + c.id + " vs analytic-moments average, delta in {1e-6, 0.05..2}", d, 1e-8));
  }

  // Ideal-channel identity of the closed forms.
  for (const auto& c : closed) {
    detail::MaxDev d;
    const std::vector<double> alphas = uses_alpha(c.f) ? detail::kInvariantAlphas : std::vector<double>{0.0};
    for (double a : alphas) {
      Evaluator ev{Method::closed_form, c.v.value_or(FormulaVariant::printed)};
      d.update(std::abs(1.0 - evaluate_average(c.f, a, NoiseKernel{0.0}, ev, opt.quad).value), "alpha=" + detail::fmt(a));
    }
    items.push_back(detail::bound_item(std::string("closed_ideal_") + c.id, std::string("|1 - closed form| at delta = 0, ") + c.id, d, 1e-12));
  }

  // Loss substitution: closed form at delta' vs quadrature on the lossy covariance.
  {
    detail::MaxDev d;
    for (double r : {0.5, 1.0, 2.0})
      for (double R : {0.1, 0.35, 0.7}) {
        const auto k = noise_kernel(apply_symmetric_loss(tmsv_covariance(r), R));
        const double dprime = 2.0 * R + 2.0 * (1.0 - R) * std::exp(-2.0 * r);
        const std::string at = "r=" + detail::fmt(r) + " R=" + detail::fmt(R);
        d.update(std::abs(avg_fidelity_spq(dprime) - detail::quad_avg(Family::spq, 0, k, opt.quad)), "spq " + at);
        d.update(std::abs(avg_fidelity_singlerail(dprime) - detail::quad_avg(Family::singlerail, 0, k, opt.quad)), "singlerail " + at);
        d.update(std::abs(avg_fidelity_hqA(dprime, 1.0) - detail::quad_avg(Family::hqA, 1.0, k, opt.quad)), "hqA " + at);
        d.update(std::abs(avg_fidelity_hqB(dprime, 1.0, FormulaVariant::corrected) - detail::quad_avg(Family::hqB, 1.0, k, opt.quad)),
                 "hqB " + at);
      }
    items.push_back(detail::bound_item("loss_substitution", "closed forms at delta' = 2R + 2(1-R)e^{-2r} vs quadrature with the lossy covariance", d, 1e-8));
  }

  // Averaging paths agree where both apply.
  {
    detail::MaxDev d;
    for (auto f : {Family::spq, Family::hqA, Family::hqB, Family::singlerail})
      for (double delta : {0.1, 0.8, 2.0}) {
        const double a = uses_alpha(f) ? 0.8 : 0.0;
        d.update(std::abs(fidelity_average({f, a}, NoiseKernel{delta}, opt.quad, AveragingMethod::analytic_moments).raw -
                          fidelity_average({f, a}, NoiseKernel{delta}, opt.quad, AveragingMethod::numeric_grid).raw),
                 std::string(to_string(f)) + " delta=" + detail::fmt(delta));
      }
    items.push_back(detail::bound_item("averaging_paths_agree", "analytic-moments vs numeric-grid average", d, 1e-10));
  }

  // Quadrature convergence: order vs order/2 difference.
  {
    detail::MaxDev d;
    for (auto f : kAllFamilies)
      for (double delta : {1e-6, 0.1, 1.0, 2.0})
        for (double a : {0.5, 2.0}) {
          const auto r = fidelity_average_auto({f, uses_alpha(f) ? a : 0.0}, NoiseKernel{delta}, opt.quad);
          d.update(r.error_estimate, std::string(to_string(f)) + " alpha=" + detail::fmt(a) + " delta=" + detail::fmt(delta));
        }
    items.push_back(detail::bound_item("quadrature_converged", "largest |F(order) - F(order/2)| over families, alpha in {0.5, 2}",
                                       d, kConvergenceThreshold));
  }

  // Channel: lossy covariance stays physical and reproduces delta'.
  {
    detail::MaxDev d;
    bool physical = true;
    for (double r : {0.0, 0.5, 1.0, 2.0, 3.0})
      for (double R : linear_grid(0.0, 1.0, 11)) {
        const auto cov = apply_symmetric_loss(tmsv_covariance(r), R);
        physical = physical && cov.physical();
        d.update(std::abs(noise_kernel(cov).delta - noise_kernel(ChannelSpec{r, R}).delta), "r=" + detail::fmt(r) + " R=" + detail::fmt(R));
      }
    items.push_back(detail::bound_item("channel_delta_paths", "4(eta' - c') vs 2R + 2(1-R)e^{-2r}", d, 1e-12));
    items.push_back({"channel_physical", "lossy TMSV covariance satisfies eta' >= 1/2 and eta'^2 - c'^2 >= 1/4", true, physical, nullptr, physical});
  }

  // Kernel orientation: with the inverse covariance the per-mode width grows
  // as 8 e^{2r} and the fidelity falls with squeezing instead of reaching 1.
  {
    const double r = 2.0;
    const double v = detail::quad_avg(Family::spq, 0.0, NoiseKernel{8.0 * std::exp(2.0 * r)}, opt.quad);
    items.push_back({"kernel_inverse_orientation", "spq average at r = 2 with the kernel exp(-Z^T Sigma^{-1} Z) as printed (inconsistent with the closed forms)",
                     avg_fidelity_spq(detail::lossless(r).delta), v, 1e-8, false});
  }

  // Coherent-qubit closed form.
  {
    const double v = avg_fidelity_coherent_qubit(0.0, 0.5, 1.0, 0.0);
    items.push_back({"coherent_printed_ideal", "printed coherent-qubit expression at p = 1, delta = 0 (must be 1 for the ideal channel)",
                     1.0, v, 1e-8, std::abs(v - 1.0) <= 1e-8});
    items.push_back({"coherent_printed_ideal_deviation_detected", "printed coherent-qubit expression at p = 1, delta = 0 differs from 1 by more than 0.6",
                     "> 0.6", std::abs(v - 1.0), 0.6, std::abs(v - 1.0) > 0.6});
    const double delta = 2.0 * std::exp(-2.0);
    const double grid = fidelity_average({Family::coherent, 0.5}, NoiseKernel{delta}, opt.quad, AveragingMethod::numeric_grid).raw;
    const double printed = avg_fidelity_coherent_qubit_input_average(delta, 0.5, opt.quad.p_nodes, opt.quad.phi_nodes);
    items.push_back({"coherent_printed_vs_grid", "printed coherent-qubit expression averaged over (p, phi) vs the numeric-grid oracle, alpha = 0.5, delta = 2e^{-2}",
                     grid, printed, 1e-8, std::abs(grid - printed) <= 1e-8});
    items.push_back({"coherent_printed_cross_exponent", "cross term of the printed coherent-qubit expression carries e^{-alpha^2}; the overlap <alpha|-alpha> gives e^{-2 alpha^2}",
                     "exp(-2 alpha^2)", "exp(-alpha^2)", nullptr, false});
  }
  return items;
}

// ---------------------------------------------------------------------------

inline std::vector<CriterionOutcome> acceptance_criteria(const ValidationOptions& opt = {}) {
  return {criterion_ideal_channel(opt), criterion_spq_closed_form(opt), criterion_hqB_closed_form(opt),
          criterion_hqA_closed_form(opt), criterion_factorization(opt), criterion_cat_bridge(opt),
          criterion_thresholds(opt),      criterion_crossovers(opt),      criterion_loss(opt),
          criterion_monte_carlo(opt)};
}

inline std::vector<ReportItem> report_items(const std::vector<CriterionOutcome>& criteria, const ValidationOptions& opt = {}) {
  std::vector<ReportItem> items;
  for (const auto& c : criteria) items.insert(items.end(), c.items.begin(), c.items.end());
  const auto inv = invariant_items(opt);
  items.insert(items.end(), inv.begin(), inv.end());
  return items;
}

inline std::vector<ReportItem> validation_report(const ValidationOptions& opt = {}) {
  return report_items(acceptance_criteria(opt), opt);
}

inline std::string report_json(const std::vector<ReportItem>& items) { return json(items).dump(2) + "\n"; }

/// Fixed sweep used for the determinism check.
inline SweepConfig determinism_sweep_config() {
  SweepConfig c;
  c.families = {Family::spq, Family::hqA, Family::hqB, Family::singlerail, Family::coherent};
  c.alpha_grid = {0.5, 1.0};
  c.r_grid = {0.5, 1.0, 1.5};
  c.loss_grid = {0.0, 0.2};
  c.method = "both";
  c.variant = "all";
  c.threads = 2;  // exercise the ordered multi-threaded path
  return c;
}

inline std::string sweep_csv(const SweepConfig& c) {
  std::ostringstream os;
  write_csv(os, run_sweep(c));
  return os.str();
}

/// Byte-identical report and sweep output across two runs.
inline CriterionOutcome criterion_determinism(const ValidationOptions& opt = {},
                                              const std::vector<CriterionOutcome>* first_run = nullptr) {
  CriterionOutcome out{11, "determinism", false, "", {}};
  const std::string a = report_json(first_run ? report_items(*first_run, opt) : validation_report(opt));
  const std::string b = report_json(validation_report(opt));
  const std::string s1 = sweep_csv(determinism_sweep_config());
  const std::string s2 = sweep_csv(determinism_sweep_config());
  out.items.push_back({"determinism_validate", "two validation runs give byte-identical JSON", true, a == b, nullptr, a == b});
  out.items.push_back({"determinism_sweep", "two runs of a fixed sweep give byte-identical CSV", true, s1 == s2, nullptr, s1 == s2});
  out.pass = a == b && s1 == s2;
  out.summary = std::string("validate ") + (a == b ? "identical" : "DIFFERS") + " (" + std::to_string(a.size()) + " bytes), sweep " +
                (s1 == s2 ? "identical" : "DIFFERS") + " (" + std::to_string(s1.size()) + " bytes)";
  return out;
}

}  // namespace cvtele
