#pragma once

// Parameter sweeps, threshold bisection and figure datasets on top of the
// closed forms and the quadrature engine.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cvtele/channel.hpp"
#include "cvtele/closed_forms.hpp"
#include "cvtele/fidelity_engine.hpp"
#include "cvtele/qubit_states.hpp"

namespace cvtele {

/// Shortest decimal that still carries full double precision.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Which formula or integrator produces a number.
struct Evaluator {
  Method method = Method::quadrature;
  std::optional<FormulaVariant> variant;  // closed forms only

  std::string variant_name() const { return variant ? to_string(*variant) : "none"; }
};

/// Closed-form variants that actually exist for a family.
inline std::vector<FormulaVariant> available_variants(Family f) {
  if (f == Family::hqA || f == Family::hqB) return {FormulaVariant::printed, FormulaVariant::corrected};
  return {FormulaVariant::printed};
}

struct PointResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  double error_estimate = 0.0;
  std::string status = "ok";
};

/// Input-averaged fidelity for one family at one channel setting.
inline PointResult evaluate_average(Family family, double alpha, NoiseKernel kernel, const Evaluator& ev,
                                    const QuadratureConfig& quad = {}) {
  PointResult out;
  try {
    if (ev.method == Method::closed_form) {
      const auto v = ev.variant.value_or(FormulaVariant::printed);
      switch (family) {
        case Family::spq: out.value = avg_fidelity_spq(kernel.delta); break;
        case Family::singlerail: out.value = avg_fidelity_singlerail(kernel.delta); break;
        case Family::hqA: out.value = avg_fidelity_hqA(kernel.delta, alpha, v); break;
        case Family::hqB: out.value = avg_fidelity_hqB(kernel.delta, alpha, v); break;
        case Family::coherent:
          if (v == FormulaVariant::corrected) throw std::invalid_argument("no corrected closed form for coherent qubit");
          out.value = avg_fidelity_coherent_qubit_input_average(kernel.delta, alpha, quad.p_nodes, quad.phi_nodes);
          break;
      }
    } else if (ev.method == Method::quadrature) {
      const auto r = fidelity_average_auto({family, alpha}, kernel, quad);
      out.value = r.value;
      out.error_estimate = r.error_estimate;
      out.status = to_string(r.status);
    } else {
      throw std::invalid_argument("monte carlo is only available for fixed inputs");
    }
  } catch (const NumericalError& e) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.status = std::string("numerical_error: ") + e.what();
  } catch (const std::exception& e) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.status = std::string("error: ") + e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
  std::vector<Family> families;
  std::vector<double> alpha_grid{1.0};
  std::vector<double> r_grid{1.0};
  std::vector<double> loss_grid{0.0};
  std::optional<Topology> topology;  // unset: implied per family
  std::string method = "quad";       // closed | quad | both
  std::string variant = "printed";   // printed | corrected | all
  QuadratureConfig quad;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    auto increasing = [](const std::vector<double>& g, const char* name) {
      if (g.empty()) throw std::invalid_argument(std::string("sweep: ") + name + " is empty");
      for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) throw std::invalid_argument(std::string("sweep: ") + name + " must be strictly increasing");
      }
    };
    if (families.empty()) throw std::invalid_argument("sweep: families is empty");
    increasing(alpha_grid, "alpha_grid");
    increasing(r_grid, "r_grid");
    increasing(loss_grid, "loss_grid");
    if (alpha_grid.front() < 0.0) throw std::invalid_argument("sweep: alpha must be >= 0");
    if (r_grid.front() < 0.0) throw std::invalid_argument("sweep: r must be >= 0");
    if (loss_grid.front() < 0.0 || loss_grid.back() > 1.0) throw std::invalid_argument("sweep: loss must lie in [0, 1]");
    if (method != "closed" && method != "quad" && method != "both") {
      throw std::invalid_argument("sweep: method must be closed, quad or both");
    }
    if (variant != "printed" && variant != "corrected" && variant != "all") {
      throw std::invalid_argument("sweep: variant must be printed, corrected or all");
    }
    if (topology) {
      for (auto f : families) {
        const Topology implied = mode_count(f) == 1 ? Topology::single : Topology::pair;
        if (implied != *topology) {
          throw std::invalid_argument(std::string("sweep: family ") + to_string(f) + " needs topology " + to_string(implied));
        }
      }
    }
    quad.validate();
  }

  /// Evaluators applied to every grid point of a family, in output order.
  std::vector<Evaluator> evaluators(Family f) const {
    std::vector<Evaluator> out;
    if (method == "closed" || method == "both") {
      if (variant == "all") {
        for (auto v : available_variants(f)) out.push_back({Method::closed_form, v});
      } else {
        out.push_back({Method::closed_form, parse_variant(variant)});
      }
    }
    if (method == "quad" || method == "both") out.push_back({Method::quadrature, std::nullopt});
    return out;
  }

  std::size_t expected_rows() const {
    std::size_t n = 0;
    for (auto f : families) n += evaluators(f).size();
    return n * alpha_grid.size() * r_grid.size() * loss_grid.size();
  }
};

inline std::vector<double> json_grid(const nlohmann::json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig c;
  for (const auto& f : j.at("families")) c.families.push_back(parse_family(f.get<std::string>()));
  c.alpha_grid = json_grid(j, "alpha_grid", c.alpha_grid);
  c.r_grid = json_grid(j, "r_grid", c.r_grid);
  c.loss_grid = json_grid(j, "loss_grid", c.loss_grid);
  if (j.contains("topology")) {
    const auto t = j.at("topology").get<std::string>();
    if (t == "single") c.topology = Topology::single;
    else if (t == "pair") c.topology = Topology::pair;
    else if (t != "auto") throw std::invalid_argument("sweep: topology must be single, pair or auto");
  }
  c.method = j.value("method", c.method);
  c.variant = j.value("variant", c.variant);
  if (j.contains("quad")) {
    const auto& q = j.at("quad");
    c.quad.order = q.value("order", c.quad.order);
    c.quad.p_nodes = q.value("p_nodes", c.quad.p_nodes);
    c.quad.phi_nodes = q.value("phi_nodes", c.quad.phi_nodes);
  }
  c.seed = j.value("seed", c.seed);
  c.out = j.value("out", c.out);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

struct SweepRow {
  Family family = Family::spq;
  double alpha = 0.0;
  double r = 0.0;
  double loss = 0.0;
  double delta = 0.0;
  double fidelity = 0.0;
  Method method = Method::quadrature;
  std::string variant;
  double error_estimate = 0.0;
  std::string status;
};

inline constexpr const char* kCsvHeader = "family,alpha,r,loss,delta,fidelity,method,variant,error_estimate,status";

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.family) << ',' << format_double(r.alpha) << ',' << format_double(r.r) << ','
       << format_double(r.loss) << ',' << format_double(r.delta) << ',' << format_double(r.fidelity) << ','
       << to_string(r.method) << ',' << r.variant << ',' << format_double(r.error_estimate) << ','
       << csv_escape(r.status) << '\n';
  }
}

/// Evaluate jobs[i]() into results[i] on a few worker threads; output order is
/// the job order regardless of completion order.
template <typename Result>
std::vector<Result> run_ordered(const std::vector<std::function<Result()>>& jobs, unsigned threads) {
  std::vector<Result> results(jobs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i]();
    return results;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < jobs.size(); i += threads) results[i] = jobs[i]();
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

/// One row per (family, evaluator, alpha, r, loss), in that nesting order.
inline std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  std::vector<std::function<SweepRow()>> jobs;
  for (auto f : config.families)
    for (const auto& ev : config.evaluators(f))
      for (double a : config.alpha_grid)
        for (double r : config.r_grid)
          for (double R : config.loss_grid) {
            jobs.emplace_back([f, ev, a, r, R, &config] {
              SweepRow row;
              row.family = f;
              row.alpha = a;
              row.r = r;
              row.loss = R;
              row.method = ev.method;
              row.variant = ev.variant_name();
              const auto kernel = noise_kernel(ChannelSpec{r, R, mode_count(f) == 1 ? Topology::single : Topology::pair});
              row.delta = kernel.delta;
              const auto res = evaluate_average(f, a, kernel, ev, config.quad);
              row.fidelity = res.value;
              row.error_estimate = res.error_estimate;
              row.status = res.status;
              return row;
            });
          }
  auto rows = run_ordered(jobs, config.threads);
  if (rows.size() != config.expected_rows()) throw std::logic_error("run_sweep: row count mismatch");
  return rows;
}

// ---------------------------------------------------------------------------
// Thresholds

enum class ThresholdVariable { r, alpha, loss };

inline ThresholdVariable parse_threshold_variable(const std::string& s) {
  if (s == "r") return ThresholdVariable::r;
  if (s == "alpha") return ThresholdVariable::alpha;
  if (s == "loss" || s == "R") return ThresholdVariable::loss;
  throw std::invalid_argument("threshold variable must be r, alpha or loss");
}

/// An averaged fidelity, or the difference of two ("hqA-spq").
struct MetricSpec {
  Family primary = Family::spq;
  std::optional<Family> subtract;
  double alpha = 1.0;
  double r = 1.0;
  double loss = 0.0;
  Evaluator evaluator{Method::closed_form, FormulaVariant::printed};
  QuadratureConfig quad;

  static MetricSpec parse(const std::string& name) {
    MetricSpec m;
    const auto dash = name.find('-');
    m.primary = parse_family(name.substr(0, dash));
    if (dash != std::string::npos) m.subtract = parse_family(name.substr(dash + 1));
    return m;
  }

  std::string name() const {
    return std::string(to_string(primary)) + (subtract ? std::string("-") + to_string(*subtract) : "");
  }

  double evaluate(ThresholdVariable var, double x) const {
    double a = alpha, r_ = r, R = loss;
    switch (var) {
      case ThresholdVariable::r: r_ = x; break;
      case ThresholdVariable::alpha: a = x; break;
      case ThresholdVariable::loss: R = x; break;
    }
    auto one = [&](Family f) {
      const auto kernel = noise_kernel(ChannelSpec{r_, R});
      const auto res = evaluate_average(f, a, kernel, evaluator, quad);
      if (!std::isfinite(res.value)) throw NumericalError("metric " + name() + " failed: " + res.status);
      return res.value;
    };
    double v = one(primary);
    if (subtract) v -= one(*subtract);
    return v;
  }
};

struct ThresholdQuery {
  MetricSpec metric;
  double target = 2.0 / 3.0;
  ThresholdVariable variable = ThresholdVariable::r;
  double lo = 0.0;
  double hi = 1.0;
  double tolerance = 1e-4;
};

struct ThresholdResult {
  double root = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  double metric_at_lo = 0.0;
  double metric_at_hi = 0.0;
  int iterations = 0;
};

/// Bisection on an arbitrary scalar function; throws when the bracket has no sign change.
inline ThresholdResult bisect(const std::function<double(double)>& f, double target, double lo, double hi, double tol) {
  if (!(hi > lo)) throw std::invalid_argument("threshold: bracket must satisfy lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("threshold: tolerance must be positive");
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo * fhi > 0.0) {
    throw std::domain_error("threshold: no sign change in bracket; metric(" + format_double(lo) + ") = " +
                            format_double(flo + target) + ", metric(" + format_double(hi) + ") = " +
                            format_double(fhi + target) + ", target " + format_double(target));
  }
  ThresholdResult res;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid) - target;
    ++res.iterations;
    if (fm == 0.0) {
      lo = hi = mid;
      flo = fhi = 0.0;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  res.root = 0.5 * (lo + hi);
  res.lo = lo;
  res.hi = hi;
  res.metric_at_lo = flo + target;
  res.metric_at_hi = fhi + target;
  return res;
}

inline ThresholdResult find_threshold(const ThresholdQuery& q) {
  return bisect([&](double x) { return q.metric.evaluate(q.variable, x); }, q.target, q.lo, q.hi, q.tolerance);
}

// ---------------------------------------------------------------------------
// Figures

inline std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
  return g;
}

inline const std::vector<double> kFigureAlphas{0.5, 1.0, 1.5, 2.0};
inline const std::vector<double> kSingleModeFigureAlphas{0.5, 0.75, 1.0, 1.5};

struct FigureData {
  std::vector<std::string> comments;
  SweepConfig config;
  std::vector<SweepRow> rows;
};

/// Configuration behind figure 1..5:
///   1  spq vs hqA, fidelity vs r, no loss
///   2  spq vs hqB, fidelity vs r, no loss
///   3  single-rail vs coherent qubit, single TMSV, fidelity vs r
///   4  spq vs hqA, fidelity vs loss at r = 1.5, 2.0
///   5  spq vs hqB, fidelity vs loss at r = 1.5, 2.0
inline SweepConfig figure_config(int id) {
  SweepConfig c;
  c.method = "both";
  c.variant = "all";
  switch (id) {
    case 1: c.families = {Family::spq, Family::hqA}; break;
    case 2: c.families = {Family::spq, Family::hqB}; break;
    case 3: c.families = {Family::singlerail, Family::coherent}; break;
    case 4: c.families = {Family::spq, Family::hqA}; break;
    case 5: c.families = {Family::spq, Family::hqB}; break;
    default: throw std::invalid_argument("figure id must be 1..5");
  }
  c.alpha_grid = id == 3 ? kSingleModeFigureAlphas : kFigureAlphas;
  if (id <= 3) {
    c.r_grid = linear_grid(0.0, 3.0, 31);
    c.loss_grid = {0.0};
  } else {
    c.r_grid = {1.5, 2.0};
    c.loss_grid = linear_grid(0.0, 1.0, 21);
  }
  return c;
}

inline FigureData reproduce_figure(int id, unsigned threads = 0) {
  FigureData fig;
  fig.config = figure_config(id);
  fig.config.threads = threads;
  std::ostringstream alphas;
  for (std::size_t i = 0; i < fig.config.alpha_grid.size(); ++i) {
    alphas << (i ? " " : "") << format_double(fig.config.alpha_grid[i]);
  }
  fig.comments.push_back("figure " + std::to_string(id));
  fig.comments.push_back("alpha values (chosen, not read off the original plots): " + alphas.str());
  fig.comments.push_back(id <= 3 ? "sweep: r in [0, 3] step 0.1, loss 0" : "sweep: loss in [0, 1] step 0.05, r in {1.5, 2.0}");
  fig.comments.push_back("closed rows carry the formula variant; quad rows are the quadrature reference");
  fig.rows = run_sweep(fig.config);
  return fig;
}

}  // namespace cvtele
