// cvtele: teleportation fidelities of photonic qubits through a TMSV channel.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure.
// `validate` exits 0 whatever the report says.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvtele/cvtele.hpp"

namespace {

using namespace cvtele;
using json = nlohmann::json;

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw UsageError("write to '" + path + "' failed");
}

Method parse_method(const std::string& s) {
  if (s == "closed") return Method::closed_form;
  if (s == "quad") return Method::quadrature;
  if (s == "mc") return Method::monte_carlo;
  throw UsageError("method must be closed, quad or mc");
}

struct FidelityArgs {
  std::string family = "spq";
  double alpha = 1.0;
  double r = 1.0;
  double loss = 0.0;
  double p = 0.5;
  double phi = 0.0;
  std::string method = "quad";
  std::string variant = "printed";
  bool average = false;
  int quad_order = QuadratureConfig{}.order;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
};

int run_fidelity(const FidelityArgs& a) {
  const Family family = parse_family(a.family);
  const Method method = parse_method(a.method);
  const FormulaVariant variant = parse_variant(a.variant);
  QubitSpec spec{family, a.alpha, a.p, a.phi};
  spec.validate();
  QuadratureConfig quad;
  quad.order = a.quad_order;
  quad.validate();
  const auto kernel = noise_kernel(ChannelSpec{a.r, a.loss, mode_count(family) == 1 ? Topology::single : Topology::pair});

  json out{{"family", to_string(family)}, {"alpha", a.alpha}, {"r", a.r}, {"loss", a.loss}, {"delta", kernel.delta},
           {"method", a.method}};
  double value = 0.0, err = 0.0;
  std::string status = "ok";
  bool averaged = a.average;
  std::string variant_name = "none";
  if (method == Method::closed_form) {
    variant_name = to_string(variant);
    if (family == Family::coherent && !a.average) {
      value = avg_fidelity_coherent_qubit(kernel.delta, a.alpha, a.p, a.phi, variant);
    } else {
      // Closed forms are input averages; (p, phi) do not enter.
      averaged = true;
      const auto res = evaluate_average(family, a.alpha, kernel, {Method::closed_form, variant}, quad);
      if (res.status.rfind("error", 0) == 0) throw std::invalid_argument(res.status);
      if (res.status != "ok") throw NumericalError(res.status);
      value = res.value;
    }
  } else if (method == Method::quadrature) {
    const auto res = a.average ? fidelity_average_auto(spec.family_spec(), kernel, quad) : fidelity_fixed(spec, kernel, quad);
    value = res.value;
    err = res.error_estimate;
    status = to_string(res.status);
  } else {
    if (a.average) throw UsageError("monte carlo runs at fixed (p, phi); drop --average");
    const auto res = fidelity_monte_carlo(make_qubit(spec), kernel, a.samples, a.seed);
    value = res.value;
    err = res.error_estimate;
    out["samples"] = a.samples;
    out["seed"] = a.seed;
  }
  if (!averaged) {
    out["p"] = a.p;
    out["phi"] = a.phi;
  }
  out["averaged"] = averaged;
  out["variant"] = variant_name;
  out["fidelity"] = value;
  out["error_estimate"] = err;
  out["status"] = status;
  std::cout << out.dump() << '\n';
  return status == "ok" ? 0 : kNumerical;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_path) {
  std::ifstream is(config_path);
  if (!is) throw UsageError("cannot read config '" + config_path + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  SweepConfig config;
  try {
    config = sweep_config_from_json(j);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  const auto rows = run_sweep(config);
  std::ostringstream os;
  write_csv(os, rows);
  write_text(out_path.empty() ? config.out : out_path, os.str());
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  std::fprintf(stderr, "%zu rows, %zu with non-ok status\n", rows.size(), failed);
  return 0;
}

int run_figure(int id, const std::string& out_path) {
  const auto fig = reproduce_figure(id);
  std::ostringstream os;
  write_csv(os, fig.rows, fig.comments);
  write_text(out_path, os.str());
  return 0;
}

struct ThresholdArgs {
  std::string metric = "spq";
  double target = 2.0 / 3.0;
  std::string var = "r";
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-4;
  double alpha = 1.0;
  double r = 1.0;
  double loss = 0.0;
  std::string method = "closed";
  std::string variant = "printed";
};

int run_threshold(const ThresholdArgs& a) {
  ThresholdQuery q;
  q.metric = MetricSpec::parse(a.metric);
  q.metric.alpha = a.alpha;
  q.metric.r = a.r;
  q.metric.loss = a.loss;
  const Method m = parse_method(a.method);
  if (m == Method::monte_carlo) throw UsageError("threshold supports closed and quad only");
  q.metric.evaluator = {m, m == Method::closed_form ? std::optional(parse_variant(a.variant)) : std::nullopt};
  q.target = a.target;
  q.variable = parse_threshold_variable(a.var);
  q.lo = a.lo;
  q.hi = a.hi;
  q.tolerance = a.tol;
  ThresholdResult res;
  try {
    res = find_threshold(q);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  json out{{"metric", q.metric.name()}, {"variable", a.var},      {"target", a.target},
           {"root", res.root},          {"bracket", {res.lo, res.hi}}, {"metric_at_bracket", {res.metric_at_lo, res.metric_at_hi}},
           {"iterations", res.iterations}, {"method", a.method},   {"variant", m == Method::closed_form ? a.variant : "none"}};
  std::cout << out.dump() << '\n';
  return 0;
}

int run_validate(const std::string& out_path, std::size_t samples) {
  ValidationOptions opt;
  opt.mc_samples = samples;
  const auto items = validation_report(opt);
  write_text(out_path, report_json(items));
  std::size_t passed = 0;
  for (const auto& it : items) passed += it.pass;
  std::fprintf(stderr, "%zu of %zu report items pass\n", passed, items.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teleportation fidelities of photonic qubits through a two-mode squeezed vacuum channel"};
  app.require_subcommand(1);

  FidelityArgs fa;
  auto* fid = app.add_subcommand("fidelity", "Fidelity for one input and channel");
  fid->add_option("--family", fa.family, "spq | hqA | hqB | singlerail | coherent")->required();
  fid->add_option("--alpha", fa.alpha, "coherent amplitude");
  fid->add_option("--r", fa.r, "squeezing");
  fid->add_option("--loss", fa.loss, "beam-splitter reflectivity R");
  fid->add_option("--p", fa.p, "input weight p");
  fid->add_option("--phi", fa.phi, "input phase");
  fid->add_option("--method", fa.method, "closed | quad | mc");
  fid->add_option("--variant", fa.variant, "printed | corrected (closed forms)");
  fid->add_flag("--average", fa.average, "average over inputs instead of fixing (p, phi)");
  fid->add_option("--quad-order", fa.quad_order, "Gauss-Hermite points per axis");
  fid->add_option("--samples", fa.samples, "Monte Carlo samples");
  fid->add_option("--seed", fa.seed, "Monte Carlo seed");

  std::string sweep_config, sweep_out;
  auto* sw = app.add_subcommand("sweep", "Grid sweep from a JSON config");
  sw->add_option("--config", sweep_config, "sweep.json")->required();
  sw->add_option("--out", sweep_out, "CSV output (overrides config 'out'; '-' for stdout)");

  int fig_id = 0;
  std::string fig_out;
  auto* fg = app.add_subcommand("figure", "Data behind one of the paper's figures");
  fg->add_option("--id", fig_id, "1..5")->required()->check(CLI::Range(1, 5));
  fg->add_option("--out", fig_out, "CSV output");

  ThresholdArgs ta;
  auto* th = app.add_subcommand("threshold", "Bisection for metric = target");
  th->add_option("--metric", ta.metric, "family or difference, e.g. spq, hqA-spq")->required();
  th->add_option("--target", ta.target, "target value");
  th->add_option("--var", ta.var, "r | alpha | loss")->required();
  th->add_option("--lo", ta.lo, "bracket start")->required();
  th->add_option("--hi", ta.hi, "bracket end")->required();
  th->add_option("--tol", ta.tol, "bracket width at termination");
  th->add_option("--alpha", ta.alpha, "fixed alpha");
  th->add_option("--r", ta.r, "fixed squeezing");
  th->add_option("--loss", ta.loss, "fixed loss");
  th->add_option("--method", ta.method, "closed | quad");
  th->add_option("--variant", ta.variant, "printed | corrected");

  std::string val_out;
  std::size_t val_samples = ValidationOptions{}.mc_samples;
  auto* va = app.add_subcommand("validate", "Discrepancy report");
  va->add_option("--out", val_out, "report.json");
  va->add_option("--samples", val_samples, "Monte Carlo samples per parameter set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*fid) return run_fidelity(fa);
    if (*sw) return run_sweep_cmd(sweep_config, sweep_out);
    if (*fg) return run_figure(fig_id, fig_out);
    if (*th) return run_threshold(ta);
    if (*va) return run_validate(val_out, val_samples);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
