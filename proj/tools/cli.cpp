#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmsgof/eigen.hpp"
#include "rmsgof/errors.hpp"
#include "rmsgof/model.hpp"
#include "rmsgof/montecarlo.hpp"
#include "rmsgof/parallel.hpp"
#include "rmsgof/stats.hpp"
#include "rmsgof/wsumchi2.hpp"

#ifndef RMSGOF_VERSION
#define RMSGOF_VERSION "unknown"
#endif

namespace rmsgof::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string model;
  std::string actual;
  std::string counts;
  std::optional<double> x;
  std::string grid = "auto:100";
  std::string stats = "rms,chi2,g2,ft";
  std::size_t sims = SimulationConfig{}.n_sims;
  std::uint64_t draws = SimulationConfig{}.m;
  std::uint64_t seed = SimulationConfig{}.seed;
  double confidence = SimulationConfig{}.confidence_threshold;
  double success = SimulationConfig{}.success_fraction;
  std::uint64_t lo = SearchBounds{}.lo;
  std::uint64_t hi = SearchBounds{}.hi;
  double tol = QuadratureConfig{}.abs_tol;
  double tmax = QuadratureConfig{}.t_max;
  std::string orders = "10,21";
  std::string policy = "global";
  std::size_t max_subdivisions = QuadratureConfig{}.max_subdivisions;
  std::size_t threads = 0;
  std::string out;
  std::string manifest;
};

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string g12(double v) { return format("%.12g", v); }

QuadratureConfig quadrature_from(const Options& o) {
  QuadratureConfig q;
  q.abs_tol = o.tol;
  q.t_max = o.tmax;
  q.max_subdivisions = o.max_subdivisions;
  const auto comma = o.orders.find(',');
  if (comma == std::string::npos) throw InputError("--orders expects LOW,HIGH, got '" + o.orders + "'");
  try {
    std::size_t used = 0;
    const std::string low = o.orders.substr(0, comma);
    const std::string high = o.orders.substr(comma + 1);
    q.low_order = std::stoi(low, &used);
    if (used != low.size()) throw std::invalid_argument(low);
    q.high_order = std::stoi(high, &used);
    if (used != high.size()) throw std::invalid_argument(high);
  } catch (const std::logic_error&) {
    throw InputError("--orders expects LOW,HIGH, got '" + o.orders + "'");
  }
  if (o.policy == "global") {
    q.policy = AdaptivePolicy::kGlobal;
  } else if (o.policy == "local") {
    q.policy = AdaptivePolicy::kLocal;
  } else {
    throw InputError("--policy must be global or local");
  }
  q.validate();
  return q;
}

SimulationConfig simulation_from(const Options& o) {
  SimulationConfig s;
  s.seed = o.seed;
  s.n_sims = o.sims;
  s.m = o.draws;
  s.confidence_threshold = o.confidence;
  s.success_fraction = o.success;
  s.threads = resolve_thread_count(o.threads);
  s.validate();
  return s;
}

json quadrature_json(const QuadratureConfig& q) {
  return {{"t_max", q.t_max},
          {"low_order", q.low_order},
          {"high_order", q.high_order},
          {"abs_tol", q.abs_tol},
          {"max_subdivisions", q.max_subdivisions},
          {"policy", q.policy == AdaptivePolicy::kGlobal ? "global" : "local"}};
}

json simulation_json(const SimulationConfig& s) {
  return {{"seed", s.seed},
          {"n_sims", s.n_sims},
          {"m", s.m},
          {"confidence_threshold", s.confidence_threshold},
          {"success_fraction", s.success_fraction},
          {"threads", s.threads}};
}

std::string canonical_text(const ModelDistribution& model) {
  std::ostringstream text;
  write_distribution(text, model);
  return text.str();
}

class Run {
 public:
  Run(std::string command, const Options& options, std::ostream& out)
      : options_(options), stdout_(out), start_(Clock::now()) {
    manifest_["tool"] = "rmsgof";
    manifest_["version"] = RMSGOF_VERSION;
    manifest_["command"] = std::move(command);
    manifest_["config"] = json::object();
    manifest_["inputs"] = json::object();
    manifest_["timings_seconds"] = json::object();
    manifest_["results"] = json::object();
    phase_start_ = start_;
  }

  json& manifest() { return manifest_; }
  const Options& options() const { return options_; }

  std::ostream& out() {
    if (options_.out.empty()) return stdout_;
    if (!file_) {
      file_ = std::make_unique<std::ofstream>(options_.out, std::ios::binary);
      if (!*file_) throw InputError("cannot open output file '" + options_.out + "'");
    }
    return *file_;
  }

  void phase(const std::string& name) {
    const auto now = Clock::now();
    manifest_["timings_seconds"][name] = std::chrono::duration<double>(now - phase_start_).count();
    phase_start_ = now;
  }

  ModelDistribution load_model(const std::string& key, const std::string& source) {
    if (source.empty()) throw InputError("--" + key + " is required");
    const ModelDistribution model = resolve_model(source);
    manifest_["inputs"][key] = {{"source", source}, {"n", model.size()}, {"fnv1a64", fnv1a_hex(canonical_text(model))}};
    return model;
  }

  void finish(std::ostream& err, int code) {
    if (file_) file_->flush();
    manifest_["timings_seconds"]["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
    manifest_["exit_code"] = code;
    const std::string text = manifest_.dump();
    if (!options_.manifest.empty()) {
      std::ofstream m(options_.manifest, std::ios::binary);
      m << text << '\n';
    }
    err << text << '\n';
  }

 private:
  const Options& options_;
  std::ostream& stdout_;
  std::unique_ptr<std::ofstream> file_;
  json manifest_;
  Clock::time_point start_;
  Clock::time_point phase_start_;
};

int cmd_eigs(Run& run) {
  const auto model = run.load_model("model", run.options().model);
  run.phase("load");
  const auto spectrum = variance_spectrum(model);
  run.phase("spectrum");
  std::ostream& out = run.out();
  out << "variance\n";
  for (double v : spectrum.variances) out << g12(v) << '\n';
  out << "# zero_eigenvalue_residual=" << format("%.6e", spectrum.zero_eigenvalue_residual) << '\n';
  run.manifest()["results"] = {{"variances", spectrum.size()},
                               {"zero_eigenvalue_residual", spectrum.zero_eigenvalue_residual},
                               {"trace", spectrum.trace},
                               {"jacobi_sweeps", spectrum.jacobi_sweeps},
                               {"precision_warning", spectrum.precision_warning}};
  return kOk;
}

int cmd_pvalue(Run& run, std::ostream& err) {
  const Options& o = run.options();
  const QuadratureConfig q = quadrature_from(o);
  run.manifest()["config"]["quadrature"] = quadrature_json(q);
  if (o.x.has_value() == !o.counts.empty()) throw InputError("pvalue needs exactly one of --x or --counts");
  const auto model = run.load_model("model", o.model);
  double x = 0.0;
  if (o.x) {
    x = *o.x;
    if (!std::isfinite(x)) throw InputError("--x must be finite");
  } else {
    const DrawCounts counts = load_counts_file(o.counts);
    std::ostringstream text;
    for (auto c : counts.counts()) text << c << '\n';
    run.manifest()["inputs"]["counts"] = {
        {"source", o.counts}, {"n", counts.size()}, {"m", counts.total()}, {"fnv1a64", fnv1a_hex(text.str())}};
    x = rms_statistic(counts, model);
  }
  run.phase("load");
  const auto spectrum = variance_spectrum(model);
  if (spectrum.precision_warning) err << "warning: max p / min p exceeds 1e7; expect reduced accuracy\n";
  run.phase("spectrum");
  const CdfEvaluation r = ContourCdf(spectrum, q)(x);
  run.phase("evaluate");
  std::ostream& out = run.out();
  out << "x,confidence,significance,nodes_used,error_estimate\n";
  out << g12(x) << ',' << g12(r.p) << ',' << g12(r.significance()) << ',' << r.nodes_used << ','
      << format("%.3e", r.error_estimate) << '\n';
  run.manifest()["results"] = {{"nodes_used", r.nodes_used}, {"budget_exceeded", r.budget_exceeded}};
  return r.budget_exceeded ? kBudgetExceeded : kOk;
}

int cmd_curve(Run& run, std::ostream& err) {
  const Options& o = run.options();
  const QuadratureConfig q = quadrature_from(o);
  run.manifest()["config"]["quadrature"] = quadrature_json(q);
  const std::size_t threads = resolve_thread_count(o.threads);
  run.manifest()["config"]["threads"] = threads;
  const GridSpec grid = parse_grid(o.grid);
  run.manifest()["config"]["grid"] = o.grid;
  const auto model = run.load_model("model", o.model);
  run.phase("load");
  const auto spectrum = variance_spectrum(model);
  if (spectrum.precision_warning) err << "warning: max p / min p exceeds 1e7; expect reduced accuracy\n";
  run.phase("spectrum");
  const ContourCdf cdf(spectrum, q);

  std::vector<double> xs(grid.points);
  switch (grid.kind) {
    case GridSpec::Kind::kLinear:
      for (std::size_t i = 0; i < grid.points; ++i) {
        xs[i] = grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) / static_cast<double>(grid.points - 1);
      }
      break;
    case GridSpec::Kind::kLog:
      for (std::size_t i = 0; i < grid.points; ++i) {
        xs[i] = grid.lo * std::pow(grid.hi / grid.lo, static_cast<double>(i) / static_cast<double>(grid.points - 1));
      }
      break;
    case GridSpec::Kind::kAuto: {
      const double x_hi = x_for_significance(cdf, grid.tail_significance);
      for (std::size_t i = 0; i < grid.points; ++i) {
        xs[i] = x_hi * static_cast<double>(i + 1) / static_cast<double>(grid.points);
      }
      break;
    }
  }
  run.phase("grid");

  std::vector<CdfEvaluation> results(xs.size());
  parallel_for(xs.size(), threads, [&](std::size_t i) { results[i] = cdf(xs[i]); });
  run.phase("evaluate");

  std::ostream& out = run.out();
  out << "x,significance,nodes_used\n";
  std::size_t max_nodes = 0;
  std::size_t over_budget = 0;
  for (const auto& r : results) {
    out << g12(r.x) << ',' << g12(r.significance()) << ',' << r.nodes_used << '\n';
    max_nodes = std::max(max_nodes, r.nodes_used);
    over_budget += r.budget_exceeded;
  }
  run.manifest()["results"] = {{"points", results.size()}, {"max_nodes", max_nodes}, {"budget_exceeded", over_budget}};
  return over_budget > 0 ? kBudgetExceeded : kOk;
}

int cmd_power(Run& run) {
  const Options& o = run.options();
  const SimulationConfig s = simulation_from(o);
  run.manifest()["config"]["simulation"] = simulation_json(s);
  const auto ids = parse_statistic_list(o.stats);
  run.manifest()["config"]["statistics"] = o.stats;
  const auto model = run.load_model("model", o.model);
  const auto actual = run.load_model("actual", o.actual);
  run.phase("load");
  const PowerResult result = power_experiment(model, actual, ids, s);
  run.phase("simulate");
  write_power_csv_header(run.out());
  write_power_csv(run.out(), result);
  return kOk;
}

int cmd_distinguish(Run& run) {
  const Options& o = run.options();
  const SimulationConfig s = simulation_from(o);
  run.manifest()["config"]["simulation"] = simulation_json(s);
  run.manifest()["config"]["search_bounds"] = {o.lo, o.hi};
  const auto ids = parse_statistic_list(o.stats);
  run.manifest()["config"]["statistics"] = o.stats;
  const auto model = run.load_model("model", o.model);
  const auto actual = run.load_model("actual", o.actual);
  run.phase("load");
  std::vector<DistinguishResult> results;
  for (Statistic id : ids) results.push_back(distinguish_m(model, actual, id, s, {o.lo, o.hi}));
  run.phase("search");
  std::ostream& out = run.out();
  out << "statistic,n,m,rate,failing_m,failing_rate,n_sims,seed\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& r = results[i];
    out << statistic_name(ids[i]) << ',' << model.size() << ',' << r.m << ',' << g12(r.rate) << ',' << r.failing_m
        << ',' << g12(r.failing_rate) << ',' << s.n_sims << ',' << s.seed << '\n';
  }
  return kOk;
}

void add_model(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "model distribution: file path or builtin name (e.g. table3:e)")->required();
}

void add_quadrature(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol", o.tol, "absolute quadrature tolerance")->capture_default_str();
  cmd->add_option("--tmax", o.tmax, "upper integration limit")->capture_default_str();
  cmd->add_option("--orders", o.orders, "low,high quadrature orders")->capture_default_str();
  cmd->add_option("--policy", o.policy, "adaptive policy: global or local")->capture_default_str();
  cmd->add_option("--max-subdivisions", o.max_subdivisions, "bisection budget")->capture_default_str();
}

void add_simulation(CLI::App* cmd, Options& o) {
  cmd->add_option("--actual", o.actual, "distribution the draws come from")->required();
  cmd->add_option("--stats", o.stats, "comma-separated statistics: rms,chi2,g2,ft")->capture_default_str();
  cmd->add_option("--sims", o.sims, "simulations per phase")->capture_default_str();
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--confidence", o.confidence, "calibration quantile")->capture_default_str();
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--threads", o.threads, "worker threads (0: RMSGOF_THREADS or all cores)")->capture_default_str();
  cmd->add_option("--out", o.out, "write CSV here instead of stdout");
  cmd->add_option("--manifest", o.manifest, "also write the run manifest JSON here");
}

}  // namespace

GridSpec parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream in(spec);
  for (std::string item; std::getline(in, item, ':');) parts.push_back(item);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw InputError("bad number '" + s + "' in grid '" + spec + "'");
    }
  };
  auto count = [&](const std::string& s) {
    const double v = number(s);
    if (v != std::floor(v) || v < 2.0 || v > 1e7) throw InputError("grid needs an integer count >= 2, got '" + s + "'");
    return static_cast<std::size_t>(v);
  };

  GridSpec g;
  if (parts.empty()) throw InputError("empty grid spec");
  if ((parts[0] == "lin" || parts[0] == "log") && parts.size() == 4) {
    g.kind = parts[0] == "lin" ? GridSpec::Kind::kLinear : GridSpec::Kind::kLog;
    g.lo = number(parts[1]);
    g.hi = number(parts[2]);
    g.points = count(parts[3]);
    if (!(g.hi > g.lo)) throw InputError("grid upper bound must exceed the lower bound");
    if (g.kind == GridSpec::Kind::kLog && !(g.lo > 0.0)) throw InputError("log grid needs a positive lower bound");
    return g;
  }
  if (parts[0] == "auto" && (parts.size() == 2 || parts.size() == 3)) {
    g.kind = GridSpec::Kind::kAuto;
    g.points = count(parts[1]);
    if (parts.size() == 3) g.tail_significance = number(parts[2]);
    if (!(g.tail_significance > 0.0 && g.tail_significance < 1.0)) {
      throw InputError("auto grid tail significance must lie in (0, 1)");
    }
    return g;
  }
  throw InputError("grid must be lin:a:b:N, log:a:b:N or auto:N[:sig], got '" + spec + "'");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Confidence levels and power experiments for the root-mean-square goodness-of-fit statistic"};
  app.set_version_flag("--version", RMSGOF_VERSION);
  app.require_subcommand(1);

  auto* eigs = app.add_subcommand("eigs", "variances of the limiting Gaussian components of a model");
  add_model(eigs, o);
  add_common(eigs, o);

  auto* pvalue = app.add_subcommand("pvalue", "confidence level for one statistic value or one set of counts");
  add_model(pvalue, o);
  pvalue->add_option("--x", o.x, "value of X = m sum (Y_k - p_k)^2");
  pvalue->add_option("--counts", o.counts, "file with one observed count per bin");
  add_quadrature(pvalue, o);
  add_common(pvalue, o);

  auto* curve = app.add_subcommand("curve", "significance 1 - P(x) on a grid of x values");
  add_model(curve, o);
  curve->add_option("--grid", o.grid, "lin:a:b:N, log:a:b:N or auto:N[:sig]")->capture_default_str();
  add_quadrature(curve, o);
  add_common(curve, o);

  auto* power = app.add_subcommand("power", "Monte Carlo power of each statistic against an actual distribution");
  add_model(power, o);
  add_simulation(power, o);
  power->add_option("--draws", o.draws, "draws per simulation (m)")->capture_default_str();
  add_common(power, o);

  auto* distinguish = app.add_subcommand("distinguish", "smallest m whose power reaches the success fraction");
  add_model(distinguish, o);
  add_simulation(distinguish, o);
  distinguish->add_option("--success", o.success, "required success fraction")->capture_default_str();
  distinguish->add_option("--lo", o.lo, "lower search bound for m")->capture_default_str();
  distinguish->add_option("--hi", o.hi, "upper search bound for m")->capture_default_str();
  add_common(distinguish, o);

  std::vector<std::string> argv_storage = {"rmsgof"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Run run(chosen->get_name(), o, out);
  run.manifest()["argv"] = args;
  int code = kOk;
  try {
    if (chosen == eigs) code = cmd_eigs(run);
    if (chosen == pvalue) code = cmd_pvalue(run, err);
    if (chosen == curve) code = cmd_curve(run, err);
    if (chosen == power) code = cmd_power(run);
    if (chosen == distinguish) code = cmd_distinguish(run);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    run.manifest()["error"] = e.what();
    code = kInputError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    run.manifest()["error"] = e.what();
    code = kDegenerate;
  }
  if (code == kBudgetExceeded) err << "warning: quadrature budget exceeded; results are best estimates\n";
  run.finish(err, code);
  return code;
}

}  // namespace rmsgof::cli
