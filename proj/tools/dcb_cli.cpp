// dcb_cli: analysis, simulation and channel allocation for DCB WLANs.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcb/dcb.hpp"

namespace {

using namespace dcb;

enum Exit { kOk = 0, kOther = 1, kParse = 2, kInfeasible = 3, kCap = 4, kAssert = 5 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownWidth:
    case ErrorCode::NonPositiveWidth:
      return kParse;
    case ErrorCode::InvalidBlock:
    case ErrorCode::PrimaryBusy:
    case ErrorCode::InfeasibleScheme:
    case ErrorCode::EmptyBox:
    case ErrorCode::InfeasibleBoxes:
    case ErrorCode::NoBlockFits:
      return kInfeasible;
    case ErrorCode::StateSpaceTooLarge:
    case ErrorCode::SearchSpaceTooLarge:
      return kCap;
    default:
      return kOther;
  }
}

struct Globals {
  std::string params_file;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output;
};

ModelParams base_params(const Globals& g) {
  return g.params_file.empty() ? ModelParams{} : load_params_file(g.params_file);
}

// Scenario parameters apply first; a --params file overrides them.
Scenario load_scenario(const std::string& path, const Globals& g) {
  Scenario s = load_scenario_file(path);
  if (!g.params_file.empty()) {
    apply_params(detail::parse_json_text(detail::read_file(g.params_file), g.params_file), s.params,
                 g.params_file);
  }
  return s;
}

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, g.output + ": cannot open for writing");
  out << text;
}

std::string join_names(const std::vector<std::size_t>& wlans, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i : wlans) {
    if (!out.empty()) out += '+';
    out += names[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  std::string scenario;
  bool exact = false;
  std::string table = "both";
};

int cmd_analyze(const AnalyzeOptions& o, const Globals& g) {
  const Scenario sc = load_scenario(o.scenario, g);
  const auto net = sc.network();
  const auto traffic = sc.traffic();
  const auto names = sc.names();
  const auto space = enumerate_state_space(net);
  const auto pf = product_form_distribution(space, traffic);
  std::optional<Distribution> ex;
  std::vector<double> flows;
  if (o.exact) {
    ex = exact_distribution(space, traffic);
    flows = balance_flows(space, traffic, pf);
  }

  std::ostringstream out;
  if (o.table == "states" || o.table == "both") {
    std::vector<std::string> header = {"state_id", "active_pairs", "pi"};
    if (o.exact) {
      header.push_back("pi_exact");
      header.push_back("balance_residual");
    }
    write_csv_row(out, header);
    for (std::size_t s = 0; s < space.size(); ++s) {
      std::vector<std::string> row = {std::to_string(s), format_active_pairs(space[s], names),
                                      sci6(pf[s])};
      if (o.exact) {
        row.push_back(sci6((*ex)[s]));
        row.push_back(sci6(flows[s]));
      }
      write_csv_row(out, row);
    }
  }
  if (o.table == "both") out << '\n';
  if (o.table == "summary" || o.table == "both") {
    auto report = throughput(space, pf, traffic);
    report.channel_utilization = channel_utilization(net);
    write_csv_row(out, {"metric", "subject", "value"});
    for (std::size_t i = 0; i < net.size(); ++i) {
      write_csv_row(out, {"throughput_mbps", names[i], fixed6(to_mbps(report.per_wlan[i]))});
    }
    write_csv_row(out, {"throughput_mbps", "aggregate", fixed6(to_mbps(report.aggregate))});
    if (o.exact) {
      const auto exr = throughput(space, *ex, traffic);
      for (std::size_t i = 0; i < net.size(); ++i) {
        write_csv_row(out, {"exact_throughput_mbps", names[i], fixed6(to_mbps(exr.per_wlan[i]))});
      }
      write_csv_row(out, {"exact_throughput_mbps", "aggregate", fixed6(to_mbps(exr.aggregate))});
      const auto res = balance_residual(space, traffic);
      write_csv_row(out, {"balance_residual", format_active_pairs(space[res.state], names),
                          sci6(res.value)});
    }
    write_csv_row(out, {"jfi", "network", fixed6(report.jfi)});
    write_csv_row(out, {"cu", "network", fixed6(report.channel_utilization)});
    for (const auto& set : overlap_metrics(net).overlap_sets) {
      write_csv_row(out, {"se_mbps_per_mhz", join_names(set.wlans, names),
                          fixed6(to_mbps(spectrum_efficiency(set, report, net)))});
    }
  }
  emit(g, out.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string scenario;
  double horizon = 100.0;
  std::optional<double> warmup;
  int replications = 30;
  std::string backoff = "exponential";
  std::string transmission = "exponential";
  std::vector<int> cw;
  bool compare = false;
  bool exact = false;
  std::optional<double> assert_pct;
  bool per_replication = false;
};

BackoffDistribution parse_backoff(const std::string& s) {
  if (s == "exponential") return BackoffDistribution::exponential;
  if (s == "uniform") return BackoffDistribution::uniform;
  if (s == "deterministic") return BackoffDistribution::deterministic;
  throw Error(ErrorCode::ParseError, "unknown backoff distribution \"" + s + "\"");
}

TransmissionDistribution parse_transmission(const std::string& s) {
  if (s == "exponential") return TransmissionDistribution::exponential;
  if (s == "deterministic") return TransmissionDistribution::deterministic;
  throw Error(ErrorCode::ParseError, "unknown transmission distribution \"" + s + "\"");
}

int cmd_simulate(const SimulateOptions& o, const Globals& g) {
  Scenario sc = load_scenario(o.scenario, g);
  SimConfig cfg;
  cfg.horizon = o.horizon;
  cfg.warmup = o.warmup;
  cfg.seed = g.seed;
  cfg.replications = o.replications;
  cfg.workers = g.workers;
  cfg.backoff = parse_backoff(o.backoff);
  cfg.transmission = parse_transmission(o.transmission);
  const bool reference = o.compare || o.exact || o.assert_pct.has_value();

  std::vector<int> cws = o.cw;
  if (cws.empty()) cws.push_back(sc.params.mac.contention_window);

  std::ostringstream out;
  if (o.per_replication) {
    write_csv_row(out, {"cw", "replication", "wlan", "throughput_bps"});
    const auto names = sc.names();
    for (int cw : cws) {
      sc.params.mac.contention_window = cw;
      const auto sim = simulate(sc.network(), sc.traffic(), cfg);
      for (std::size_t r = 0; r < sim.replications.size(); ++r) {
        for (std::size_t i = 0; i < names.size(); ++i) {
          write_csv_row(out, {std::to_string(cw), std::to_string(r), names[i],
                              fixed6(sim.replications[r][i])});
        }
      }
      for (std::size_t i = 0; i < names.size(); ++i) {
        write_csv_row(out, {std::to_string(cw), "mean", names[i], fixed6(sim.per_wlan_throughput[i])});
        write_csv_row(out, {std::to_string(cw), "ci95", names[i], fixed6(sim.confidence_halfwidth[i])});
      }
    }
    emit(g, out.str());
    return kOk;
  }
  std::vector<std::string> header = {"cw", "wlan", "simulated_mbps", "ci_halfwidth_mbps"};
  if (reference) {
    header.push_back(o.exact ? "exact_mbps" : "analytic_mbps");
    header.push_back("relative_error");
  }
  write_csv_row(out, header);
  bool violated = false;
  const auto names = sc.names();
  for (int cw : cws) {
    sc.params.mac.contention_window = cw;
    const auto net = sc.network();
    const auto traffic = sc.traffic();
    const auto sim = simulate(net, traffic, cfg);
    std::vector<double> ref;
    if (reference) {
      const auto space = enumerate_state_space(net);
      const auto dist = o.exact ? exact_distribution(space, traffic)
                                : product_form_distribution(space, traffic);
      ref = throughput(space, dist, traffic).per_wlan;
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
      std::vector<std::string> row = {std::to_string(cw), names[i],
                                      fixed6(to_mbps(sim.per_wlan_throughput[i])),
                                      fixed6(to_mbps(sim.confidence_halfwidth[i]))};
      if (reference) {
        const double err = ref[i] > 0 ? (sim.per_wlan_throughput[i] - ref[i]) / ref[i] : 0.0;
        row.push_back(fixed6(to_mbps(ref[i])));
        row.push_back(fixed6(err));
        if (o.assert_pct && std::abs(err) * 100.0 > *o.assert_pct) violated = true;
      }
      write_csv_row(out, row);
    }
  }
  emit(g, out.str());
  if (violated) {
    std::cerr << "error: simulated throughput deviates from the reference by more than "
              << *o.assert_pct << "%\n";
    return kAssert;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct OptimizeOptions {
  int wlans = 0;
  int channels = 0;
  std::string method = "bbm";
  std::string trace;
  std::size_t draws = 1000;
  double cap = kExhaustiveCap;
};

void write_report_rows(std::ostream& out, const ThroughputReport& r) {
  for (std::size_t i = 0; i < r.per_wlan.size(); ++i) {
    write_csv_row(out, {"throughput_mbps", default_wlan_name(i), fixed6(to_mbps(r.per_wlan[i]))});
  }
  write_csv_row(out, {"aggregate_mbps", "network", fixed6(to_mbps(r.aggregate))});
  write_csv_row(out, {"jfi", "network", fixed6(r.jfi)});
  write_csv_row(out, {"cu", "network", fixed6(r.channel_utilization)});
}

int cmd_optimize(const OptimizeOptions& o, const Globals& g) {
  const ModelParams params = base_params(g);
  const ProblemInstance inst{o.wlans, o.channels, params.model(), params.fit};
  inst.validate();
  const MethodSpec method = parse_method(o.method);
  if (!o.trace.empty() && method.kind != MethodKind::bbm) {
    throw Error(ErrorCode::InvalidArgument, "--trace is only available for --method bbm");
  }

  std::ostringstream out;
  write_csv_row(out, {"field", "subject", "value"});
  write_csv_row(out, {"method", "network", method.label()});
  switch (method.kind) {
    case MethodKind::bbm: {
      const auto r = optimize(inst);
      write_csv_row(out, {"regime", "network", to_string(r.regime)});
      write_csv_row(out, {"scheme", "network", format_scheme(r.scheme)});
      write_csv_row(out, {"allocation", "network", to_literal(r.allocation)});
      write_csv_row(out, {"objective_mbps", "network", fixed6(to_mbps(r.bnb.best_value))});
      write_report_rows(out, r.report);
      if (!o.trace.empty()) {
        std::ofstream t(o.trace, std::ios::binary);
        if (!t) throw Error(ErrorCode::InvalidArgument, o.trace + ": cannot open for writing");
        write_trace_csv(t, r.bnb);
      }
      break;
    }
    case MethodKind::greedy: {
      const auto r = greedy(inst);
      const auto net = scheme_to_allocation(inst, r.regime, r.scheme);
      write_csv_row(out, {"regime", "network", to_string(r.regime)});
      write_csv_row(out, {"scheme", "network", format_scheme(r.scheme)});
      write_csv_row(out, {"allocation", "network", to_literal(net)});
      write_csv_row(out, {"objective_mbps", "network", fixed6(to_mbps(r.value))});
      write_report_rows(out, network_throughput(net, inst.activity));
      break;
    }
    case MethodKind::random_fixed:
    case MethodKind::random_var: {
      Rng rng(derive_seed(g.seed, 0));
      const auto sample = method.kind == MethodKind::random_fixed
                              ? random_fixed_bw(inst, method.width, rng)
                              : random_variable_bw(inst, method.width, rng);
      const auto o2 = run_method(inst, method, o.draws, g.seed, g.workers);
      write_csv_row(out, {"sample_allocation", "network", to_literal(sample)});
      write_csv_row(out, {"draws", "network", std::to_string(o.draws)});
      write_csv_row(out, {"mean_aggregate_mbps", "network", fixed6(to_mbps(o2.aggregate))});
      write_csv_row(out, {"mean_jfi", "network", fixed6(o2.jfi)});
      write_csv_row(out, {"mean_cu", "network", fixed6(o2.cu)});
      break;
    }
    case MethodKind::exhaustive: {
      const auto r = exhaustive_search(inst, o.cap, g.workers);
      write_csv_row(out, {"allocation", "network", to_literal(r.allocation)});
      write_csv_row(out, {"overlap_degree", "network", std::to_string(r.overlap_degree)});
      write_csv_row(out, {"evaluated", "network", std::to_string(r.evaluated)});
      write_report_rows(out, r.report);
      break;
    }
  }
  emit(g, out.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  int channels = 4;
  std::string wlans = "1..10";
  std::vector<std::string> methods = {"bbm", "greedy"};
  std::vector<std::string> metrics = {"throughput", "jfi", "cu"};
  std::size_t draws = 1000;
  double cap = kExhaustiveCap;
};

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(text);
      return {n, n};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "range \"" + text + "\": expected N or A..B");
  }
}

int cmd_sweep(const SweepOptions& o, const Globals& g) {
  const ModelParams params = base_params(g);
  SweepSpec spec;
  spec.num_channels = o.channels;
  std::tie(spec.n_min, spec.n_max) = parse_range(o.wlans);
  spec.methods.clear();
  for (const auto& m : o.methods) spec.methods.push_back(parse_method(m));
  spec.metrics.clear();
  for (const auto& m : o.metrics) spec.metrics.push_back(parse_metric(m));
  spec.draws = o.draws;
  spec.seed = g.seed;
  spec.workers = g.workers;
  spec.exhaustive_cap = o.cap;
  const auto result = run_sweep(spec, params);
  for (const auto& n : result.notices) std::cerr << "notice: " << n << '\n';
  std::ostringstream out;
  write_sweep_csv(out, result);
  emit(g, out.str());
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_se_table(const Globals& g) {
  const ModelParams params = base_params(g);
  std::ostringstream out;
  write_csv_row(out, {"scheme", "wlan_i", "wlan_j", "overlap", "closed_form_mbps_per_mhz",
                      "ctmc_mbps_per_mhz", "relative_difference"});
  for (const auto& row : evaluate_se_catalog(params.model())) {
    write_csv_row(out, {row.scheme->label, row.scheme->wlan_i, row.scheme->wlan_j,
                        std::to_string(row.scheme->overlap), fixed6(to_mbps(row.closed_form)),
                        fixed6(to_mbps(row.ctmc)), sci6(row.relative_difference)});
  }
  emit(g, out.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Throughput analysis and channel allocation for dynamic channel bonding WLANs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--params", g.params_file, "JSON file with MAC/PHY parameters")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--output", g.output, "write results here instead of stdout");

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "state space, stationary distribution and metrics");
  analyze->fallthrough();
  analyze->add_option("scenario", ao.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  analyze->add_flag("--exact", ao.exact, "also solve global balance and report residuals");
  analyze->add_option("--table", ao.table, "states, summary or both")
      ->check(CLI::IsMember({"states", "summary", "both"}));

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "event-driven simulation with confidence intervals");
  sim->fallthrough();
  sim->add_option("scenario", so.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--horizon", so.horizon, "simulated seconds per replication");
  sim->add_option("--warmup", so.warmup, "discarded seconds (default 5% of horizon)");
  sim->add_option("--replications", so.replications, "independent replications")
      ->check(CLI::PositiveNumber);
  sim->add_option("--backoff", so.backoff, "exponential, uniform or deterministic");
  sim->add_option("--transmission", so.transmission, "exponential or deterministic");
  sim->add_option("--cw", so.cw, "contention windows to sweep")->delimiter(',');
  sim->add_flag("--compare", so.compare, "add product-form values and relative error");
  sim->add_flag("--exact", so.exact, "compare against the global-balance solution instead");
  sim->add_option("--assert-match", so.assert_pct, "fail if any relative error exceeds this percent");
  sim->add_flag("--per-replication", so.per_replication,
                "one row per replication and WLAN in bits/s, then mean and CI rows");

  OptimizeOptions oo;
  auto* opt = app.add_subcommand("optimize", "channel allocation for N WLANs on K channels");
  opt->fallthrough();
  opt->add_option("--wlans", oo.wlans, "number of WLANs N")->required();
  opt->add_option("--channels", oo.channels, "number of basic channels K")->required();
  opt->add_option("--method", oo.method,
                  "bbm, greedy, random-fixed:<w>, random-var:<w> or exhaustive");
  opt->add_option("--trace", oo.trace, "write the branch-and-bound trace CSV here");
  opt->add_option("--draws", oo.draws, "draws for random methods")->check(CLI::PositiveNumber);
  opt->add_option("--cap", oo.cap, "largest |C|^N the exhaustive search accepts");

  SweepOptions wo;
  auto* sweep = app.add_subcommand("sweep", "compare methods over a range of N");
  sweep->fallthrough();
  sweep->add_option("--channels", wo.channels, "number of basic channels K");
  sweep->add_option("--wlans", wo.wlans, "N or a range A..B");
  sweep->add_option("--methods", wo.methods, "comma-separated methods")->delimiter(',');
  sweep->add_option("--metrics", wo.metrics, "throughput, jfi, cu")->delimiter(',');
  sweep->add_option("--draws", wo.draws, "draws for random methods")->check(CLI::PositiveNumber);
  sweep->add_option("--cap", wo.cap, "largest |C|^N the exhaustive search accepts");

  auto* se = app.add_subcommand("se-table", "two-WLAN spectrum efficiency catalog");
  se->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*analyze) return cmd_analyze(ao, g);
    if (*sim) return cmd_simulate(so, g);
    if (*opt) return cmd_optimize(oo, g);
    if (*sweep) return cmd_sweep(wo, g);
    if (*se) return cmd_se_table(g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
