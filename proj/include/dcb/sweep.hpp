#pragma once

// Method comparison sweeps over N for a fixed K, and CSV writers for sweep
// results and search traces.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dcb/ctmc.hpp"
#include "dcb/error.hpp"
#include "dcb/io.hpp"
#include "dcb/optimizer.hpp"
#include "dcb/rng.hpp"

namespace dcb {

enum class MethodKind { bbm, greedy, random_fixed, random_var, exhaustive };
enum class Metric { throughput, jfi, cu };

struct MethodSpec {
  MethodKind kind = MethodKind::bbm;
  int width = 1;  // random_fixed: width; random_var: maximum width

  std::string label() const {
    switch (kind) {
      case MethodKind::bbm: return "bbm";
      case MethodKind::greedy: return "greedy";
      case MethodKind::random_fixed: return "random-fixed:" + std::to_string(width);
      case MethodKind::random_var: return "random-var:" + std::to_string(width);
      case MethodKind::exhaustive: return "exhaustive";
    }
    return "?";
  }
};

inline MethodSpec parse_method(const std::string& text) {
  if (text == "bbm") return {MethodKind::bbm, 1};
  if (text == "greedy") return {MethodKind::greedy, 1};
  if (text == "exhaustive") return {MethodKind::exhaustive, 1};
  for (const auto& [prefix, kind] : {std::pair{std::string("random-fixed:"), MethodKind::random_fixed},
                                     std::pair{std::string("random-var:"), MethodKind::random_var}}) {
    if (text.rfind(prefix, 0) == 0) {
      const std::string w = text.substr(prefix.size());
      if (w == "1" || w == "2" || w == "4" || w == "8") return {kind, std::stoi(w)};
      throw Error(ErrorCode::ParseError, "method \"" + text + "\": width must be 1, 2, 4 or 8");
    }
  }
  throw Error(ErrorCode::ParseError, "unknown method \"" + text + "\"");
}

inline std::string to_string(Metric m) {
  switch (m) {
    case Metric::throughput: return "throughput";
    case Metric::jfi: return "jfi";
    case Metric::cu: return "cu";
  }
  return "?";
}

inline Metric parse_metric(const std::string& text) {
  if (text == "throughput") return Metric::throughput;
  if (text == "jfi") return Metric::jfi;
  if (text == "cu") return Metric::cu;
  throw Error(ErrorCode::ParseError, "unknown metric \"" + text + "\"");
}

struct MethodOutcome {
  double aggregate = 0.0;  // bits/s
  double jfi = 0.0;
  double cu = 0.0;
  std::string allocation;  // literal; empty for random baselines

  double metric(Metric m) const {
    switch (m) {
      case Metric::throughput: return aggregate;
      case Metric::jfi: return jfi;
      case Metric::cu: return cu;
    }
    return 0.0;
  }
};

inline MethodOutcome outcome_of(const NetworkAllocation& net, const ThroughputReport& r) {
  return {r.aggregate, r.jfi, r.channel_utilization, to_literal(net)};
}

/// Runs one method on one instance. Random baselines average `draws`
/// allocations seeded from `seed`.
inline MethodOutcome run_method(const ProblemInstance& inst, const MethodSpec& method,
                                std::size_t draws, std::uint64_t seed, unsigned workers,
                                double exhaustive_cap = kExhaustiveCap) {
  switch (method.kind) {
    case MethodKind::bbm: {
      const auto r = optimize(inst);
      return outcome_of(r.allocation, r.report);
    }
    case MethodKind::greedy: {
      const auto g = greedy(inst);
      const auto net = scheme_to_allocation(inst, g.regime, g.scheme);
      return outcome_of(net, network_throughput(net, inst.activity));
    }
    case MethodKind::random_fixed:
    case MethodKind::random_var: {
      const RandomBaseline b{method.kind == MethodKind::random_fixed ? RandomKind::fixed_width
                                                                     : RandomKind::variable_width,
                             method.width};
      const auto s = random_baseline(inst, b, draws, seed, workers);
      return {s.mean_aggregate, s.mean_jfi, s.mean_channel_utilization, ""};
    }
    case MethodKind::exhaustive: {
      const auto r = exhaustive_search(inst, exhaustive_cap, workers);
      return outcome_of(r.allocation, r.report);
    }
  }
  return {};
}

struct SweepSpec {
  int num_channels = 4;
  int n_min = 1;
  int n_max = 10;
  std::vector<MethodSpec> methods = {{MethodKind::bbm, 1}, {MethodKind::greedy, 1}};
  std::size_t draws = 1000;
  std::vector<Metric> metrics = {Metric::throughput, Metric::jfi, Metric::cu};
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double exhaustive_cap = kExhaustiveCap;

  void validate() const {
    if (num_channels < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
    if (n_min < 1 || n_max < n_min) throw Error(ErrorCode::InvalidArgument, "empty N range");
    if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods selected");
    if (metrics.empty()) throw Error(ErrorCode::InvalidArgument, "no metrics selected");
    if (draws == 0) throw Error(ErrorCode::InvalidArgument, "draws must be positive");
  }
};

struct SweepRow {
  int num_channels = 0;
  int num_wlans = 0;
  std::string method;
  Metric metric = Metric::throughput;
  double value = 0.0;  // throughput in bits/s
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> notices;  // skipped points
};

inline SweepResult run_sweep(const SweepSpec& spec, const ModelParams& params) {
  spec.validate();
  SweepResult out;
  for (int n = spec.n_min; n <= spec.n_max; ++n) {
    ProblemInstance inst{n, spec.num_channels, params.model(), params.fit};
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
      const auto& method = spec.methods[m];
      const std::uint64_t seed =
          derive_seed(derive_seed(spec.seed, static_cast<std::uint64_t>(n)), m);
      MethodOutcome o;
      try {
        o = run_method(inst, method, spec.draws, seed, spec.workers, spec.exhaustive_cap);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SearchSpaceTooLarge && e.code() != ErrorCode::NoBlockFits) throw;
        out.notices.push_back("K=" + std::to_string(spec.num_channels) + " N=" + std::to_string(n) +
                              " " + method.label() + " skipped: " + e.what());
        continue;
      }
      for (Metric metric : spec.metrics) {
        out.rows.push_back({spec.num_channels, n, method.label(), metric, o.metric(metric)});
      }
    }
  }
  return out;
}

/// Long format: K,N,method,metric,value with throughput in Mbps.
inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  write_csv_row(out, {"K", "N", "method", "metric", "value"});
  for (const auto& row : r.rows) {
    const double v = row.metric == Metric::throughput ? to_mbps(row.value) : row.value;
    write_csv_row(out, {std::to_string(row.num_channels), std::to_string(row.num_wlans), row.method,
                        to_string(row.metric), fixed6(v)});
  }
}

/// One line per trace entry; objective and bounds in Mbps.
inline void write_trace_csv(std::ostream& out, const BnbResult& r) {
  write_csv_row(out, {"iteration", "scheme", "feasible", "objective", "lower_bound", "upper_bound"});
  for (const auto& row : r.trace) {
    for (const auto& e : row.entries) {
      write_csv_row(out, {std::to_string(row.iteration), format_scheme(e.scheme),
                          e.feasible ? "yes" : "no", fixed6(to_mbps(e.objective)),
                          fixed6(to_mbps(row.lower_bound)), fixed6(to_mbps(row.upper_bound))});
    }
  }
}

}  // namespace dcb
