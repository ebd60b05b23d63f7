#pragma once

// Event-driven simulation of saturated DCB WLANs with continuous backoff and
// zero propagation delay (hence no collisions).

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "dcb/channelization.hpp"
#include "dcb/ctmc.hpp"
#include "dcb/error.hpp"
#include "dcb/mac_phy.hpp"
#include "dcb/parallel.hpp"
#include "dcb/rng.hpp"

namespace dcb {

enum class BackoffDistribution { exponential, uniform, deterministic };
enum class TransmissionDistribution { exponential, deterministic };

inline std::string to_string(BackoffDistribution d) {
  switch (d) {
    case BackoffDistribution::exponential: return "exponential";
    case BackoffDistribution::uniform: return "uniform";
    case BackoffDistribution::deterministic: return "deterministic";
  }
  return "?";
}

inline std::string to_string(TransmissionDistribution d) {
  return d == TransmissionDistribution::exponential ? "exponential" : "deterministic";
}

struct SimConfig {
  double horizon = 100.0;         // seconds of simulated time
  std::optional<double> warmup;   // defaults to 5% of the horizon
  std::uint64_t seed = 1;
  BackoffDistribution backoff = BackoffDistribution::exponential;
  TransmissionDistribution transmission = TransmissionDistribution::exponential;
  int replications = 30;
  bool collect_time_in_state = false;
  unsigned workers = 1;

  double effective_warmup() const { return warmup.value_or(0.05 * horizon); }

  void validate() const {
    const double w = effective_warmup();
    if (!(horizon > w) || w < 0) throw Error(ErrorCode::InvalidArgument, "need horizon > warmup >= 0");
    if (replications < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replication");
  }
};

struct SimResult {
  std::vector<double> per_wlan_throughput;   // bits/s, mean over replications
  std::vector<double> confidence_halfwidth;  // bits/s, 95% Student-t
  std::vector<std::vector<double>> replications;  // [replication][wlan]
  // Fraction of post-warmup time spent in each state, pooled over replications.
  std::optional<std::map<NetworkState, double>> time_in_state;
};

namespace detail {

struct ReplicationOutcome {
  std::vector<double> throughput;
  std::map<NetworkState, double> state_time;
};

inline double draw_backoff(Rng& rng, BackoffDistribution d, double mean) {
  switch (d) {
    case BackoffDistribution::exponential: return rng.exponential(mean);
    case BackoffDistribution::uniform: return rng.uniform(0.0, 2.0 * mean);
    case BackoffDistribution::deterministic: return mean;
  }
  return mean;
}

inline double draw_transmission(Rng& rng, TransmissionDistribution d, double mean) {
  return d == TransmissionDistribution::exponential ? rng.exponential(mean) : mean;
}

inline ReplicationOutcome run_replication(const NetworkAllocation& net,
                                          std::span<const ActivityModel> traffic,
                                          const SimConfig& cfg, std::uint64_t seed) {
  struct Node {
    bool transmitting = false;
    double remaining = 0.0;  // backoff left; only decreases while the primary is idle
    double tx_end = 0.0;
    BondedBlock block;
  };
  Rng rng(seed);
  const std::size_t n = net.size();
  const double warmup = cfg.effective_warmup();
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes[i].remaining = draw_backoff(rng, cfg.backoff, traffic[i].mean_backoff());

  ReplicationOutcome out;
  out.throughput.assign(n, 0.0);
  ChannelMask busy;
  double now = 0.0;
  const auto primary_idle = [&](std::size_t i) {
    return !busy.test(static_cast<std::size_t>(net[i].primary - 1));
  };
  const auto current_state = [&] {
    NetworkState s;
    for (std::size_t i = 0; i < n; ++i)
      if (nodes[i].transmitting) s.active.push_back({i, nodes[i].block});
    return s;
  };

  while (true) {
    double next = std::numeric_limits<double>::infinity();
    std::size_t who = n;
    for (std::size_t i = 0; i < n; ++i) {
      double t = std::numeric_limits<double>::infinity();
      if (nodes[i].transmitting) {
        t = nodes[i].tx_end;
      } else if (primary_idle(i)) {
        t = now + nodes[i].remaining;
      }
      if (t < next) {  // strict: simultaneous events resolve to the lowest index
        next = t;
        who = i;
      }
    }
    const double until = std::min(next, cfg.horizon);
    if (cfg.collect_time_in_state && until > warmup) {
      out.state_time[current_state()] += until - std::max(now, warmup);
    }
    if (who == n || next > cfg.horizon) break;

    const double dt = next - now;
    for (std::size_t i = 0; i < n; ++i) {
      if (!nodes[i].transmitting && primary_idle(i))
        nodes[i].remaining = std::max(0.0, nodes[i].remaining - dt);
    }
    now = next;
    Node& node = nodes[who];
    if (node.transmitting) {
      busy &= ~node.block.mask();
      node.transmitting = false;
      if (now > warmup) {
        out.throughput[who] +=
            traffic[who].payload_bits() * (1.0 - traffic[who].packet_error_prob());
      }
      node.remaining = draw_backoff(rng, cfg.backoff, traffic[who].mean_backoff());
    } else {
      node.remaining = 0.0;
      node.block = dcb_select(net[who], busy, net.mode);
      assert((node.block.mask() & busy).none());
      busy |= node.block.mask();
      node.transmitting = true;
      node.tx_end =
          now + draw_transmission(rng, cfg.transmission, traffic[who].duration(node.block.width));
    }
  }
  for (auto& t : out.throughput) t /= cfg.horizon - warmup;
  return out;
}

inline double t_quantile_975(int dof) {
  return boost::math::quantile(boost::math::students_t(static_cast<double>(dof)), 0.975);
}

}  // namespace detail

/// Replications run independently with seeds derived from cfg.seed, so the
/// result is identical whatever the worker count.
inline SimResult simulate(const NetworkAllocation& net, std::span<const ActivityModel> traffic,
                          const SimConfig& cfg) {
  cfg.validate();
  if (traffic.size() != net.size()) {
    throw Error(ErrorCode::InvalidArgument, "traffic model count does not match WLAN count");
  }
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<detail::ReplicationOutcome> outcomes(reps);
  parallel_for(reps, cfg.workers, [&](std::size_t r) {
    outcomes[r] = detail::run_replication(net, traffic, cfg, derive_seed(cfg.seed, r));
  });

  const std::size_t n = net.size();
  SimResult result;
  result.per_wlan_throughput.assign(n, 0.0);
  result.confidence_halfwidth.assign(n, 0.0);
  for (const auto& o : outcomes) {
    result.replications.push_back(o.throughput);
    for (std::size_t i = 0; i < n; ++i) result.per_wlan_throughput[i] += o.throughput[i];
  }
  for (auto& m : result.per_wlan_throughput) m /= static_cast<double>(reps);
  if (reps > 1) {
    const double t = detail::t_quantile_975(static_cast<int>(reps) - 1);
    for (std::size_t i = 0; i < n; ++i) {
      double ss = 0;
      for (const auto& o : outcomes) {
        const double d = o.throughput[i] - result.per_wlan_throughput[i];
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
      result.confidence_halfwidth[i] = t * sd / std::sqrt(static_cast<double>(reps));
    }
  }
  if (cfg.collect_time_in_state) {
    std::map<NetworkState, double> pooled;
    double total = 0;
    for (const auto& o : outcomes) {
      for (const auto& [s, t] : o.state_time) {
        pooled[s] += t;
        total += t;
      }
    }
    for (auto& [s, t] : pooled) t /= total;
    result.time_in_state = std::move(pooled);
  }
  return result;
}

inline SimResult simulate(const NetworkAllocation& net, const ActivityModel& model,
                          const SimConfig& cfg) {
  return simulate(net, uniform_traffic(model, net.size()), cfg);
}

struct DistributionChoice {
  BackoffDistribution backoff = BackoffDistribution::exponential;
  TransmissionDistribution transmission = TransmissionDistribution::exponential;

  std::string label() const { return to_string(backoff) + "/" + to_string(transmission); }
};

struct InsensitivityReport {
  std::vector<DistributionChoice> choices;
  std::vector<SimResult> results;  // one per choice
  double max_relative_deviation = 0.0;
};

/// Simulates the same network under each distribution choice (same seed) and
/// reports the largest pairwise relative throughput difference over WLANs.
inline InsensitivityReport insensitivity_check(const NetworkAllocation& net,
                                               std::span<const ActivityModel> traffic,
                                               const SimConfig& base,
                                               std::span<const DistributionChoice> choices) {
  if (choices.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two distribution choices");
  }
  InsensitivityReport report;
  for (const auto& c : choices) {
    SimConfig cfg = base;
    cfg.backoff = c.backoff;
    cfg.transmission = c.transmission;
    report.choices.push_back(c);
    report.results.push_back(simulate(net, traffic, cfg));
  }
  for (std::size_t a = 0; a < report.results.size(); ++a) {
    for (std::size_t b = a + 1; b < report.results.size(); ++b) {
      for (std::size_t i = 0; i < net.size(); ++i) {
        const double x = report.results[a].per_wlan_throughput[i];
        const double y = report.results[b].per_wlan_throughput[i];
        const double scale = std::max(std::abs(x), std::abs(y));
        if (scale > 0) {
          report.max_relative_deviation =
              std::max(report.max_relative_deviation, std::abs(x - y) / scale);
        }
      }
    }
  }
  return report;
}

}  // namespace dcb
