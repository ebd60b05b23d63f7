#pragma once

// Continuous-time Markov chain of an all-inclusive DCB network: reachable
// state space, product-form and exact stationary distributions, throughput
// and the derived fairness/utilization/spectrum-efficiency metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "dcb/channelization.hpp"
#include "dcb/error.hpp"
#include "dcb/mac_phy.hpp"

namespace dcb {

struct ActivePair {
  std::size_t wlan = 0;
  BondedBlock block;

  auto operator<=>(const ActivePair&) const = default;
};

// Concurrent transmissions, sorted by WLAN index.
struct NetworkState {
  std::vector<ActivePair> active;

  ChannelMask busy() const {
    ChannelMask m;
    for (const auto& p : active) m |= p.block.mask();
    return m;
  }

  const ActivePair* find(std::size_t wlan) const {
    for (const auto& p : active)
      if (p.wlan == wlan) return &p;
    return nullptr;
  }

  bool empty() const { return active.empty(); }
  auto operator<=>(const NetworkState&) const = default;
};

enum class TransitionKind { activation, departure };

// Rates are not stored: activation happens at lambda_wlan, departure at
// mu_wlan(width), both read from the traffic model when needed.
struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t wlan = 0;
  TransitionKind kind = TransitionKind::activation;
  int width = 1;
};

class StateSpace {
 public:
  std::size_t num_wlans() const { return num_wlans_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<NetworkState>& states() const { return states_; }
  const NetworkState& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  std::optional<std::size_t> index_of(const NetworkState& s) const {
    auto it = index_.find(key(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  friend StateSpace enumerate_state_space(const NetworkAllocation&, std::size_t);

  std::string key(const NetworkState& s) const {
    std::string k(num_wlans_ * 4, '\0');
    for (const auto& p : s.active) {
      const std::size_t o = 4 * p.wlan;
      k[o] = static_cast<char>(p.block.start & 0xff);
      k[o + 1] = static_cast<char>(p.block.start >> 8);
      k[o + 2] = static_cast<char>(p.block.width & 0xff);
      k[o + 3] = static_cast<char>(p.block.width >> 8);
    }
    return k;
  }

  std::size_t add(NetworkState s) {
    auto [it, inserted] = index_.try_emplace(key(s), states_.size());
    if (inserted) states_.push_back(std::move(s));
    return it->second;
  }

  std::size_t num_wlans_ = 0;
  std::vector<NetworkState> states_;
  std::vector<Transition> transitions_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::size_t kDefaultStateCap = 1'000'000;

/// Breadth-first closure from the idle state. State 0 is the idle state;
/// successors are generated activations first (WLAN ascending), then
/// departures (WLAN ascending).
inline StateSpace enumerate_state_space(const NetworkAllocation& net,
                                        std::size_t max_states = kDefaultStateCap) {
  StateSpace space;
  space.num_wlans_ = net.size();
  space.add(NetworkState{});
  for (std::size_t cur = 0; cur < space.states_.size(); ++cur) {
    const NetworkState state = space.states_[cur];
    const ChannelMask busy = state.busy();
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (state.find(i) || busy.test(static_cast<std::size_t>(net[i].primary - 1))) continue;
      const BondedBlock b = dcb_select(net[i], busy, net.mode);
      NetworkState next = state;
      next.active.push_back({i, b});
      std::sort(next.active.begin(), next.active.end());
      const std::size_t to = space.add(std::move(next));
      space.transitions_.push_back({cur, to, i, TransitionKind::activation, b.width});
    }
    for (std::size_t p = 0; p < state.active.size(); ++p) {
      NetworkState next = state;
      next.active.erase(next.active.begin() + static_cast<std::ptrdiff_t>(p));
      const std::size_t to = space.add(std::move(next));
      space.transitions_.push_back(
          {cur, to, state.active[p].wlan, TransitionKind::departure, state.active[p].block.width});
    }
    if (space.states_.size() > max_states) {
      throw Error(ErrorCode::StateSpaceTooLarge,
                  "state space exceeds " + std::to_string(max_states) + " states");
    }
  }
  return space;
}

// One model per WLAN; homogeneous networks repeat the same model.
using Traffic = std::vector<ActivityModel>;

inline Traffic uniform_traffic(const ActivityModel& model, std::size_t num_wlans) {
  return Traffic(num_wlans, model);
}

inline double transition_rate(const Transition& t, std::span<const ActivityModel> traffic) {
  const auto& m = traffic[t.wlan];
  return t.kind == TransitionKind::activation ? m.attempt_rate() : m.departure_rate(t.width);
}

struct Distribution {
  std::vector<double> probabilities;

  double operator[](std::size_t i) const { return probabilities[i]; }
  std::size_t size() const { return probabilities.size(); }
};

inline void check_traffic(const StateSpace& space, std::span<const ActivityModel> traffic) {
  if (traffic.size() != space.num_wlans()) {
    throw Error(ErrorCode::InvalidArgument, "traffic model count does not match WLAN count");
  }
}

/// pi_s proportional to the product of rho_i(k'_i) over the transmissions in s.
/// Weights are accumulated in log space so large networks do not overflow.
inline Distribution product_form_distribution(const StateSpace& space,
                                              std::span<const ActivityModel> traffic) {
  check_traffic(space, traffic);
  std::vector<double> logw(space.size(), 0.0);
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (const auto& p : space[s].active) {
      const double r = activity_ratio(traffic[p.wlan], p.block.width);
      logw[s] += r > 0 ? std::log(r) : -std::numeric_limits<double>::infinity();
    }
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  Distribution d;
  d.probabilities.resize(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) {
    d.probabilities[s] = std::exp(logw[s] - top);
    total += d.probabilities[s];
  }
  for (auto& p : d.probabilities) p /= total;
  return d;
}

inline constexpr std::size_t kExactStateCap = 10'000;

/// Solves pi Q = 0, sum pi = 1 for the generator of the enumerated chain.
inline Distribution exact_distribution(const StateSpace& space,
                                       std::span<const ActivityModel> traffic,
                                       std::size_t max_states = kExactStateCap) {
  check_traffic(space, traffic);
  const std::size_t n = space.size();
  if (n > max_states) {
    throw Error(ErrorCode::StateSpaceTooLarge,
                std::to_string(n) + " states exceed the exact-solve limit of " +
                    std::to_string(max_states));
  }
  if (n == 1) return Distribution{{1.0}};
  // Rows of Q^T are balance equations; the last one is replaced by sum(pi) = 1.
  const auto last = static_cast<Eigen::Index>(n - 1);
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& t : space.transitions()) {
    const double r = transition_rate(t, traffic);
    const auto from = static_cast<Eigen::Index>(t.from);
    const auto to = static_cast<Eigen::Index>(t.to);
    if (to != last) triplets.emplace_back(to, from, r);
    if (from != last) triplets.emplace_back(from, from, -r);
  }
  for (Eigen::Index j = 0; j <= last; ++j) triplets.emplace_back(last, j, 1.0);
  Eigen::SparseMatrix<double> a(last + 1, last + 1);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(last + 1);
  rhs(last) = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(a);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "generator matrix factorization failed");
  }
  Eigen::VectorXd pi = solver.solve(rhs);
  Distribution d;
  d.probabilities.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    d.probabilities[i] = std::max(0.0, pi(static_cast<Eigen::Index>(i)));
  const double total = std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0);
  for (auto& p : d.probabilities) p /= total;
  return d;
}

// Per-state net probability flow (outflow - inflow) under a distribution.
inline std::vector<double> balance_flows(const StateSpace& space,
                                         std::span<const ActivityModel> traffic,
                                         const Distribution& dist) {
  check_traffic(space, traffic);
  std::vector<double> net(space.size(), 0.0);
  for (const auto& t : space.transitions()) {
    const double flow = dist[t.from] * transition_rate(t, traffic);
    net[t.from] += flow;
    net[t.to] -= flow;
  }
  return net;
}

struct BalanceResidual {
  double value = 0.0;       // max |inflow - outflow|
  std::size_t state = 0;    // where the maximum occurs
};

/// How far the product form is from satisfying global balance; zero for
/// reversible topologies.
inline BalanceResidual balance_residual(const StateSpace& space,
                                        std::span<const ActivityModel> traffic) {
  const auto flows = balance_flows(space, traffic, product_form_distribution(space, traffic));
  BalanceResidual r;
  for (std::size_t s = 0; s < flows.size(); ++s) {
    if (std::abs(flows[s]) > r.value) {
      r.value = std::abs(flows[s]);
      r.state = s;
    }
  }
  return r;
}

inline double jfi(std::span<const double> throughputs) {
  if (throughputs.empty()) throw Error(ErrorCode::InvalidArgument, "no throughputs");
  double sum = 0, sq = 0;
  for (double t : throughputs) {
    sum += t;
    sq += t * t;
  }
  if (sq == 0) throw Error(ErrorCode::AllZero, "all throughputs are zero");
  return sum * sum / (static_cast<double>(throughputs.size()) * sq);
}

/// Fraction of basic channels allocated to at least one WLAN.
inline double channel_utilization(const ChannelGrid& grid,
                                  std::span<const WlanAllocation> wlans) {
  ChannelMask used;
  for (const auto& w : wlans) used |= w.block.mask();
  return static_cast<double>(used.count()) / grid.num_channels;
}

inline double channel_utilization(const NetworkAllocation& net) {
  return channel_utilization(net.grid, net.wlans);
}

inline double gain(double th_new, double th_old) {
  if (th_old <= 0) throw Error(ErrorCode::DivideByZero, "reference throughput must be positive");
  return (th_new - th_old) / th_old;
}

struct ThroughputReport {
  std::vector<double> per_wlan;  // bits/s
  double aggregate = 0.0;
  double jfi = 0.0;  // 0 when every WLAN is starved
  double channel_utilization = 0.0;
  std::optional<double> spectrum_efficiency;  // bits/s/MHz
};

inline void finish_report(ThroughputReport& r) {
  r.aggregate = std::accumulate(r.per_wlan.begin(), r.per_wlan.end(), 0.0);
  const bool any = std::any_of(r.per_wlan.begin(), r.per_wlan.end(), [](double t) { return t > 0; });
  r.jfi = any ? jfi(r.per_wlan) : 0.0;
}

/// Th_i = L_i * sum over states where i transmits of mu_i(k'_i) pi_s * (1 - p_e).
inline ThroughputReport throughput(const StateSpace& space, const Distribution& dist,
                                   std::span<const ActivityModel> traffic) {
  check_traffic(space, traffic);
  ThroughputReport r;
  r.per_wlan.assign(space.num_wlans(), 0.0);
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (const auto& p : space[s].active) {
      r.per_wlan[p.wlan] += traffic[p.wlan].departure_rate(p.block.width) * dist[s];
    }
  }
  for (std::size_t i = 0; i < r.per_wlan.size(); ++i) {
    r.per_wlan[i] *= traffic[i].payload_bits() * (1.0 - traffic[i].packet_error_prob());
  }
  finish_report(r);
  return r;
}

/// Throughput of a set of WLANs per MHz of the channels they occupy.
inline double spectrum_efficiency(std::span<const std::size_t> wlans,
                                  std::span<const double> per_wlan_throughput,
                                  const NetworkAllocation& net) {
  if (wlans.empty()) throw Error(ErrorCode::EmptySet, "overlap set is empty");
  double th = 0;
  ChannelMask used;
  for (std::size_t i : wlans) {
    th += per_wlan_throughput[i];
    used |= net[i].block.mask();
  }
  return th / (20.0 * static_cast<double>(used.count()));
}

inline double spectrum_efficiency(const OverlapSet& set, const ThroughputReport& report,
                                  const NetworkAllocation& net) {
  return spectrum_efficiency(set.wlans, report.per_wlan, net);
}

// Groups of WLANs whose allocations are connected through shared channels.
inline std::vector<std::vector<std::size_t>> interaction_components(const NetworkAllocation& net) {
  const std::size_t n = net.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((net[i].block.mask() & net[j].block.mask()).any()) parent[root(i)] = root(j);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = root(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

/// Product-form throughput of a whole network. Components that share no
/// channel evolve independently, so each is enumerated on its own and the
/// per-WLAN results are identical to enumerating the joint chain.
inline ThroughputReport network_throughput(const NetworkAllocation& net,
                                           std::span<const ActivityModel> traffic,
                                           std::size_t max_states = kDefaultStateCap) {
  if (traffic.size() != net.size()) {
    throw Error(ErrorCode::InvalidArgument, "traffic model count does not match WLAN count");
  }
  ThroughputReport r;
  r.per_wlan.assign(net.size(), 0.0);
  for (const auto& group : interaction_components(net)) {
    std::vector<WlanAllocation> sub;
    Traffic sub_traffic;
    for (std::size_t i : group) {
      sub.push_back(net[i]);
      sub_traffic.push_back(traffic[i]);
    }
    const NetworkAllocation sub_net(net.grid, std::move(sub), net.mode);
    const auto space = enumerate_state_space(sub_net, max_states);
    const auto part = throughput(space, product_form_distribution(space, sub_traffic), sub_traffic);
    for (std::size_t j = 0; j < group.size(); ++j) r.per_wlan[group[j]] = part.per_wlan[j];
  }
  finish_report(r);
  r.channel_utilization = channel_utilization(net);
  return r;
}

inline ThroughputReport network_throughput(const NetworkAllocation& net,
                                           const ActivityModel& model,
                                           std::size_t max_states = kDefaultStateCap) {
  return network_throughput(net, uniform_traffic(model, net.size()), max_states);
}

// Default WLAN labels: A..Z, then W27, W28, ...
inline std::string default_wlan_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "W" + std::to_string(i + 1);
}

/// "A:1w2;B:3w2" for A on channels 1-2 and B on 3-4; "-" for the idle state.
inline std::string format_active_pairs(const NetworkState& s,
                                       std::span<const std::string> names) {
  if (s.empty()) return "-";
  std::string out;
  for (const auto& p : s.active) {
    if (!out.empty()) out += ';';
    out += names[p.wlan] + ":" + std::to_string(p.block.start) + "w" +
           std::to_string(p.block.width);
  }
  return out;
}

}  // namespace dcb
