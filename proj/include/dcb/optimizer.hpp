#pragma once

// Channel allocation programs for fully overlapping WLANs: when N <= K the
// decision is how many bonded channels each WLAN gets, when N > K it is how
// many WLANs share each basic channel. Both are solved by branch and bound
// over concave continuous relaxations.

#include <algorithm>
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

#include "dcb/channelization.hpp"
#include "dcb/ctmc.hpp"
#include "dcb/error.hpp"
#include "dcb/mac_phy.hpp"
#include "dcb/parallel.hpp"
#include "dcb/rng.hpp"

namespace dcb {

struct ProblemInstance {
  int num_wlans = 1;
  int num_channels = 1;
  ActivityModel activity;
  FittedActivityModel fit;

  void validate() const {
    if (num_wlans < 1 || num_channels < 1) {
      throw Error(ErrorCode::InvalidArgument, "need N >= 1 and K >= 1");
    }
    if (num_channels > kMaxChannels) {
      throw Error(ErrorCode::InvalidArgument, "too many channels");
    }
    for (int w : kBondedWidths) {
      if (!activity.durations().has(w)) {
        throw Error(ErrorCode::UnknownWidth,
                    "duration table must cover widths 1, 2, 4 and 8 for optimization");
      }
    }
  }

  // Theorem 1 regime split.
  bool channels_regime() const { return num_wlans <= num_channels; }
  ChannelGrid grid() const { return ChannelGrid(num_channels); }
};

enum class Regime { channels_per_wlan, wlans_per_channel };

inline std::string to_string(Regime r) {
  return r == Regime::channels_per_wlan ? "channels_per_wlan" : "wlans_per_channel";
}

// ---------------------------------------------------------------------------
// Objectives (bits/s)

inline bool channels_feasible(std::span<const int> k, int num_channels) {
  if (k.empty()) return false;
  long total = 0;
  for (int w : k) {
    if (!is_bonded_width(w)) return false;
    total += w;
  }
  return total <= num_channels;
}

/// Aggregate throughput of non-overlapping WLANs with k_i channels each;
/// infeasible schemes score zero.
inline double h_exact(std::span<const int> k, const ActivityModel& model, int num_channels) {
  if (!channels_feasible(k, num_channels)) return 0.0;
  const double a = lambda_L(model);
  double sum = 0;
  for (int w : k) sum += a / (1.0 + activity_ratio(model, w));
  return sum;
}

/// Same objective with the power-law surrogate for every coordinate.
inline double h_fitted(std::span<const double> k, const FittedActivityModel& fit, double a) {
  double sum = 0;
  for (double x : k) sum += a / (1.0 + fitted_activity_ratio(fit, x));
  return sum;
}

/// Aggregate throughput of K single-channel groups holding n_k WLANs each.
inline double g_exact(std::span<const double> n, const ActivityModel& model) {
  const double a = lambda_L(model);
  const double b = activity_ratio(model, 1);
  double sum = 0;
  for (double x : n) sum += a * x / (1.0 + b * x);
  return sum;
}

inline double g_exact(std::span<const int> n, const ActivityModel& model) {
  std::vector<double> v(n.begin(), n.end());
  return g_exact(std::span<const double>(v), model);
}

inline bool wlans_feasible(std::span<const int> n, int num_wlans) {
  if (n.empty()) return false;
  long total = 0;
  for (int x : n) {
    if (x < 1) return false;
    total += x;
  }
  return total == num_wlans;
}

// ---------------------------------------------------------------------------
// Relaxations

struct BnbNode {
  std::vector<int> lower_bounds;
  std::vector<int> upper_bounds;
  std::vector<double> relaxed_solution;
  double fitted_value = 0.0;   // surrogate objective at relaxed_solution
  double relaxed_value = 0.0;  // upper bound on every integer point in the box
};

namespace detail {

/// Common level c with sum_i clamp(c, lo_i, hi_i) == target. The sum is
/// piecewise linear in c, so c is located exactly between two breakpoints.
inline std::vector<double> water_fill(std::span<const double> lo, std::span<const double> hi,
                                      double target) {
  std::vector<double> points(lo.begin(), lo.end());
  points.insert(points.end(), hi.begin(), hi.end());
  std::sort(points.begin(), points.end());
  const auto level_sum = [&](double c) {
    double s = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) s += std::clamp(c, lo[i], hi[i]);
    return s;
  };
  double c = points.back();
  double prev = points.front();
  double prev_sum = level_sum(prev);
  for (double p : points) {
    const double s = level_sum(p);
    if (s >= target) {
      c = (s == prev_sum || p == prev) ? p : prev + (target - prev_sum) * (p - prev) / (s - prev_sum);
      break;
    }
    prev = p;
    prev_sum = s;
  }
  std::vector<double> x(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) x[i] = std::clamp(c, lo[i], hi[i]);
  return x;
}

inline void check_box(std::span<const int> lo, std::span<const int> hi) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw Error(ErrorCode::InvalidArgument, "box bounds must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) {
      throw Error(ErrorCode::EmptyBox, "variable " + std::to_string(i + 1) + " has lower bound " +
                                           std::to_string(lo[i]) + " above upper bound " +
                                           std::to_string(hi[i]));
    }
  }
}

inline bool is_integral(double x) { return std::abs(x - std::round(x)) <= 1e-9; }

inline bool is_bonded_value(double x) {
  return is_integral(x) && is_bonded_width(static_cast<int>(std::lround(x)));
}

// Largest power of two not above x.
inline int floor_pow2(double x) {
  int p = 1;
  while (p * 2 <= x + 1e-9) p *= 2;
  return p;
}

inline std::vector<int> rounded(std::span<const double> x) {
  std::vector<int> out;
  for (double v : x) out.push_back(static_cast<int>(std::lround(v)));
  return out;
}

inline std::vector<int> sorted_ascending(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace detail

/// Maximizes h_fitted over sum k <= K within the box. The objective is
/// increasing, so the budget min(K, sum of upper bounds) is spent in full.
inline BnbNode relax_channels(const ProblemInstance& inst, std::span<const int> lower,
                              std::span<const int> upper) {
  detail::check_box(lower, upper);
  const long lo_sum = std::accumulate(lower.begin(), lower.end(), 0L);
  const long hi_sum = std::accumulate(upper.begin(), upper.end(), 0L);
  if (lo_sum > inst.num_channels) {
    throw Error(ErrorCode::EmptyBox, "lower bounds use more than K channels");
  }
  std::vector<double> lo(lower.begin(), lower.end()), hi(upper.begin(), upper.end());
  BnbNode node;
  node.lower_bounds.assign(lower.begin(), lower.end());
  node.upper_bounds.assign(upper.begin(), upper.end());
  node.relaxed_solution =
      detail::water_fill(lo, hi, static_cast<double>(std::min<long>(inst.num_channels, hi_sum)));
  node.fitted_value = h_fitted(node.relaxed_solution, inst.fit, lambda_L(inst.activity));
  node.relaxed_value = node.fitted_value;
  return node;
}

/// Unboxed relaxation: k_i in [1, 8].
inline BnbNode relax_channels(const ProblemInstance& inst) {
  const auto n = static_cast<std::size_t>(inst.num_wlans);
  const std::vector<int> lo(n, 1), hi(n, 8);
  return relax_channels(inst, lo, hi);
}

/// Maximizes g over sum n == N within the box.
inline BnbNode relax_wlans(const ProblemInstance& inst, std::span<const int> lower,
                           std::span<const int> upper) {
  detail::check_box(lower, upper);
  const long lo_sum = std::accumulate(lower.begin(), lower.end(), 0L);
  const long hi_sum = std::accumulate(upper.begin(), upper.end(), 0L);
  if (lo_sum > inst.num_wlans || hi_sum < inst.num_wlans) {
    throw Error(ErrorCode::InfeasibleBoxes, "boxes cannot hold exactly N WLANs");
  }
  std::vector<double> lo(lower.begin(), lower.end()), hi(upper.begin(), upper.end());
  BnbNode node;
  node.lower_bounds.assign(lower.begin(), lower.end());
  node.upper_bounds.assign(upper.begin(), upper.end());
  node.relaxed_solution = detail::water_fill(lo, hi, static_cast<double>(inst.num_wlans));
  node.fitted_value = g_exact(std::span<const double>(node.relaxed_solution), inst.activity);
  node.relaxed_value = node.fitted_value;
  return node;
}

/// Unboxed relaxation: n_k in [1, N - K + 1].
inline BnbNode relax_wlans(const ProblemInstance& inst) {
  const auto k = static_cast<std::size_t>(inst.num_channels);
  const std::vector<int> lo(k, 1), hi(k, std::max(1, inst.num_wlans - inst.num_channels + 1));
  return relax_wlans(inst, lo, hi);
}

// ---------------------------------------------------------------------------
// Exact-value envelope used to prune the channel search

/// Least concave majorant of the per-WLAN throughput at widths 1, 2, 4, 8.
/// Unlike the power-law surrogate it never underestimates a feasible value.
class ThroughputEnvelope {
 public:
  explicit ThroughputEnvelope(const ActivityModel& model) {
    const double a = lambda_L(model);
    std::vector<std::pair<double, double>> pts;
    for (int w : kBondedWidths) pts.emplace_back(w, a / (1.0 + activity_ratio(model, w)));
    for (const auto& p : pts) {
      while (hull_.size() >= 2) {
        const auto& o = hull_[hull_.size() - 2];
        const auto& m = hull_.back();
        const double cross = (m.first - o.first) * (p.second - o.second) -
                             (m.second - o.second) * (p.first - o.first);
        if (cross < 0) break;  // right turn keeps the hull concave
        hull_.pop_back();
      }
      hull_.push_back(p);
    }
  }

  double operator()(double x) const {
    for (std::size_t j = 0; j + 1 < hull_.size(); ++j) {
      if (x <= hull_[j + 1].first) return segment_value(j, x);
    }
    return hull_.back().second;
  }

  /// max sum_i env(k_i) subject to sum k_i <= budget and lo <= k <= hi.
  /// Separable concave piecewise-linear, so the budget goes to the steepest
  /// segments first.
  double bound(std::span<const int> lo, std::span<const int> hi, double budget) const {
    double value = 0;
    std::vector<std::pair<double, double>> segments;  // slope, length
    for (std::size_t i = 0; i < lo.size(); ++i) {
      value += (*this)(lo[i]);
      budget -= lo[i];
      for (std::size_t j = 0; j + 1 < hull_.size(); ++j) {
        const double a = std::max<double>(lo[i], hull_[j].first);
        const double b = std::min<double>(hi[i], hull_[j + 1].first);
        if (b > a) segments.emplace_back(slope(j), b - a);
      }
    }
    std::stable_sort(segments.begin(), segments.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (const auto& [s, len] : segments) {
      if (budget <= 0 || s <= 0) break;
      const double take = std::min(len, budget);
      value += s * take;
      budget -= take;
    }
    return value;
  }

 private:
  double slope(std::size_t j) const {
    return (hull_[j + 1].second - hull_[j].second) / (hull_[j + 1].first - hull_[j].first);
  }
  double segment_value(std::size_t j, double x) const {
    return hull_[j].second + slope(j) * (x - hull_[j].first);
  }

  std::vector<std::pair<double, double>> hull_;
};

// ---------------------------------------------------------------------------
// Branch and bound

struct TraceEntry {
  std::vector<double> scheme;
  bool feasible = false;
  double objective = 0.0;  // exact value if feasible, surrogate if fractional, 0 if infeasible
};

struct TraceRow {
  int iteration = 0;
  std::vector<TraceEntry> entries;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

struct BnbResult {
  Regime regime = Regime::channels_per_wlan;
  std::vector<int> best_scheme;
  double best_value = 0.0;
  std::vector<TraceRow> trace;
  std::size_t nodes_explored = 0;
  std::vector<BnbNode> nodes;  // every relaxed node, in exploration order
};

namespace detail {

inline double tie_tolerance(double v) { return 1e-9 * std::abs(v) + 1e-6; }

// Shared incumbent bookkeeping. Equal values resolve to the smallest
// ascending-sorted scheme so results do not depend on visiting order.
struct Incumbent {
  std::vector<int> scheme;  // ascending
  double value = 0.0;

  void offer(const std::vector<int>& candidate, double v) {
    auto sorted = sorted_ascending(candidate);
    const double tol = tie_tolerance(value);
    if (scheme.empty() || v > value + tol) {
      scheme = std::move(sorted);
      value = v;
    } else if (std::abs(v - value) <= tol && sorted < scheme) {
      scheme = std::move(sorted);
      value = std::max(v, value);
    }
  }
};

// Upper bound reported for a trace row: the best surrogate value among the
// row's fractional entries, if any.
inline std::optional<double> fractional_max(const TraceRow& row, std::size_t from) {
  std::optional<double> top;
  for (std::size_t e = from; e < row.entries.size(); ++e) {
    const auto& entry = row.entries[e];
    if (!entry.feasible && entry.objective > 0) top = std::max(top.value_or(entry.objective), entry.objective);
  }
  return top;
}

class ChannelSearch {
 public:
  explicit ChannelSearch(const ProblemInstance& inst)
      : inst_(inst), envelope_(inst.activity), n_(static_cast<std::size_t>(inst.num_wlans)) {}

  BnbResult run() {
    result_.regime = Regime::channels_per_wlan;
    const std::vector<int> ones(n_, 1);
    best_.scheme = ones;
    best_.value = h_exact(ones, inst_.activity, inst_.num_channels);

    auto root = relax(std::vector<int>(n_, 1), std::vector<int>(n_, 8));
    TraceRow row;
    row.entries.push_back({std::vector<double>(n_, 1.0), true, best_.value});
    row.entries.push_back(entry_for(*root));
    upper_ = best_.value;
    finish_row(row);
    explore(*root);

    result_.best_scheme = best_.scheme;
    std::sort(result_.best_scheme.rbegin(), result_.best_scheme.rend());
    result_.best_value = best_.value;
    return std::move(result_);
  }

 private:
  bool box_feasible(const std::vector<int>& lo) const {
    return std::accumulate(lo.begin(), lo.end(), 0L) <= inst_.num_channels;
  }

  std::optional<BnbNode> relax(const std::vector<int>& lo, const std::vector<int>& hi) {
    if (!box_feasible(lo)) return std::nullopt;
    BnbNode node = relax_channels(inst_, lo, hi);
    node.relaxed_value = envelope_.bound(lo, hi, inst_.num_channels);
    ++result_.nodes_explored;
    result_.nodes.push_back(node);
    if (integral(node)) {
      const auto k = rounded(node.relaxed_solution);
      best_.offer(k, h_exact(k, inst_.activity, inst_.num_channels));
    }
    return node;
  }

  static bool integral(const BnbNode& node) {
    return std::all_of(node.relaxed_solution.begin(), node.relaxed_solution.end(),
                       [](double x) { return is_bonded_value(x); });
  }

  TraceEntry entry_for(const BnbNode& node) const {
    if (integral(node)) {
      const auto k = rounded(node.relaxed_solution);
      return {node.relaxed_solution, true, h_exact(k, inst_.activity, inst_.num_channels)};
    }
    return {node.relaxed_solution, false, node.fitted_value};
  }

  void finish_row(TraceRow& row) {
    if (auto top = fractional_max(row, 0)) upper_ = *top;
    row.iteration = static_cast<int>(result_.trace.size()) + 1;
    row.lower_bound = best_.value;
    row.upper_bound = upper_;
    result_.trace.push_back(std::move(row));
  }

  bool pruned(const BnbNode& node) const {
    return node.relaxed_value < best_.value - tie_tolerance(best_.value);
  }

  bool solved(const BnbNode& node) const {
    bool point = true;
    for (std::size_t i = 0; i < n_; ++i) point = point && node.lower_bounds[i] == node.upper_bounds[i];
    if (point) return true;
    if (!integral(node)) return false;
    const double v = h_exact(rounded(node.relaxed_solution), inst_.activity, inst_.num_channels);
    return node.relaxed_value <= v + tie_tolerance(v);
  }

  // Three children on coordinate i around the power of two p: k_i = p,
  // k_i >= 2p and k_i <= p/2. The first two are the reported branches.
  void explore(const BnbNode& node) {
    if (solved(node)) return;
    std::size_t i = n_;
    int p = 0;
    for (std::size_t j = 0; j < n_ && i == n_; ++j) {
      if (!is_bonded_value(node.relaxed_solution[j])) {
        i = j;
        p = floor_pow2(node.relaxed_solution[j]);
      }
    }
    for (std::size_t j = 0; j < n_ && i == n_; ++j) {
      if (node.lower_bounds[j] < node.upper_bounds[j]) {
        i = j;
        p = static_cast<int>(std::lround(node.relaxed_solution[j]));
      }
    }
    const auto& lo = node.lower_bounds;
    const auto& hi = node.upper_bounds;

    TraceRow row;
    std::vector<std::optional<BnbNode>> children;
    {
      auto elo = lo, ehi = hi;
      elo[i] = ehi[i] = p;
      children.push_back(relax(elo, ehi));
      row.entries.push_back(children.back() ? entry_for(*children.back())
                                            : TraceEntry{to_doubles(elo), false, 0.0});
    }
    if (2 * p <= hi[i]) {
      auto ulo = lo;
      ulo[i] = 2 * p;
      children.push_back(relax(ulo, hi));
      row.entries.push_back(children.back() ? entry_for(*children.back())
                                            : TraceEntry{to_doubles(ulo), false, 0.0});
    }
    finish_row(row);
    for (const auto& child : children) {
      if (child && !pruned(*child)) explore(*child);
    }

    if (p / 2 >= lo[i]) {
      auto rhi = hi;
      rhi[i] = p / 2;
      auto rest = relax(lo, rhi);
      if (rest && !pruned(*rest)) {
        TraceRow single;
        single.entries.push_back(entry_for(*rest));
        finish_row(single);
        explore(*rest);
      }
    }
  }

  static std::vector<double> to_doubles(const std::vector<int>& v) {
    return std::vector<double>(v.begin(), v.end());
  }

  const ProblemInstance& inst_;
  ThroughputEnvelope envelope_;
  std::size_t n_;
  Incumbent best_;
  double upper_ = 0.0;
  BnbResult result_;
};

class WlanSearch {
 public:
  explicit WlanSearch(const ProblemInstance& inst)
      : inst_(inst), k_(static_cast<std::size_t>(inst.num_channels)) {}

  BnbResult run() {
    result_.regime = Regime::wlans_per_channel;
    const std::vector<double> ones(k_, 1.0);
    floor_value_ = g_exact(std::span<const double>(ones), inst_.activity);
    const int cap = std::max(1, inst_.num_wlans - inst_.num_channels + 1);
    auto root = relax(std::vector<int>(k_, 1), std::vector<int>(k_, cap));

    TraceRow row;
    row.entries.push_back({ones, false, floor_value_});
    row.entries.push_back(entry_for(*root));
    upper_ = root->fitted_value;
    finish_row(row, 1);
    explore(*root);

    result_.best_scheme = best_.scheme;
    result_.best_value = best_.value;
    return std::move(result_);
  }

 private:
  std::optional<BnbNode> relax(const std::vector<int>& lo, const std::vector<int>& hi) {
    const long lo_sum = std::accumulate(lo.begin(), lo.end(), 0L);
    const long hi_sum = std::accumulate(hi.begin(), hi.end(), 0L);
    for (std::size_t j = 0; j < k_; ++j)
      if (lo[j] > hi[j]) return std::nullopt;
    if (lo_sum > inst_.num_wlans || hi_sum < inst_.num_wlans) return std::nullopt;
    BnbNode node = relax_wlans(inst_, lo, hi);
    ++result_.nodes_explored;
    result_.nodes.push_back(node);
    if (integral(node)) {
      const auto n = rounded(node.relaxed_solution);
      best_.offer(n, g_exact(n, inst_.activity));
    }
    return node;
  }

  static bool integral(const BnbNode& node) {
    return std::all_of(node.relaxed_solution.begin(), node.relaxed_solution.end(),
                       [](double x) { return is_integral(x); });
  }

  TraceEntry entry_for(const BnbNode& node) const {
    return {node.relaxed_solution, integral(node), node.fitted_value};
  }

  double lower() const { return best_.scheme.empty() ? floor_value_ : best_.value; }

  // The first entry of the opening row is the reference point g(1, ..., 1).
  void finish_row(TraceRow& row, std::size_t from = 0) {
    if (auto top = fractional_max(row, from)) upper_ = *top;
    row.iteration = static_cast<int>(result_.trace.size()) + 1;
    row.lower_bound = lower();
    row.upper_bound = upper_;
    result_.trace.push_back(std::move(row));
  }

  bool pruned(const BnbNode& node) const {
    const double l = lower();
    return node.relaxed_value < l - tie_tolerance(l);
  }

  // g is concave, so the relaxation is exact over the box: integral nodes
  // need no further branching.
  void explore(const BnbNode& node) {
    if (integral(node)) return;
    std::size_t i = 0;
    while (is_integral(node.relaxed_solution[i])) ++i;
    const int f = static_cast<int>(std::floor(node.relaxed_solution[i]));

    auto dhi = node.upper_bounds;
    dhi[i] = f;
    auto ulo = node.lower_bounds;
    ulo[i] = f + 1;
    std::vector<std::optional<BnbNode>> children;
    children.push_back(relax(node.lower_bounds, dhi));
    children.push_back(relax(ulo, node.upper_bounds));

    TraceRow row;
    const std::vector<int>* boxes[] = {&node.lower_bounds, &ulo};
    for (std::size_t c = 0; c < children.size(); ++c) {
      if (children[c]) {
        row.entries.push_back(entry_for(*children[c]));
      } else {
        row.entries.push_back({std::vector<double>(boxes[c]->begin(), boxes[c]->end()), false, 0.0});
      }
    }
    finish_row(row);
    for (const auto& child : children) {
      if (child && !pruned(*child)) explore(*child);
    }
  }

  const ProblemInstance& inst_;
  std::size_t k_;
  Incumbent best_;
  double floor_value_ = 0.0;
  double upper_ = 0.0;
  BnbResult result_;
};

}  // namespace detail

/// Channels per WLAN (N <= K). The scheme is returned in non-increasing
/// order, which packs onto aligned consecutive blocks.
inline BnbResult bnb_channels(const ProblemInstance& inst) {
  inst.validate();
  if (!inst.channels_regime()) {
    throw Error(ErrorCode::InvalidArgument, "channel grouping needs N <= K");
  }
  return detail::ChannelSearch(inst).run();
}

/// WLANs per channel (N > K). The scheme is returned in ascending order.
inline BnbResult bnb_wlans(const ProblemInstance& inst) {
  inst.validate();
  if (inst.channels_regime()) {
    throw Error(ErrorCode::InvalidArgument, "WLAN grouping needs N > K");
  }
  return detail::WlanSearch(inst).run();
}

inline NetworkAllocation scheme_to_allocation(const ProblemInstance& inst, Regime regime,
                                              std::span<const int> scheme) {
  if (regime == Regime::channels_per_wlan) {
    return grouping_to_allocation_channels(scheme, inst.grid());
  }
  return grouping_to_allocation_wlans(scheme, static_cast<std::size_t>(inst.num_wlans), inst.grid());
}

struct OptimizeResult {
  Regime regime = Regime::channels_per_wlan;
  std::vector<int> scheme;
  NetworkAllocation allocation;
  ThroughputReport report;  // CTMC evaluation of the allocation
  BnbResult bnb;
};

inline OptimizeResult optimize(const ProblemInstance& inst) {
  inst.validate();
  BnbResult bnb = inst.channels_regime() ? bnb_channels(inst) : bnb_wlans(inst);
  auto alloc = scheme_to_allocation(inst, bnb.regime, bnb.best_scheme);
  auto report = network_throughput(alloc, inst.activity);
  return {bnb.regime, bnb.best_scheme, std::move(alloc), std::move(report), std::move(bnb)};
}

// ---------------------------------------------------------------------------
// Greedy baselines

struct GreedyStep {
  std::vector<int> scheme;
  bool feasible = false;
  double value = 0.0;  // 0 when infeasible
};

struct GreedyResult {
  Regime regime = Regime::channels_per_wlan;
  std::vector<int> scheme;
  double value = 0.0;
  std::vector<GreedyStep> steps;
};

/// Visits WLANs in order and keeps doubling each one's channels (up to 8)
/// while the total stays within K. An over-budget doubling is recorded as
/// an infeasible step and the next WLAN is visited; nothing is attempted
/// once all K channels are in use.
inline GreedyResult greedy_channels(const ProblemInstance& inst) {
  inst.validate();
  if (!inst.channels_regime()) {
    throw Error(ErrorCode::InvalidArgument, "channel grouping needs N <= K");
  }
  GreedyResult r;
  std::vector<int> k(static_cast<std::size_t>(inst.num_wlans), 1);
  int total = inst.num_wlans;
  const auto value = [&](const std::vector<int>& s) {
    return h_exact(s, inst.activity, inst.num_channels);
  };
  r.steps.push_back({k, true, value(k)});
  for (auto& ki : k) {
    while (ki * 2 <= 8 && total < inst.num_channels) {
      auto trial = k;
      const std::size_t idx = static_cast<std::size_t>(&ki - k.data());
      trial[idx] *= 2;
      if (total + ki > inst.num_channels) {
        r.steps.push_back({trial, false, 0.0});
        break;
      }
      total += ki;
      ki *= 2;
      r.steps.push_back({k, true, value(k)});
    }
  }
  r.scheme = k;
  r.value = value(k);
  return r;
}

/// Extra WLANs all join the first channel: [N-K+1, 1, ..., 1].
inline GreedyResult greedy_wlans(const ProblemInstance& inst) {
  inst.validate();
  if (inst.channels_regime()) {
    throw Error(ErrorCode::InvalidArgument, "WLAN grouping needs N > K");
  }
  GreedyResult r;
  r.regime = Regime::wlans_per_channel;
  std::vector<int> n(static_cast<std::size_t>(inst.num_channels), 1);
  for (int extra = inst.num_wlans - inst.num_channels; extra > 0; --extra) {
    ++n[0];
    r.steps.push_back({n, extra == 1, g_exact(n, inst.activity)});
  }
  r.scheme = n;
  r.value = g_exact(n, inst.activity);
  return r;
}

inline GreedyResult greedy(const ProblemInstance& inst) {
  return inst.channels_regime() ? greedy_channels(inst) : greedy_wlans(inst);
}

// ---------------------------------------------------------------------------
// Random baselines

namespace detail {

inline std::vector<BondedBlock> blocks_of_width(const ChannelGrid& grid, int width) {
  std::vector<BondedBlock> out;
  for (const auto& b : valid_blocks(grid))
    if (b.width == width) out.push_back(b);
  return out;
}

}  // namespace detail

/// Every WLAN independently picks a uniform block of the given width; the
/// primary is the block's first channel.
inline NetworkAllocation random_fixed_bw(const ProblemInstance& inst, int width, Rng& rng) {
  inst.validate();
  if (!is_bonded_width(width)) {
    throw Error(ErrorCode::InvalidBlock, "width must be 1, 2, 4 or 8");
  }
  const auto blocks = detail::blocks_of_width(inst.grid(), width);
  if (blocks.empty()) {
    throw Error(ErrorCode::NoBlockFits, "no width-" + std::to_string(width) + " block fits in " +
                                            std::to_string(inst.num_channels) + " channels");
  }
  std::vector<WlanAllocation> wlans;
  for (int i = 0; i < inst.num_wlans; ++i) {
    const auto& b = blocks[rng.index(blocks.size())];
    wlans.push_back({b, b.start});
  }
  return NetworkAllocation(inst.grid(), std::move(wlans));
}

/// Every WLAN draws a width uniformly among the bonded widths up to bw_max
/// that fit in K, then a uniform block of that width.
inline NetworkAllocation random_variable_bw(const ProblemInstance& inst, int bw_max, Rng& rng) {
  inst.validate();
  if (!is_bonded_width(bw_max)) {
    throw Error(ErrorCode::InvalidBlock, "maximum width must be 1, 2, 4 or 8");
  }
  std::vector<std::vector<BondedBlock>> by_width;
  for (int w : kBondedWidths) {
    if (w > bw_max) break;
    auto blocks = detail::blocks_of_width(inst.grid(), w);
    if (!blocks.empty()) by_width.push_back(std::move(blocks));
  }
  if (by_width.empty()) throw Error(ErrorCode::NoBlockFits, "no block fits in the grid");
  std::vector<WlanAllocation> wlans;
  for (int i = 0; i < inst.num_wlans; ++i) {
    const auto& blocks = by_width[rng.index(by_width.size())];
    const auto& b = blocks[rng.index(blocks.size())];
    wlans.push_back({b, b.start});
  }
  return NetworkAllocation(inst.grid(), std::move(wlans));
}

enum class RandomKind { fixed_width, variable_width };

struct RandomBaseline {
  RandomKind kind = RandomKind::fixed_width;
  int width = 1;  // fixed width, or maximum width for variable_width
};

struct BaselineSummary {
  double mean_aggregate = 0.0;  // bits/s
  double mean_jfi = 0.0;
  double mean_channel_utilization = 0.0;
  std::size_t draws = 0;
};

/// Mean CTMC metrics over independent random allocations. Draw d uses the
/// seed derive_seed(seed, d), so the result does not depend on `workers`.
inline BaselineSummary random_baseline(const ProblemInstance& inst, const RandomBaseline& method,
                                       std::size_t draws, std::uint64_t seed,
                                       unsigned workers = 1) {
  inst.validate();
  if (draws == 0) throw Error(ErrorCode::InvalidArgument, "need at least one draw");
  std::vector<ThroughputReport> reports(draws);
  parallel_for(draws, workers, [&](std::size_t d) {
    Rng rng(derive_seed(seed, d));
    const auto net = method.kind == RandomKind::fixed_width
                         ? random_fixed_bw(inst, method.width, rng)
                         : random_variable_bw(inst, method.width, rng);
    reports[d] = network_throughput(net, inst.activity);
  });
  BaselineSummary s;
  s.draws = draws;
  for (const auto& r : reports) {
    s.mean_aggregate += r.aggregate;
    s.mean_jfi += r.jfi;
    s.mean_channel_utilization += r.channel_utilization;
  }
  const auto n = static_cast<double>(draws);
  s.mean_aggregate /= n;
  s.mean_jfi /= n;
  s.mean_channel_utilization /= n;
  return s;
}

// ---------------------------------------------------------------------------
// Exhaustive search

inline constexpr double kExhaustiveCap = 1e7;

struct ExhaustiveResult {
  NetworkAllocation allocation;
  ThroughputReport report;
  int overlap_degree = 0;
  std::size_t evaluated = 0;
};

/// Every (block, primary) pair allowed on the grid.
inline std::vector<WlanAllocation> allocation_choices(const ChannelGrid& grid) {
  std::vector<WlanAllocation> out;
  for (const auto& b : valid_blocks(grid))
    for (int p = b.start; p <= b.last(); ++p) out.push_back({b, p});
  return out;
}

/// Best allocation over all of C^N. WLANs are interchangeable, so only
/// non-decreasing choice sequences are evaluated. Ties go to the smaller
/// overlap degree, then to the earlier sequence.
inline ExhaustiveResult exhaustive_search(const ProblemInstance& inst, double cap = kExhaustiveCap,
                                          unsigned workers = 1) {
  inst.validate();
  const auto choices = allocation_choices(inst.grid());
  const double space = std::pow(static_cast<double>(choices.size()), inst.num_wlans);
  if (space > cap) {
    throw Error(ErrorCode::SearchSpaceTooLarge,
                std::to_string(choices.size()) + "^" + std::to_string(inst.num_wlans) +
                    " allocations exceed the cap");
  }
  const auto n = static_cast<std::size_t>(inst.num_wlans);
  const std::size_t c = choices.size();

  struct Best {
    std::vector<std::size_t> seq;
    double value = -1.0;
    int overlap = 0;
    std::size_t evaluated = 0;
  };
  const auto better = [](double v, int o, const Best& b) {
    if (b.seq.empty()) return true;
    const double tol = 1e-9 * std::abs(b.value);
    if (v > b.value + tol) return true;
    if (v < b.value - tol) return false;
    return o < b.overlap;
  };
  const auto build = [&](const std::vector<std::size_t>& seq) {
    std::vector<WlanAllocation> wlans;
    for (std::size_t s : seq) wlans.push_back(choices[s]);
    return NetworkAllocation(inst.grid(), std::move(wlans));
  };

  std::vector<Best> per_first(c);
  parallel_for(c, workers, [&](std::size_t first) {
    Best& best = per_first[first];
    std::vector<std::size_t> seq(n, first);
    while (true) {
      const auto net = build(seq);
      const double v = network_throughput(net, inst.activity).aggregate;
      const int o = overlap_metrics(net).max_overlap;
      ++best.evaluated;
      if (better(v, o, best)) {
        best.seq = seq;
        best.value = v;
        best.overlap = o;
      }
      // next non-decreasing sequence with seq[0] fixed
      std::size_t pos = n;
      while (pos > 1 && seq[pos - 1] == c - 1) --pos;
      if (pos <= 1) break;
      ++seq[pos - 1];
      for (std::size_t j = pos; j < n; ++j) seq[j] = seq[pos - 1];
    }
  });

  Best overall;
  std::size_t evaluated = 0;
  for (const auto& b : per_first) {
    evaluated += b.evaluated;
    if (!b.seq.empty() && better(b.value, b.overlap, overall)) overall = b;
  }
  auto alloc = build(overall.seq);
  auto report = network_throughput(alloc, inst.activity);
  return {std::move(alloc), std::move(report), overall.overlap, evaluated};
}

// ---------------------------------------------------------------------------
// Concavity diagnostics

enum class Objective { h_fitted, g };

struct ConcavityReport {
  std::size_t samples = 0;
  double max_second_difference = -std::numeric_limits<double>::infinity();
  double max_relative_cross = 0.0;  // |cross partial| / |value|
  bool concave = false;
};

/// Central differences at random points: k_i in [1, 830] for h_fitted,
/// n_k in [1, 100] for g.
inline ConcavityReport concavity_check(const ProblemInstance& inst, Objective objective,
                                       std::size_t dims, std::size_t samples,
                                       std::uint64_t seed = 1) {
  if (dims < 1 || samples < 1) throw Error(ErrorCode::InvalidArgument, "need dims, samples >= 1");
  const double step = 0.25;
  const double upper = objective == Objective::h_fitted ? 830.0 : 100.0;
  const double a = lambda_L(inst.activity);
  const auto f = [&](const std::vector<double>& x) {
    return objective == Objective::h_fitted ? h_fitted(x, inst.fit, a)
                                            : g_exact(std::span<const double>(x), inst.activity);
  };
  Rng rng(seed);
  ConcavityReport r;
  r.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> x(dims);
    for (auto& v : x) v = rng.uniform(1.0 + step, upper - step);
    const double fx = f(x);
    for (std::size_t i = 0; i < dims; ++i) {
      auto up = x, down = x;
      up[i] += step;
      down[i] -= step;
      const double d2 = (f(up) - 2 * fx + f(down)) / (step * step);
      r.max_second_difference = std::max(r.max_second_difference, d2);
      for (std::size_t j = i + 1; j < dims; ++j) {
        auto pp = x, pm = x, mp = x, mm = x;
        pp[i] += step; pp[j] += step;
        pm[i] += step; pm[j] -= step;
        mp[i] -= step; mp[j] += step;
        mm[i] -= step; mm[j] -= step;
        const double cross = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * step * step);
        r.max_relative_cross = std::max(r.max_relative_cross, std::abs(cross) / std::abs(fx));
      }
    }
  }
  r.concave = r.max_second_difference < 0 && r.max_relative_cross <= 1e-6;
  return r;
}

}  // namespace dcb
