#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "dcb/optimizer.hpp"

using namespace dcb;

namespace {

ProblemInstance instance(int n, int k) {
  ProblemInstance inst;
  inst.num_wlans = n;
  inst.num_channels = k;
  return inst;
}

// Best h over every non-decreasing width vector with sum <= K.
double brute_channels(const ProblemInstance& inst) {
  double best = 0;
  std::vector<int> k;
  std::function<void(int)> rec = [&](int min_index) {
    if (static_cast<int>(k.size()) == inst.num_wlans) {
      best = std::max(best, h_exact(k, inst.activity, inst.num_channels));
      return;
    }
    for (int j = min_index; j < 4; ++j) {
      k.push_back(kBondedWidths[j]);
      rec(j);
      k.pop_back();
    }
  };
  rec(0);
  return best;
}

// Best g over every non-decreasing positive vector of length K summing to N.
double brute_wlans(const ProblemInstance& inst) {
  double best = 0;
  std::vector<int> n;
  std::function<void(int, int)> rec = [&](int min_value, int left) {
    const int slots = inst.num_channels - static_cast<int>(n.size());
    if (slots == 0) {
      if (left == 0) best = std::max(best, g_exact(n, inst.activity));
      return;
    }
    for (int v = min_value; v * slots <= left; ++v) {
      n.push_back(v);
      rec(v, left - v);
      n.pop_back();
    }
  };
  rec(1, inst.num_wlans);
  return best;
}

}  // namespace

TEST(Objectives, ChannelsFeasibility) {
  const int ok[] = {2, 2, 2};
  const int over[] = {4, 4};
  const int odd[] = {3};
  EXPECT_TRUE(channels_feasible(ok, 7));
  EXPECT_FALSE(channels_feasible(over, 7));
  EXPECT_FALSE(channels_feasible(odd, 7));
  EXPECT_EQ(h_exact(over, ActivityModel{}, 7), 0.0);
}

TEST(Objectives, GoldenValues) {
  const ActivityModel m;
  const int bbm[] = {2, 2, 2};
  const int greedy[] = {4, 2, 1};
  EXPECT_NEAR(h_exact(bbm, m, 7) / 1e6, 343.7781, 1e-3);
  EXPECT_NEAR(h_exact(greedy, m, 7) / 1e6, 339.8579, 1e-3);
  const int good[] = {2, 2, 3};
  const int bad[] = {5, 1, 1};
  EXPECT_GT(g_exact(good, m), g_exact(bad, m));
}

TEST(Relaxation, ChannelsRoot) {
  const auto inst = instance(3, 7);
  const auto node = relax_channels(inst);
  for (double x : node.relaxed_solution) EXPECT_NEAR(x, 7.0 / 3.0, 1e-12);
  EXPECT_NEAR(node.fitted_value / 1e6, 358.8981, 0.1);
  EXPECT_GE(node.relaxed_value, brute_channels(inst) - 1e-6);
}

TEST(Relaxation, WaterFillRespectsBoxAndBudget) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.index(6);
    std::vector<double> lo(n), hi(n);
    double lo_sum = 0, hi_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = 1 + static_cast<double>(rng.index(4));
      hi[i] = lo[i] + static_cast<double>(rng.index(5));
      lo_sum += lo[i];
      hi_sum += hi[i];
    }
    const double target = rng.uniform(lo_sum, hi_sum);
    const auto x = detail::water_fill(lo, hi, target);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(x[i], lo[i] - 1e-12);
      EXPECT_LE(x[i], hi[i] + 1e-12);
      s += x[i];
    }
    EXPECT_NEAR(s, target, 1e-9);
  }
}

TEST(Relaxation, Errors) {
  const auto inst = instance(3, 4);
  const std::vector<int> lo = {2, 2, 1}, hi = {8, 8, 8};
  try {
    relax_channels(inst, lo, hi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBox);
  }
  const auto w = instance(7, 3);
  const std::vector<int> wlo = {1, 1, 1}, whi = {1, 1, 2};
  try {
    relax_wlans(w, wlo, whi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleBoxes);
  }
}

TEST(Relaxation, WlansRoot) {
  const auto node = relax_wlans(instance(7, 3));
  for (double x : node.relaxed_solution) EXPECT_NEAR(x, 7.0 / 3.0, 1e-12);
}

TEST(Envelope, BoundIsSoundOverRandomBoxes) {
  const ActivityModel m;
  const ThroughputEnvelope env(m);
  for (int w : kBondedWidths) EXPECT_GE(env(w), lambda_L(m) / (1 + activity_ratio(m, w)) - 1e-6);
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(4));
    const int k = n + static_cast<int>(rng.index(12));
    std::vector<int> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      lo[i] = 1 + static_cast<int>(rng.index(8));
      hi[i] = lo[i] + static_cast<int>(rng.index(static_cast<std::uint64_t>(9 - lo[i])));
    }
    // Brute force over the box.
    double best = -1;
    std::vector<int> x(static_cast<std::size_t>(n));
    std::function<void(int)> rec = [&](int i) {
      if (i == n) {
        if (channels_feasible(x, k)) best = std::max(best, h_exact(x, m, k));
        return;
      }
      for (int w : kBondedWidths)
        if (w >= lo[i] && w <= hi[i]) {
          x[i] = w;
          rec(i + 1);
        }
    };
    rec(0);
    if (best < 0) continue;
    EXPECT_GE(env.bound(lo, hi, k), best - 1e-6);
  }
}

TEST(Bnb, ChannelsGoldenAndTrace) {
  const auto r = bnb_channels(instance(3, 7));
  EXPECT_EQ(r.regime, Regime::channels_per_wlan);
  EXPECT_EQ(r.best_scheme, (std::vector<int>{2, 2, 2}));
  EXPECT_NEAR(r.best_value / 1e6, 343.7781, 1e-3);
  ASSERT_GE(r.trace.size(), 4u);
  EXPECT_EQ(r.trace[0].entries[0].scheme, (std::vector<double>{1, 1, 1}));
  EXPECT_TRUE(r.trace[0].entries[0].feasible);
  EXPECT_NEAR(r.trace[0].lower_bound / 1e6, 186.8310, 1e-3);
  EXPECT_NEAR(r.trace[0].upper_bound / 1e6, 358.8981, 0.1);
  EXPECT_EQ(r.nodes.size(), r.nodes_explored);
}

TEST(Bnb, LowerBoundNeverDecreases) {
  for (auto [n, k] : {std::pair{3, 7}, {4, 9}, {5, 17}, {7, 3}, {12, 5}}) {
    const auto r = optimize(instance(n, k)).bnb;
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      EXPECT_GE(r.trace[i].lower_bound, r.trace[i - 1].lower_bound - 1e-9) << n << "," << k;
  }
}

TEST(Bnb, MatchesBruteForceOnSmallGrids) {
  for (int k = 1; k <= 10; ++k)
    for (int n = 1; n <= k; ++n) {
      const auto inst = instance(n, k);
      const auto r = bnb_channels(inst);
      EXPECT_NEAR(r.best_value, brute_channels(inst), 1e-6) << n << "," << k;
      EXPECT_NEAR(h_exact(r.best_scheme, inst.activity, k), r.best_value, 1e-6);
    }
  for (int k = 1; k <= 4; ++k)
    for (int n = k + 1; n <= 12; ++n) {
      const auto inst = instance(n, k);
      const auto r = bnb_wlans(inst);
      EXPECT_NEAR(r.best_value, brute_wlans(inst), 1e-6) << n << "," << k;
      EXPECT_TRUE(wlans_feasible(r.best_scheme, n));
    }
}

TEST(Bnb, RegimeGuards) {
  EXPECT_THROW(bnb_channels(instance(5, 3)), Error);
  EXPECT_THROW(bnb_wlans(instance(3, 5)), Error);
}

TEST(Bnb, WlansExample) {
  const auto r = optimize(instance(7, 3));
  EXPECT_EQ(r.regime, Regime::wlans_per_channel);
  EXPECT_EQ(r.scheme, (std::vector<int>{2, 2, 3}));
  EXPECT_EQ(to_literal(r.allocation), "1~ 1~ 2~ 2~ 3~ 3~ 3~");
}

TEST(Greedy, ChannelSteps) {
  const auto g = greedy(instance(3, 7));
  EXPECT_EQ(g.scheme, (std::vector<int>{4, 2, 1}));
  EXPECT_NEAR(g.value / 1e6, 339.8579, 1e-3);
  ASSERT_EQ(g.steps.size(), 5u);
  const std::vector<std::vector<int>> schemes = {{1, 1, 1}, {2, 1, 1}, {4, 1, 1}, {8, 1, 1}, {4, 2, 1}};
  const bool feasible[] = {true, true, true, false, true};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(g.steps[i].scheme, schemes[i]);
    EXPECT_EQ(g.steps[i].feasible, feasible[i]);
  }
}

TEST(Greedy, Wlans) {
  const auto g = greedy(instance(7, 3));
  EXPECT_EQ(g.regime, Regime::wlans_per_channel);
  EXPECT_EQ(g.scheme, (std::vector<int>{5, 1, 1}));
}

TEST(Random, FixedWidthBlocksAreAligned) {
  Rng rng(3);
  const auto inst = instance(6, 8);
  for (int i = 0; i < 50; ++i) {
    const auto net = random_fixed_bw(inst, 2, rng);
    for (const auto& w : net.wlans) {
      EXPECT_EQ(w.block.width, 2);
      EXPECT_TRUE(w.block.aligned());
    }
  }
  try {
    random_fixed_bw(instance(2, 4), 8, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoBlockFits);
  }
}

TEST(Random, VariableWidthStaysInGrid) {
  Rng rng(4);
  const auto inst = instance(5, 4);
  for (int i = 0; i < 50; ++i)
    for (const auto& w : random_variable_bw(inst, 8, rng).wlans) EXPECT_LE(w.block.width, 4);
}

TEST(Random, BaselineIndependentOfWorkers) {
  const auto inst = instance(5, 4);
  const RandomBaseline b{RandomKind::fixed_width, 1};
  const auto one = random_baseline(inst, b, 64, 7, 1);
  const auto many = random_baseline(inst, b, 64, 7, 4);
  EXPECT_EQ(one.mean_aggregate, many.mean_aggregate);
  EXPECT_EQ(one.mean_jfi, many.mean_jfi);
  EXPECT_EQ(one.mean_channel_utilization, many.mean_channel_utilization);
}

TEST(Exhaustive, MatchesOptimizeAndOverlapRegime) {
  for (auto [n, k] : {std::pair{1, 4}, {2, 4}, {3, 4}, {5, 4}}) {
    const auto inst = instance(n, k);
    const auto e = exhaustive_search(inst, kExhaustiveCap, 4);
    const auto o = optimize(inst);
    EXPECT_NEAR(e.report.aggregate, o.report.aggregate, 1e-9 * o.report.aggregate) << n;
    EXPECT_EQ(e.overlap_degree, n <= k ? 0 : 1) << n;
  }
}

TEST(Exhaustive, Cap) {
  try {
    exhaustive_search(instance(6, 8), 1e6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SearchSpaceTooLarge);
  }
}

TEST(Concavity, BothObjectives) {
  const auto inst = instance(3, 7);
  const auto h = concavity_check(inst, Objective::h_fitted, 3, 100, 1);
  EXPECT_TRUE(h.concave);
  EXPECT_LT(h.max_second_difference, 0.0);
  const auto g = concavity_check(inst, Objective::g, 3, 100, 1);
  EXPECT_TRUE(g.concave);
}

TEST(Allocation, SchemeToAllocation) {
  const auto inst = instance(3, 7);
  const std::vector<int> s = {4, 2, 1};
  EXPECT_EQ(to_literal(scheme_to_allocation(inst, Regime::channels_per_wlan, s)), "1~2,3,4 5~6 7~");
  const std::vector<int> bad = {1, 2, 4};
  EXPECT_THROW(scheme_to_allocation(inst, Regime::channels_per_wlan, bad), Error);
}
