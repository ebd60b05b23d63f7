#pragma once

// Spectrum efficiency of two WLANs that overlap on 1, 2 or 4 channels, with
// WLAN i holding the shared channel(s) starting at channel 1.

#include <cmath>
#include <string>
#include <vector>

#include "dcb/channelization.hpp"
#include "dcb/ctmc.hpp"
#include "dcb/mac_phy.hpp"

namespace dcb {

struct SeScheme {
  std::string label;
  std::string wlan_i;  // allocation literals on a 4-channel grid
  std::string wlan_j;
  int overlap = 1;     // number of shared channels
  // eta in bits/s/MHz from A = lambda L and rho(1), rho(2), rho(4).
  double (*closed_form)(double a, double r1, double r2, double r4) = nullptr;
};

inline const std::vector<SeScheme>& se_catalog() {
  static const std::vector<SeScheme> schemes = {
      {"f1", "1~", "1~", 1,
       [](double a, double r1, double, double) { return 2 * a / (20 * (1 + 2 * r1)); }},
      {"f2", "1~", "1~2", 1,
       [](double a, double r1, double r2, double) { return 2 * a / (40 * (1 + r1 + r2)); }},
      {"f3", "1~", "1,2~", 1,
       [](double a, double r1, double r2, double) {
         return (3 * a + 2 * r1 * a) / (40 * (1 + 2 * r1 + r2 + r1 * r1));
       }},
      {"f4", "1~", "1~2,3,4", 1,
       [](double a, double r1, double, double r4) { return 2 * a / (80 * (1 + r1 + r4)); }},
      // Printed with rho(2) in the denominator; the chain itself gives 1 + 2 rho(1) + rho(4) + rho(1)^2.
      {"f5", "1~", "1,2~3,4", 1,
       [](double a, double r1, double r2, double r4) {
         return (3 * a + 2 * r1 * a) / (80 * (1 + r1 + r2 + r4 + r1 * r1));
       }},
      {"f6", "1~", "1,2,3~4", 1,
       [](double a, double r1, double r2, double r4) {
         return (3 * a + r1 * a + r2 * a) / (80 * (1 + r1 + r2 + r4 + r1 * r2));
       }},
      {"f7", "1~2", "1~2", 2,
       [](double a, double, double r2, double) { return 2 * a / (40 * (1 + 2 * r2)); }},
      {"f8", "1~2", "1~2,3,4", 2,
       [](double a, double, double r2, double r4) { return 2 * a / (80 * (1 + r2 + r4)); }},
      {"f9", "1~2", "1,2,3~4", 2,
       [](double a, double, double r2, double r4) {
         return (3 * a + 2 * r2 * a) / (80 * (1 + 2 * r2 + r4 + r2 * r2));
       }},
      {"f10", "1~2,3,4", "1~2,3,4", 4,
       [](double a, double, double, double r4) { return 2 * a / (80 * (1 + 2 * r4)); }},
  };
  return schemes;
}

struct SeRow {
  const SeScheme* scheme = nullptr;
  double closed_form = 0.0;  // bits/s/MHz
  double ctmc = 0.0;
  double relative_difference = 0.0;
};

inline NetworkAllocation se_network(const SeScheme& s) {
  const ChannelGrid grid(4);
  return NetworkAllocation(grid, {parse_allocation(s.wlan_i, grid), parse_allocation(s.wlan_j, grid)});
}

inline SeRow evaluate_se(const SeScheme& s, const ActivityModel& model) {
  const auto net = se_network(s);
  const auto report = network_throughput(net, model);
  const std::size_t both[] = {0, 1};
  SeRow row;
  row.scheme = &s;
  row.ctmc = spectrum_efficiency(both, report.per_wlan, net);
  row.closed_form = s.closed_form(lambda_L(model), activity_ratio(model, 1),
                                  activity_ratio(model, 2), activity_ratio(model, 4));
  row.relative_difference = std::abs(row.ctmc - row.closed_form) / std::abs(row.closed_form);
  return row;
}

inline std::vector<SeRow> evaluate_se_catalog(const ActivityModel& model) {
  std::vector<SeRow> rows;
  for (const auto& s : se_catalog()) rows.push_back(evaluate_se(s, model));
  return rows;
}

}  // namespace dcb
