#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dcb/error.hpp"

namespace dcb {

struct MacPhyParams {
  double packet_length_bits = 12000.0;  // L_d
  int aggregated_packets = 64;          // K_A
  int contention_window = 16;           // CW, slots
  double slot_duration = 9e-6;          // seconds
  double packet_error_prob = 0.0;

  void validate() const {
    if (!(packet_length_bits > 0) || aggregated_packets < 1 || contention_window < 1 ||
        !(slot_duration > 0)) {
      throw Error(ErrorCode::InvalidArgument, "MAC/PHY parameters must be positive");
    }
    if (!(packet_error_prob >= 0.0 && packet_error_prob < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "packet error probability must be in [0, 1)");
    }
  }

  double mean_backoff() const { return contention_window * slot_duration / 2.0; }
  double payload_bits() const { return aggregated_packets * packet_length_bits; }
};

// PHY description of a table row; informational only, durations are inputs.
struct PhyRow {
  int data_subcarriers = 0;
  int modulation_bits = 0;
  double coding_rate = 0.0;
};

// Transmission duration per number of bonded basic channels.
class DurationTable {
 public:
  DurationTable() = default;

  explicit DurationTable(std::map<int, double> seconds,
                         std::map<int, PhyRow> phy = {})
      : seconds_(std::move(seconds)), phy_(std::move(phy)) {
    if (seconds_.empty()) throw Error(ErrorCode::InvalidArgument, "empty duration table");
    double prev = 0.0;
    bool first = true;
    for (const auto& [k, t] : seconds_) {
      if (k < 1 || !(t > 0)) {
        throw Error(ErrorCode::InvalidArgument, "durations must be positive for widths >= 1");
      }
      if (!first && !(t < prev)) {
        throw Error(ErrorCode::InvalidArgument,
                    "transmission duration must strictly decrease with channel count");
      }
      prev = t;
      first = false;
    }
  }

  // 802.11ac durations for 64 aggregated 12000-bit packets at 20/40/80/160 MHz.
  static DurationTable ieee80211ac() {
    return DurationTable({{1, 12.26e-3}, {2, 6.63e-3}, {4, 4.64e-3}, {8, 3.52e-3}},
                         {{1, {52, 6, 5.0 / 6.0}},
                          {2, {108, 6, 3.0 / 4.0}},
                          {4, {234, 4, 3.0 / 4.0}},
                          {8, {468, 4, 1.0 / 2.0}}});
  }

  bool has(int width) const { return seconds_.count(width) != 0; }

  double duration(int width) const {
    auto it = seconds_.find(width);
    if (it == seconds_.end()) {
      throw Error(ErrorCode::UnknownWidth,
                  "no transmission duration for " + std::to_string(width) + " channels");
    }
    return it->second;
  }

  std::optional<PhyRow> phy(int width) const {
    auto it = phy_.find(width);
    if (it == phy_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<int, double>& entries() const { return seconds_; }

 private:
  std::map<int, double> seconds_ = {{1, 12.26e-3}, {2, 6.63e-3}, {4, 4.64e-3}, {8, 3.52e-3}};
  std::map<int, PhyRow> phy_;
};

// Backoff/transmission timing of one WLAN. rho(k) = T(k) / E[B].
class ActivityModel {
 public:
  ActivityModel() : ActivityModel(MacPhyParams{}, DurationTable::ieee80211ac()) {}

  ActivityModel(const MacPhyParams& params, DurationTable table)
      : table_(std::move(table)),
        mean_backoff_(params.mean_backoff()),
        payload_bits_(params.payload_bits()),
        packet_error_prob_(params.packet_error_prob) {
    params.validate();
  }

  const DurationTable& durations() const { return table_; }
  double mean_backoff() const { return mean_backoff_; }
  double attempt_rate() const { return 1.0 / mean_backoff_; }
  double payload_bits() const { return payload_bits_; }
  double packet_error_prob() const { return packet_error_prob_; }

  double duration(int width) const { return table_.duration(width); }
  double departure_rate(int width) const { return 1.0 / table_.duration(width); }

  ActivityModel with_attempt_rate(double rate) const {
    if (!(rate > 0)) throw Error(ErrorCode::InvalidArgument, "attempt rate must be positive");
    ActivityModel m = *this;
    m.mean_backoff_ = 1.0 / rate;
    return m;
  }

  ActivityModel with_payload(double bits) const {
    if (!(bits > 0)) throw Error(ErrorCode::InvalidArgument, "payload must be positive");
    ActivityModel m = *this;
    m.payload_bits_ = bits;
    return m;
  }

 private:
  DurationTable table_;
  double mean_backoff_;
  double payload_bits_;
  double packet_error_prob_;
};

inline double activity_ratio(const ActivityModel& model, int width) {
  return model.duration(width) / model.mean_backoff();
}

/// A = lambda * L in bits per second.
inline double lambda_L(const ActivityModel& model) {
  return model.attempt_rate() * model.payload_bits();
}

// Continuous surrogate rho'(k) = b / k^a used by the relaxations.
struct FittedActivityModel {
  double a = 0.7624;
  double b = 168.2;
};

inline double fitted_activity_ratio(const FittedActivityModel& fit, double k) {
  if (!(k > 0)) throw Error(ErrorCode::NonPositiveWidth, "width must be positive");
  return fit.b / std::pow(k, fit.a);
}

struct PowerLawFit {
  FittedActivityModel model;
  double correlation = 0.0;  // Pearson, tabulated vs fitted ratios
  bool acceptable = false;   // correlation >= 0.98
};

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 1.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Least squares on log rho = log b - a log k.
inline PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two points");
  double mx = 0, my = 0;
  for (const auto& [k, r] : points) {
    if (!(k > 0) || !(r > 0)) throw Error(ErrorCode::InvalidArgument, "points must be positive");
    mx += std::log(k);
    my += std::log(r);
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (const auto& [k, r] : points) {
    sxy += (std::log(k) - mx) * (std::log(r) - my);
    sxx += (std::log(k) - mx) * (std::log(k) - mx);
  }
  if (sxx == 0) throw Error(ErrorCode::DegenerateFit, "all widths are equal");
  const double slope = sxy / sxx;
  PowerLawFit fit;
  fit.model = {-slope, std::exp(my - slope * mx)};
  std::vector<double> observed, predicted;
  for (const auto& [k, r] : points) {
    observed.push_back(r);
    predicted.push_back(fitted_activity_ratio(fit.model, k));
  }
  fit.correlation = pearson(observed, predicted);
  fit.acceptable = fit.correlation >= 0.98;
  return fit;
}

/// Fits over the table's own rows.
inline PowerLawFit fit_power_law(const ActivityModel& model) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [k, t] : model.durations().entries()) pts.emplace_back(k, activity_ratio(model, k));
  return fit_power_law(pts);
}

}  // namespace dcb
