#pragma once

// Basic-channel grid, 802.11ac bonded blocks, per-WLAN allocations, the DCB
// transmission-channel selection rule and overlap metrics.

#include <algorithm>
#include <bitset>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcb/error.hpp"

namespace dcb {

inline constexpr int kMaxChannels = 256;

// Bit c-1 is set when basic channel c is in the set.
using ChannelMask = std::bitset<kMaxChannels>;

// Widths (in basic channels) of the 20/40/80/160 MHz bonded channels.
inline constexpr int kBondedWidths[] = {1, 2, 4, 8};

inline bool is_bonded_width(int width) {
  return std::find(std::begin(kBondedWidths), std::end(kBondedWidths), width) !=
         std::end(kBondedWidths);
}

// Aligned: transmissions use 802.11ac channelization (width 2^j, start aligned
// to a multiple of the width counted from channel 1). Contiguous: any run of
// adjacent idle channels, kept for exploration only.
enum class BondingMode { aligned, contiguous };

struct ChannelGrid {
  int num_channels = 1;

  explicit ChannelGrid(int k = 1) : num_channels(k) {
    if (k < 1 || k > kMaxChannels) {
      throw Error(ErrorCode::InvalidArgument,
                  "channel count must be in [1, " + std::to_string(kMaxChannels) + "]");
    }
  }

  bool operator==(const ChannelGrid&) const = default;
};

struct BondedBlock {
  int start = 1;
  int width = 1;

  int last() const { return start + width - 1; }
  bool contains(int channel) const { return channel >= start && channel <= last(); }
  bool contains(const BondedBlock& other) const {
    return other.start >= start && other.last() <= last();
  }
  bool aligned() const { return is_bonded_width(width) && (start - 1) % width == 0; }

  ChannelMask mask() const {
    ChannelMask m;
    for (int c = start; c <= last(); ++c) m.set(static_cast<std::size_t>(c - 1));
    return m;
  }

  auto operator<=>(const BondedBlock&) const = default;
};

inline bool fits(const ChannelGrid& grid, const BondedBlock& block) {
  return block.start >= 1 && block.width >= 1 && block.last() <= grid.num_channels;
}

inline void validate_block(const ChannelGrid& grid, const BondedBlock& block,
                           BondingMode mode = BondingMode::aligned) {
  if (!fits(grid, block)) {
    throw Error(ErrorCode::InvalidBlock, "block [" + std::to_string(block.start) + ", " +
                                             std::to_string(block.last()) +
                                             "] does not fit in the grid");
  }
  if (mode == BondingMode::aligned && !block.aligned()) {
    throw Error(ErrorCode::InvalidBlock, "block starting at " + std::to_string(block.start) +
                                             " with width " + std::to_string(block.width) +
                                             " is not an aligned 802.11ac block");
  }
}

struct WlanAllocation {
  BondedBlock block;
  int primary = 1;

  int bandwidth_mhz() const { return 20 * block.width; }
  bool operator==(const WlanAllocation&) const = default;
  auto operator<=>(const WlanAllocation&) const = default;
};

inline void validate_allocation(const ChannelGrid& grid, const WlanAllocation& alloc,
                                BondingMode mode = BondingMode::aligned) {
  validate_block(grid, alloc.block, mode);
  if (!alloc.block.contains(alloc.primary)) {
    throw Error(ErrorCode::InvalidBlock,
                "primary channel " + std::to_string(alloc.primary) + " is outside its block");
  }
}

struct NetworkAllocation {
  ChannelGrid grid;
  std::vector<WlanAllocation> wlans;
  BondingMode mode = BondingMode::aligned;

  NetworkAllocation(ChannelGrid g, std::vector<WlanAllocation> w,
                    BondingMode m = BondingMode::aligned)
      : grid(g), wlans(std::move(w)), mode(m) {
    if (wlans.empty()) throw Error(ErrorCode::InvalidArgument, "network has no WLANs");
    for (const auto& a : wlans) validate_allocation(grid, a, mode);
  }

  std::size_t size() const { return wlans.size(); }
  const WlanAllocation& operator[](std::size_t i) const { return wlans[i]; }
  bool operator==(const NetworkAllocation&) const = default;
};

/// All aligned blocks of width 1, 2, 4 and 8 that fit in the grid, ordered by
/// (width, start).
inline std::vector<BondedBlock> valid_blocks(const ChannelGrid& grid) {
  std::vector<BondedBlock> out;
  for (int w : kBondedWidths) {
    for (int s = 1; s + w - 1 <= grid.num_channels; s += w) out.push_back({s, w});
  }
  return out;
}

/// Channels a WLAN transmits on when its backoff expires: the widest block
/// inside its allocation that contains the primary and is entirely idle.
inline BondedBlock dcb_select(const WlanAllocation& alloc, const ChannelMask& busy,
                              BondingMode mode = BondingMode::aligned) {
  const auto is_busy = [&](int c) { return busy.test(static_cast<std::size_t>(c - 1)); };
  if (is_busy(alloc.primary)) {
    throw Error(ErrorCode::PrimaryBusy,
                "primary channel " + std::to_string(alloc.primary) + " is busy");
  }
  if (mode == BondingMode::contiguous) {
    int lo = alloc.primary;
    int hi = alloc.primary;
    while (lo - 1 >= alloc.block.start && !is_busy(lo - 1)) --lo;
    while (hi + 1 <= alloc.block.last() && !is_busy(hi + 1)) ++hi;
    return {lo, hi - lo + 1};
  }
  BondedBlock best{alloc.primary, 1};
  for (int w : kBondedWidths) {
    if (w > alloc.block.width) break;
    BondedBlock candidate{((alloc.primary - 1) / w) * w + 1, w};
    if (!alloc.block.contains(candidate)) continue;
    if ((candidate.mask() & busy).none()) best = candidate;
  }
  return best;
}

struct OverlapSet {
  std::vector<std::size_t> wlans;  // 0-based WLAN indices sharing exactly `channels`
  std::vector<int> channels;
};

struct OverlapReport {
  std::vector<int> per_wlan_overlap;
  int max_overlap = 0;
  std::vector<OverlapSet> overlap_sets;
};

inline std::vector<int> channels_of(const ChannelMask& mask) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask.test(i)) out.push_back(static_cast<int>(i) + 1);
  return out;
}

/// O_i is the number of channels WLAN i shares with at least one other WLAN
/// (the union of every overlapped set it belongs to); O(f) is the maximum.
inline OverlapReport overlap_metrics(const NetworkAllocation& net) {
  const std::size_t n = net.size();
  OverlapReport report;
  report.per_wlan_overlap.assign(n, 0);
  std::vector<ChannelMask> shared(n);
  std::map<std::vector<int>, std::vector<std::size_t>> by_intersection;
  std::vector<std::vector<int>> order;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const ChannelMask x = net[i].block.mask() & net[j].block.mask();
      if (x.none()) continue;
      shared[i] |= x;
      shared[j] |= x;
      auto key = channels_of(x);
      auto [it, inserted] = by_intersection.try_emplace(key);
      if (inserted) order.push_back(key);
      for (std::size_t w : {i, j})
        if (std::find(it->second.begin(), it->second.end(), w) == it->second.end())
          it->second.push_back(w);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    report.per_wlan_overlap[i] = static_cast<int>(shared[i].count());
    report.max_overlap = std::max(report.max_overlap, report.per_wlan_overlap[i]);
  }
  for (const auto& key : order) {
    auto wlans = by_intersection[key];
    std::sort(wlans.begin(), wlans.end());
    report.overlap_sets.push_back({std::move(wlans), key});
  }
  return report;
}

/// Maps a channels-per-WLAN grouping onto consecutive blocks, first channel of
/// each block as primary. The scheme must be ordered so every block lands
/// aligned (non-increasing widths always do).
inline NetworkAllocation grouping_to_allocation_channels(std::span<const int> scheme,
                                                         const ChannelGrid& grid) {
  if (scheme.empty()) throw Error(ErrorCode::InfeasibleScheme, "empty grouping scheme");
  int total = 0;
  for (int k : scheme) {
    if (!is_bonded_width(k))
      throw Error(ErrorCode::InfeasibleScheme, "width " + std::to_string(k) + " not in {1,2,4,8}");
    total += k;
  }
  if (total > grid.num_channels) {
    throw Error(ErrorCode::InfeasibleScheme, "scheme uses " + std::to_string(total) +
                                                 " channels but only " +
                                                 std::to_string(grid.num_channels) + " exist");
  }
  std::vector<WlanAllocation> wlans;
  int next = 1;
  for (int k : scheme) {
    const int w = std::min(k, 8);
    BondedBlock b{next, w};
    if (!b.aligned()) {
      throw Error(ErrorCode::InfeasibleScheme,
                  "width " + std::to_string(w) + " block would start at unaligned channel " +
                      std::to_string(next));
    }
    wlans.push_back({b, next});
    next += w;
  }
  return NetworkAllocation(grid, std::move(wlans));
}

/// The first n_1 WLANs share channel 1, the next n_2 share channel 2, ...
inline NetworkAllocation grouping_to_allocation_wlans(std::span<const int> scheme,
                                                      std::size_t num_wlans,
                                                      const ChannelGrid& grid) {
  if (scheme.empty() || static_cast<int>(scheme.size()) > grid.num_channels) {
    throw Error(ErrorCode::InfeasibleScheme, "need between 1 and K groups");
  }
  std::size_t total = 0;
  for (int n : scheme) {
    if (n < 1) throw Error(ErrorCode::InfeasibleScheme, "every group needs at least one WLAN");
    total += static_cast<std::size_t>(n);
  }
  if (total != num_wlans) {
    throw Error(ErrorCode::InfeasibleScheme, "groups hold " + std::to_string(total) +
                                                 " WLANs, expected " + std::to_string(num_wlans));
  }
  std::vector<WlanAllocation> wlans;
  for (std::size_t g = 0; g < scheme.size(); ++g) {
    const int ch = static_cast<int>(g) + 1;
    for (int i = 0; i < scheme[g]; ++i) wlans.push_back({{ch, 1}, ch});
  }
  return NetworkAllocation(grid, std::move(wlans));
}

// Allocation literals: channels separated by ',' with '~' written right after
// the primary in place of the separator, e.g. "1~2,3,4", "1,2,3~4", "7~".

inline std::string to_literal(const WlanAllocation& alloc) {
  std::string out;
  for (int c = alloc.block.start; c <= alloc.block.last(); ++c) {
    out += std::to_string(c);
    if (c == alloc.primary) {
      out += '~';
    } else if (c != alloc.block.last()) {
      out += ',';
    }
  }
  return out;
}

inline std::string to_literal(const NetworkAllocation& net) {
  std::string out;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (i) out += ' ';
    out += to_literal(net[i]);
  }
  return out;
}

inline WlanAllocation parse_allocation(std::string_view text, const ChannelGrid& grid,
                                       BondingMode mode = BondingMode::aligned) {
  const auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::ParseError, "allocation \"" + std::string(text) + "\": " + why);
  };
  std::vector<int> channels;
  int primary = -1;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] < '0' || text[i] > '9') throw fail("expected a channel index");
    int value = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      value = value * 10 + (text[i] - '0');
      if (value > kMaxChannels) throw fail("channel index too large");
      ++i;
    }
    channels.push_back(value);
    if (i == text.size()) break;
    if (text[i] == '~') {
      if (primary != -1) throw fail("more than one primary marker");
      primary = value;
      ++i;
      if (i < text.size() && text[i] == ',') {
        ++i;
        if (i == text.size()) throw fail("trailing separator");
      }
    } else if (text[i] == ',') {
      ++i;
      if (i == text.size()) throw fail("trailing separator");
    } else {
      throw fail(std::string("unexpected character '") + text[i] + "'");
    }
  }
  if (channels.empty()) throw fail("no channels");
  if (primary == -1) throw fail("missing '~' after the primary channel");
  for (std::size_t j = 1; j < channels.size(); ++j) {
    if (channels[j] != channels[j - 1] + 1) throw fail("channels must be ascending and contiguous");
  }
  WlanAllocation alloc{{channels.front(), static_cast<int>(channels.size())}, primary};
  try {
    validate_allocation(grid, alloc, mode);
  } catch (const Error& e) {
    throw fail(e.what());
  }
  return alloc;
}

inline NetworkAllocation parse_network(std::string_view text, const ChannelGrid& grid,
                                       BondingMode mode = BondingMode::aligned) {
  std::vector<WlanAllocation> wlans;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) wlans.push_back(parse_allocation(text.substr(i, j - i), grid, mode));
    i = j;
  }
  if (wlans.empty()) throw Error(ErrorCode::ParseError, "no allocations given");
  return NetworkAllocation(grid, std::move(wlans), mode);
}

}  // namespace dcb
