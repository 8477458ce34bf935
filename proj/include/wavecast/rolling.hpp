#pragma once

#include "wavecast/data_ingest.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace wavecast {

inline constexpr std::size_t kDefaultWindow = 24;
inline constexpr std::size_t kHorizons[] = {1, 3, 6, 12};
inline constexpr std::size_t kSweepWindows[] = {12, 24, 32, 40};

/// A rolling subsequence of T rows and the wave height l hours after its last
/// row. Indices are global (relative to the frame the split was cut from).
struct Window {
  std::size_t start_index = 0;
  SeriesMatrix values;  // [T x 4], normalized
  double target = 0.0;  // normalized H_s at target_index()
  std::size_t horizon = 1;
  TimePoint target_time{};

  std::size_t length() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t last_index() const { return start_index + length() - 1; }
  std::size_t target_index() const { return last_index() + horizon; }
};

/// Stride-1 windows over one frame: m - T - l + 1 of them.
std::vector<Window> make_windows(const TimeSeriesFrame& frame, std::size_t window_size,
                                 std::size_t horizon);

struct LeakageViolation {
  std::size_t window = 0;  // position in the audited list
  std::size_t boundary = 0;
};

struct LeakageReport {
  std::size_t windows_checked = 0;
  std::vector<LeakageViolation> violations;

  bool clean() const { return violations.empty(); }
};

/// A window leaks when any split boundary b satisfies start < b <= target.
LeakageReport leakage_audit(std::span<const Window> windows,
                            std::span<const std::size_t> split_boundaries);

}  // namespace wavecast
