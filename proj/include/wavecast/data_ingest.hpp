#pragma once

#include "wavecast/types.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

/// One observation row of an NDBC standard meteorological file.
/// Missing values are stored as std::nullopt.
struct RawRecord {
  TimePoint timestamp;
  std::optional<double> wspd;
  std::optional<double> dpd;
  std::optional<double> apd;
  std::optional<double> wvht;

  bool operator==(const RawRecord&) const = default;
};

struct NdbcParseResult {
  std::vector<RawRecord> records;
  std::size_t dropped_rows = 0;  // unparseable timestamps
  std::size_t missing_values = 0;
};

/// Parses NDBC stdmet text. Rows are sorted by time; duplicate timestamps keep
/// the first occurrence.
NdbcParseResult parse_ndbc(std::string_view text);

/// Writes records in the modern `#YY MM DD hh mm` layout with NDBC sentinels for
/// missing values. parse_ndbc(serialize_ndbc(r)).records == r.
std::string serialize_ndbc(const std::vector<RawRecord>& records);

bool is_ndbc_sentinel(double value);

struct NormStats {
  VariableRow mean;
  VariableRow std;
};

struct TimeSeriesFrame {
  std::string station_id;
  std::vector<TimePoint> timestamps;
  SeriesMatrix values;
  std::optional<NormStats> norm_stats;
  std::size_t first_index = 0;  // position of row 0 in the frame this was cut from

  std::size_t size() const { return timestamps.size(); }
};

struct Segment {
  std::size_t begin = 0;  // hourly-grid row indices, half-open
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
};

struct CleanReport {
  std::vector<Segment> segments;
  std::size_t chosen = 0;
  std::size_t snapped = 0;          // records moved onto the hour
  std::size_t off_grid_dropped = 0;  // records further than 10 min from an hour
  std::size_t interpolated = 0;      // individual values filled
};

struct CleanResult {
  TimeSeriesFrame frame;
  CleanReport report;
};

inline constexpr std::size_t kMaxGapHours = 3;
inline constexpr int kSnapToleranceMinutes = 10;
inline constexpr std::size_t kDefaultMaxWindow = 40;

/// Snaps to the hour, interpolates short gaps, and keeps the longest
/// contiguous segment. Throws NoUsableSegment when that segment is shorter than
/// 2 * max_window rows.
CleanResult clean_and_resample(const std::vector<RawRecord>& records,
                               std::size_t max_window = kDefaultMaxWindow,
                               std::string station_id = {});

struct SplitRatios {
  double train = 0.7;
  double valid = 0.2;
  double test = 0.1;
};

struct SplitFrame {
  TimeSeriesFrame train;
  TimeSeriesFrame valid;
  TimeSeriesFrame test;

  std::array<std::size_t, 2> boundaries() const { return {valid.first_index, test.first_index}; }
};

/// Contiguous 70/20/10 split with z-score statistics fitted on the training
/// rows and applied to all three parts.
SplitFrame chronological_split(const TimeSeriesFrame& frame, SplitRatios ratios = {});

NormStats fit_norm_stats(const SeriesMatrix& values);
SeriesMatrix normalize(const SeriesMatrix& values, const NormStats& stats);
SeriesMatrix denormalize(const SeriesMatrix& values, const NormStats& stats);
double denormalize_wave_height(double value, const NormStats& stats);
double normalize_wave_height(double value, const NormStats& stats);

}  // namespace wavecast
