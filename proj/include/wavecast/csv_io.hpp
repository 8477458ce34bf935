#pragma once

#include "wavecast/data_ingest.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// "2010-05-01T13:00:00Z"
std::string format_timestamp(TimePoint t);
TimePoint parse_timestamp(std::string_view text);

/// Canonical series CSV: `timestamp,ws,dpd,apd,hs`, six decimals, physical units.
std::string format_frame_csv(const TimeSeriesFrame& frame);
TimeSeriesFrame parse_frame_csv(std::string_view text, std::string station_id = {});

std::string format_fixed(double value, int decimals = 6);

/// Splits one CSV line on commas (no quoting; none of our formats need it).
std::vector<std::string_view> split_csv_line(std::string_view line);

/// External forecast file `timestamp,prediction`.
struct ExternalPrediction {
  TimePoint timestamp;
  double prediction;
};
std::vector<ExternalPrediction> parse_prediction_csv(std::string_view text);

}  // namespace wavecast
