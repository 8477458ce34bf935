#include "wavecast/data_ingest.hpp"

#include "wavecast/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace wavecast {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::NoUsableSegment: return "NoUsableSegment";
    case ErrorKind::DegenerateVariable: return "DegenerateVariable";
    case ErrorKind::FrameTooShort: return "FrameTooShort";
    case ErrorKind::BadCheckpoint: return "BadCheckpoint";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::ZeroSpectrum: return "ZeroSpectrum";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::DegenerateRange: return "DegenerateRange";
    case ErrorKind::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorKind::MissingPrediction: return "MissingPrediction";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Config:
      return 2;
    case ErrorKind::Io:
    case ErrorKind::MalformedHeader:
    case ErrorKind::MalformedRow:
    case ErrorKind::EmptyFile:
    case ErrorKind::NoUsableSegment:
    case ErrorKind::DegenerateVariable:
    case ErrorKind::FrameTooShort:
    case ErrorKind::BadCheckpoint:
    case ErrorKind::DegenerateRange:
    case ErrorKind::MissingPrediction:
      return 3;
    default:
      return 4;
  }
}

namespace {

using namespace std::chrono;

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view token) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

struct ColumnMap {
  int year = -1, month = -1, day = -1, hour = -1, minute = -1;
  int wspd = -1, dpd = -1, apd = -1, wvht = -1;
  bool two_digit_year = false;

  int required_tokens() const {
    return 1 + std::max({year, month, day, hour, minute, wspd, dpd, apd, wvht});
  }
};

std::optional<ColumnMap> read_header(const std::vector<std::string_view>& tokens) {
  ColumnMap map;
  for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
    std::string_view name = tokens[i];
    if (i == 0 && !name.empty() && name.front() == '#') name.remove_prefix(1);
    if (name == "YY") {
      map.year = i;
      map.two_digit_year = true;
    } else if (name == "YYYY") {
      map.year = i;
    } else if (name == "MM") {
      map.month = i;
    } else if (name == "DD") {
      map.day = i;
    } else if (name == "hh") {
      map.hour = i;
    } else if (name == "mm") {
      map.minute = i;
    } else if (name == "WSPD") {
      map.wspd = i;
    } else if (name == "DPD") {
      map.dpd = i;
    } else if (name == "APD") {
      map.apd = i;
    } else if (name == "WVHT") {
      map.wvht = i;
    }
  }
  if (map.year < 0 || map.month < 0 || map.day < 0 || map.hour < 0) return std::nullopt;
  return map;
}

bool is_header_line(std::string_view line) {
  auto tokens = split_ws(line);
  if (tokens.empty()) return false;
  std::string_view first = tokens.front();
  if (!first.empty() && first.front() == '#') first.remove_prefix(1);
  return first == "YY" || first == "YYYY";
}

std::optional<double> value_at(const std::vector<std::string_view>& tokens, int column,
                               std::size_t& missing) {
  if (column < 0) {
    ++missing;
    return std::nullopt;
  }
  auto v = parse_number<double>(tokens[column]);
  if (!v || !std::isfinite(*v) || is_ndbc_sentinel(*v)) {
    ++missing;
    return std::nullopt;
  }
  return v;
}

void append_value(std::string& out, const std::optional<double>& value, const char* sentinel) {
  out += ' ';
  if (!value) {
    out += sentinel;
    return;
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *value);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

bool is_ndbc_sentinel(double value) {
  return value == 99.0 || value == 999.0 || value == 9999.0;
}

NdbcParseResult parse_ndbc(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!split_ws(line).empty()) lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty()) throw Error(ErrorKind::EmptyFile, "no content");

  std::optional<ColumnMap> columns;
  NdbcParseResult result;
  std::size_t data_rows = 0;
  for (std::string_view line : lines) {
    if (is_header_line(line)) {
      if (!columns) {
        columns = read_header(split_ws(line));
        if (!columns) throw Error(ErrorKind::MalformedHeader, "header lacks date/time columns");
      }
      continue;
    }
    if (line.front() == '#') continue;  // units row
    if (!columns) throw Error(ErrorKind::MalformedHeader, "data row before any column header");
    ++data_rows;

    auto tokens = split_ws(line);
    if (static_cast<int>(tokens.size()) < columns->required_tokens()) {
      ++result.dropped_rows;
      continue;
    }
    auto year = parse_number<int>(tokens[columns->year]);
    auto month = parse_number<int>(tokens[columns->month]);
    auto day = parse_number<int>(tokens[columns->day]);
    auto hour = parse_number<int>(tokens[columns->hour]);
    std::optional<int> minute = 0;
    if (columns->minute >= 0) minute = parse_number<int>(tokens[columns->minute]);
    if (!year || !month || !day || !hour || !minute || *hour < 0 || *hour > 23 || *minute < 0 ||
        *minute > 59) {
      ++result.dropped_rows;
      continue;
    }
    int y = *year;
    if (columns->two_digit_year && y < 100) y += (y >= 50) ? 1900 : 2000;
    year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(*month)},
                       std::chrono::day{static_cast<unsigned>(*day)}};
    if (!ymd.ok()) {
      ++result.dropped_rows;
      continue;
    }
    RawRecord rec;
    rec.timestamp = sys_days{ymd} + hours{*hour} + minutes{*minute};
    rec.wspd = value_at(tokens, columns->wspd, result.missing_values);
    rec.dpd = value_at(tokens, columns->dpd, result.missing_values);
    rec.apd = value_at(tokens, columns->apd, result.missing_values);
    rec.wvht = value_at(tokens, columns->wvht, result.missing_values);
    result.records.push_back(rec);
  }
  if (!columns) throw Error(ErrorKind::MalformedHeader, "no recognizable column header");
  if (data_rows == 0) throw Error(ErrorKind::EmptyFile, "zero data rows");

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const RawRecord& a, const RawRecord& b) { return a.timestamp < b.timestamp; });
  auto last = std::unique(result.records.begin(), result.records.end(),
                          [](const RawRecord& a, const RawRecord& b) {
                            return a.timestamp == b.timestamp;
                          });
  result.records.erase(last, result.records.end());
  return result;
}

std::string serialize_ndbc(const std::vector<RawRecord>& records) {
  std::string out = "#YY  MM DD hh mm WSPD   DPD   APD  WVHT\n#yr  mo dy hr mn  m/s   sec   sec     m\n";
  for (const auto& rec : records) {
    const sys_days day = floor<days>(rec.timestamp);
    const year_month_day ymd{day};
    const auto tod = rec.timestamp - day;
    const auto h = duration_cast<hours>(tod);
    const auto m = duration_cast<minutes>(tod - h);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d %02u %02u %02ld %02ld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(h.count()), static_cast<long>(m.count()));
    out += buf;
    append_value(out, rec.wspd, "99.0");
    append_value(out, rec.dpd, "99.00");
    append_value(out, rec.apd, "99.00");
    append_value(out, rec.wvht, "99.00");
    out += '\n';
  }
  return out;
}

CleanResult clean_and_resample(const std::vector<RawRecord>& records, std::size_t max_window,
                               std::string station_id) {
  if (records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to clean");

  CleanReport report;
  // hour -> (distance from the hour in seconds, record)
  std::map<sys_seconds, std::pair<long, const RawRecord*>> by_hour;
  for (const auto& rec : records) {
    const sys_seconds floor_hour = floor<hours>(rec.timestamp);
    const long offset = (rec.timestamp - floor_hour).count();
    sys_seconds hour;
    long distance;
    if (offset <= kSnapToleranceMinutes * 60) {
      hour = floor_hour;
      distance = offset;
    } else if (offset >= 3600 - kSnapToleranceMinutes * 60) {
      hour = floor_hour + hours{1};
      distance = 3600 - offset;
    } else {
      ++report.off_grid_dropped;
      continue;
    }
    if (distance != 0) ++report.snapped;
    auto it = by_hour.find(hour);
    if (it == by_hour.end() || distance < it->second.first) by_hour[hour] = {distance, &rec};
  }
  if (by_hour.empty()) throw Error(ErrorKind::NoUsableSegment, "no records near an hour mark");

  const sys_seconds start = by_hour.begin()->first;
  const sys_seconds stop = by_hour.rbegin()->first;
  const auto rows = static_cast<std::size_t>(duration_cast<hours>(stop - start).count()) + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SeriesMatrix grid = SeriesMatrix::Constant(static_cast<Eigen::Index>(rows), kNumVariables, nan);
  for (const auto& [hour, entry] : by_hour) {
    const auto r = static_cast<Eigen::Index>(duration_cast<hours>(hour - start).count());
    const RawRecord& rec = *entry.second;
    const std::optional<double> fields[kNumVariables] = {rec.wspd, rec.dpd, rec.apd, rec.wvht};
    for (int v = 0; v < kNumVariables; ++v)
      if (fields[v]) grid(r, v) = *fields[v];
  }

  const auto n = static_cast<Eigen::Index>(rows);
  for (int v = 0; v < kNumVariables; ++v) {
    Eigen::Index i = 0;
    while (i < n) {
      if (!std::isnan(grid(i, v))) {
        ++i;
        continue;
      }
      Eigen::Index j = i;
      while (j < n && std::isnan(grid(j, v))) ++j;
      const auto gap = static_cast<std::size_t>(j - i);
      if (i > 0 && j < n && gap <= kMaxGapHours) {
        const double left = grid(i - 1, v);
        const double right = grid(j, v);
        for (Eigen::Index k = i; k < j; ++k) {
          const double frac = static_cast<double>(k - i + 1) / static_cast<double>(gap + 1);
          grid(k, v) = left + frac * (right - left);
          ++report.interpolated;
        }
      }
      i = j;
    }
  }

  Eigen::Index i = 0;
  while (i < n) {
    if (!grid.row(i).allFinite()) {
      ++i;
      continue;
    }
    Eigen::Index j = i;
    while (j < n && grid.row(j).allFinite()) ++j;
    report.segments.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    i = j;
  }
  if (report.segments.empty()) throw Error(ErrorKind::NoUsableSegment, "every row has a long gap");
  for (std::size_t s = 1; s < report.segments.size(); ++s)
    if (report.segments[s].length() > report.segments[report.chosen].length()) report.chosen = s;
  const Segment best = report.segments[report.chosen];
  if (best.length() < 2 * max_window)
    throw Error(ErrorKind::NoUsableSegment,
                "longest contiguous segment has " + std::to_string(best.length()) + " rows, need " +
                    std::to_string(2 * max_window));

  CleanResult result;
  result.report = std::move(report);
  result.frame.station_id = std::move(station_id);
  result.frame.values = grid.middleRows(static_cast<Eigen::Index>(best.begin),
                                        static_cast<Eigen::Index>(best.length()));
  result.frame.timestamps.reserve(best.length());
  for (std::size_t r = best.begin; r < best.end; ++r)
    result.frame.timestamps.push_back(start + hours{static_cast<long>(r)});
  return result;
}

NormStats fit_norm_stats(const SeriesMatrix& values) {
  NormStats stats;
  stats.mean = values.colwise().mean();
  const SeriesMatrix centered = values.rowwise() - stats.mean;
  stats.std = (centered.array().square().colwise().sum() / static_cast<double>(values.rows()))
                  .sqrt()
                  .matrix();
  for (int v = 0; v < kNumVariables; ++v)
    if (!(stats.std(v) > 0.0))
      throw Error(ErrorKind::DegenerateVariable,
                  "training column " + std::to_string(v) + " has zero standard deviation");
  return stats;
}

SeriesMatrix normalize(const SeriesMatrix& values, const NormStats& stats) {
  return ((values.rowwise() - stats.mean).array().rowwise() / stats.std.array()).matrix();
}

SeriesMatrix denormalize(const SeriesMatrix& values, const NormStats& stats) {
  return ((values.array().rowwise() * stats.std.array()).matrix().rowwise() + stats.mean);
}

double denormalize_wave_height(double value, const NormStats& stats) {
  return value * stats.std(kWaveHeight) + stats.mean(kWaveHeight);
}

double normalize_wave_height(double value, const NormStats& stats) {
  return (value - stats.mean(kWaveHeight)) / stats.std(kWaveHeight);
}

SplitFrame chronological_split(const TimeSeriesFrame& frame, SplitRatios ratios) {
  const std::size_t n = frame.size();
  if (n < 10) throw Error(ErrorKind::FrameTooShort, "split needs at least 10 rows");
  if (ratios.train <= 0 || ratios.valid <= 0 || ratios.test <= 0)
    throw Error(ErrorKind::InvalidArgument, "split ratios must be positive");
  const double total = ratios.train + ratios.valid + ratios.test;
  const auto n_train = static_cast<std::size_t>(std::llround(n * ratios.train / total));
  const auto n_valid = static_cast<std::size_t>(std::llround(n * ratios.valid / total));
  if (n_train + n_valid >= n) throw Error(ErrorKind::FrameTooShort, "empty test split");

  const NormStats stats = fit_norm_stats(frame.values.topRows(static_cast<Eigen::Index>(n_train)));
  auto cut = [&](std::size_t begin, std::size_t count) {
    TimeSeriesFrame part;
    part.station_id = frame.station_id;
    part.timestamps.assign(frame.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                           frame.timestamps.begin() + static_cast<std::ptrdiff_t>(begin + count));
    part.values = normalize(frame.values.middleRows(static_cast<Eigen::Index>(begin),
                                                    static_cast<Eigen::Index>(count)),
                            stats);
    part.norm_stats = stats;
    part.first_index = frame.first_index + begin;
    return part;
  };
  return SplitFrame{cut(0, n_train), cut(n_train, n_valid),
                    cut(n_train + n_valid, n - n_train - n_valid)};
}

}  // namespace wavecast
