#include "wavecast/csv_io.hpp"

#include "wavecast/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wavecast {

using namespace std::chrono;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_timestamp(TimePoint t) {
  const sys_days day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss tod{t - day};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf;
}

TimePoint parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const std::string copy(text);
  if (std::sscanf(copy.c_str(), "%d-%u-%uT%u:%u:%u", &y, &mo, &d, &h, &mi, &s) != 6)
    throw Error(ErrorKind::MalformedRow, "bad timestamp '" + copy + "'");
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59)
    throw Error(ErrorKind::MalformedRow, "bad timestamp '" + copy + "'");
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

double to_double(std::string_view token, std::size_t line_no) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw Error(ErrorKind::MalformedRow,
                "line " + std::to_string(line_no) + ": bad number '" + std::string(token) + "'");
  return v;
}

}  // namespace

std::string format_frame_csv(const TimeSeriesFrame& frame) {
  std::string out = "timestamp,ws,dpd,apd,hs\n";
  for (std::size_t r = 0; r < frame.size(); ++r) {
    out += format_timestamp(frame.timestamps[r]);
    for (int v = 0; v < kNumVariables; ++v) {
      out += ',';
      out += format_fixed(frame.values(static_cast<Eigen::Index>(r), v));
    }
    out += '\n';
  }
  return out;
}

TimeSeriesFrame parse_frame_csv(std::string_view text, std::string station_id) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorKind::EmptyFile, "empty series CSV");
  if (lines[0] != "timestamp,ws,dpd,apd,hs")
    throw Error(ErrorKind::MalformedHeader, "expected header timestamp,ws,dpd,apd,hs");
  TimeSeriesFrame frame;
  frame.station_id = std::move(station_id);
  frame.values.resize(static_cast<Eigen::Index>(lines.size() - 1), kNumVariables);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 5)
      throw Error(ErrorKind::MalformedRow, "line " + std::to_string(i + 1) + ": expected 5 fields");
    frame.timestamps.push_back(parse_timestamp(cells[0]));
    for (int v = 0; v < kNumVariables; ++v)
      frame.values(static_cast<Eigen::Index>(i - 1), v) = to_double(cells[static_cast<std::size_t>(v) + 1], i + 1);
  }
  for (std::size_t r = 1; r < frame.size(); ++r)
    if (frame.timestamps[r] - frame.timestamps[r - 1] != hours{1})
      throw Error(ErrorKind::MalformedRow,
                  "series CSV is not at a 1-hour cadence near " + format_timestamp(frame.timestamps[r]));
  return frame;
}

std::vector<ExternalPrediction> parse_prediction_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorKind::EmptyFile, "empty prediction CSV");
  if (lines[0] != "timestamp,prediction")
    throw Error(ErrorKind::MalformedHeader, "expected header timestamp,prediction");
  std::vector<ExternalPrediction> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 2)
      throw Error(ErrorKind::MalformedRow, "line " + std::to_string(i + 1) + ": expected 2 fields");
    out.push_back({parse_timestamp(cells[0]), to_double(cells[1], i + 1)});
  }
  return out;
}

}  // namespace wavecast
