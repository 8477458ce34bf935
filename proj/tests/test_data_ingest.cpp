#include "wavecast/csv_io.hpp"
#include "wavecast/data_ingest.hpp"
#include "wavecast/error.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace wavecast;
using namespace std::chrono;

namespace {

TimePoint at(int y, unsigned m, unsigned d, int h, int min = 0) {
  return sys_days{year{y} / month{m} / day{d}} + hours{h} + minutes{min};
}

std::vector<RawRecord> hourly(std::size_t n, double wvht_start = 1.0) {
  std::vector<RawRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    out.push_back({at(2020, 1, 1, 0) + hours{i}, 5.0 + 0.1 * x, 9.0 + 0.01 * x, 6.0 - 0.01 * x, wvht_start + 0.05 * x});
  }
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ParseNdbc, SingleRowMapsFourFields) {
  const auto r = parse_ndbc(
      "#YY  MM DD hh mm WDIR WSPD GST  WVHT   DPD   APD MWD   PRES\n"
      "2019 07 04 12 00 180  5.5  6.1  1.20  8.33  5.10 190 1012.0\n");
  ASSERT_EQ(r.records.size(), 1u);
  const auto& rec = r.records[0];
  EXPECT_EQ(rec.timestamp, at(2019, 7, 4, 12));
  EXPECT_DOUBLE_EQ(*rec.wspd, 5.5);
  EXPECT_DOUBLE_EQ(*rec.dpd, 8.33);
  EXPECT_DOUBLE_EQ(*rec.apd, 5.10);
  EXPECT_DOUBLE_EQ(*rec.wvht, 1.20);
  EXPECT_EQ(r.missing_values, 0u);
}

TEST(ParseNdbc, WaveHeightSentinelIsMissing) {
  const auto r = parse_ndbc(
      "#YY  MM DD hh mm WSPD WVHT DPD APD\n"
      "2019 07 04 12 00  5.5 99.00 8.33 5.10\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_FALSE(r.records[0].wvht.has_value());
  EXPECT_TRUE(r.records[0].wspd.has_value());
  EXPECT_EQ(r.missing_values, 1u);
}

TEST(ParseNdbc, TenRowFixtureHasTwoIncompleteRecords) {
  const auto r = parse_ndbc(read_file(test::fixture("ndbc_10row.txt")));
  ASSERT_EQ(r.records.size(), 10u);
  const auto incomplete = std::count_if(r.records.begin(), r.records.end(), [](const RawRecord& rec) {
    return !rec.wspd || !rec.dpd || !rec.apd || !rec.wvht;
  });
  EXPECT_EQ(incomplete, 2);
  // Row 4 loses all four fields, row 7 loses WVHT, DPD and APD.
  EXPECT_EQ(r.missing_values, 7u);
  EXPECT_EQ(r.dropped_rows, 0u);
}

TEST(ParseNdbc, LegacyHeaderAndTwoDigitYears) {
  const auto r = parse_ndbc(
      "YY MM DD hh WD   WSPD GST  WVHT  DPD   APD  MWD  BAR    ATMP  WTMP  DEWP  VIS\n"
      "98 01 01 00 320  8.1  9.6  2.10 11.11  7.20 999 1020.5  10.2  12.1 999.0 99.0\n"
      "05 01 01 01 320  8.1  9.6  2.10 11.11  7.20 999 1020.5  10.2  12.1 999.0 99.0\n");
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].timestamp, at(1998, 1, 1, 0));
  EXPECT_EQ(r.records[1].timestamp, at(2005, 1, 1, 1));
}

TEST(ParseNdbc, FourDigitYearHeaderWithoutMinutes) {
  const auto r = parse_ndbc(
      "YYYY MM DD hh WD   WSPD GST  WVHT  DPD   APD\n"
      "2001 03 02 05 320  8.1  9.6  2.10 11.11  7.20\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].timestamp, at(2001, 3, 2, 5));
}

TEST(ParseNdbc, UnparseableTimestampIsCounted) {
  const auto r = parse_ndbc(
      "#YY  MM DD hh mm WSPD WVHT DPD APD\n"
      "2019 13 04 12 00 5.5 1.0 8.0 5.0\n"
      "2019 07 04 12 00 5.5 1.0 8.0 5.0\n");
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.dropped_rows, 1u);
}

TEST(ParseNdbc, RowsAreSortedAndDeduplicated) {
  const auto r = parse_ndbc(
      "#YY  MM DD hh mm WSPD WVHT DPD APD\n"
      "2019 07 04 13 00 6.0 1.1 8.0 5.0\n"
      "2019 07 04 12 00 5.5 1.0 8.0 5.0\n"
      "2019 07 04 13 00 7.0 1.2 8.0 5.0\n");
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].timestamp, at(2019, 7, 4, 12));
  EXPECT_DOUBLE_EQ(*r.records[1].wspd, 6.0);
}

TEST(ParseNdbc, Errors) {
  EXPECT_EQ(kind_of([] { parse_ndbc(""); }), ErrorKind::EmptyFile);
  EXPECT_EQ(kind_of([] { parse_ndbc("#YY MM DD hh mm WSPD WVHT DPD APD\n"); }), ErrorKind::EmptyFile);
  EXPECT_EQ(kind_of([] { parse_ndbc("2019 07 04 12 00 5.5 1.0 8.0 5.0\n"); }), ErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of([] { parse_ndbc("#STN LAT LON\n1 2 3\n"); }), ErrorKind::MalformedHeader);
}

TEST(ParseNdbc, SerializeRoundTrip) {
  auto records = hourly(6);
  records[2].wvht.reset();
  records[4].dpd.reset();
  records[4].wspd.reset();
  const auto back = parse_ndbc(serialize_ndbc(records));
  EXPECT_EQ(back.records, records);
}

TEST(ParseNdbc, SentinelSet) {
  EXPECT_TRUE(is_ndbc_sentinel(99.0));
  EXPECT_TRUE(is_ndbc_sentinel(999.0));
  EXPECT_TRUE(is_ndbc_sentinel(9999.0));
  EXPECT_FALSE(is_ndbc_sentinel(9.9));
}

TEST(CleanAndResample, InterpolatesSingleMissingValue) {
  auto records = hourly(5);
  records[2].wvht.reset();
  const auto out = clean_and_resample(records, 2);
  ASSERT_EQ(out.frame.size(), 5u);
  EXPECT_DOUBLE_EQ(out.frame.values(2, kWaveHeight), 0.5 * (*records[1].wvht + *records[3].wvht));
  EXPECT_EQ(out.report.interpolated, 1u);
}

TEST(CleanAndResample, ConstantSeriesStaysConstantAcrossGap) {
  auto records = hourly(8);
  for (auto& r : records) r.wvht = 2.5;
  records.erase(records.begin() + 3, records.begin() + 6);  // 3-hour hole
  const auto out = clean_and_resample(records, 2);
  ASSERT_EQ(out.frame.size(), 8u);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(out.frame.values(i, kWaveHeight), 2.5);
}

TEST(CleanAndResample, FourHourGapSplitsAndKeepsLongerSide) {
  auto records = hourly(20);
  records.erase(records.begin() + 6, records.begin() + 10);
  const auto out = clean_and_resample(records, 2);
  ASSERT_EQ(out.report.segments.size(), 2u);
  EXPECT_EQ(out.report.segments[0].length(), 6u);
  EXPECT_EQ(out.report.segments[1].length(), 10u);
  EXPECT_EQ(out.report.chosen, 1u);
  EXPECT_EQ(out.frame.size(), 10u);
  EXPECT_EQ(out.frame.timestamps.front(), at(2020, 1, 1, 10));
}

TEST(CleanAndResample, SnapsWithinTenMinutes) {
  auto records = hourly(6);
  records[1].timestamp += minutes{8};
  records[2].timestamp -= minutes{10};
  records[3].timestamp += minutes{25};
  const auto out = clean_and_resample(records, 2);
  EXPECT_EQ(out.report.snapped, 2u);
  EXPECT_EQ(out.report.off_grid_dropped, 1u);
  ASSERT_EQ(out.frame.size(), 6u);
  for (std::size_t i = 1; i < out.frame.size(); ++i)
    EXPECT_EQ(out.frame.timestamps[i] - out.frame.timestamps[i - 1], hours{1});
}

TEST(CleanAndResample, ShortSegmentIsRejected) {
  EXPECT_EQ(kind_of([] { clean_and_resample(hourly(79), 40); }), ErrorKind::NoUsableSegment);
  EXPECT_NO_THROW(clean_and_resample(hourly(80), 40));
}

TEST(CleanAndResample, FixtureBecomesHourlyFrame) {
  const auto parsed = parse_ndbc(read_file(test::fixture("ndbc_10row.txt")));
  const auto out = clean_and_resample(parsed.records, 5, "fx");
  ASSERT_EQ(out.frame.size(), 10u);
  EXPECT_EQ(out.frame.timestamps.front(), at(2020, 1, 1, 1));
  EXPECT_EQ(out.report.snapped, 10u);
  // Row 4 (hour 4) is fully interpolated between hours 3 and 5.
  EXPECT_NEAR(out.frame.values(3, kWaveHeight), 0.5 * (1.61 + 1.70), 1e-12);
  EXPECT_NEAR(out.frame.values(6, kDominantPeriod), 0.5 * (10.81 + 10.81), 1e-12);
  EXPECT_NEAR(out.frame.values(6, kWaveHeight), 0.5 * (1.74 + 1.82), 1e-12);
}

TEST(ChronologicalSplit, SeventyTwentyTen) {
  TimeSeriesFrame frame;
  frame.values = SeriesMatrix::Random(100, kNumVariables);
  for (int i = 0; i < 100; ++i) frame.timestamps.push_back(at(2020, 1, 1, 0) + hours{i});
  const auto s = chronological_split(frame);
  EXPECT_EQ(s.train.size(), 70u);
  EXPECT_EQ(s.valid.size(), 20u);
  EXPECT_EQ(s.test.size(), 10u);
  EXPECT_EQ(s.valid.first_index, 70u);
  EXPECT_EQ(s.test.first_index, 90u);
  EXPECT_LT(s.train.timestamps.back(), s.valid.timestamps.front());
  EXPECT_LT(s.valid.timestamps.back(), s.test.timestamps.front());
  EXPECT_LT(s.train.timestamps.back(), s.test.timestamps.front());
  EXPECT_TRUE(s.train.norm_stats && s.valid.norm_stats && s.test.norm_stats);
}

TEST(ChronologicalSplit, TestRowsUseTrainStatistics) {
  // Train mean 5, population std 2; the test rows sit at 11.
  const double train[7] = {3, 7, 3, 7, 5 - std::sqrt(6.0), 5 + std::sqrt(6.0), 5};
  TimeSeriesFrame frame;
  frame.values.resize(10, kNumVariables);
  for (int i = 0; i < 10; ++i) {
    frame.timestamps.push_back(at(2020, 1, 1, 0) + hours{i});
    frame.values.row(i).setConstant(i < 7 ? train[i] : 11.0 + i);
  }
  const auto s = chronological_split(frame);
  ASSERT_EQ(s.train.size(), 7u);
  EXPECT_NEAR(s.train.norm_stats->mean(kWaveHeight), 5.0, 1e-12);
  EXPECT_NEAR(s.train.norm_stats->std(kWaveHeight), 2.0, 1e-12);
  EXPECT_NEAR(s.test.values(0, kWaveHeight), (20.0 - 5.0) / 2.0, 1e-12);
  EXPECT_NEAR(denormalize_wave_height(s.test.values(0, kWaveHeight), *s.test.norm_stats), 20.0, 1e-12);
}

TEST(ChronologicalSplit, Errors) {
  TimeSeriesFrame frame;
  frame.values = SeriesMatrix::Random(9, kNumVariables);
  for (int i = 0; i < 9; ++i) frame.timestamps.push_back(at(2020, 1, 1, 0) + hours{i});
  EXPECT_EQ(kind_of([&] { chronological_split(frame); }), ErrorKind::FrameTooShort);

  frame.values = SeriesMatrix::Random(10, kNumVariables);
  frame.timestamps.push_back(at(2020, 1, 1, 9));
  frame.values.col(kWindSpeed).head(7).setConstant(4.0);
  EXPECT_EQ(kind_of([&] { chronological_split(frame); }), ErrorKind::DegenerateVariable);
}

TEST(Normalization, RoundTrip) {
  const SeriesMatrix x = SeriesMatrix::Random(20, kNumVariables);
  const auto stats = fit_norm_stats(x);
  const SeriesMatrix z = normalize(x, stats);
  EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-12);
  EXPECT_TRUE(denormalize(z, stats).isApprox(x, 1e-12));
}
