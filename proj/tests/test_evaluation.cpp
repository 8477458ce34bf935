#include "wavecast/error.hpp"
#include "wavecast/evaluation.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

using namespace wavecast;
using namespace std::chrono;

namespace {

template <typename Fn>
void expect_kind(ErrorKind kind, Fn&& fn) {
  try {
    fn();
    FAIL() << "no error thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

TimePoint at(year_month_day ymd, int hour = 0) { return sys_seconds(sys_days(ymd)) + hours(hour); }

}  // namespace

TEST(PointMetrics, HandWorkedPair) {
  const double pred[] = {2.0, 4.0}, obs[] = {1.0, 2.0};
  const auto m = point_metrics(pred, obs);
  EXPECT_NEAR(m.rmse, std::sqrt(2.5), 1e-12);
  EXPECT_NEAR(m.mae, 1.5, 1e-12);
  EXPECT_NEAR(m.mape, 100.0, 1e-12);
  EXPECT_NEAR(m.r, 1.0, 1e-12);
  EXPECT_EQ(m.n, 2u);
}

TEST(PointMetrics, PerfectForecast) {
  const double v[] = {0.5, 1.25, 2.0, 3.5};
  const auto m = point_metrics(v, v);
  EXPECT_EQ(m.rmse, 0.0);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.mape, 0.0);
  EXPECT_NEAR(m.r, 1.0, 1e-12);
}

TEST(PointMetrics, AntiCorrelated) {
  const double pred[] = {3.0, 2.0, 1.0}, obs[] = {1.0, 2.0, 3.0};
  EXPECT_NEAR(point_metrics(pred, obs).r, -1.0, 1e-12);
}

TEST(PointMetrics, RmseDominatesMae) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = test::random_vector(30, rng, 0.5, 3.0), o = test::random_vector(30, rng, 0.5, 3.0);
    const auto m = point_metrics(p, o);
    EXPECT_GE(m.rmse, m.mae - 1e-15);
  }
}

TEST(PointMetrics, Failures) {
  const double a[] = {1.0, 2.0}, c[] = {2.0, 2.0}, z[] = {0.0, 1.0}, three[] = {1, 2, 3};
  expect_kind(ErrorKind::DegenerateVariance, [&] { point_metrics(a, c); });
  expect_kind(ErrorKind::InvalidArgument, [&] { point_metrics(a, z); });
  expect_kind(ErrorKind::InvalidArgument, [&] { point_metrics(a, three); });
}

TEST(SortedQuantile, Interpolates) {
  const double s[] = {1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.5), 2.5);
}

TEST(Wilcoxon, TenPairExample) {
  const double a[] = {125, 115, 130, 140, 140, 115, 140, 125, 140, 135};
  const double b[] = {110, 122, 125, 120, 140, 124, 123, 137, 135, 145};
  const auto w = wilcoxon_signed_rank(a, b);
  EXPECT_EQ(w.n_effective, 9u);
  EXPECT_DOUBLE_EQ(w.w_plus, 27.0);
  EXPECT_DOUBLE_EQ(w.w_minus, 18.0);
  EXPECT_DOUBLE_EQ(w.statistic, 18.0);
  EXPECT_NEAR(w.z, 0.4742953, 1e-6);
  EXPECT_NEAR(w.p_two_tailed, 0.6352893188, 1e-8);
}

TEST(Wilcoxon, DarwinPairs) {
  const double d[] = {6, 8, 14, 16, 23, 24, 28, 29, 41, -48, 49, 56, 60, -67, 75};
  const std::vector<double> zero(15, 0.0);
  const auto w = wilcoxon_signed_rank(d, zero);
  EXPECT_DOUBLE_EQ(w.statistic, 24.0);
  EXPECT_NEAR(w.z, 2.0162645, 1e-6);
  EXPECT_NEAR(w.p_two_tailed, 0.0437723238, 1e-8);
}

TEST(Wilcoxon, SignFollowsTheSmallerErrors) {
  Rng rng(2);
  const auto b = test::random_vector(40, rng, 1.0, 2.0);
  std::vector<double> lower(b), higher(b);
  for (std::size_t i = 0; i < b.size(); ++i) {
    lower[i] -= 0.1 + 0.01 * double(i);
    higher[i] += 0.1 + 0.01 * double(i);
  }
  const auto smaller = wilcoxon_signed_rank(lower, b);
  EXPECT_LT(smaller.z, 0.0);
  EXPECT_LT(smaller.p_two_tailed, 1e-6);
  EXPECT_GT(wilcoxon_signed_rank(higher, b).z, 0.0);
}

TEST(Wilcoxon, SwappingNegatesZ) {
  Rng rng(5);
  const auto a = test::random_vector(30, rng), b = test::random_vector(30, rng);
  const auto ab = wilcoxon_signed_rank(a, b), ba = wilcoxon_signed_rank(b, a);
  EXPECT_NEAR(ab.z, -ba.z, 1e-12);
  EXPECT_NEAR(ab.p_two_tailed, ba.p_two_tailed, 1e-12);
}

TEST(Wilcoxon, AllZeroDifferences) {
  const std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  expect_kind(ErrorKind::AllZeroDifferences, [&] { wilcoxon_signed_rank(a, a); });
}

TEST(Bootstrap, GaussianResidualsCoverNominally) {
  Rng rng(3);
  std::vector<double> residuals(500), pred(2000, 0.0), obs(2000);
  for (auto& r : residuals) r = rng.normal();
  for (auto& o : obs) o = rng.normal();
  const auto iv = bootstrap_intervals(residuals, pred, obs, 0.9, 200, 42);
  EXPECT_GE(iv.picp, 0.85);
  EXPECT_LE(iv.picp, 0.95);
  EXPECT_DOUBLE_EQ(iv.picp, picp(iv.lower, iv.upper, obs));
  EXPECT_DOUBLE_EQ(iv.pinaw, pinaw(iv.lower, iv.upper, obs));
  EXPECT_GT(iv.pinaw, 0.0);
}

TEST(Bootstrap, LevelsNest) {
  Rng rng(4);
  std::vector<double> residuals(100), pred(200), obs(200);
  for (auto& r : residuals) r = rng.normal();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred[i] = rng.uniform(1.0, 3.0);
    obs[i] = pred[i] + rng.normal();
  }
  const auto i85 = bootstrap_intervals(residuals, pred, obs, 0.85, 200, 7);
  const auto i90 = bootstrap_intervals(residuals, pred, obs, 0.90, 200, 7);
  const auto i95 = bootstrap_intervals(residuals, pred, obs, 0.95, 200, 7);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    EXPECT_LE(i95.lower[i], i90.lower[i]);
    EXPECT_LE(i90.lower[i], i85.lower[i]);
    EXPECT_LE(i85.upper[i], i90.upper[i]);
    EXPECT_LE(i90.upper[i], i95.upper[i]);
  }
  EXPECT_LE(i85.picp, i95.picp);
  EXPECT_LE(i85.pinaw, i95.pinaw);
}

TEST(Bootstrap, ZeroResidualsCollapse) {
  const std::vector<double> residuals(50, 0.0), pred = {1.0, 2.0, 3.0}, obs = {1.0, 2.5, 3.0};
  const auto iv = bootstrap_intervals(residuals, pred, obs, 0.9, 100, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(iv.lower[i], pred[i]);
    EXPECT_EQ(iv.upper[i], pred[i]);
  }
  EXPECT_NEAR(iv.picp, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(iv.pinaw, 0.0);
}

TEST(Bootstrap, Preconditions) {
  const std::vector<double> few(10, 0.1), enough(40, 0.1), p = {1.0, 2.0}, o = {1.0, 2.0};
  EXPECT_THROW(bootstrap_intervals(few, p, o, 0.9, 200, 1), Error);
  EXPECT_THROW(bootstrap_intervals(enough, p, o, 0.9, 50, 1), Error);
  EXPECT_THROW(bootstrap_intervals(enough, p, o, 1.0, 200, 1), Error);
}

TEST(Pinaw, ConstantObservationsAreDegenerate) {
  const double lo[] = {0.0, 0.0}, hi[] = {1.0, 1.0}, obs[] = {0.5, 0.5};
  expect_kind(ErrorKind::DegenerateRange, [&] { pinaw(lo, hi, obs); });
  EXPECT_DOUBLE_EQ(picp(lo, hi, obs), 1.0);
}

TEST(Seasons, Months) {
  EXPECT_EQ(season_of(at(2021y / April / 15)), Season::Spring);
  EXPECT_EQ(season_of(at(2021y / July / 1)), Season::Summer);
  EXPECT_EQ(season_of(at(2021y / October / 31, 23)), Season::Autumn);
  EXPECT_EQ(season_of(at(2021y / December / 1)), Season::Winter);
  EXPECT_EQ(season_of(at(2021y / February / 28, 23)), Season::Winter);
  EXPECT_EQ(season_of(at(2021y / March / 1)), Season::Spring);
  EXPECT_EQ(to_string(Season::Summer), "summer");
}

TEST(Seasons, FullYearCounts) {
  std::vector<TimePoint> ts;
  std::vector<double> values;
  for (TimePoint t = at(2021y / January / 1); t < at(2022y / January / 1); t += hours(1)) {
    ts.push_back(t);
    values.push_back(double(values.size()));
  }
  const auto parts = seasonal_slice(ts, values);
  EXPECT_EQ(parts[0].indices.size(), 92u * 24);
  EXPECT_EQ(parts[1].indices.size(), 92u * 24);
  EXPECT_EQ(parts[2].indices.size(), 91u * 24);
  EXPECT_EQ(parts[3].indices.size(), 90u * 24);
  for (const auto& p : parts)
    for (std::size_t k = 0; k < p.indices.size(); ++k) EXPECT_EQ(p.values[k], values[p.indices[k]]);
}
