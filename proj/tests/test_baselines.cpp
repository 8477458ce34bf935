#include "wavecast/baselines.hpp"
#include "wavecast/data_ingest.hpp"
#include "wavecast/error.hpp"
#include "wavecast/evaluation.hpp"

#include <gtest/gtest.h>

using namespace wavecast;

namespace {

Window hs_window(std::vector<double> hs) {
  Window w;
  w.values = SeriesMatrix::Zero(static_cast<Eigen::Index>(hs.size()), kNumVariables);
  for (std::size_t t = 0; t < hs.size(); ++t) w.values(static_cast<Eigen::Index>(t), kWaveHeight) = hs[t];
  return w;
}

NormStats stats(double mean, double std) {
  NormStats s;
  s.mean = VariableRow::Zero();
  s.std = VariableRow::Ones();
  s.mean(kWaveHeight) = mean;
  s.std(kWaveHeight) = std;
  return s;
}

}  // namespace

TEST(NaiveDrift, ExtrapolatesTheEndpointSlope) {
  EXPECT_DOUBLE_EQ(naive_drift(hs_window({1, 2, 3}), 1), 4.0);
  EXPECT_DOUBLE_EQ(naive_drift(hs_window({0, 0.5, 1, 1.5}), 3), 3.0);
  EXPECT_DOUBLE_EQ(naive_drift(hs_window({1, 9, -4, 3}), 2), 3.0 + 2.0 * 2.0 / 3.0);
}

TEST(NaiveDrift, ConstantWindow) {
  for (std::size_t l : {1, 3, 6, 12}) EXPECT_DOUBLE_EQ(naive_drift(hs_window(std::vector<double>(24, 2.0)), l), 2.0);
}

TEST(NaiveDrift, OnlyWaveHeightMatters) {
  Window w = hs_window({1, 2, 3});
  w.values.col(0).setConstant(100.0);
  EXPECT_DOUBLE_EQ(naive_drift(w, 1), 4.0);
  EXPECT_THROW(naive_drift(hs_window({1}), 1), Error);
}

TEST(Persistence, RepeatsLastValue) {
  EXPECT_DOUBLE_EQ(persistence(hs_window({1, 2, 3}), 6), 3.0);
}

TEST(RunBaseline, MapsBackToMeters) {
  const Window windows[] = {hs_window({0, 1}), hs_window({1, 1})};
  const auto f = run_baseline(Baseline::NaiveDrift, windows, 1, stats(2.0, 0.5));
  EXPECT_EQ(f.model_name, "NaiveDrift");
  EXPECT_EQ(f.horizon, 1u);
  ASSERT_EQ(f.predictions.size(), 2u);
  EXPECT_DOUBLE_EQ(f.predictions[0], 2.0 * 0.5 + 2.0);
  EXPECT_DOUBLE_EQ(f.predictions[1], 1.0 * 0.5 + 2.0);
  EXPECT_EQ(run_baseline(Baseline::Persistence, windows, 1, stats(0, 1)).model_name, "Persistence");
}

TEST(RunBaseline, DriftBeatsPersistenceOnARamp) {
  std::vector<Window> windows;
  std::vector<double> observed;
  const std::size_t T = 24, l = 6;
  for (std::size_t s = 0; s < 50; ++s) {
    std::vector<double> hs(T);
    for (std::size_t t = 0; t < T; ++t) hs[t] = 1.0 + 0.1 * double(s + t);
    windows.push_back(hs_window(hs));
    observed.push_back(1.0 + 0.1 * double(s + T - 1 + l));
  }
  const auto drift = run_baseline(Baseline::NaiveDrift, windows, l, stats(0, 1));
  const auto persist = run_baseline(Baseline::Persistence, windows, l, stats(0, 1));
  for (std::size_t i = 0; i < observed.size(); ++i) {
    EXPECT_NEAR(drift.predictions[i], observed[i], 1e-12);
    EXPECT_NEAR(observed[i] - persist.predictions[i], 0.6, 1e-12);
  }
}
