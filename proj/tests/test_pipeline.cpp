#include "wavecast/error.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/synthetic.hpp"

#include <gtest/gtest.h>

#include <atomic>

using namespace wavecast;

namespace {

Dataset small_dataset(std::size_t T, std::size_t horizon) {
  SyntheticConfig sc;
  sc.points = 600;
  return make_dataset(chronological_split(synthetic_benchmark(sc)), T, horizon);
}

ExperimentConfig tiny_config() {
  ExperimentConfig c = desk_scale_config();
  c.model.encoder.grid = 6;
  c.model.encoder.scales = log_scales(6);
  c.model.encoder.reduce_filters = 2;
  c.model.encoder.conv3_filters = 3;
  c.model.encoder.conv5_filters = 3;
  c.model.decoder.hidden = 6;
  c.train.max_epochs = 2;
  c.train.patience = 2;
  c.train.batch_size = 32;
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(ExperimentConfig, JsonRoundTrip) {
  ExperimentConfig c = desk_scale_config();
  c.train.seed = 7;
  c.train.window_size = 32;
  c.model.fusion = FusionMode::parse("fixed:0.25");
  c.model.ablation = Ablation::WithWt;
  c.confidence_levels = {0.9};
  c.horizons = {3, 6};
  c.sync();
  const auto back = experiment_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(back.model.encoder.window_size, 32u);
  EXPECT_EQ(back.model.ablation, Ablation::WithWt);
  EXPECT_EQ(back.horizons, (std::vector<std::size_t>{3, 6}));
}

TEST(ExperimentConfig, OverlayAndUnknownKeys) {
  const auto c = experiment_from_json(nlohmann::json::parse(R"({"seed": 9, "scales": "1:16:5"})"));
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.model.encoder.scales.size(), 5);
  EXPECT_EQ(c.model.encoder.grid, ExperimentConfig{}.model.encoder.grid);
  try {
    experiment_from_json(nlohmann::json::parse(R"({"sed": 9})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  EXPECT_THROW(experiment_from_json(nlohmann::json::parse(R"({"seed": "nine"})")), Error);
}

TEST(ExperimentConfig, ScaleSpecs) {
  EXPECT_TRUE(parse_scales("32").isApprox(log_scales(32)));
  EXPECT_TRUE(parse_scales("1:16:5").isApprox(log_scales(5, 1.0, 16.0)));
  for (const char* bad : {"", "x", "0", "2.5", "1:16", "1:b:5"}) EXPECT_THROW(parse_scales(bad), Error) << bad;
}

TEST(Dataset, WindowsPerPart) {
  const auto d = small_dataset(24, 6);
  const std::size_t m_train = d.split.train.values.rows(), m_valid = d.split.valid.values.rows(),
                    m_test = d.split.test.values.rows();
  EXPECT_EQ(d.train.size(), m_train - 24 - 6 + 1);
  EXPECT_EQ(d.valid.size(), m_valid - 24 - 6 + 1);
  EXPECT_EQ(d.test.size(), m_test - 24 - 6 + 1);
  EXPECT_EQ(d.test_times().size(), d.test.size());
  EXPECT_EQ(d.test_observed().size(), d.test.size());
}

TEST(Pipeline, PerfectExternalForecast) {
  const auto d = small_dataset(24, 1);
  std::vector<ExternalPrediction> rows;
  const auto times = d.test_times();
  const auto obs = d.test_observed();
  for (std::size_t i = 0; i < times.size(); ++i) rows.push_back({times[i], obs[i]});
  const ModelPredictions models[] = {external_predictions("Perfect", rows, d),
                                     baseline_predictions(Baseline::NaiveDrift, d)};
  ExperimentConfig c;
  const auto report = evaluate_horizon(d, models, c);
  ASSERT_FALSE(report.metric_rows.empty());
  EXPECT_EQ(report.metric_rows[0].rfind("Perfect,1,all,0.000000,0.000000,0.000000,1.000000", 0), 0u)
      << report.metric_rows[0];
  // Only the baseline carries validation predictions, so it alone gets intervals.
  EXPECT_EQ(count_lines(report.intervals_csv), 1 + c.confidence_levels.size());
  EXPECT_EQ(count_lines(report.wilcoxon_csv), 2u);
  EXPECT_NE(report.wilcoxon_csv.find("Perfect,NaiveDrift,-"), std::string::npos) << report.wilcoxon_csv;
  std::vector<std::string> names;
  for (const auto& [name, body] : report.plots) names.push_back(name);
  for (const char* f : {"predictions.csv", "scatter.csv", "error_box.csv", "cumulative_error.csv", "interval_bands.csv"})
    EXPECT_NE(std::find(names.begin(), names.end(), f), names.end()) << f;
}

TEST(Pipeline, MissingExternalRow) {
  const auto d = small_dataset(24, 1);
  std::vector<ExternalPrediction> rows;
  for (const auto t : d.test_times()) rows.push_back({t, 1.0});
  rows.erase(rows.begin() + 3);
  try {
    external_predictions("Gappy", rows, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingPrediction);
  }
}

TEST(Pipeline, TrainRestoreRoundTrip) {
  const auto d = small_dataset(12, 3);
  auto c = tiny_config();
  c.train.window_size = 12;
  c.train.horizon = 3;
  c.sync();
  std::size_t epochs = 0;
  const auto trained = train_model(d, c, [&](const EpochRecord&) { ++epochs; });
  EXPECT_EQ(epochs, trained.fit.history.size());
  const auto restored = restore_model(trained.config, trained.fit.checkpoint);
  EXPECT_EQ(forecast_physical(*trained.net, d.test, d.stats()), forecast_physical(*restored, d.test, d.stats()));
  const auto preds = network_predictions(*trained.net, d);
  EXPECT_EQ(preds.name, "AFE-TFNet");
  EXPECT_EQ(preds.valid.size(), d.valid.size());
  EXPECT_EQ(preds.test.size(), d.test.size());
}

TEST(Pipeline, Labels) {
  EXPECT_EQ(model_label(Ablation::Full), "AFE-TFNet");
  EXPECT_EQ(model_label(Ablation::WoFe), "AFE-TFNet[wo/fe]");
}

TEST(Pipeline, SweepSummary) {
  std::vector<SweepRow> rows;
  for (std::size_t T : {12, 24}) {
    SweepRow r;
    r.window_size = T;
    r.horizon = 1;
    r.metrics = {T == 12 ? 0.2 : 0.1, 0.1, 5.0, 0.9, 10};
    rows.push_back(r);
  }
  const auto s = format_sweep_summary(rows);
  EXPECT_NE(s.find("1,rmse,0.100000,0.200000,2.000000"), std::string::npos) << s;
  EXPECT_NE(s.find("1,mae,0.100000,0.100000,1.000000"), std::string::npos) << s;
  EXPECT_EQ(count_lines(format_sweep_csv(rows)), 3u);
}

TEST(RunParallel, EveryJobRunsOnce) {
  std::vector<std::atomic<int>> hits(50);
  run_parallel(50, 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(RunParallel, LowestIndexErrorWins) {
  try {
    run_parallel(10, 3, [](std::size_t i) {
      if (i == 7) throw Error(ErrorKind::Config, "seven");
      if (i == 2) throw Error(ErrorKind::Io, "two");
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(RunParallel, WorkerCountHonoursEnvironment) {
  setenv("WAVECAST_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  setenv("WAVECAST_THREADS", "0", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("WAVECAST_THREADS");
}
