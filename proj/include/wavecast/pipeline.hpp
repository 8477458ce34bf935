#pragma once

#include "wavecast/baselines.hpp"
#include "wavecast/csv_io.hpp"
#include "wavecast/evaluation.hpp"
#include "wavecast/training.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wavecast {

struct ExperimentConfig {
  ModelConfig model;
  TrainConfig train;
  std::size_t bootstrap_samples = kDefaultBootstrapSamples;
  std::vector<double> confidence_levels{std::begin(kConfidenceLevels), std::end(kConfidenceLevels)};
  std::vector<std::size_t> horizons{std::begin(kHorizons), std::end(kHorizons)};

  /// Copies the shared fields (window size, dropout) from train into model.
  void sync();
  void validate() const;
};

/// Smaller spectral grid and inception widths, same topology. Used where the
/// full widths would take hours on one core.
ExperimentConfig desk_scale_config();

nlohmann::ordered_json to_json(const ExperimentConfig& config);
/// Overlays the keys present in `j` on `base`; unknown keys throw Config.
ExperimentConfig experiment_from_json(const nlohmann::json& j, ExperimentConfig base = {});
/// "32" or "lo:hi:count".
VectorXd parse_scales(const std::string& text);

struct Dataset {
  SplitFrame split;
  std::size_t window_size = 0;
  std::size_t horizon = 0;
  std::vector<Window> train;
  std::vector<Window> valid;
  std::vector<Window> test;

  const NormStats& stats() const { return *split.train.norm_stats; }
  std::vector<TimePoint> test_times() const;
  std::vector<double> test_observed() const;   // meters
  std::vector<double> valid_observed() const;  // meters
};

Dataset make_dataset(const SplitFrame& split, std::size_t window_size, std::size_t horizon);

struct TrainedModel {
  ExperimentConfig config;
  std::unique_ptr<AfeTfNet> net;
  FitResult fit;
};

/// Trains one model for config.train.horizon / window_size on the dataset.
TrainedModel train_model(const Dataset& data, const ExperimentConfig& config, const EpochCallback& on_epoch = {});

/// Rebuilds a trained model from its config and WVCK bytes.
std::unique_ptr<AfeTfNet> restore_model(const ExperimentConfig& config, std::string_view checkpoint);

/// Eval-mode forecasts in meters.
std::vector<double> forecast_physical(const AfeTfNet& net, std::span<const Window> windows,
                                      const NormStats& stats);

std::string model_label(Ablation ablation);

struct ModelPredictions {
  std::string name;
  std::vector<double> valid;  // meters, aligned with Dataset::valid; empty when unknown
  std::vector<double> test;   // meters, aligned with Dataset::test
};

ModelPredictions baseline_predictions(Baseline baseline, const Dataset& data);
ModelPredictions network_predictions(const AfeTfNet& net, const Dataset& data);
/// Matches external rows to test target times; MissingPrediction when any is absent.
ModelPredictions external_predictions(std::string name, std::span<const ExternalPrediction> rows,
                                      const Dataset& data);

struct HorizonReport {
  std::size_t horizon = 0;
  std::vector<std::string> metric_rows;  // metrics.csv rows, no header
  std::string intervals_csv;
  std::string wilcoxon_csv;
  std::vector<std::pair<std::string, std::string>> plots;  // file name, contents
};

inline constexpr std::string_view kMetricsHeader = "model,horizon,season,rmse,mae,mape,r\n";

/// Metrics (overall and per season), bootstrap intervals for every model with
/// validation predictions, Wilcoxon of the first model against each other,
/// and the plot tables.
HorizonReport evaluate_horizon(const Dataset& data, std::span<const ModelPredictions> models,
                               const ExperimentConfig& config);

struct AblationRow {
  Ablation variant = Ablation::Full;
  std::size_t horizon = 0;
  MetricSet metrics;
};
std::string format_ablation_csv(std::span<const AblationRow> rows);

struct SweepRow {
  std::size_t window_size = 0;
  std::size_t horizon = 0;
  MetricSet metrics;
};
std::string format_sweep_csv(std::span<const SweepRow> rows);
/// Per horizon and metric, max / min across window sizes.
std::string format_sweep_summary(std::span<const SweepRow> rows);

/// WAVECAST_THREADS when set and positive, otherwise the hardware count.
std::size_t worker_count();

/// Runs job(0..n-1) on up to `workers` threads. The lowest-index exception is
/// rethrown after all jobs finish.
void run_parallel(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job);

}  // namespace wavecast
