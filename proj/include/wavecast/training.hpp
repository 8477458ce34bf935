#pragma once

#include "wavecast/model.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

struct AdamState {
  std::size_t step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// Bias-corrected Adam update from the gradients stored on each parameter;
/// parameters without a gradient buffer count as zero gradient.
void adam_step(ParameterList& params, AdamState& state);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  double dropout = 0.1;
  std::uint64_t seed = 42;
  std::size_t horizon = 1;
  std::size_t window_size = kDefaultWindow;
  double learning_rate = 1e-3;
  std::size_t eval_batch_size = 64;

  /// Throws Config on an unusable combination.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double valid_mse = 0.0;
};

struct FitResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_valid_mse = 0.0;
  std::string checkpoint;  // serialized WVCK of the best-validation parameters
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on normalized-target MSE with early stopping. The model is
/// left holding the best-validation parameters.
FitResult fit(Forecaster& model, std::span<const PreparedSample> train, std::span<const PreparedSample> valid,
              const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Eval-mode normalized predictions.
std::vector<double> predict(const Forecaster& model, std::span<const PreparedSample> samples,
                            std::size_t batch_size = 64);

double mean_squared_error(std::span<const double> prediction, std::span<const PreparedSample> samples);

std::string format_history_csv(const std::vector<EpochRecord>& history);

}  // namespace wavecast
