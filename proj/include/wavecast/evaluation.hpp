#pragma once

#include "wavecast/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

struct MetricSet {
  double rmse = 0.0;
  double mae = 0.0;
  double mape = 0.0;  // percent
  double r = 0.0;     // Pearson
  std::size_t n = 0;
};

/// RMSE, MAE, MAPE (%) and Pearson R. Throws DegenerateVariance when either
/// vector is constant, InvalidArgument when an observation is ~0 (MAPE).
MetricSet point_metrics(std::span<const double> prediction, std::span<const double> observed);

double pearson_r(std::span<const double> x, std::span<const double> y);

/// Linear-interpolation quantile of already sorted values, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p);

struct IntervalSet {
  std::vector<double> lower;
  std::vector<double> upper;
  double confidence = 0.9;
  double picp = 0.0;
  double pinaw = 0.0;
};

inline constexpr double kConfidenceLevels[] = {0.85, 0.90, 0.95};
inline constexpr std::size_t kDefaultBootstrapSamples = 200;

/// Residual bootstrap: for test point i, B validation residuals drawn with
/// replacement are added to prediction[i]; the (1 -/+ c)/2 percentiles bound
/// the interval. Draws depend on (seed, i) only, so intervals at different
/// confidence levels nest.
IntervalSet bootstrap_intervals(std::span<const double> validation_residuals,
                                std::span<const double> test_predictions, std::span<const double> test_observed,
                                double confidence, std::size_t resamples, std::uint64_t seed);

/// Coverage of observed values by [lower, upper].
double picp(std::span<const double> lower, std::span<const double> upper, std::span<const double> observed);
/// Mean width over the observed range; DegenerateRange when the range is 0.
double pinaw(std::span<const double> lower, std::span<const double> upper, std::span<const double> observed);

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double statistic = 0.0;  // min(W+, W-)
  double z = 0.0;
  double p_two_tailed = 1.0;
  std::size_t n_effective = 0;
};

/// Paired signed-rank test on d = a - b (zeros dropped, midranks for ties),
/// normal approximation with tie-corrected variance and continuity
/// correction. z is negative when a tends to be smaller than b.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

enum class Season { Spring, Summer, Autumn, Winter };
inline constexpr Season kSeasons[] = {Season::Spring, Season::Summer, Season::Autumn, Season::Winter};
std::string to_string(Season season);

/// Meteorological seasons: MAM, JJA, SON, DJF.
Season season_of(TimePoint t);

struct SeasonalSubset {
  Season season;
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

std::array<SeasonalSubset, 4> seasonal_slice(std::span<const TimePoint> timestamps, std::span<const double> values);

}  // namespace wavecast
