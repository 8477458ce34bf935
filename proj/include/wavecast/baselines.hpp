#pragma once

#include "wavecast/rolling.hpp"

#include <span>
#include <string>
#include <vector>

namespace wavecast {

/// x_last + l * (x_last - x_first) / (T - 1) on the window's H_s column.
double naive_drift(const Window& window, std::size_t horizon);

/// Last observed H_s.
double persistence(const Window& window, std::size_t horizon);

struct BaselineForecast {
  std::string model_name;
  std::vector<double> predictions;  // physical units, one per window
  std::size_t horizon = 0;
};

enum class Baseline { NaiveDrift, Persistence };
std::string to_string(Baseline baseline);

/// Runs a baseline over windows and maps predictions back to meters.
BaselineForecast run_baseline(Baseline baseline, std::span<const Window> windows, std::size_t horizon,
                              const NormStats& stats);

}  // namespace wavecast
