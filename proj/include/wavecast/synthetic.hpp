#pragma once

#include "wavecast/data_ingest.hpp"

#include <cstdint>

namespace wavecast {

/// Hourly benchmark series: H_s = 1.5 + 0.8 sin(2 pi t / 12) + 0.4 sin(2 pi t / 24)
/// + AR(1) noise, with wind speed and wave periods correlated to H_s.
struct SyntheticConfig {
  std::size_t points = 4000;
  std::uint64_t seed = 2024;
  double ar_phi = 0.7;
  double ar_sigma = 0.1;
  TimePoint start = std::chrono::sys_days{std::chrono::year{2010} / 1 / 1};
};

TimeSeriesFrame synthetic_benchmark(const SyntheticConfig& config = {});

}  // namespace wavecast
