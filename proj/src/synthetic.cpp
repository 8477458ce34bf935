#include "wavecast/synthetic.hpp"

#include "wavecast/random.hpp"

#include <cmath>
#include <numbers>

namespace wavecast {

TimeSeriesFrame synthetic_benchmark(const SyntheticConfig& config) {
  Rng rng(config.seed);
  TimeSeriesFrame frame;
  frame.station_id = "synthetic";
  frame.values.resize(static_cast<Eigen::Index>(config.points), kNumVariables);
  const double two_pi = 2.0 * std::numbers::pi;
  double noise = 0.0;
  for (std::size_t i = 0; i < config.points; ++i) {
    const double t = static_cast<double>(i);
    noise = config.ar_phi * noise + config.ar_sigma * rng.normal();
    const double hs = 1.5 + 0.8 * std::sin(two_pi * t / 12.0) + 0.4 * std::sin(two_pi * t / 24.0) + noise;
    const double anomaly = hs - 1.5;
    const auto r = static_cast<Eigen::Index>(i);
    frame.values(r, kWindSpeed) = 6.0 + 2.5 * anomaly + 0.3 * rng.normal();
    frame.values(r, kDominantPeriod) = 9.0 + 1.2 * anomaly + 0.5 * std::sin(two_pi * t / 24.0 + 0.7) + 0.2 * rng.normal();
    frame.values(r, kAveragePeriod) = 6.0 + 0.8 * anomaly + 0.15 * rng.normal();
    frame.values(r, kWaveHeight) = hs;
    frame.timestamps.push_back(config.start + std::chrono::hours{static_cast<long>(i)});
  }
  return frame;
}

}  // namespace wavecast
