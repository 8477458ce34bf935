#include "wavecast/baselines.hpp"

#include "wavecast/error.hpp"

namespace wavecast {

double naive_drift(const Window& window, std::size_t horizon) {
  const auto T = static_cast<Eigen::Index>(window.length());
  if (T < 2) throw Error(ErrorKind::InvalidArgument, "naive drift needs a window of at least 2 rows");
  const double first = window.values(0, kWaveHeight);
  const double last = window.values(T - 1, kWaveHeight);
  const double drift = (last - first) / static_cast<double>(T - 1);
  return last + static_cast<double>(horizon) * drift;
}

double persistence(const Window& window, std::size_t /*horizon*/) {
  const auto T = static_cast<Eigen::Index>(window.length());
  if (T < 1) throw Error(ErrorKind::InvalidArgument, "persistence needs a non-empty window");
  return window.values(T - 1, kWaveHeight);
}

std::string to_string(Baseline baseline) {
  return baseline == Baseline::NaiveDrift ? "NaiveDrift" : "Persistence";
}

BaselineForecast run_baseline(Baseline baseline, std::span<const Window> windows, std::size_t horizon,
                              const NormStats& stats) {
  BaselineForecast out;
  out.model_name = to_string(baseline);
  out.horizon = horizon;
  out.predictions.reserve(windows.size());
  for (const auto& w : windows) {
    const double normalized = baseline == Baseline::NaiveDrift ? naive_drift(w, horizon) : persistence(w, horizon);
    out.predictions.push_back(denormalize_wave_height(normalized, stats));
  }
  return out;
}

}  // namespace wavecast
