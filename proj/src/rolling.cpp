#include "wavecast/rolling.hpp"

#include "wavecast/error.hpp"

namespace wavecast {

std::vector<Window> make_windows(const TimeSeriesFrame& frame, std::size_t window_size,
                                 std::size_t horizon) {
  if (window_size < 1 || horizon < 1)
    throw Error(ErrorKind::InvalidArgument, "window size and horizon must be positive");
  const std::size_t m = frame.size();
  if (m < window_size + horizon)
    throw Error(ErrorKind::FrameTooShort, "frame of " + std::to_string(m) +
                                              " rows cannot hold a window of " +
                                              std::to_string(window_size) + " plus horizon " +
                                              std::to_string(horizon));
  const std::size_t count = m - window_size - horizon + 1;
  std::vector<Window> windows;
  windows.reserve(count);
  const auto T = static_cast<Eigen::Index>(window_size);
  for (std::size_t i = 0; i < count; ++i) {
    Window w;
    w.start_index = frame.first_index + i;
    w.values = frame.values.middleRows(static_cast<Eigen::Index>(i), T);
    const std::size_t target_row = i + window_size - 1 + horizon;
    w.target = frame.values(static_cast<Eigen::Index>(target_row), kWaveHeight);
    w.horizon = horizon;
    w.target_time = frame.timestamps[target_row];
    windows.push_back(std::move(w));
  }
  return windows;
}

LeakageReport leakage_audit(std::span<const Window> windows,
                            std::span<const std::size_t> split_boundaries) {
  LeakageReport report;
  report.windows_checked = windows.size();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Window& w = windows[i];
    for (std::size_t b : split_boundaries)
      if (w.start_index < b && b <= w.target_index()) report.violations.push_back({i, b});
  }
  return report;
}

}  // namespace wavecast
