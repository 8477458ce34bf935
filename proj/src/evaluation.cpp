#include "wavecast/evaluation.hpp"

#include "wavecast/error.hpp"
#include "wavecast/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wavecast {

namespace {

void require_pair(std::span<const double> a, std::span<const double> b, std::size_t min_size, const char* op) {
  if (a.size() != b.size())
    throw Error(ErrorKind::InvalidArgument, std::string(op) + ": length mismatch");
  if (a.size() < min_size)
    throw Error(ErrorKind::InvalidArgument, std::string(op) + ": needs at least " + std::to_string(min_size) +
                                                " samples");
}

}  // namespace

double pearson_r(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y, 2, "pearson_r");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorKind::DegenerateVariance, "constant input, R undefined");
  return sxy / std::sqrt(sxx * syy);
}

MetricSet point_metrics(std::span<const double> prediction, std::span<const double> observed) {
  require_pair(prediction, observed, 2, "point_metrics");
  MetricSet m;
  m.n = prediction.size();
  double sq = 0, abs_sum = 0, pct = 0;
  for (std::size_t i = 0; i < m.n; ++i) {
    const double e = prediction[i] - observed[i];
    if (!(std::abs(observed[i]) > 1e-9))
      throw Error(ErrorKind::InvalidArgument, "MAPE undefined: observation " + std::to_string(i) + " is zero");
    sq += e * e;
    abs_sum += std::abs(e);
    pct += std::abs(e / observed[i]);
  }
  const double n = static_cast<double>(m.n);
  m.rmse = std::sqrt(sq / n);
  m.mae = abs_sum / n;
  m.mape = 100.0 * pct / n;
  m.r = pearson_r(observed, prediction);
  return m;
}

double sorted_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double picp(std::span<const double> lower, std::span<const double> upper, std::span<const double> observed) {
  require_pair(lower, observed, 1, "picp");
  require_pair(upper, observed, 1, "picp");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    if (observed[i] >= lower[i] && observed[i] <= upper[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(observed.size());
}

double pinaw(std::span<const double> lower, std::span<const double> upper, std::span<const double> observed) {
  require_pair(lower, observed, 1, "pinaw");
  require_pair(upper, observed, 1, "pinaw");
  const auto [lo, hi] = std::minmax_element(observed.begin(), observed.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw Error(ErrorKind::DegenerateRange, "observed values are constant");
  double width = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) width += upper[i] - lower[i];
  return width / static_cast<double>(observed.size()) / range;
}

IntervalSet bootstrap_intervals(std::span<const double> validation_residuals,
                                std::span<const double> test_predictions, std::span<const double> test_observed,
                                double confidence, std::size_t resamples, std::uint64_t seed) {
  if (validation_residuals.size() < 30)
    throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least 30 validation residuals");
  if (resamples < 100) throw Error(ErrorKind::InvalidArgument, "bootstrap needs B >= 100");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error(ErrorKind::InvalidArgument, "confidence must lie in (0, 1)");
  require_pair(test_predictions, test_observed, 1, "bootstrap_intervals");

  IntervalSet out;
  out.confidence = confidence;
  out.lower.resize(test_predictions.size());
  out.upper.resize(test_predictions.size());
  std::vector<double> draws(resamples);
  const std::uint64_t base = derive_seed(seed, "bootstrap");
  for (std::size_t i = 0; i < test_predictions.size(); ++i) {
    Rng rng(splitmix64(base ^ splitmix64(i)));
    for (double& d : draws) d = test_predictions[i] + validation_residuals[rng.index(validation_residuals.size())];
    std::sort(draws.begin(), draws.end());
    out.lower[i] = sorted_quantile(draws, (1.0 - confidence) / 2.0);
    out.upper[i] = sorted_quantile(draws, (1.0 + confidence) / 2.0);
  }
  out.picp = picp(out.lower, out.upper, test_observed);
  out.pinaw = pinaw(out.lower, out.upper, test_observed);
  return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  require_pair(a, b, 10, "wilcoxon_signed_rank");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] - b[i] != 0.0) d.push_back(a[i] - b[i]);
  if (d.empty()) throw Error(ErrorKind::AllZeroDifferences, "every paired difference is zero");

  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });

  WilcoxonResult out;
  out.n_effective = d.size();
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k <= j; ++k) (d[order[k]] > 0 ? out.w_plus : out.w_minus) += midrank;
    i = j + 1;
  }
  const double n = static_cast<double>(d.size());
  const double mean = n * (n + 1.0) / 4.0;
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  out.statistic = std::min(out.w_plus, out.w_minus);
  const double magnitude =
      variance > 0.0 ? std::max(0.0, std::abs(out.statistic - mean) - 0.5) / std::sqrt(variance) : 0.0;
  out.z = out.w_plus < out.w_minus ? -magnitude : magnitude;
  out.p_two_tailed = std::erfc(magnitude / std::sqrt(2.0));
  return out;
}

std::string to_string(Season season) {
  switch (season) {
    case Season::Spring: return "spring";
    case Season::Summer: return "summer";
    case Season::Autumn: return "autumn";
    case Season::Winter: return "winter";
  }
  return "spring";
}

Season season_of(TimePoint t) {
  const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
  const unsigned m = static_cast<unsigned>(ymd.month());
  if (m >= 3 && m <= 5) return Season::Spring;
  if (m >= 6 && m <= 8) return Season::Summer;
  if (m >= 9 && m <= 11) return Season::Autumn;
  return Season::Winter;
}

std::array<SeasonalSubset, 4> seasonal_slice(std::span<const TimePoint> timestamps, std::span<const double> values) {
  if (timestamps.size() != values.size())
    throw Error(ErrorKind::InvalidArgument, "seasonal_slice: length mismatch");
  std::array<SeasonalSubset, 4> out{{{Season::Spring, {}, {}},
                                      {Season::Summer, {}, {}},
                                      {Season::Autumn, {}, {}},
                                      {Season::Winter, {}, {}}}};
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    auto& subset = out[static_cast<std::size_t>(season_of(timestamps[i]))];
    subset.indices.push_back(i);
    subset.values.push_back(values[i]);
  }
  return out;
}

}  // namespace wavecast
