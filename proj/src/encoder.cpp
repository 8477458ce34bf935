#include "wavecast/encoder.hpp"

#include <cmath>

namespace wavecast {

MatrixXd bilinear_resize(const MatrixXd& map, std::size_t rows, std::size_t cols) {
  if (map.size() == 0 || rows == 0 || cols == 0)
    throw Error(ErrorKind::InvalidArgument, "bilinear_resize needs non-empty input and output");
  const auto in_r = static_cast<std::size_t>(map.rows());
  const auto in_c = static_cast<std::size_t>(map.cols());
  auto source = [](std::size_t i, std::size_t out, std::size_t in) {
    if (out == 1 || in == 1) return 0.0;
    return static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
  };
  MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const double y = source(i, rows, in_r);
    const auto y0 = static_cast<Eigen::Index>(std::floor(y));
    const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, static_cast<Eigen::Index>(in_r) - 1);
    const double fy = y - static_cast<double>(y0);
    for (std::size_t j = 0; j < cols; ++j) {
      const double x = source(j, cols, in_c);
      const auto x0 = static_cast<Eigen::Index>(std::floor(x));
      const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, static_cast<Eigen::Index>(in_c) - 1);
      const double fx = x - static_cast<double>(x0);
      const double top = (1 - fx) * map(y0, x0) + fx * map(y0, x1);
      const double bottom = (1 - fx) * map(y1, x0) + fx * map(y1, x1);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (1 - fy) * top + fy * bottom;
    }
  }
  return out;
}

namespace {

void append_row_major(std::vector<double>& dst, const MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) dst.push_back(m(r, c));
}

}  // namespace

SpectralFeatures extract_spectral(const SeriesMatrix& window_values, std::size_t k_periods,
                                  const VectorXd& scales, std::size_t grid) {
  if (k_periods < 1) throw Error(ErrorKind::InvalidArgument, "k_periods must be at least 1");
  SpectralFeatures out;
  out.grid = grid;
  out.k_periods = k_periods;
  const std::size_t area = grid * grid;
  out.wavelet.reserve(kNumVariables * area);
  out.fourier.reserve(kNumVariables * k_periods * area);
  for (int v = 0; v < kNumVariables; ++v) {
    const VectorXd column = window_values.col(v);
    append_row_major(out.wavelet, bilinear_resize(cwt_morlet(column, scales).map, grid, grid));

    const auto periods = topk_periods(dft(column), k_periods);
    for (const auto& choice : periods)
      append_row_major(out.fourier, bilinear_resize(frequency_reshape(column, choice.period).map, grid, grid));
    out.fourier.resize(out.fourier.size() + (k_periods - periods.size()) * area, 0.0);
    out.periods.push_back(periods);
  }
  return out;
}

nn::Tensor stack_features(std::span<const SpectralFeatures* const> features, SpectralChannels channels) {
  if (features.empty()) throw Error(ErrorKind::InvalidArgument, "no features to stack");
  const std::size_t grid = features[0]->grid;
  const std::size_t c = features[0]->channels();
  const std::size_t per_sample = c * grid * grid;
  std::vector<double> data(features.size() * per_sample, 0.0);
  for (std::size_t n = 0; n < features.size(); ++n) {
    const SpectralFeatures& f = *features[n];
    if (f.grid != grid || f.channels() != c)
      throw Error(ErrorKind::ShapeMismatch, "spectral features in one batch disagree in shape");
    double* dst = data.data() + n * per_sample;
    if (channels != SpectralChannels::FourierOnly) std::copy(f.wavelet.begin(), f.wavelet.end(), dst);
    if (channels != SpectralChannels::WaveletOnly)
      std::copy(f.fourier.begin(), f.fourier.end(), dst + f.wavelet.size());
  }
  return nn::Tensor::from_data({features.size(), c, grid, grid}, std::move(data));
}

nn::Tensor kaiming_uniform(nn::Shape shape, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<double> data(nn::numel(shape));
  for (double& v : data) v = rng.uniform(-bound, bound);
  return nn::Tensor::from_data(std::move(shape), std::move(data), true);
}

nn::Tensor xavier_uniform(nn::Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> data(nn::numel(shape));
  for (double& v : data) v = rng.uniform(-bound, bound);
  return nn::Tensor::from_data(std::move(shape), std::move(data), true);
}

Encoder::Encoder(const EncoderConfig& config, Rng& init) : config_(config) {
  const std::size_t cin = config.input_channels();
  const std::size_t r = config.reduce_filters;
  auto zeros = [](std::size_t n) { return nn::Tensor::zeros({n}, true); };
  reduce_a_w_ = kaiming_uniform({r, cin, 1, 1}, cin, init);
  reduce_a_b_ = zeros(r);
  reduce_b_w_ = kaiming_uniform({r, cin, 1, 1}, cin, init);
  reduce_b_b_ = zeros(r);
  reduce_c_w_ = kaiming_uniform({r, cin, 1, 1}, cin, init);
  reduce_c_b_ = zeros(r);
  conv3_w_ = kaiming_uniform({config.conv3_filters, r, 3, 3}, r * 9, init);
  conv3_b_ = zeros(config.conv3_filters);
  conv5_w_ = kaiming_uniform({config.conv5_filters, r, 5, 5}, r * 25, init);
  conv5_b_ = zeros(config.conv5_filters);
  const std::size_t out = config.window_size * kNumVariables;
  proj_w_ = xavier_uniform({config.output_channels(), out}, config.output_channels(), out, init);
  proj_b_ = zeros(out);
}

nn::Tensor Encoder::frequency_inception(const nn::Tensor& features) const {
  using nn::Padding;
  const std::size_t channel_axis = features.rank() - 3;
  if (features.dim(channel_axis) != config_.input_channels())
    throw Error(ErrorKind::ShapeMismatch, "inception expects " + std::to_string(config_.input_channels()) +
                                              " channels, got " + nn::shape_string(features.shape()));
  const auto a = nn::relu(nn::conv2d(features, reduce_a_w_, reduce_a_b_, Padding::Valid));
  const auto b = nn::relu(nn::conv2d(features, reduce_b_w_, reduce_b_b_, Padding::Valid));
  const auto c = nn::relu(nn::conv2d(features, reduce_c_w_, reduce_c_b_, Padding::Valid));
  // The pooled branch already holds non-negative values, so its ReLU is the identity.
  const nn::Tensor branches[] = {
      nn::relu(nn::conv2d(a, conv3_w_, conv3_b_, Padding::Same)),
      nn::relu(nn::conv2d(b, conv5_w_, conv5_b_, Padding::Same)),
      nn::maxpool2d(c, 3, Padding::Same),
  };
  return nn::concat(branches, channel_axis);
}

nn::Tensor Encoder::project_to_sequence(const nn::Tensor& inception_out) const {
  nn::Tensor pooled = nn::global_avg_pool(inception_out);
  const bool batched = pooled.rank() == 2;
  if (!batched) pooled = nn::reshape(pooled, {1, pooled.size()});
  const nn::Tensor flat = nn::linear(pooled, proj_w_, proj_b_);
  const std::size_t n = flat.dim(0);
  if (batched) return nn::reshape(flat, {n, config_.window_size, kNumVariables});
  return nn::reshape(flat, {config_.window_size, kNumVariables});
}

ParameterList Encoder::parameters() const {
  return {
      {"encoder.reduce_a.weight", reduce_a_w_}, {"encoder.reduce_a.bias", reduce_a_b_},
      {"encoder.reduce_b.weight", reduce_b_w_}, {"encoder.reduce_b.bias", reduce_b_b_},
      {"encoder.reduce_c.weight", reduce_c_w_}, {"encoder.reduce_c.bias", reduce_c_b_},
      {"encoder.conv3.weight", conv3_w_},       {"encoder.conv3.bias", conv3_b_},
      {"encoder.conv5.weight", conv5_w_},       {"encoder.conv5.bias", conv5_b_},
      {"encoder.proj.weight", proj_w_},         {"encoder.proj.bias", proj_b_},
  };
}

}  // namespace wavecast
