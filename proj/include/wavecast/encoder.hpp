#pragma once

#include "wavecast/checkpoint.hpp"
#include "wavecast/rolling.hpp"
#include "wavecast/spectral.hpp"
#include "wavecast/tensor.hpp"

#include <span>
#include <vector>

namespace wavecast {

struct EncoderConfig {
  std::size_t window_size = kDefaultWindow;  // T
  std::size_t k_periods = 3;
  std::size_t grid = 24;  // S, side of the canonical square map
  VectorXd scales = log_scales();
  std::size_t reduce_filters = 64;  // each 1x1 branch
  std::size_t conv3_filters = 128;
  std::size_t conv5_filters = 128;

  std::size_t input_channels() const { return kNumVariables * (1 + k_periods); }
  std::size_t output_channels() const { return conv3_filters + conv5_filters + reduce_filters; }
};

/// Per-window spectral maps, all resized to grid x grid, channel-major.
/// Wavelet channels are one scalogram per variable; Fourier channels are k
/// period maps per variable (variable-major), zero-filled when fewer than k
/// distinct periods exist.
struct SpectralFeatures {
  std::size_t grid = 0;
  std::size_t k_periods = 0;
  std::vector<double> wavelet;  // [4 x S x S]
  std::vector<double> fourier;  // [4k x S x S]
  std::vector<std::vector<PeriodChoice>> periods;  // per variable

  std::size_t channels() const { return kNumVariables * (1 + k_periods); }
};

/// Bilinear resampling with corner alignment; output values stay within the
/// input's range.
MatrixXd bilinear_resize(const MatrixXd& map, std::size_t rows, std::size_t cols);

SpectralFeatures extract_spectral(const SeriesMatrix& window_values, std::size_t k_periods,
                                  const VectorXd& scales, std::size_t grid);

inline SpectralFeatures extract_spectral(const Window& window, const EncoderConfig& config) {
  return extract_spectral(window.values, config.k_periods, config.scales, config.grid);
}

enum class SpectralChannels { Both, FourierOnly, WaveletOnly };

/// Batch tensor [N x 4(1+k) x S x S] with the ablated branch zero-filled.
nn::Tensor stack_features(std::span<const SpectralFeatures* const> features, SpectralChannels channels);

/// Frequency Inception Block followed by the projection onto a T x 4 sequence.
class Encoder {
 public:
  Encoder(const EncoderConfig& config, Rng& init);

  /// Three 1x1 reductions (ReLU) feeding 3x3 conv, 5x5 conv and 3x3 max-pool
  /// branches; concatenated to [N x (c3 + c5 + reduce) x S x S].
  nn::Tensor frequency_inception(const nn::Tensor& features) const;

  /// Global average pool then affine map to [N x T x 4].
  nn::Tensor project_to_sequence(const nn::Tensor& inception_out) const;

  nn::Tensor forward(const nn::Tensor& features) const {
    return project_to_sequence(frequency_inception(features));
  }

  ParameterList parameters() const;
  const EncoderConfig& config() const { return config_; }

 private:
  EncoderConfig config_;
  nn::Tensor reduce_a_w_, reduce_a_b_;
  nn::Tensor reduce_b_w_, reduce_b_b_;
  nn::Tensor reduce_c_w_, reduce_c_b_;
  nn::Tensor conv3_w_, conv3_b_;
  nn::Tensor conv5_w_, conv5_b_;
  nn::Tensor proj_w_, proj_b_;
};

nn::Tensor kaiming_uniform(nn::Shape shape, std::size_t fan_in, Rng& rng);
nn::Tensor xavier_uniform(nn::Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace wavecast
