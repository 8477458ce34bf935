#pragma once

#include "wavecast/decoder.hpp"
#include "wavecast/encoder.hpp"
#include "wavecast/fusion.hpp"
#include "wavecast/rolling.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

enum class Ablation {
  Full,       // wavelet + Fourier features, DHSEW fusion
  WoFe,       // no encoder; the decoder sees the raw window
  WithFft,    // wavelet channels zero-filled
  WithWt,     // Fourier channels zero-filled
  WoWei,      // fixed w_f = w_t = 0.5
};

std::string to_string(Ablation ablation);
Ablation parse_ablation(const std::string& text);
inline constexpr Ablation kAllAblations[] = {Ablation::Full, Ablation::WoFe, Ablation::WithFft,
                                             Ablation::WithWt, Ablation::WoWei};

struct ModelConfig {
  EncoderConfig encoder;
  DecoderConfig decoder;
  FusionMode fusion;
  Ablation ablation = Ablation::Full;
  std::size_t n_harmonics = kDefaultHarmonics;

  bool uses_encoder() const { return ablation != Ablation::WoFe; }
  FusionMode effective_fusion() const;
  SpectralChannels channels() const;
};

/// A window with everything the forward pass needs precomputed. Spectral
/// features and fusion weights depend only on the window's own values.
struct PreparedSample {
  SeriesMatrix values;  // [T x 4]
  std::optional<SpectralFeatures> features;
  FusionWeights weights;
  double target = 0.0;
};

PreparedSample prepare_sample(const Window& window, const ModelConfig& config);
std::vector<PreparedSample> prepare_samples(std::span<const Window> windows, const ModelConfig& config);

/// [N x T x 4] tensor of raw window values.
nn::Tensor stack_windows(std::span<const PreparedSample* const> batch);

class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual ParameterList parameters() const = 0;
  /// Normalized predictions [N x 1].
  virtual nn::Tensor forward(std::span<const PreparedSample* const> batch, bool training,
                             Rng& dropout_rng) const = 0;
  virtual double dropout_rate() const = 0;
};

/// Encoder (inception + projection), DHSEW fusion, LSTM decoder. Encoder and
/// decoder initialise from independent sub-streams of the seed, so the wo/fe
/// variant starts from exactly the weights a plain LSTM would.
class AfeTfNet final : public Forecaster {
 public:
  AfeTfNet(ModelConfig config, std::uint64_t seed);

  ParameterList parameters() const override;
  nn::Tensor forward(std::span<const PreparedSample* const> batch, bool training,
                     Rng& dropout_rng) const override;
  double dropout_rate() const override { return config_.decoder.dropout; }

  const ModelConfig& config() const { return config_; }
  const std::optional<Encoder>& encoder() const { return encoder_; }
  const LstmParams& decoder() const { return decoder_; }

 private:
  ModelConfig config_;
  std::optional<Encoder> encoder_;
  LstmParams decoder_;
};

/// The decoder alone on raw windows.
class LstmForecaster final : public Forecaster {
 public:
  LstmForecaster(DecoderConfig config, std::uint64_t seed);

  ParameterList parameters() const override { return params_.parameters(); }
  nn::Tensor forward(std::span<const PreparedSample* const> batch, bool training,
                     Rng& dropout_rng) const override;
  double dropout_rate() const override { return config_.dropout; }

 private:
  DecoderConfig config_;
  LstmParams params_;
};

}  // namespace wavecast
