#include "wavecast/model.hpp"

namespace wavecast {

std::string to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::Full: return "full";
    case Ablation::WoFe: return "wo/fe";
    case Ablation::WithFft: return "w/fft";
    case Ablation::WithWt: return "w/wt";
    case Ablation::WoWei: return "wo/wei";
  }
  return "full";
}

Ablation parse_ablation(const std::string& text) {
  for (Ablation a : kAllAblations)
    if (text == to_string(a)) return a;
  if (text == "wo_fe" || text == "wofe") return Ablation::WoFe;
  if (text == "w_fft" || text == "wfft") return Ablation::WithFft;
  if (text == "w_wt" || text == "wwt") return Ablation::WithWt;
  if (text == "wo_wei" || text == "wowei") return Ablation::WoWei;
  throw Error(ErrorKind::InvalidArgument, "unknown ablation '" + text + "'");
}

FusionMode ModelConfig::effective_fusion() const {
  if (ablation == Ablation::WoFe) return FusionMode{FusionMode::Kind::Off, 0.0};
  if (ablation == Ablation::WoWei) return FusionMode{FusionMode::Kind::Fixed, 0.5};
  return fusion;
}

SpectralChannels ModelConfig::channels() const {
  switch (ablation) {
    case Ablation::WithFft: return SpectralChannels::FourierOnly;
    case Ablation::WithWt: return SpectralChannels::WaveletOnly;
    default: return SpectralChannels::Both;
  }
}

PreparedSample prepare_sample(const Window& window, const ModelConfig& config) {
  if (window.length() != config.encoder.window_size)
    throw Error(ErrorKind::ShapeMismatch, "window of length " + std::to_string(window.length()) +
                                              " for a model with T = " +
                                              std::to_string(config.encoder.window_size));
  PreparedSample s;
  s.values = window.values;
  s.target = window.target;
  if (config.uses_encoder()) s.features = extract_spectral(window, config.encoder);
  s.weights = weights_for(window.values.col(kWaveHeight), config.effective_fusion(), config.n_harmonics);
  return s;
}

std::vector<PreparedSample> prepare_samples(std::span<const Window> windows, const ModelConfig& config) {
  std::vector<PreparedSample> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(prepare_sample(w, config));
  return out;
}

nn::Tensor stack_windows(std::span<const PreparedSample* const> batch) {
  if (batch.empty()) throw Error(ErrorKind::InvalidArgument, "empty batch");
  const auto T = static_cast<std::size_t>(batch[0]->values.rows());
  std::vector<double> data;
  data.reserve(batch.size() * T * kNumVariables);
  for (const PreparedSample* s : batch) {
    if (static_cast<std::size_t>(s->values.rows()) != T)
      throw Error(ErrorKind::ShapeMismatch, "windows of different lengths in one batch");
    for (Eigen::Index t = 0; t < s->values.rows(); ++t)
      for (int v = 0; v < kNumVariables; ++v) data.push_back(s->values(t, v));
  }
  return nn::Tensor::from_data({batch.size(), T, static_cast<std::size_t>(kNumVariables)}, std::move(data));
}

AfeTfNet::AfeTfNet(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  if (config_.uses_encoder()) {
    Rng encoder_init(derive_seed(seed, "encoder"));
    encoder_.emplace(config_.encoder, encoder_init);
  }
  Rng decoder_init(derive_seed(seed, "decoder"));
  decoder_ = LstmParams::init(config_.decoder, decoder_init);
}

ParameterList AfeTfNet::parameters() const {
  ParameterList params;
  if (encoder_) params = encoder_->parameters();
  for (auto& p : decoder_.parameters()) params.push_back(std::move(p));
  return params;
}

nn::Tensor AfeTfNet::forward(std::span<const PreparedSample* const> batch, bool training,
                             Rng& dropout_rng) const {
  const nn::Tensor raw = stack_windows(batch);
  nn::Tensor fused = raw;
  if (encoder_) {
    std::vector<const SpectralFeatures*> features;
    std::vector<FusionWeights> weights;
    for (const PreparedSample* s : batch) {
      if (!s->features) throw Error(ErrorKind::InvalidArgument, "sample was prepared without spectral features");
      features.push_back(&*s->features);
      weights.push_back(s->weights);
    }
    const nn::Tensor x_fre = encoder_->forward(stack_features(features, config_.channels()));
    fused = fuse(x_fre, raw, weights);
  }
  return forecast(fused, decoder_, training, config_.decoder.dropout, dropout_rng);
}

LstmForecaster::LstmForecaster(DecoderConfig config, std::uint64_t seed) : config_(config) {
  Rng init(derive_seed(seed, "decoder"));
  params_ = LstmParams::init(config_, init);
}

nn::Tensor LstmForecaster::forward(std::span<const PreparedSample* const> batch, bool training,
                                   Rng& dropout_rng) const {
  return forecast(stack_windows(batch), params_, training, config_.dropout, dropout_rng);
}

}  // namespace wavecast
