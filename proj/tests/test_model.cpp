#include "wavecast/checkpoint.hpp"
#include "wavecast/error.hpp"
#include "wavecast/model.hpp"
#include "wavecast/training.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace wavecast;
using test::gradient_check;

namespace {

std::vector<Window> sine_windows(std::size_t count, std::size_t T, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Window> out;
  for (std::size_t n = 0; n < count; ++n) {
    Window w;
    w.start_index = n;
    w.horizon = 1;
    w.values.resize(static_cast<Eigen::Index>(T), kNumVariables);
    const double phase = rng.uniform(0.0, 6.0);
    for (Eigen::Index t = 0; t < w.values.rows(); ++t)
      for (int v = 0; v < kNumVariables; ++v)
        w.values(t, v) = std::sin(2.0 * std::numbers::pi * (double(t) + phase) / 6.0 + v) + 0.1 * rng.normal();
    w.target = std::sin(2.0 * std::numbers::pi * (double(T) + phase) / 6.0 + kWaveHeight);
    out.push_back(std::move(w));
  }
  return out;
}

ModelConfig small_model(Ablation ablation, std::size_t T = 12) {
  ModelConfig c;
  c.ablation = ablation;
  c.encoder.window_size = T;
  c.encoder.k_periods = 1;
  c.encoder.grid = 6;
  c.encoder.scales = log_scales(6, 0.5, 12.0);
  c.encoder.reduce_filters = 3;
  c.encoder.conv3_filters = 3;
  c.encoder.conv5_filters = 2;
  c.decoder.hidden = 6;
  c.decoder.dropout = 0.0;
  return c;
}

std::vector<const PreparedSample*> pointers(const std::vector<PreparedSample>& samples) {
  std::vector<const PreparedSample*> out;
  for (const auto& s : samples) out.push_back(&s);
  return out;
}

}  // namespace

TEST(Ablation, NamesRoundTrip) {
  for (Ablation a : kAllAblations) EXPECT_EQ(parse_ablation(to_string(a)), a);
  EXPECT_EQ(parse_ablation("wo_fe"), Ablation::WoFe);
  EXPECT_THROW(parse_ablation("wo/everything"), Error);
}

TEST(Ablation, VariantWiring) {
  EXPECT_FALSE(small_model(Ablation::WoFe).uses_encoder());
  EXPECT_EQ(small_model(Ablation::WoWei).effective_fusion().kind, FusionMode::Kind::Fixed);
  EXPECT_DOUBLE_EQ(small_model(Ablation::WoWei).effective_fusion().fixed_frequency_weight, 0.5);
  EXPECT_EQ(small_model(Ablation::WithFft).channels(), SpectralChannels::FourierOnly);
  EXPECT_EQ(small_model(Ablation::WithWt).channels(), SpectralChannels::WaveletOnly);
  EXPECT_EQ(small_model(Ablation::Full).effective_fusion().kind, FusionMode::Kind::Dhsew);
}

TEST(PrepareSample, RejectsWrongLength) {
  const auto windows = sine_windows(1, 10, 1);
  EXPECT_THROW(prepare_sample(windows[0], small_model(Ablation::Full)), Error);
}

TEST(PrepareSample, FeaturesOnlyWithEncoder) {
  const auto windows = sine_windows(1, 12, 2);
  EXPECT_TRUE(prepare_sample(windows[0], small_model(Ablation::Full)).features.has_value());
  EXPECT_FALSE(prepare_sample(windows[0], small_model(Ablation::WoFe)).features.has_value());
}

TEST(AfeTfNet, EveryVariantForwards) {
  const auto windows = sine_windows(3, 12, 3);
  for (Ablation a : kAllAblations) {
    const auto cfg = small_model(a);
    const auto samples = prepare_samples(windows, cfg);
    const AfeTfNet net(cfg, 42);
    Rng d(1);
    const auto y = net.forward(pointers(samples), false, d);
    EXPECT_EQ(y.shape(), (nn::Shape{3, 1})) << to_string(a);
  }
}

TEST(AfeTfNet, WithoutEncoderMatchesPlainLstm) {
  const auto cfg = small_model(Ablation::WoFe);
  const auto windows = sine_windows(40, 12, 4);
  const auto samples = prepare_samples(windows, cfg);
  const std::span<const PreparedSample> all(samples);
  AfeTfNet net(cfg, 42);
  LstmForecaster lstm(cfg.decoder, 42);
  EXPECT_EQ(serialize_checkpoint(net.parameters()), serialize_checkpoint(lstm.parameters()));

  TrainConfig tc;
  tc.window_size = 12;
  tc.max_epochs = 3;
  tc.patience = 3;
  tc.batch_size = 8;
  tc.dropout = 0.0;
  const auto a = fit(net, all.subspan(0, 30), all.subspan(30), tc);
  const auto b = fit(lstm, all.subspan(0, 30), all.subspan(30), tc);
  EXPECT_EQ(a.checkpoint, b.checkpoint);
  EXPECT_EQ(predict(net, all), predict(lstm, all));
}

TEST(AfeTfNet, EncoderAndDecoderSeedsAreIndependent) {
  const AfeTfNet full(small_model(Ablation::Full), 7);
  const LstmForecaster lstm(small_model(Ablation::Full).decoder, 7);
  const auto lp = lstm.parameters();
  const auto fp = full.decoder().parameters();
  for (std::size_t i = 0; i < lp.size(); ++i) {
    const auto x = lp[i].tensor.data(), y = fp[i].tensor.data();
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
  }
}

TEST(AfeTfNet, FullModelGradientCheck) {
  auto cfg = small_model(Ablation::Full);
  const auto windows = sine_windows(2, 12, 5);
  const auto samples = prepare_samples(windows, cfg);
  const AfeTfNet net(cfg, 9);
  std::vector<nn::Tensor> params;
  for (const auto& p : net.parameters()) params.push_back(p.tensor);
  const auto batch = pointers(samples);
  const auto target = nn::Tensor::from_data({2, 1}, {samples[0].target, samples[1].target});
  const auto r = gradient_check(
      params, [&] { Rng d(1); return nn::mse_loss(net.forward(batch, false, d), target); }, 150, 11);
  EXPECT_LT(r.max_rel_error, 1e-4);
}
