#include "wavecast/decoder.hpp"

#include "wavecast/encoder.hpp"
#include "wavecast/error.hpp"

namespace wavecast {

LstmParams LstmParams::init(const DecoderConfig& config, Rng& rng) {
  const std::size_t h = config.hidden;
  const std::size_t x = config.input_size;
  auto bias = [h](double value) {
    return nn::Tensor::from_data({h}, std::vector<double>(h, value), true);
  };
  LstmParams p;
  p.W_fh = xavier_uniform({h, h}, h, h, rng);
  p.W_fx = xavier_uniform({x, h}, x, h, rng);
  p.b_f = bias(1.0);
  p.W_ih = xavier_uniform({h, h}, h, h, rng);
  p.W_ix = xavier_uniform({x, h}, x, h, rng);
  p.b_i = bias(0.0);
  p.W_ch = xavier_uniform({h, h}, h, h, rng);
  p.W_cx = xavier_uniform({x, h}, x, h, rng);
  p.b_c = bias(0.0);
  p.W_oh = xavier_uniform({h, h}, h, h, rng);
  p.W_ox = xavier_uniform({x, h}, x, h, rng);
  p.b_o = bias(0.0);
  p.W_y = xavier_uniform({h, 1}, h, 1, rng);
  p.b_y = nn::Tensor::zeros({1}, true);
  return p;
}

LstmParams LstmParams::zeros(const DecoderConfig& config) {
  const std::size_t h = config.hidden;
  const std::size_t x = config.input_size;
  auto z = [](nn::Shape s) { return nn::Tensor::zeros(std::move(s), true); };
  return {z({h, h}), z({x, h}), z({h}), z({h, h}), z({x, h}), z({h}), z({h, h}), z({x, h}), z({h}),
          z({h, h}), z({x, h}), z({h}), z({h, 1}), z({1})};
}

ParameterList LstmParams::parameters() const {
  return {
      {"decoder.W_fh", W_fh}, {"decoder.W_fx", W_fx}, {"decoder.b_f", b_f},
      {"decoder.W_ih", W_ih}, {"decoder.W_ix", W_ix}, {"decoder.b_i", b_i},
      {"decoder.W_ch", W_ch}, {"decoder.W_cx", W_cx}, {"decoder.b_c", b_c},
      {"decoder.W_oh", W_oh}, {"decoder.W_ox", W_ox}, {"decoder.b_o", b_o},
      {"decoder.W_y", W_y},   {"decoder.b_y", b_y},
  };
}

LstmCellState LstmCellState::zeros(std::size_t batch, std::size_t hidden) {
  return {nn::Tensor::zeros({batch, hidden}), nn::Tensor::zeros({batch, hidden})};
}

LstmCellState lstm_step(const nn::Tensor& x_t, const LstmCellState& state, const LstmParams& params,
                        LstmGates* gates) {
  if (x_t.rank() != 2 || x_t.dim(1) != params.input_size() || state.h.rank() != 2 ||
      state.h.dim(1) != params.hidden() || state.h.dim(0) != x_t.dim(0) || state.c.shape() != state.h.shape())
    throw Error(ErrorKind::ShapeMismatch, "lstm_step: x " + nn::shape_string(x_t.shape()) + ", h " +
                                              nn::shape_string(state.h.shape()));
  auto gate = [&](const nn::Tensor& W_h, const nn::Tensor& W_x, const nn::Tensor& b) {
    return nn::linear(state.h, W_h, b) + nn::matmul(x_t, W_x);
  };
  const auto f = nn::sigmoid(gate(params.W_fh, params.W_fx, params.b_f));
  const auto i = nn::sigmoid(gate(params.W_ih, params.W_ix, params.b_i));
  const auto c_tilde = nn::tanh(gate(params.W_ch, params.W_cx, params.b_c));
  const auto c = f * state.c + i * c_tilde;
  const auto o = nn::sigmoid(gate(params.W_oh, params.W_ox, params.b_o));
  const auto h = o * nn::tanh(c);
  if (gates) *gates = {f, i, c_tilde, o};
  return {h, c};
}

nn::Tensor forecast(const nn::Tensor& fused, const LstmParams& params, bool training, double dropout_rate,
                    Rng& dropout_rng) {
  if (fused.rank() != 3 || fused.dim(1) < 1)
    throw Error(ErrorKind::ShapeMismatch, "forecast expects [N x T x input], got " +
                                              nn::shape_string(fused.shape()));
  LstmCellState state = LstmCellState::zeros(fused.dim(0), params.hidden());
  for (std::size_t t = 0; t < fused.dim(1); ++t) state = lstm_step(nn::select(fused, 1, t), state, params);
  const auto h_last = nn::dropout(state.h, dropout_rate, training, dropout_rng);
  return nn::linear(h_last, params.W_y, params.b_y);
}

}  // namespace wavecast
