#pragma once

#include "wavecast/checkpoint.hpp"
#include "wavecast/tensor.hpp"
#include "wavecast/types.hpp"

namespace wavecast {

struct DecoderConfig {
  std::size_t input_size = kNumVariables;
  std::size_t hidden = 64;
  double dropout = 0.1;
};

/// Gate weights are stored input-major ([in x out]) so a batch of row vectors
/// multiplies from the left: gate = h W_*h + x W_*x + b_*.
struct LstmParams {
  nn::Tensor W_fh, W_fx, b_f;  // forget
  nn::Tensor W_ih, W_ix, b_i;  // input
  nn::Tensor W_ch, W_cx, b_c;  // candidate
  nn::Tensor W_oh, W_ox, b_o;  // output gate
  nn::Tensor W_y, b_y;         // prediction head

  /// Xavier-uniform weights, forget bias 1, other biases 0.
  static LstmParams init(const DecoderConfig& config, Rng& rng);
  static LstmParams zeros(const DecoderConfig& config);

  std::size_t hidden() const { return W_fh.dim(0); }
  std::size_t input_size() const { return W_fx.dim(0); }
  ParameterList parameters() const;
};

struct LstmCellState {
  nn::Tensor h;  // [N x H]
  nn::Tensor c;  // [N x H]

  static LstmCellState zeros(std::size_t batch, std::size_t hidden);
};

struct LstmGates {
  nn::Tensor forget, input, candidate, output;
};

/// One step of the cell for a batch x_t [N x input]. `gates`, when given,
/// receives the intermediate activations.
LstmCellState lstm_step(const nn::Tensor& x_t, const LstmCellState& state, const LstmParams& params,
                        LstmGates* gates = nullptr);

/// Runs the cell over fused [N x T x input] from a zero state and maps the
/// (dropped-out) last hidden state to [N x 1].
nn::Tensor forecast(const nn::Tensor& fused, const LstmParams& params, bool training, double dropout_rate,
                    Rng& dropout_rng);

}  // namespace wavecast
