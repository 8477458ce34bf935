#include "wavecast/training.hpp"

#include "wavecast/csv_io.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace wavecast {

void adam_step(ParameterList& params, AdamState& state) {
  if (state.m.size() != params.size()) {
    state.m.clear();
    state.v.clear();
    for (const auto& p : params) {
      state.m.emplace_back(p.tensor.size(), 0.0);
      state.v.emplace_back(p.tensor.size(), 0.0);
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    nn::Tensor& tensor = params[k].tensor;
    if (!tensor.has_grad()) continue;
    auto data = tensor.mutable_data();
    auto grad = tensor.grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < data.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * grad[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      data[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Config, what); };
  if (batch_size < 1) fail("batch_size must be at least 1");
  if (max_epochs < 1) fail("max_epochs must be at least 1");
  if (patience < 1) fail("patience must be at least 1");
  if (patience > max_epochs) fail("patience cannot exceed max_epochs");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
  if (horizon < 1) fail("horizon must be at least 1");
  if (window_size < 8) fail("window_size must be at least 8");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (eval_batch_size < 1) fail("eval_batch_size must be at least 1");
}

namespace {

std::vector<const PreparedSample*> gather(std::span<const PreparedSample> samples,
                                          std::span<const std::size_t> order, std::size_t begin,
                                          std::size_t end) {
  std::vector<const PreparedSample*> batch;
  for (std::size_t i = begin; i < end; ++i) batch.push_back(&samples[order[i]]);
  return batch;
}

std::vector<std::vector<double>> snapshot(const ParameterList& params) {
  std::vector<std::vector<double>> out;
  for (const auto& p : params) out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  return out;
}

}  // namespace

std::vector<double> predict(const Forecaster& model, std::span<const PreparedSample> samples,
                            std::size_t batch_size) {
  nn::NoGradGuard no_grad;
  Rng unused(0);
  std::vector<double> out;
  out.reserve(samples.size());
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(samples.size(), begin + batch_size);
    const auto batch = gather(samples, order, begin, end);
    const nn::Tensor y = model.forward(batch, false, unused);
    out.insert(out.end(), y.data().begin(), y.data().end());
  }
  return out;
}

double mean_squared_error(std::span<const double> prediction, std::span<const PreparedSample> samples) {
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = prediction[i] - samples[i].target;
    total += d * d;
  }
  return total / static_cast<double>(samples.size());
}

FitResult fit(Forecaster& model, std::span<const PreparedSample> train, std::span<const PreparedSample> valid,
              const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty() || valid.empty())
    throw Error(ErrorKind::InvalidArgument, "fit needs non-empty training and validation windows");

  ParameterList params = model.parameters();
  AdamState adam;
  adam.learning_rate = config.learning_rate;
  Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
  Rng dropout_rng(derive_seed(config.seed, "dropout"));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  FitResult result;
  result.best_valid_mse = std::numeric_limits<double>::infinity();
  auto best = snapshot(params);
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < train.size(); begin += config.batch_size) {
      const std::size_t end = std::min(train.size(), begin + config.batch_size);
      const auto batch = gather(train, order, begin, end);
      std::vector<double> targets;
      for (const auto* s : batch) targets.push_back(s->target);
      for (auto& p : params) p.tensor.zero_grad();
      nn::Tensor loss;
      try {
        const nn::Tensor prediction = model.forward(batch, true, dropout_rng);
        loss = nn::mse_loss(prediction, nn::Tensor::from_data({batch.size(), 1}, targets));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonFiniteValue) throw;
        throw Error(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch) + ", batch starting at " +
                                                  std::to_string(begin) + ": " + e.what());
      }
      if (!std::isfinite(loss.item()))
        throw Error(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch) + ": loss is not finite");
      nn::backward(loss);
      adam_step(params, adam);
      loss_sum += loss.item() * static_cast<double>(batch.size());
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_mse = loss_sum / static_cast<double>(train.size());
    record.valid_mse = mean_squared_error(predict(model, valid, config.eval_batch_size), valid);
    if (!std::isfinite(record.valid_mse))
      throw Error(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch) + ": validation loss is not finite");
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.valid_mse < result.best_valid_mse) {
      result.best_valid_mse = record.valid_mse;
      result.best_epoch = epoch;
      best = snapshot(params);
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }

  for (std::size_t k = 0; k < params.size(); ++k)
    std::copy(best[k].begin(), best[k].end(), params[k].tensor.mutable_data().begin());
  result.checkpoint = serialize_checkpoint(params);
  return result;
}

std::string format_history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_mse,valid_mse\n";
  for (const auto& r : history)
    out += std::to_string(r.epoch) + "," + format_fixed(r.train_mse, 9) + "," + format_fixed(r.valid_mse, 9) + "\n";
  return out;
}

}  // namespace wavecast
