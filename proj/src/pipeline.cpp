#include "wavecast/pipeline.hpp"

#include "wavecast/baselines.hpp"
#include "wavecast/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <thread>

namespace wavecast {

void ExperimentConfig::sync() {
  model.encoder.window_size = train.window_size;
  model.decoder.dropout = train.dropout;
}

void ExperimentConfig::validate() const {
  train.validate();
  if (model.encoder.k_periods < 1) throw Error(ErrorKind::Config, "k_periods must be at least 1");
  if (model.encoder.grid < 2) throw Error(ErrorKind::Config, "grid must be at least 2");
  if (model.encoder.reduce_filters < 1 || model.encoder.conv3_filters < 1 || model.encoder.conv5_filters < 1)
    throw Error(ErrorKind::Config, "filter counts must be positive");
  if (model.decoder.hidden < 1) throw Error(ErrorKind::Config, "hidden size must be positive");
  if (model.n_harmonics < 1) throw Error(ErrorKind::Config, "n_harmonics must be at least 1");
  if (bootstrap_samples < 100) throw Error(ErrorKind::Config, "bootstrap_b must be at least 100");
  if (horizons.empty()) throw Error(ErrorKind::Config, "no horizons");
  for (const auto h : horizons)
    if (h < 1) throw Error(ErrorKind::Config, "horizon must be at least 1");
  for (const double c : confidence_levels)
    if (!(c > 0.0 && c < 1.0)) throw Error(ErrorKind::Config, "confidence must lie in (0, 1)");
}

ExperimentConfig desk_scale_config() {
  ExperimentConfig config;
  config.model.encoder.grid = 12;
  config.model.encoder.reduce_filters = 16;
  config.model.encoder.conv3_filters = 32;
  config.model.encoder.conv5_filters = 32;
  return config;
}

nlohmann::ordered_json to_json(const ExperimentConfig& config) {
  const auto& enc = config.model.encoder;
  nlohmann::ordered_json j;
  j["window_size"] = config.train.window_size;
  j["horizon"] = config.train.horizon;
  j["horizons"] = config.horizons;
  j["seed"] = config.train.seed;
  j["k_periods"] = enc.k_periods;
  j["grid"] = enc.grid;
  j["scales"] = std::vector<double>(enc.scales.data(), enc.scales.data() + enc.scales.size());
  j["reduce_filters"] = enc.reduce_filters;
  j["conv3_filters"] = enc.conv3_filters;
  j["conv5_filters"] = enc.conv5_filters;
  j["hidden"] = config.model.decoder.hidden;
  j["dropout"] = config.train.dropout;
  j["fusion"] = config.model.fusion.to_string();
  j["ablation"] = to_string(config.model.ablation);
  j["n_harmonics"] = config.model.n_harmonics;
  j["batch_size"] = config.train.batch_size;
  j["max_epochs"] = config.train.max_epochs;
  j["patience"] = config.train.patience;
  j["learning_rate"] = config.train.learning_rate;
  j["bootstrap_b"] = config.bootstrap_samples;
  j["confidence"] = config.confidence_levels;
  return j;
}

ExperimentConfig experiment_from_json(const nlohmann::json& j, ExperimentConfig base) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  auto& enc = base.model.encoder;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "window_size") base.train.window_size = value.get<std::size_t>();
      else if (key == "horizon") base.train.horizon = value.get<std::size_t>();
      else if (key == "horizons") base.horizons = value.get<std::vector<std::size_t>>();
      else if (key == "seed") base.train.seed = value.get<std::uint64_t>();
      else if (key == "k_periods") enc.k_periods = value.get<std::size_t>();
      else if (key == "grid") enc.grid = value.get<std::size_t>();
      else if (key == "scales") {
        if (value.is_string()) {
          enc.scales = parse_scales(value.get<std::string>());
        } else {
          const auto s = value.get<std::vector<double>>();
          if (s.empty()) throw Error(ErrorKind::Config, "scales must not be empty");
          enc.scales = Eigen::Map<const VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
        }
      }
      else if (key == "reduce_filters") enc.reduce_filters = value.get<std::size_t>();
      else if (key == "conv3_filters") enc.conv3_filters = value.get<std::size_t>();
      else if (key == "conv5_filters") enc.conv5_filters = value.get<std::size_t>();
      else if (key == "hidden") base.model.decoder.hidden = value.get<std::size_t>();
      else if (key == "dropout") base.train.dropout = value.get<double>();
      else if (key == "fusion") base.model.fusion = FusionMode::parse(value.get<std::string>());
      else if (key == "ablation") base.model.ablation = parse_ablation(value.get<std::string>());
      else if (key == "n_harmonics") base.model.n_harmonics = value.get<std::size_t>();
      else if (key == "batch_size") base.train.batch_size = value.get<std::size_t>();
      else if (key == "max_epochs") base.train.max_epochs = value.get<std::size_t>();
      else if (key == "patience") base.train.patience = value.get<std::size_t>();
      else if (key == "learning_rate") base.train.learning_rate = value.get<double>();
      else if (key == "bootstrap_b") base.bootstrap_samples = value.get<std::size_t>();
      else if (key == "confidence") base.confidence_levels = value.get<std::vector<double>>();
      else throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, e.what());
  }
  base.sync();
  return base;
}

VectorXd parse_scales(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw Error(ErrorKind::InvalidArgument, "bad scale spec '" + text + "'");
    return v;
  };
  auto count_of = [&](const std::string& s) {
    const double v = number(s);
    if (v < 1 || v != std::floor(v)) throw Error(ErrorKind::InvalidArgument, "scale count must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  const auto first = text.find(':');
  if (first == std::string::npos) return log_scales(count_of(text));
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) throw Error(ErrorKind::InvalidArgument, "scale spec is 'count' or 'lo:hi:count'");
  return log_scales(count_of(text.substr(second + 1)), number(text.substr(0, first)),
                    number(text.substr(first + 1, second - first - 1)));
}

std::vector<TimePoint> Dataset::test_times() const {
  std::vector<TimePoint> out;
  out.reserve(test.size());
  for (const auto& w : test) out.push_back(w.target_time);
  return out;
}

namespace {

std::vector<double> observed_of(std::span<const Window> windows, const NormStats& stats) {
  std::vector<double> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(denormalize_wave_height(w.target, stats));
  return out;
}

}  // namespace

std::vector<double> Dataset::test_observed() const { return observed_of(test, stats()); }
std::vector<double> Dataset::valid_observed() const { return observed_of(valid, stats()); }

Dataset make_dataset(const SplitFrame& split, std::size_t window_size, std::size_t horizon) {
  Dataset data;
  data.split = split;
  data.window_size = window_size;
  data.horizon = horizon;
  data.train = make_windows(split.train, window_size, horizon);
  data.valid = make_windows(split.valid, window_size, horizon);
  data.test = make_windows(split.test, window_size, horizon);
  return data;
}

TrainedModel train_model(const Dataset& data, const ExperimentConfig& config, const EpochCallback& on_epoch) {
  TrainedModel out;
  out.config = config;
  out.config.train.window_size = data.window_size;
  out.config.train.horizon = data.horizon;
  out.config.sync();
  out.config.validate();
  const auto train = prepare_samples(data.train, out.config.model);
  const auto valid = prepare_samples(data.valid, out.config.model);
  out.net = std::make_unique<AfeTfNet>(out.config.model, out.config.train.seed);
  out.fit = fit(*out.net, train, valid, out.config.train, on_epoch);
  return out;
}

std::unique_ptr<AfeTfNet> restore_model(const ExperimentConfig& config, std::string_view checkpoint) {
  auto net = std::make_unique<AfeTfNet>(config.model, config.train.seed);
  auto params = net->parameters();
  load_parameters(params, parse_checkpoint(checkpoint));
  return net;
}

std::vector<double> forecast_physical(const AfeTfNet& net, std::span<const Window> windows, const NormStats& stats) {
  if (windows.empty()) return {};
  const auto samples = prepare_samples(windows, net.config());
  auto out = predict(net, samples);
  for (auto& v : out) v = denormalize_wave_height(v, stats);
  return out;
}

std::string model_label(Ablation ablation) {
  return ablation == Ablation::Full ? "AFE-TFNet" : "AFE-TFNet[" + to_string(ablation) + "]";
}

ModelPredictions baseline_predictions(Baseline baseline, const Dataset& data) {
  ModelPredictions out;
  out.name = to_string(baseline);
  out.valid = run_baseline(baseline, data.valid, data.horizon, data.stats()).predictions;
  out.test = run_baseline(baseline, data.test, data.horizon, data.stats()).predictions;
  return out;
}

ModelPredictions network_predictions(const AfeTfNet& net, const Dataset& data) {
  ModelPredictions out;
  out.name = model_label(net.config().ablation);
  out.valid = forecast_physical(net, data.valid, data.stats());
  out.test = forecast_physical(net, data.test, data.stats());
  return out;
}

ModelPredictions external_predictions(std::string name, std::span<const ExternalPrediction> rows,
                                      const Dataset& data) {
  if (name.empty() || name.find_first_of(",\n") != std::string::npos)
    throw Error(ErrorKind::InvalidArgument, "external model name must be non-empty without commas");
  std::map<TimePoint, double> by_time;
  for (const auto& r : rows) by_time.emplace(r.timestamp, r.prediction);
  ModelPredictions out;
  out.name = std::move(name);
  for (const auto& w : data.test) {
    const auto it = by_time.find(w.target_time);
    if (it == by_time.end())
      throw Error(ErrorKind::MissingPrediction,
                  "model '" + out.name + "' has no prediction for " + format_timestamp(w.target_time));
    out.test.push_back(it->second);
  }
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return std::isfinite(v) ? format_fixed(v) : "nan"; }

std::string sci(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

std::string metric_row(const std::string& model, std::size_t horizon, const std::string& season,
                       std::span<const double> pred, std::span<const double> obs) {
  MetricSet m{kNaN, kNaN, kNaN, kNaN, pred.size()};
  try {
    m = point_metrics(pred, obs);
  } catch (const Error&) {
    // Constant or near-zero slices keep the nan markers.
  }
  return model + "," + std::to_string(horizon) + "," + season + "," + num(m.rmse) + "," + num(m.mae) + "," +
         num(m.mape) + "," + num(m.r) + "\n";
}

std::vector<double> pick(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (const auto i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

HorizonReport evaluate_horizon(const Dataset& data, std::span<const ModelPredictions> models,
                               const ExperimentConfig& config) {
  if (models.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to evaluate");
  const auto times = data.test_times();
  const auto observed = data.test_observed();
  const auto valid_observed = data.valid_observed();
  for (const auto& m : models)
    if (m.test.size() != observed.size())
      throw Error(ErrorKind::ShapeMismatch, "model '" + m.name + "' test length differs from the test windows");

  HorizonReport report;
  report.horizon = data.horizon;
  const std::size_t n = observed.size();

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto seasons = seasonal_slice(times, observed);
  for (const auto& m : models) {
    report.metric_rows.push_back(metric_row(m.name, data.horizon, "all", m.test, observed));
    for (const auto& s : seasons) {
      if (s.indices.size() < 2) continue;
      report.metric_rows.push_back(
          metric_row(m.name, data.horizon, to_string(s.season), pick(m.test, s.indices), s.values));
    }
  }

  report.intervals_csv = "model,confidence,picp,pinaw\n";
  std::string bands = "model,confidence,timestamp,observed,prediction,lower,upper\n";
  for (const auto& m : models) {
    if (m.valid.empty()) continue;
    if (m.valid.size() != valid_observed.size())
      throw Error(ErrorKind::ShapeMismatch, "model '" + m.name + "' validation length differs");
    std::vector<double> residuals(m.valid.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) residuals[i] = valid_observed[i] - m.valid[i];
    for (const double c : config.confidence_levels) {
      const auto iv = bootstrap_intervals(residuals, m.test, observed, c, config.bootstrap_samples,
                                          config.train.seed);
      report.intervals_csv += m.name + "," + format_fixed(c, 2) + "," + num(iv.picp) + "," + num(iv.pinaw) + "\n";
      for (std::size_t i = 0; i < n; ++i)
        bands += m.name + "," + format_fixed(c, 2) + "," + format_timestamp(times[i]) + "," + num(observed[i]) +
                 "," + num(m.test[i]) + "," + num(iv.lower[i]) + "," + num(iv.upper[i]) + "\n";
    }
  }

  report.wilcoxon_csv = "model_a,model_b,z,p\n";
  const auto abs_errors = [&](const ModelPredictions& m) {
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = std::abs(m.test[i] - observed[i]);
    return e;
  };
  const auto primary = abs_errors(models[0]);
  for (std::size_t k = 1; k < models.size(); ++k) {
    double z = kNaN, p = kNaN;
    try {
      const auto w = wilcoxon_signed_rank(primary, abs_errors(models[k]));
      z = w.z;
      p = w.p_two_tailed;
    } catch (const Error&) {
      // Identical errors or too few pairs: nothing to test.
    }
    report.wilcoxon_csv += models[0].name + "," + models[k].name + "," + num(z) + "," + sci(p) + "\n";
  }

  std::string predictions = "timestamp,observed";
  std::string cumulative = "timestamp";
  for (const auto& m : models) {
    predictions += "," + m.name;
    cumulative += "," + m.name;
  }
  predictions += "\n";
  cumulative += "\n";
  std::vector<double> running(models.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    predictions += format_timestamp(times[i]) + "," + num(observed[i]);
    cumulative += format_timestamp(times[i]);
    for (std::size_t k = 0; k < models.size(); ++k) {
      predictions += "," + num(models[k].test[i]);
      running[k] += std::abs(models[k].test[i] - observed[i]);
      cumulative += "," + num(running[k]);
    }
    predictions += "\n";
    cumulative += "\n";
  }

  std::string scatter = "model,observed,predicted\n";
  std::string box = "model,min,q1,median,q3,max\n";
  for (const auto& m : models) {
    std::vector<double> err(n);
    for (std::size_t i = 0; i < n; ++i) {
      scatter += m.name + "," + num(observed[i]) + "," + num(m.test[i]) + "\n";
      err[i] = m.test[i] - observed[i];
    }
    if (n == 0) continue;
    std::sort(err.begin(), err.end());
    box += m.name;
    for (const double q : {0.0, 0.25, 0.5, 0.75, 1.0}) box += "," + num(sorted_quantile(err, q));
    box += "\n";
  }

  report.plots = {{"predictions.csv", predictions},
                  {"scatter.csv", scatter},
                  {"error_box.csv", box},
                  {"cumulative_error.csv", cumulative},
                  {"interval_bands.csv", bands}};
  return report;
}

std::string format_ablation_csv(std::span<const AblationRow> rows) {
  std::string out = "variant,horizon,rmse,mae,mape,r\n";
  for (const auto& row : rows)
    out += to_string(row.variant) + "," + std::to_string(row.horizon) + "," + num(row.metrics.rmse) + "," +
           num(row.metrics.mae) + "," + num(row.metrics.mape) + "," + num(row.metrics.r) + "\n";
  return out;
}

std::string format_sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "window_size,horizon,rmse,mae,mape,r\n";
  for (const auto& row : rows)
    out += std::to_string(row.window_size) + "," + std::to_string(row.horizon) + "," + num(row.metrics.rmse) +
           "," + num(row.metrics.mae) + "," + num(row.metrics.mape) + "," + num(row.metrics.r) + "\n";
  return out;
}

std::string format_sweep_summary(std::span<const SweepRow> rows) {
  std::map<std::size_t, std::vector<const SweepRow*>> by_horizon;
  for (const auto& row : rows) by_horizon[row.horizon].push_back(&row);
  std::string out = "horizon,metric,min,max,max_min_ratio\n";
  for (const auto& [h, group] : by_horizon) {
    for (const auto& [name, field] : {std::pair{"rmse", &MetricSet::rmse}, std::pair{"mae", &MetricSet::mae},
                                      std::pair{"mape", &MetricSet::mape}}) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto* row : group) {
        lo = std::min(lo, row->metrics.*field);
        hi = std::max(hi, row->metrics.*field);
      }
      out += std::to_string(h) + "," + name + "," + num(lo) + "," + num(hi) + "," + num(lo > 0 ? hi / lo : kNaN) +
             "\n";
    }
  }
  return out;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("WAVECAST_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_parallel(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wavecast
