#include "wavecast/baselines.hpp"
#include "wavecast/csv_io.hpp"
#include "wavecast/error.hpp"
#include "wavecast/fusion.hpp"
#include "wavecast/manifest.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace wavecast;

namespace {

struct Options {
  std::string data;
  std::string input;
  std::string config;
  std::string station;
  std::string out_dir = ".";
  std::string fusion;
  std::string scales;
  std::vector<std::string> ablations;
  std::optional<std::size_t> window_size;
  std::vector<std::size_t> horizons;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k_periods;
  std::optional<std::size_t> bootstrap_b;
  std::optional<std::size_t> max_epochs;
  std::vector<double> confidence;
  bool desk = false;
  bool verbose = false;
  // evaluate
  std::string models_dir;
  std::vector<std::string> externals;
  // sweep
  std::vector<std::size_t> windows{std::begin(kSweepWindows), std::end(kSweepWindows)};
  // synth
  std::size_t points = 4000;
  // spectral dump
  std::size_t index = 0;
};

const char* const kVariableNames[kNumVariables] = {"ws", "dpd", "apd", "hs"};

/// Collects outputs under one directory and records them in its manifest.
class OutputDir {
 public:
  OutputDir(fs::path root, std::string command) : root_(std::move(root)) {
    fs::create_directories(root_);
    manifest_.command = std::move(command);
  }

  void write(const std::string& name, const std::string& contents) {
    const fs::path path = root_ / name;
    fs::create_directories(path.parent_path());
    write_file_atomic(path, contents);
    manifest_.add_output(name, contents);
  }

  RunManifest& manifest() { return manifest_; }
  void finish() { write_file_atomic(root_ / "manifest.json", manifest_.to_json()); }

 private:
  fs::path root_;
  RunManifest manifest_;
};

std::string safe_name(std::string s) {
  for (auto& c : s)
    if (c == '/') c = '_';
  return s;
}

std::string horizon_tag(std::size_t h) { return "h" + std::to_string(h); }

ExperimentConfig build_config(const Options& o) {
  ExperimentConfig config = o.desk ? desk_scale_config() : ExperimentConfig{};
  if (!o.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(o.config));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Config, o.config + ": " + e.what());
    }
    config = experiment_from_json(j, config);
  }
  if (o.window_size) config.train.window_size = *o.window_size;
  if (!o.horizons.empty()) config.horizons = o.horizons;
  if (o.seed) config.train.seed = *o.seed;
  if (o.k_periods) config.model.encoder.k_periods = *o.k_periods;
  if (!o.scales.empty()) config.model.encoder.scales = parse_scales(o.scales);
  if (!o.fusion.empty()) config.model.fusion = FusionMode::parse(o.fusion);
  if (o.ablations.size() == 1) config.model.ablation = parse_ablation(o.ablations.front());
  if (o.bootstrap_b) config.bootstrap_samples = *o.bootstrap_b;
  if (o.max_epochs) {
    config.train.max_epochs = *o.max_epochs;
    config.train.patience = std::min(config.train.patience, *o.max_epochs);
  }
  if (!o.confidence.empty()) config.confidence_levels = o.confidence;
  config.train.horizon = config.horizons.front();
  config.sync();
  config.validate();
  return config;
}

struct LoadedData {
  SplitFrame split;
  std::string bytes;
};

LoadedData load_data(const Options& o, RunManifest& manifest) {
  if (o.data.empty()) throw Error(ErrorKind::InvalidArgument, "--data is required");
  LoadedData out;
  out.bytes = read_file(o.data);
  const std::string station = o.station.empty() ? fs::path(o.data).stem().string() : o.station;
  out.split = chronological_split(parse_frame_csv(out.bytes, station));
  manifest.add_input(fs::path(o.data).filename().string(), out.bytes);
  return out;
}

EpochCallback progress(const Options& o, std::string label) {
  if (!o.verbose) return {};
  return [label = std::move(label)](const EpochRecord& e) {
    std::cerr << label << " epoch " << e.epoch << " train " << e.train_mse << " valid " << e.valid_mse << "\n";
  };
}

int cmd_ingest(const Options& o) {
  if (o.input.empty()) throw Error(ErrorKind::InvalidArgument, "--input is required");
  const std::string text = read_file(o.input);
  const std::string station = o.station.empty() ? fs::path(o.input).stem().string() : o.station;
  const auto parsed = parse_ndbc(text);
  const auto cleaned = clean_and_resample(parsed.records, o.window_size.value_or(kDefaultMaxWindow), station);
  const auto split = chronological_split(cleaned.frame);

  std::size_t checked = 0, violations = 0;
  for (const std::size_t T : kSweepWindows) {
    for (const std::size_t h : kHorizons) {
      std::vector<Window> all;
      for (const auto* part : {&split.train, &split.valid, &split.test}) {
        if (part->size() < T + h) continue;
        auto w = make_windows(*part, T, h);
        all.insert(all.end(), w.begin(), w.end());
      }
      const auto b = split.boundaries();
      const auto audit = leakage_audit(all, b);
      checked += audit.windows_checked;
      violations += audit.violations.size();
    }
  }

  OutputDir out(o.out_dir, "ingest");
  out.manifest().add_input(fs::path(o.input).filename().string(), text);
  out.manifest().config = {{"station", station}, {"max_window", o.window_size.value_or(kDefaultMaxWindow)}};
  out.write(station + ".csv", format_frame_csv(cleaned.frame));
  const auto& seg = cleaned.report.segments[cleaned.report.chosen];
  nlohmann::ordered_json report;
  report["station"] = station;
  report["records"] = parsed.records.size();
  report["dropped_rows"] = parsed.dropped_rows;
  report["missing_values"] = parsed.missing_values;
  report["snapped"] = cleaned.report.snapped;
  report["off_grid_dropped"] = cleaned.report.off_grid_dropped;
  report["interpolated"] = cleaned.report.interpolated;
  report["segments"] = cleaned.report.segments.size();
  report["segment_begin"] = format_timestamp(cleaned.frame.timestamps.front());
  report["segment_end"] = format_timestamp(cleaned.frame.timestamps.back());
  report["rows"] = seg.length();
  report["split_rows"] = {split.train.size(), split.valid.size(), split.test.size()};
  report["leakage_windows_checked"] = checked;
  report["leakage_violations"] = violations;
  out.write("ingest_report.json", report.dump(2) + "\n");
  out.finish();
  std::cout << station << ": " << seg.length() << " hourly rows, " << violations << " leakage violations\n";
  if (violations != 0) throw Error(ErrorKind::NoUsableSegment, "leakage audit failed");
  return 0;
}

int cmd_synth(const Options& o) {
  SyntheticConfig sc;
  sc.points = o.points;
  if (o.seed) sc.seed = *o.seed;
  const auto frame = synthetic_benchmark(sc);
  OutputDir out(o.out_dir, "synth");
  out.manifest().seed = sc.seed;
  out.manifest().config = {{"points", sc.points}};
  out.write("synthetic.csv", format_frame_csv(frame));
  out.finish();
  return 0;
}

nlohmann::ordered_json horizon_config_json(ExperimentConfig config, std::size_t h) {
  config.train.horizon = h;
  config.horizons = {h};
  return to_json(config);
}

int cmd_train(const Options& o) {
  const auto config = build_config(o);
  OutputDir out(o.out_dir, "train");
  const auto data = load_data(o, out.manifest());
  out.manifest().seed = config.train.seed;
  out.manifest().config = to_json(config);

  const auto& hs = config.horizons;
  std::vector<TrainedModel> results(hs.size());
  run_parallel(hs.size(), worker_count(), [&](std::size_t i) {
    ExperimentConfig c = config;
    c.train.horizon = hs[i];
    const auto dataset = make_dataset(data.split, c.train.window_size, hs[i]);
    results[i] = train_model(dataset, c, progress(o, horizon_tag(hs[i])));
  });
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto tag = horizon_tag(hs[i]);
    out.write("model_" + tag + ".wvck", results[i].fit.checkpoint);
    out.write("history_" + tag + ".csv", format_history_csv(results[i].fit.history));
    out.write("config_" + tag + ".json", horizon_config_json(config, hs[i]).dump(2) + "\n");
    std::cout << tag << ": best epoch " << results[i].fit.best_epoch << ", valid mse "
              << format_fixed(results[i].fit.best_valid_mse) << "\n";
  }
  out.finish();
  return 0;
}

struct ExternalSpec {
  std::string name;
  std::optional<std::size_t> horizon;
  std::string path;
};

ExternalSpec parse_external(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw Error(ErrorKind::InvalidArgument, "--external expects NAME[:HORIZON]=PATH");
  ExternalSpec spec;
  spec.path = text.substr(eq + 1);
  std::string head = text.substr(0, eq);
  if (const auto colon = head.find(':'); colon != std::string::npos) {
    try {
      spec.horizon = std::stoul(head.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad horizon in --external " + text);
    }
    head.resize(colon);
  }
  spec.name = head;
  return spec;
}

int cmd_evaluate(const Options& o) {
  ExperimentConfig config = build_config(o);
  std::map<std::size_t, ExperimentConfig> model_configs;
  if (!o.models_dir.empty()) {
    const fs::path dir = o.models_dir;
    std::vector<std::size_t> found;
    for (const std::size_t h : o.horizons.empty() ? std::vector<std::size_t>(std::begin(kHorizons), std::end(kHorizons))
                                                  : o.horizons) {
      const fs::path cfg = dir / ("config_" + horizon_tag(h) + ".json");
      if (!fs::exists(cfg)) {
        if (!o.horizons.empty()) throw Error(ErrorKind::Io, "missing " + cfg.string());
        continue;
      }
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_file(cfg));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, cfg.string() + ": " + e.what());
      }
      auto mc = experiment_from_json(j);
      mc.bootstrap_samples = config.bootstrap_samples;
      mc.confidence_levels = config.confidence_levels;
      if (o.seed) mc.train.seed = *o.seed;
      model_configs[h] = mc;
      found.push_back(h);
    }
    if (found.empty()) throw Error(ErrorKind::Io, "no config_h*.json in " + dir.string());
    config.horizons = found;
  }

  std::vector<ExternalSpec> externals;
  for (const auto& e : o.externals) {
    externals.push_back(parse_external(e));
    if (!externals.back().horizon && config.horizons.size() != 1)
      throw Error(ErrorKind::InvalidArgument, "--external needs NAME:HORIZON=PATH when evaluating several horizons");
  }

  OutputDir out(o.out_dir, "evaluate");
  const auto data = load_data(o, out.manifest());
  out.manifest().seed = config.train.seed;
  out.manifest().config = to_json(config);

  std::map<std::string, std::vector<ExternalPrediction>> external_rows;
  for (const auto& e : externals) {
    if (external_rows.contains(e.path)) continue;
    const std::string bytes = read_file(e.path);
    out.manifest().add_input(fs::path(e.path).filename().string(), bytes);
    external_rows[e.path] = parse_prediction_csv(bytes);
  }
  std::map<std::size_t, std::string> checkpoints;
  for (const auto& [h, mc] : model_configs) {
    const std::string name = "model_" + horizon_tag(h) + ".wvck";
    checkpoints[h] = read_file(fs::path(o.models_dir) / name);
    out.manifest().add_input(name, checkpoints[h]);
  }

  const auto& hs = config.horizons;
  std::vector<HorizonReport> reports(hs.size());
  run_parallel(hs.size(), worker_count(), [&](std::size_t i) {
    const std::size_t h = hs[i];
    ExperimentConfig c = model_configs.contains(h) ? model_configs.at(h) : config;
    c.train.horizon = h;
    const auto dataset = make_dataset(data.split, c.train.window_size, h);
    std::vector<ModelPredictions> models;
    if (model_configs.contains(h)) models.push_back(network_predictions(*restore_model(c, checkpoints.at(h)), dataset));
    models.push_back(baseline_predictions(Baseline::NaiveDrift, dataset));
    models.push_back(baseline_predictions(Baseline::Persistence, dataset));
    for (const auto& e : externals)
      if (!e.horizon || *e.horizon == h) models.push_back(external_predictions(e.name, external_rows.at(e.path), dataset));
    reports[i] = evaluate_horizon(dataset, models, c);
  });

  std::string metrics(kMetricsHeader);
  for (const auto& r : reports)
    for (const auto& row : r.metric_rows) metrics += row;
  out.write("metrics.csv", metrics);
  for (const auto& r : reports) {
    const std::string dir = horizon_tag(r.horizon) + "/";
    out.write(dir + "intervals.csv", r.intervals_csv);
    out.write(dir + "wilcoxon.csv", r.wilcoxon_csv);
    for (const auto& [name, contents] : r.plots) out.write(dir + name, contents);
  }
  out.finish();
  std::cout << metrics;
  return 0;
}

int cmd_ablate(const Options& o) {
  const auto config = build_config(o);
  std::vector<Ablation> variants;
  if (o.ablations.empty())
    variants.assign(std::begin(kAllAblations), std::end(kAllAblations));
  else
    for (const auto& a : o.ablations) variants.push_back(parse_ablation(a));

  OutputDir out(o.out_dir, "ablate");
  const auto data = load_data(o, out.manifest());
  out.manifest().seed = config.train.seed;
  out.manifest().config = to_json(config);

  const auto& hs = config.horizons;
  const std::size_t jobs = variants.size() * hs.size();
  std::vector<TrainedModel> results(jobs);
  std::vector<AblationRow> rows(jobs);
  run_parallel(jobs, worker_count(), [&](std::size_t j) {
    ExperimentConfig c = config;
    c.model.ablation = variants[j / hs.size()];
    c.train.horizon = hs[j % hs.size()];
    const auto dataset = make_dataset(data.split, c.train.window_size, c.train.horizon);
    results[j] = train_model(dataset, c, progress(o, to_string(c.model.ablation) + " " + horizon_tag(c.train.horizon)));
    rows[j] = {c.model.ablation, c.train.horizon,
               point_metrics(forecast_physical(*results[j].net, dataset.test, dataset.stats()), dataset.test_observed())};
  });
  for (std::size_t j = 0; j < jobs; ++j) {
    const std::string stem = "variants/" + safe_name(to_string(rows[j].variant)) + "_" + horizon_tag(rows[j].horizon);
    out.write(stem + ".wvck", results[j].fit.checkpoint);
    out.write(stem + "_history.csv", format_history_csv(results[j].fit.history));
  }
  const auto table = format_ablation_csv(rows);
  out.write("ablation.csv", table);
  out.finish();
  std::cout << table;
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto config = build_config(o);
  OutputDir out(o.out_dir, "sweep");
  const auto data = load_data(o, out.manifest());
  out.manifest().seed = config.train.seed;
  out.manifest().config = to_json(config);

  const auto& hs = config.horizons;
  const auto& ts = o.windows;
  const std::size_t jobs = ts.size() * hs.size();
  std::vector<TrainedModel> results(jobs);
  std::vector<SweepRow> rows(jobs);
  run_parallel(jobs, worker_count(), [&](std::size_t j) {
    ExperimentConfig c = config;
    c.train.window_size = ts[j / hs.size()];
    c.train.horizon = hs[j % hs.size()];
    c.sync();
    const auto dataset = make_dataset(data.split, c.train.window_size, c.train.horizon);
    results[j] = train_model(dataset, c, progress(o, "T" + std::to_string(c.train.window_size) + " " +
                                                         horizon_tag(c.train.horizon)));
    rows[j] = {c.train.window_size, c.train.horizon,
               point_metrics(forecast_physical(*results[j].net, dataset.test, dataset.stats()), dataset.test_observed())};
  });
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const std::string sub = "T" + std::to_string(ts[t]);
    OutputDir per_t(fs::path(o.out_dir) / sub, "sweep");
    ExperimentConfig c = config;
    c.train.window_size = ts[t];
    c.sync();
    per_t.manifest().seed = c.train.seed;
    per_t.manifest().config = to_json(c);
    per_t.manifest().inputs = out.manifest().inputs;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const auto& r = results[t * hs.size() + i];
      per_t.write("model_" + horizon_tag(hs[i]) + ".wvck", r.fit.checkpoint);
      per_t.write("history_" + horizon_tag(hs[i]) + ".csv", format_history_csv(r.fit.history));
    }
    per_t.finish();
    out.manifest().add_output(sub + "/manifest.json", read_file(fs::path(o.out_dir) / sub / "manifest.json"));
  }
  const auto table = format_sweep_csv(rows);
  out.write("sweep.csv", table);
  out.write("sweep_summary.csv", format_sweep_summary(rows));
  out.finish();
  std::cout << table;
  return 0;
}

int cmd_spectral_dump(const Options& o) {
  const auto config = build_config(o);
  OutputDir out(o.out_dir, "spectral dump");
  const auto data = load_data(o, out.manifest());
  out.manifest().config = to_json(config);
  const auto windows = make_windows(data.split.train, config.train.window_size, 1);
  if (o.index >= windows.size())
    throw Error(ErrorKind::InvalidArgument, "--index must be below " + std::to_string(windows.size()));
  const auto& w = windows[o.index];
  const auto& enc = config.model.encoder;

  std::string spectrum = "variable,bin,cycles_per_hour,amplitude\n";
  std::string periods = "variable,rank,frequency_index,period\n";
  std::string maps = "variable,period,row,col,value\n";
  std::string scalogram = "variable,scale,b,value\n";
  for (std::size_t v = 0; v < kNumVariables; ++v) {
    const VectorXd x = w.values.col(static_cast<Eigen::Index>(v));
    const auto spec = dft(x);
    const auto T = spec.length();
    for (std::size_t i = 0; i <= T / 2; ++i)
      spectrum += std::string(kVariableNames[v]) + "," + std::to_string(i) + "," +
                  format_fixed(static_cast<double>(i) / static_cast<double>(T)) + "," +
                  format_fixed(spec.amplitudes(static_cast<Eigen::Index>(i))) + "\n";
    const auto top = topk_periods(spec, enc.k_periods);
    for (std::size_t r = 0; r < top.size(); ++r) {
      periods += std::string(kVariableNames[v]) + "," + std::to_string(r + 1) + "," +
                 std::to_string(top[r].frequency_index) + "," + std::to_string(top[r].period) + "\n";
      if (top[r].period < 2) continue;
      const auto pm = frequency_reshape(x, top[r].period);
      for (Eigen::Index i = 0; i < pm.map.rows(); ++i)
        for (Eigen::Index j = 0; j < pm.map.cols(); ++j)
          maps += std::string(kVariableNames[v]) + "," + std::to_string(pm.period) + "," + std::to_string(i) + "," +
                  std::to_string(j) + "," + format_fixed(pm.map(i, j)) + "\n";
    }
    const auto sc = cwt_morlet(x, enc.scales);
    for (Eigen::Index s = 0; s < sc.map.rows(); ++s)
      for (Eigen::Index b = 0; b < sc.map.cols(); ++b)
        scalogram += std::string(kVariableNames[v]) + "," + format_fixed(sc.scales(s)) + "," + std::to_string(b) +
                     "," + format_fixed(sc.map(s, b)) + "\n";
  }
  std::string fusion = "mode,fundamental_index,harmonic_energy,total_energy,w_f,w_t\n";
  const VectorXd hs = w.values.col(kWaveHeight);
  for (const auto mode : {EnergySpectrum::OneSided, EnergySpectrum::Full}) {
    const char* name = mode == EnergySpectrum::OneSided ? "dhsew" : "dhsew-strict";
    try {
      const auto e = harmonic_energy(hs, config.model.n_harmonics, mode);
      const auto fw = dhsew_weights(e);
      fusion += std::string(name) + "," + std::to_string(e.fundamental_index) + "," + format_fixed(e.harmonic_energy) +
                "," + format_fixed(e.total_energy) + "," + format_fixed(fw.frequency) + "," + format_fixed(fw.time) +
                "\n";
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::ZeroSpectrum) throw;
      fusion += std::string(name) + ",0,0,0,0,1\n";
    }
  }
  out.write("spectrum.csv", spectrum);
  out.write("periods.csv", periods);
  out.write("period_maps.csv", maps);
  out.write("scalogram.csv", scalogram);
  out.write("fusion.csv", fusion);
  out.finish();
  std::cout << periods;
  return 0;
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "Canonical series CSV")->required();
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--station", o.station, "Station id (default: file stem)");
  cmd->add_option("--window-size", o.window_size, "Window length T");
  cmd->add_option("--horizon", o.horizons, "Forecast horizon(s) in hours")->delimiter(',');
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--k-periods", o.k_periods, "Dominant periods per variable");
  cmd->add_option("--scales", o.scales, "Wavelet scales: COUNT or LO:HI:COUNT");
  cmd->add_option("--fusion", o.fusion, "dhsew, dhsew-strict, fixed:W or off");
  cmd->add_option("--ablation", o.ablations, "full, wo/fe, w/fft, w/wt, wo/wei")->delimiter(',');
  cmd->add_option("--confidence", o.confidence, "Interval confidence level(s)")->delimiter(',');
  cmd->add_option("--bootstrap-b", o.bootstrap_b, "Bootstrap resamples");
  cmd->add_option("--epochs", o.max_epochs, "Maximum training epochs");
  cmd->add_flag("--desk", o.desk, "Reduced spectral grid and inception widths");
  cmd->add_flag("-v,--verbose", o.verbose, "Per-epoch progress on stderr");
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Significant wave height forecasting"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Parse, clean and resample an NDBC stdmet file");
  ingest->add_option("--input", o.input, "NDBC stdmet text file")->required();
  ingest->add_option("--station", o.station, "Station id (default: file stem)");
  ingest->add_option("--window-size", o.window_size, "Largest window the segment must support twice");
  ingest->add_option("--out-dir", o.out_dir, "Output directory");

  auto* synth = app.add_subcommand("synth", "Write the synthetic benchmark series");
  synth->add_option("--points", o.points, "Hourly rows");
  synth->add_option("--seed", o.seed, "Noise seed");
  synth->add_option("--out-dir", o.out_dir, "Output directory");

  auto* train = app.add_subcommand("train", "Train one model per horizon");
  add_model_flags(train, o);

  auto* evaluate = app.add_subcommand("evaluate", "Metrics, intervals and significance tests on the test split");
  add_model_flags(evaluate, o);
  evaluate->add_option("--models", o.models_dir, "Directory written by train");
  evaluate->add_option("--external", o.externals, "Extra forecasts: NAME[:HORIZON]=CSV");

  auto* ablate = app.add_subcommand("ablate", "Train and score the ablation variants");
  add_model_flags(ablate, o);

  auto* sweep = app.add_subcommand("sweep", "Window-size sensitivity");
  add_model_flags(sweep, o);
  sweep->add_option("--windows", o.windows, "Window sizes")->delimiter(',');

  auto* spectral = app.add_subcommand("spectral", "Inspect spectral features");
  spectral->require_subcommand(1);
  auto* dump = spectral->add_subcommand("dump", "Spectrum, periods, period maps and scalogram of one window");
  add_model_flags(dump, o);
  dump->add_option("--index", o.index, "Training window index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return cmd_ingest(o);
    if (*synth) return cmd_synth(o);
    if (*train) return cmd_train(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*ablate) return cmd_ablate(o);
    if (*sweep) return cmd_sweep(o);
    if (*dump) return cmd_spectral_dump(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
