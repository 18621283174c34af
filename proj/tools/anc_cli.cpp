// ancsim: train, run, compare, validate-eq6, inspect.
//
// One JSON config file carries the full experiment parameter set; every
// command is deterministic given the config and seeds. Exit codes:
// 0 success, 1 tolerance/convergence failure, 2 usage or config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "anc/controllers.hpp"
#include "anc/errors.hpp"
#include "anc/sim.hpp"
#include "anc/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void config_fail(const std::string& msg) {
  throw anc::ConfigError(msg);
}

void expect_keys(const json& node, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (const auto& [key, value] : node.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) config_fail("unknown key '" + key + "' in " + where);
  }
}

struct CliConfig {
  double sample_rate_hz = 16000.0;
  int num_bands_M = 8;
  int prototype_len_K = 128;
  anc::NlmsConfig nlms;  // L=1024, mu=0.01, eps=1e-6, stride=1
  anc::FeatureConfig subband_features{64, 128, 0.5, anc::Window::hann};
  anc::FeatureConfig fullband_features{256, 512, 0.5, anc::Window::hann};
  struct PathSpec {
    double f_lo_hz, f_hi_hz;
    int num_taps, delay_taps;
    double perturb;
    std::uint64_t seed;
  };
  PathSpec primary{20.0, 7900.0, 256, 32, 0.05, 101};
  PathSpec secondary{20.0, 7900.0, 128, 16, 0.05, 202};
  double training_duration_s = 12.0;
  double min_final_nr_db = 10.0;
  std::uint64_t training_seed = 42;
  std::vector<anc::BandSpec> training_noises = {
      anc::BandSpec{{{20.0, 7980.0}}, {}},
      anc::BandSpec{{{500.0, 2000.0}, {3000.0, 6000.0}, {7000.0, 7500.0}}, {}},
      anc::BandSpec{
          {{20.0, 1000.0}, {2000.0, 5000.0}, {5500.0, 7000.0}, {7300.0, 7980.0}},
          {}},
  };
  double scenario_snr_db = 20.0;
  std::uint64_t noise_seed = 1;
  std::uint64_t measurement_seed = 2;
  std::vector<anc::ScenarioSegment> segments = {
      {anc::BandSpec{{{500.0, 2000.0}, {3000.0, 6000.0}, {7000.0, 7500.0}}, {}},
       12.0},
      {anc::BandSpec{{{20.0, 1000.0}, {2000.0, 5000.0}, {6000.0, 7980.0}}, {}},
       12.0},
  };
  std::string output_dir = "out";
  json echo;  // parsed document, echoed into summaries
};

anc::Window parse_window(const std::string& name) {
  if (name == "hann") return anc::Window::hann;
  if (name == "hamming") return anc::Window::hamming;
  if (name == "rect") return anc::Window::rect;
  config_fail("unknown window '" + name + "'");
}

anc::BandSpec parse_bandspec(const json& node, const std::string& where,
                             std::initializer_list<const char*> allowed = {"bands",
                                                                           "gains"}) {
  expect_keys(node, allowed, where);
  if (!node.contains("bands")) config_fail(where + " needs a 'bands' array");
  anc::BandSpec spec;
  for (const auto& pair : node.at("bands")) {
    if (!pair.is_array() || pair.size() != 2)
      config_fail(where + ": each band is a [lo_hz, hi_hz] pair");
    spec.bands.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  if (node.contains("gains"))
    spec.gains = node.at("gains").get<std::vector<double>>();
  return spec;
}

anc::FeatureConfig parse_features(const json& node, const std::string& where,
                                  anc::FeatureConfig defaults) {
  expect_keys(node, {"segment_len", "fft_len", "overlap", "window"}, where);
  anc::FeatureConfig cfg = defaults;
  if (node.contains("segment_len")) cfg.segment_len = node.at("segment_len").get<int>();
  if (node.contains("fft_len")) cfg.fft_len_V = node.at("fft_len").get<int>();
  if (node.contains("overlap")) cfg.overlap_fraction = node.at("overlap").get<double>();
  if (node.contains("window"))
    cfg.window = parse_window(node.at("window").get<std::string>());
  cfg.validate();
  return cfg;
}

CliConfig::PathSpec parse_path(const json& node, const std::string& where,
                               CliConfig::PathSpec defaults) {
  expect_keys(node, {"f_lo_hz", "f_hi_hz", "num_taps", "delay_taps", "perturb", "seed"},
              where);
  CliConfig::PathSpec p = defaults;
  if (node.contains("f_lo_hz")) p.f_lo_hz = node.at("f_lo_hz").get<double>();
  if (node.contains("f_hi_hz")) p.f_hi_hz = node.at("f_hi_hz").get<double>();
  if (node.contains("num_taps")) p.num_taps = node.at("num_taps").get<int>();
  if (node.contains("delay_taps")) p.delay_taps = node.at("delay_taps").get<int>();
  if (node.contains("perturb")) p.perturb = node.at("perturb").get<double>();
  if (node.contains("seed")) p.seed = node.at("seed").get<std::uint64_t>();
  return p;
}

CliConfig load_config(const std::string& path) {
  CliConfig cfg;
  if (path.empty()) {
    cfg.echo = json::object();
    return cfg;
  }
  std::ifstream f(path);
  if (!f) config_fail("cannot open config file: " + path);
  json doc;
  try {
    f >> doc;
  } catch (const json::parse_error& e) {
    config_fail(std::string("config is not valid JSON: ") + e.what());
  }
  cfg.echo = doc;

  expect_keys(doc,
              {"schema_version", "sample_rate_hz", "bank", "control", "features",
               "paths", "training", "scenario", "output_dir"},
              "config root");
  if (doc.contains("schema_version") &&
      doc.at("schema_version").get<int>() != kSchemaVersion)
    config_fail("unsupported schema_version");
  if (doc.contains("sample_rate_hz"))
    cfg.sample_rate_hz = doc.at("sample_rate_hz").get<double>();
  if (doc.contains("bank")) {
    const json& bank = doc.at("bank");
    expect_keys(bank, {"num_bands", "prototype_len"}, "bank");
    if (bank.contains("num_bands")) cfg.num_bands_M = bank.at("num_bands").get<int>();
    if (bank.contains("prototype_len"))
      cfg.prototype_len_K = bank.at("prototype_len").get<int>();
  }
  if (doc.contains("control")) {
    const json& ctl = doc.at("control");
    expect_keys(ctl, {"filter_len", "step_size", "regularizer", "stack_stride"},
                "control");
    if (ctl.contains("filter_len"))
      cfg.nlms.fullband_length_L = ctl.at("filter_len").get<int>();
    if (ctl.contains("step_size"))
      cfg.nlms.step_size_mu = ctl.at("step_size").get<double>();
    if (ctl.contains("regularizer"))
      cfg.nlms.regularizer_eps = ctl.at("regularizer").get<double>();
    if (ctl.contains("stack_stride"))
      cfg.nlms.stack_stride = ctl.at("stack_stride").get<int>();
  }
  if (doc.contains("features")) {
    const json& feat = doc.at("features");
    expect_keys(feat, {"subband", "fullband"}, "features");
    if (feat.contains("subband"))
      cfg.subband_features =
          parse_features(feat.at("subband"), "features.subband", cfg.subband_features);
    if (feat.contains("fullband"))
      cfg.fullband_features = parse_features(feat.at("fullband"), "features.fullband",
                                             cfg.fullband_features);
  }
  if (doc.contains("paths")) {
    const json& paths = doc.at("paths");
    expect_keys(paths, {"primary", "secondary"}, "paths");
    if (paths.contains("primary"))
      cfg.primary = parse_path(paths.at("primary"), "paths.primary", cfg.primary);
    if (paths.contains("secondary"))
      cfg.secondary =
          parse_path(paths.at("secondary"), "paths.secondary", cfg.secondary);
  }
  if (doc.contains("training")) {
    const json& tr = doc.at("training");
    expect_keys(tr, {"duration_s", "min_final_nr_db", "seed", "noises"}, "training");
    if (tr.contains("duration_s")) cfg.training_duration_s = tr.at("duration_s").get<double>();
    if (tr.contains("min_final_nr_db"))
      cfg.min_final_nr_db = tr.at("min_final_nr_db").get<double>();
    if (tr.contains("seed")) cfg.training_seed = tr.at("seed").get<std::uint64_t>();
    if (tr.contains("noises")) {
      cfg.training_noises.clear();
      for (const auto& n : tr.at("noises"))
        cfg.training_noises.push_back(parse_bandspec(n, "training.noises[]"));
    }
  }
  if (doc.contains("scenario")) {
    const json& sc = doc.at("scenario");
    expect_keys(sc, {"snr_db", "noise_seed", "measurement_seed", "segments"},
                "scenario");
    if (sc.contains("snr_db")) {
      if (sc.at("snr_db").is_string() && sc.at("snr_db").get<std::string>() == "clean")
        cfg.scenario_snr_db = std::numeric_limits<double>::infinity();
      else
        cfg.scenario_snr_db = sc.at("snr_db").get<double>();
    }
    if (sc.contains("noise_seed"))
      cfg.noise_seed = sc.at("noise_seed").get<std::uint64_t>();
    if (sc.contains("measurement_seed"))
      cfg.measurement_seed = sc.at("measurement_seed").get<std::uint64_t>();
    if (sc.contains("segments")) {
      cfg.segments.clear();
      for (const auto& seg : sc.at("segments")) {
        anc::ScenarioSegment s;
        s.bands = parse_bandspec(seg, "scenario.segments[]",
                                 {"bands", "gains", "duration_s"});
        if (!seg.contains("duration_s"))
          config_fail("scenario segments need duration_s");
        s.duration_s = seg.at("duration_s").get<double>();
        cfg.segments.push_back(std::move(s));
      }
    }
  }
  if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
  return cfg;
}

struct Experiment {
  anc::AnalysisBank bank;
  anc::PathModel primary;
  anc::PathModel secondary;
  anc::TrainingSpec training;
  anc::ScenarioConfig scenario;
};

Experiment build_experiment(const CliConfig& cfg) {
  Experiment e{anc::make_analysis_bank(cfg.num_bands_M, cfg.prototype_len_K),
               anc::design_bandpass_path(cfg.primary.f_lo_hz, cfg.primary.f_hi_hz,
                                         cfg.primary.num_taps, cfg.primary.delay_taps,
                                         cfg.primary.seed, cfg.sample_rate_hz,
                                         cfg.primary.perturb),
               anc::design_bandpass_path(cfg.secondary.f_lo_hz, cfg.secondary.f_hi_hz,
                                         cfg.secondary.num_taps,
                                         cfg.secondary.delay_taps, cfg.secondary.seed,
                                         cfg.sample_rate_hz, cfg.secondary.perturb),
               {},
               {}};
  e.training.training_noises = cfg.training_noises;
  e.training.duration_s = cfg.training_duration_s;
  e.training.sample_rate_hz = cfg.sample_rate_hz;
  e.training.primary = e.primary;
  e.training.secondary = e.secondary;
  e.training.secondary_estimate = e.secondary;  // ideal estimate
  e.training.nlms = cfg.nlms;
  e.training.features = cfg.subband_features;
  e.training.min_final_nr_db = cfg.min_final_nr_db;
  e.training.seed = cfg.training_seed;

  e.scenario.segments = cfg.segments;
  e.scenario.sample_rate_hz = cfg.sample_rate_hz;
  e.scenario.snr_db = cfg.scenario_snr_db;
  e.scenario.primary = e.primary;
  e.scenario.secondary = e.secondary;
  e.scenario.noise_seed = cfg.noise_seed;
  e.scenario.measurement_seed = cfg.measurement_seed;
  return e;
}

fs::path resolve_out_dir(const CliConfig& cfg, const std::string& override_dir) {
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("ANCSIM_OUT_DIR")) dir = env;
  if (!override_dir.empty()) dir = override_dir;
  fs::create_directories(dir);
  return dir;
}

anc::Algorithm parse_algo(const std::string& name) {
  if (name == "off") return anc::Algorithm::anc_off;
  if (name == "saf") return anc::Algorithm::saf_fxnlms;
  if (name == "sfanc") return anc::Algorithm::sfanc;
  if (name == "sasfanc") return anc::Algorithm::sa_sfanc;
  config_fail("unknown algorithm '" + name + "'");
}

const char* algo_name(anc::Algorithm a) {
  switch (a) {
    case anc::Algorithm::anc_off: return "off";
    case anc::Algorithm::saf_fxnlms: return "saf";
    case anc::Algorithm::sfanc: return "sfanc";
    case anc::Algorithm::sa_sfanc: return "sasfanc";
  }
  return "?";
}

void write_error_csv(const fs::path& path, const anc::RunResult& rr) {
  std::ofstream f(path);
  f << "sample,d,e\n";
  char line[96];
  for (std::size_t i = 0; i < rr.error.samples.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g\n", i,
                  rr.disturbance.samples[i], rr.error.samples[i]);
    f << line;
  }
}

json summarize(const anc::RunResult& rr, anc::Algorithm algo, const CliConfig& cfg) {
  json selections = json::array();
  for (const auto& frame : rr.selections) {
    json entry;
    entry["frame"] = frame.frame_index;
    entry["selected"] = frame.selected_indices;
    entry["scores"] = frame.scores;
    selections.push_back(entry);
  }
  double mean_nr = 0.0;
  for (double v : rr.nr_per_second_db) mean_nr += v;
  if (!rr.nr_per_second_db.empty())
    mean_nr /= static_cast<double>(rr.nr_per_second_db.size());
  json out;
  out["schema_version"] = kSchemaVersion;
  out["algo"] = algo_name(algo);
  out["nr_per_second_db"] = rr.nr_per_second_db;
  out["mean_nr_db"] = mean_nr;
  out["frame_count"] = rr.nr_per_second_db.size();
  out["selections"] = selections;
  out["update_steps"] = rr.update_steps;
  out["selection_events"] = rr.selection_events;
  out["stack_events"] = rr.stack_events;
  // wall time goes to stdout only: summary files must be byte-identical
  // across reruns with the same config and seeds
  out["seeds"] = {{"noise", cfg.noise_seed},
                  {"measurement", cfg.measurement_seed},
                  {"training", cfg.training_seed}};
  out["config"] = cfg.echo;
  return out;
}

int cmd_train(const std::string& config_path, const std::string& out_path,
              const std::string& sfanc_path) {
  const CliConfig cfg = load_config(config_path);
  const Experiment exp = build_experiment(cfg);

  std::vector<double> nr;
  const anc::SubbandDatabase db = anc::train_sa_sfanc(exp.training, exp.bank, &nr);
  db.save(out_path);
  for (std::size_t i = 0; i < nr.size(); ++i)
    std::printf("noise %zu: final-second NR %.2f dB\n", i, nr[i]);
  std::printf("wrote %s (%zu records, %zu weight bytes)\n", out_path.c_str(),
              db.record_count(), db.weight_payload_bytes());

  if (!sfanc_path.empty()) {
    const auto bands = anc::sfanc_training_bands(
        exp.training.training_noises, exp.bank.num_bands(), cfg.sample_rate_hz);
    std::vector<double> fnr;
    const anc::FullbandDatabase fdb =
        anc::train_sfanc(exp.training, bands, cfg.fullband_features, &fnr);
    fdb.save(sfanc_path);
    for (std::size_t i = 0; i < fnr.size(); ++i)
      std::printf("sfanc band %zu: final-second NR %.2f dB\n", i, fnr[i]);
    std::printf("wrote %s (%zu records)\n", sfanc_path.c_str(), fdb.size());
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& db_path,
            const std::string& fdb_path, const std::string& algo_name_str,
            const std::string& wav_path, const std::string& out_dir_flag,
            int snapshot_every) {
  const CliConfig cfg = load_config(config_path);
  Experiment exp = build_experiment(cfg);
  exp.scenario.algo = parse_algo(algo_name_str);

  anc::SubbandDatabase db;
  anc::FullbandDatabase fdb;
  anc::ScenarioResources res;
  res.bank = &exp.bank;
  res.nlms = cfg.nlms;
  res.nlms.snapshot_every = snapshot_every;
  if (exp.scenario.algo == anc::Algorithm::sa_sfanc) {
    if (db_path.empty()) config_fail("--db is required for sasfanc");
    db = anc::SubbandDatabase::load(db_path);
    res.subband_db = &db;
  }
  if (exp.scenario.algo == anc::Algorithm::sfanc) {
    if (fdb_path.empty()) config_fail("--fdb is required for sfanc");
    fdb = anc::FullbandDatabase::load(fdb_path);
    res.fullband_db = &fdb;
  }

  anc::RunResult rr;
  if (!wav_path.empty()) {
    const anc::SignalBuffer x = anc::load_wav(wav_path);
    if (std::llround(x.sample_rate_hz) != std::llround(cfg.sample_rate_hz))
      throw anc::WavRateError("WAV rate " + std::to_string(x.sample_rate_hz) +
                              " Hz does not match the configured rate " +
                              std::to_string(cfg.sample_rate_hz) + " Hz");
    rr = anc::run_scenario_signal(x, exp.scenario, res);
  } else {
    rr = anc::run_scenario(exp.scenario, res);
  }

  const fs::path dir = resolve_out_dir(cfg, out_dir_flag);
  const std::string stem = std::string("run_") + algo_name(exp.scenario.algo);
  write_error_csv(dir / (stem + ".csv"), rr);
  std::ofstream(dir / (stem + ".json")) << summarize(rr, exp.scenario.algo, cfg).dump(2)
                                        << "\n";
  if (!rr.selections.empty()) {
    // one JSON object per frame for streaming diagnostics
    std::ofstream jsonl(dir / (stem + ".selections.jsonl"));
    for (const auto& frame : rr.selections) {
      json line;
      line["frame"] = frame.frame_index;
      line["selected"] = frame.selected_indices;
      line["scores"] = frame.scores;
      jsonl << line.dump() << "\n";
    }
  }
  if (!rr.weight_snapshots.empty()) {
    std::ofstream snap(dir / (stem + ".weights.csv"));
    for (const auto& [sample, filter] : rr.weight_snapshots) {
      snap << sample;
      char cell[32];
      for (double v : filter.weights) {
        std::snprintf(cell, sizeof(cell), ",%.9g", v);
        snap << cell;
      }
      snap << "\n";
    }
  }
  double mean = 0.0;
  for (double v : rr.nr_per_second_db) mean += v;
  mean /= std::max<std::size_t>(1, rr.nr_per_second_db.size());
  std::printf("%s: mean NR %.2f dB over %zu s (%.2f s wall), outputs in %s\n",
              algo_name(exp.scenario.algo), mean, rr.nr_per_second_db.size(),
              rr.runtime_s, dir.string().c_str());
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& db_path,
                const std::string& fdb_path, const std::string& out_dir_flag) {
  const CliConfig cfg = load_config(config_path);
  Experiment exp = build_experiment(cfg);

  if (db_path.empty() || fdb_path.empty())
    config_fail("compare needs --db and --fdb");
  const anc::SubbandDatabase db = anc::SubbandDatabase::load(db_path);
  const anc::FullbandDatabase fdb = anc::FullbandDatabase::load(fdb_path);
  anc::ScenarioResources res;
  res.bank = &exp.bank;
  res.nlms = cfg.nlms;
  res.subband_db = &db;
  res.fullband_db = &fdb;

  const anc::Algorithm algos[] = {anc::Algorithm::anc_off, anc::Algorithm::saf_fxnlms,
                                  anc::Algorithm::sfanc, anc::Algorithm::sa_sfanc};
  json table = json::object();
  std::vector<std::vector<double>> traces;
  for (const anc::Algorithm algo : algos) {
    exp.scenario.algo = algo;
    const anc::RunResult rr = anc::run_scenario(exp.scenario, res);
    table[algo_name(algo)] = summarize(rr, algo, cfg);
    traces.push_back(rr.nr_per_second_db);
  }

  const fs::path dir = resolve_out_dir(cfg, out_dir_flag);
  std::ofstream(dir / "compare.json") << table.dump(2) << "\n";

  std::printf("second |   off |   saf | sfanc | sasfanc\n");
  for (std::size_t t = 0; t < traces[0].size(); ++t)
    std::printf("%6zu | %5.1f | %5.1f | %5.1f | %7.1f\n", t, traces[0][t],
                traces[1][t], traces[2][t], traces[3][t]);
  return 0;
}

int cmd_validate_eq6(double bt, double bc, double centre, double snr, int seeds,
                     double duration) {
  const anc::MseReport report =
      anc::validate_eq6(bt, bc, centre, snr, seeds, duration);
  const double excess = report.empirical_mse - report.mmse;
  const double predicted_excess = report.predicted_mse - report.mmse;

  bool pass;
  std::string rule;
  if (bt == bc) {
    pass = std::abs(report.empirical_mse - report.mmse) <= 0.10 * report.mmse;
    rule = "matched bands: empirical within 10% of mmse";
  } else if (report.sigma_q2 == 0.0) {
    pass = std::abs(excess) <= std::max(0.10 * report.mmse, 1e-6);
    rule = "clean reference: excess zero at measurement resolution";
  } else {
    pass = std::abs(excess - predicted_excess) <= 0.20 * predicted_excess;
    rule = "excess within 20% of (sigma_q^2/pi)(B_t - B_c)";
  }

  json out;
  out["schema_version"] = kSchemaVersion;
  out["empirical_mse"] = report.empirical_mse;
  out["predicted_mse"] = report.predicted_mse;
  out["mmse"] = report.mmse;
  out["excess"] = excess;
  out["predicted_excess"] = predicted_excess;
  out["band_t_rad"] = report.band_t_rad;
  out["band_c_rad"] = report.band_c_rad;
  out["sigma_q2"] = report.sigma_q2;
  out["rule"] = rule;
  out["pass"] = pass;
  std::cout << out.dump(2) << "\n";
  return pass ? 0 : 1;
}

int cmd_inspect(const std::string& db_path, const std::string& fdb_path,
                bool bank_flag, bool bank_coeffs, const std::string& config_path) {
  if (!db_path.empty()) {
    const anc::SubbandDatabase db = anc::SubbandDatabase::load(db_path);
    const anc::DbMeta& m = db.meta();
    json out;
    out["kind"] = "subband";
    out["L"] = m.fullband_length_L;
    out["M"] = m.num_bands_M;
    out["D"] = m.decimation_D;
    out["L_s"] = m.subband_length_Ls;
    out["V"] = m.psd_bins_V;
    out["sample_rate_hz"] = m.sample_rate_hz;
    out["prototype_hash"] = m.prototype_hash;
    out["noises_I"] = m.num_noises_I;
    out["weight_payload_bytes"] = db.weight_payload_bytes();
    json records = json::array();
    for (int i = 0; i < m.num_noises_I; ++i) {
      for (int sb = 0; sb <= m.num_bands_M / 2; ++sb) {
        const auto& rec = db.at(i, sb);
        records.push_back({{"i", rec.noise_index_i},
                           {"m", rec.subband_m},
                           {"signature_occupancy",
                            static_cast<double>(rec.signature.popcount()) /
                                static_cast<double>(m.psd_bins_V)}});
      }
    }
    out["records"] = records;
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  if (!fdb_path.empty()) {
    const anc::FullbandDatabase db = anc::FullbandDatabase::load(fdb_path);
    json out;
    out["kind"] = "fullband";
    out["L"] = db.meta().fullband_length_L;
    out["V"] = db.meta().psd_bins_V;
    out["records"] = json::array();
    for (const auto& rec : db.records())
      out["records"].push_back(
          {{"index", rec.filter_index},
           {"signature_occupancy",
            static_cast<double>(rec.signature.popcount()) /
                static_cast<double>(db.meta().psd_bins_V)}});
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  if (bank_flag || bank_coeffs) {
    const CliConfig cfg = load_config(config_path);
    const anc::AnalysisBank bank =
        anc::make_analysis_bank(cfg.num_bands_M, cfg.prototype_len_K);
    const auto& a = bank.prototype.coeffs;
    if (bank_coeffs) {
      std::printf("tap,value\n");
      for (std::size_t k = 0; k < a.size(); ++k)
        std::printf("%zu,%.12g\n", k, a[k]);
      return 0;
    }
    // magnitude responses of the retained subband filters on 8192 points
    std::printf("freq_hz");
    for (int m = 0; m <= cfg.num_bands_M / 2; ++m) std::printf(",band%d_db", m);
    std::printf("\n");
    const int points = 8192;
    for (int i = 0; i < points; ++i) {
      const double omega = M_PI * static_cast<double>(i) / points;
      std::printf("%.2f", omega / (2.0 * M_PI) * cfg.sample_rate_hz);
      for (int m = 0; m <= cfg.num_bands_M / 2; ++m) {
        const double shift = 2.0 * M_PI * m / cfg.num_bands_M;
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          const double ang = -(omega - shift) * static_cast<double>(k);
          re += a[k] * std::cos(ang);
          im += a[k] * std::sin(ang);
        }
        std::printf(",%.3f", 20.0 * std::log10(std::max(std::hypot(re, im), 1e-15)));
      }
      std::printf("\n");
    }
    return 0;
  }
  config_fail("inspect needs --db, --fdb, --bank, or --bank-coeffs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SA-SFANC simulation harness"};
  app.require_subcommand(1);

  std::string config_path, out_path, sfanc_path, db_path, fdb_path;
  std::string algo = "sasfanc", wav_path, out_dir;
  bool bank_flag = false, bank_coeffs = false;
  double bt = 2000.0, bc = 1000.0, centre = 2000.0, snr = 20.0, duration = 10.0;
  int seeds = 10, snapshot_every = 0;

  CLI::App* train = app.add_subcommand("train", "Run the off-line training stage");
  train->add_option("--config", config_path, "JSON config file");
  train->add_option("--out", out_path, "Subband database output path")->required();
  train->add_option("--sfanc", sfanc_path, "Also train the fullband baseline");

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--db", db_path, "Subband database path");
  run->add_option("--fdb", fdb_path, "Fullband database path");
  run->add_option("--algo", algo, "off | saf | sfanc | sasfanc");
  run->add_option("--wav", wav_path, "Use a WAV file as the primary noise");
  run->add_option("--out-dir", out_dir, "Output directory override");
  run->add_option("--snapshot-every", snapshot_every,
                  "Dump adaptive weights every N samples (saf only)");

  CLI::App* compare = app.add_subcommand("compare", "Run all four algorithms");
  compare->add_option("--config", config_path, "JSON config file");
  compare->add_option("--db", db_path, "Subband database path")->required();
  compare->add_option("--fdb", fdb_path, "Fullband database path")->required();
  compare->add_option("--out-dir", out_dir, "Output directory override");

  CLI::App* eq6 = app.add_subcommand("validate-eq6", "Check the excess-MSE analysis");
  eq6->add_option("--bt-hz", bt, "Training bandwidth (full width, Hz)");
  eq6->add_option("--bc-hz", bc, "Control bandwidth (full width, Hz)");
  eq6->add_option("--center-hz", centre, "Shared centre frequency (Hz)");
  eq6->add_option("--snr-db", snr, "Measurement SNR (dB; inf = clean)");
  eq6->add_option("--seeds", seeds, "Monte-Carlo seed count");
  eq6->add_option("--duration-s", duration, "Per-seed signal duration");

  CLI::App* inspect = app.add_subcommand("inspect", "Describe a database or the bank");
  inspect->add_option("--config", config_path, "JSON config file");
  inspect->add_option("--db", db_path, "Subband database path");
  inspect->add_option("--fdb", fdb_path, "Fullband database path");
  inspect->add_flag("--bank", bank_flag, "Emit bank frequency responses as CSV");
  inspect->add_flag("--bank-coeffs", bank_coeffs, "Emit prototype taps as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, out_path, sfanc_path);
    if (run->parsed())
      return cmd_run(config_path, db_path, fdb_path, algo, wav_path, out_dir,
                     snapshot_every);
    if (compare->parsed()) return cmd_compare(config_path, db_path, fdb_path, out_dir);
    if (eq6->parsed()) return cmd_validate_eq6(bt, bc, centre, snr, seeds, duration);
    if (inspect->parsed())
      return cmd_inspect(db_path, fdb_path, bank_flag, bank_coeffs, config_path);
  } catch (const anc::TrainingError& e) {
    std::cerr << "training failed: " << e.what() << "\n";
    return 1;
  } catch (const anc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
