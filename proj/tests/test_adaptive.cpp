#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "anc/adaptive.hpp"
#include "anc/errors.hpp"
#include "anc/rng.hpp"
#include "anc/sim.hpp"

using anc::cdouble;
using anc::NlmsConfig;
using anc::SignalBuffer;

namespace {

SignalBuffer white(std::size_t n, std::uint64_t seed, double rate = 16000.0) {
  anc::Rng rng(seed);
  SignalBuffer x;
  x.sample_rate_hz = rate;
  x.samples.resize(n);
  for (auto& v : x.samples) v = rng.gaussian();
  return x;
}

const anc::PathModel kDelta{{1.0}, "delta"};

}  // namespace

TEST_CASE("nlms step contracts the a-posteriori error for mu <= 1") {
  anc::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = 4 + static_cast<std::size_t>(rng.uniform() * 60);
    std::vector<double> w(len), u(len);
    for (auto& v : w) v = rng.gaussian();
    for (auto& v : u) v = rng.gaussian();
    const double d = rng.gaussian() * 3.0;
    const double mu = 0.05 + 0.95 * rng.uniform();

    double e_pre = d;
    for (std::size_t j = 0; j < len; ++j) e_pre -= w[j] * u[j];
    anc::nlms_step(w, u, e_pre, mu, 1e-6);
    double e_post = d;
    for (std::size_t j = 0; j < len; ++j) e_post -= w[j] * u[j];
    CHECK(std::abs(e_post) <= std::abs(e_pre) + 1e-12);
  }
}

TEST_CASE("complex nlms step contracts as well") {
  anc::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = 4 + static_cast<std::size_t>(rng.uniform() * 60);
    std::vector<cdouble> w(len), u(len);
    for (auto& v : w) v = {rng.gaussian(), rng.gaussian()};
    for (auto& v : u) v = {rng.gaussian(), rng.gaussian()};
    const cdouble d{rng.gaussian(), rng.gaussian()};
    const double mu = 0.05 + 0.95 * rng.uniform();

    cdouble e_pre = d;
    for (std::size_t j = 0; j < len; ++j) e_pre -= w[j] * u[j];
    anc::cnlms_step(w, u, e_pre, mu, 1e-6);
    cdouble e_post = d;
    for (std::size_t j = 0; j < len; ++j) e_post -= w[j] * u[j];
    CHECK(std::abs(e_post) <= std::abs(e_pre) + 1e-12);
  }
}

TEST_CASE("zero disturbance keeps fullband weights at the zero fixed point") {
  const SignalBuffer r = white(8000, 1);
  SignalBuffer d;
  d.sample_rate_hz = 16000.0;
  d.samples.assign(8000, 0.0);
  const auto run = anc::fullband_fxnlms(r, d, kDelta, kDelta, NlmsConfig{0.01, 1e-6, 64, 1});
  for (double v : run.final_weights.weights) CHECK(v == 0.0);
  for (double v : run.error.samples) CHECK(v == 0.0);
}

TEST_CASE("fullband fxnlms converges to the wiener solution") {
  // white reference through a known 32-tap path, ideal secondary path
  const SignalBuffer r = white(160000, 2);
  anc::Rng rng(3);
  anc::PathModel primary;
  primary.impulse_response.resize(32);
  for (auto& v : primary.impulse_response) v = rng.gaussian() * 0.3;
  const SignalBuffer d = anc::apply_path(primary, r);

  NlmsConfig cfg;
  cfg.fullband_length_L = 64;
  const auto run = anc::fullband_fxnlms(r, d, kDelta, kDelta, cfg);
  const anc::FullbandFilter oracle = anc::wiener_oracle(r, d, 64, kDelta);

  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < 64; ++k) {
    const double delta = run.final_weights.weights[k] - oracle.weights[k];
    err += delta * delta;
    ref += oracle.weights[k] * oracle.weights[k];
  }
  CHECK(10.0 * std::log10(err / ref) < -30.0);
}

TEST_CASE("default configuration is accepted and mismatches are rejected") {
  NlmsConfig cfg;  // mu = 0.01, eps = 1e-6, L = 1024
  CHECK_NOTHROW(cfg.validate(4));
  cfg.fullband_length_L = 1022;
  CHECK_THROWS_AS(cfg.validate(4), anc::ConfigError);

  const SignalBuffer r = white(100, 4);
  const SignalBuffer d = white(101, 5);
  CHECK_THROWS_AS(anc::fullband_fxnlms(r, d, kDelta, kDelta, NlmsConfig{}),
                  anc::DimensionError);
}

TEST_CASE("saf with zero reference leaves subband weights at zero") {
  const anc::AnalysisBank bank = anc::make_analysis_bank(8, 128);
  SignalBuffer r;
  r.sample_rate_hz = 16000.0;
  r.samples.assign(16000, 0.0);
  const SignalBuffer d = white(16000, 6);

  const auto run = anc::saf_fxnlms(r, d, kDelta, kDelta, bank, NlmsConfig{});
  for (const auto& wm : run.final_subband_filters.weights)
    for (const cdouble v : wm) CHECK(std::abs(v) == 0.0);
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    CHECK(run.error.samples[i] == d.samples[i]);
}

TEST_CASE("one second of input at D=4 produces exactly 4000 update steps") {
  const anc::AnalysisBank bank = anc::make_analysis_bank(8, 128);
  const SignalBuffer r = white(16000, 7);
  const SignalBuffer d = white(16000, 8);
  const auto run = anc::saf_fxnlms(r, d, kDelta, kDelta, bank, NlmsConfig{});
  CHECK(run.update_steps == 4000);
  CHECK(run.stack_events == 4000);  // stack_stride = 1
}

TEST_CASE("subband update order does not change the result") {
  const anc::AnalysisBank bank = anc::make_analysis_bank(8, 128);
  const anc::BandSpec spec{{{500.0, 6000.0}}, {}};
  const SignalBuffer r = anc::gen_bandlimited_noise(spec, 1.0, 16000.0, 9);
  anc::PathModel primary = anc::design_bandpass_path(20.0, 7900.0, 64, 8, 1, 16000.0);
  const SignalBuffer d = anc::apply_path(primary, r);

  NlmsConfig cfg;
  cfg.fullband_length_L = 256;
  const std::vector<int> reversed = {4, 3, 2, 1, 0};
  const auto a = anc::saf_fxnlms(r, d, kDelta, kDelta, bank, cfg);
  const auto b = anc::saf_fxnlms(r, d, kDelta, kDelta, bank, cfg, reversed);

  CHECK(a.error.samples == b.error.samples);
  for (std::size_t m = 0; m < a.final_subband_filters.weights.size(); ++m)
    CHECK(a.final_subband_filters.weights[m] == b.final_subband_filters.weights[m]);
}

TEST_CASE("adaptive runs are deterministic") {
  const anc::AnalysisBank bank = anc::make_analysis_bank(8, 128);
  const anc::BandSpec spec{{{1000.0, 4000.0}}, {}};
  const SignalBuffer r = anc::gen_bandlimited_noise(spec, 1.0, 16000.0, 10);
  anc::PathModel primary = anc::design_bandpass_path(20.0, 7900.0, 64, 8, 2, 16000.0);
  const SignalBuffer d = anc::apply_path(primary, r);

  NlmsConfig cfg;
  cfg.fullband_length_L = 512;
  const auto a = anc::saf_fxnlms(r, d, kDelta, kDelta, bank, cfg);
  const auto b = anc::saf_fxnlms(r, d, kDelta, kDelta, bank, cfg);
  CHECK(a.error.samples == b.error.samples);
  CHECK(a.final_weights.weights == b.final_weights.weights);
}

TEST_CASE("stacked filter matches the subband filters at their own bins") {
  const anc::AnalysisBank bank = anc::make_analysis_bank(8, 128);
  const anc::BandSpec spec{{{500.0, 7000.0}}, {}};
  const SignalBuffer r = anc::gen_bandlimited_noise(spec, 4.0, 16000.0, 11);
  anc::PathModel primary = anc::design_bandpass_path(20.0, 7900.0, 96, 12, 3, 16000.0);
  const SignalBuffer d = anc::apply_path(primary, r);

  NlmsConfig cfg;
  const auto run = anc::saf_fxnlms(r, d, kDelta, kDelta, bank, cfg);

  // FFT of the stacked filter must reproduce the subband filters' bins that
  // the stacking rule selects.
  anc::Fft fft_full(1024);
  std::vector<cdouble> W(1024);
  for (std::size_t i = 0; i < 1024; ++i) W[i] = {run.final_weights.weights[i], 0.0};
  fft_full.forward(W);

  anc::Fft fft_sub(256);
  std::vector<std::vector<cdouble>> Wm(5);
  for (std::size_t m = 0; m < 5; ++m) {
    Wm[m] = run.final_subband_filters.weights[m];
    fft_sub.forward(Wm[m]);
  }

  double peak = 0.0;
  for (int l = 0; l < 512; ++l)
    peak = std::max(peak, std::abs(W[static_cast<std::size_t>(l)]));
  for (int l = 0; l < 512; ++l) {
    const int m = anc::WeightStacker::subband_for_bin(l, 1024, 8);
    const int f = anc::WeightStacker::bin_within_subband(l, 1024, 8);
    const cdouble expected = Wm[static_cast<std::size_t>(m)][static_cast<std::size_t>(f)];
    if (std::abs(expected) > 0.1 * peak) {
      const double ratio_db = 20.0 * std::log10(std::abs(W[static_cast<std::size_t>(l)]) /
                                                std::abs(expected));
      CHECK(std::abs(ratio_db) < 1.0);
    }
  }
}
