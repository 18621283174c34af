#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "anc/errors.hpp"
#include "anc/features.hpp"
#include "anc/rng.hpp"
#include "anc/signal.hpp"

using anc::BitVector;
using anc::cdouble;
using anc::FeatureConfig;
using anc::LogPsdVector;

TEST_CASE("welch accepts the subband defaults and keeps all V bins") {
  FeatureConfig cfg;  // 64 / 128
  std::vector<cdouble> x(4000, cdouble{1.0, 0.0});
  const LogPsdVector psd = anc::welch_log_psd(std::span<const cdouble>(x), cfg);
  CHECK(psd.values.size() == 128);
}

TEST_CASE("a single complex exponential concentrates at its bin") {
  FeatureConfig cfg;
  cfg.segment_len = 64;
  cfg.fft_len_V = 128;
  const int bin = 24;  // of the 128-point grid
  std::vector<cdouble> x(4000);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double a = 2.0 * M_PI * bin * static_cast<double>(n) / 128.0;
    x[n] = {std::cos(a), std::sin(a)};
  }
  const LogPsdVector psd = anc::welch_log_psd(std::span<const cdouble>(x), cfg);
  const auto peak = std::max_element(psd.values.begin(), psd.values.end());
  CHECK(std::distance(psd.values.begin(), peak) == bin);
  for (int v = 0; v < 128; ++v) {
    if (std::abs(v - bin) > 8)
      CHECK(*peak - psd.values[static_cast<std::size_t>(v)] > 30.0);
  }
}

TEST_CASE("white complex noise gives a flat psd") {
  FeatureConfig cfg;
  anc::Rng rng(5);
  std::vector<cdouble> x(4000);
  for (auto& v : x) v = {rng.gaussian() * M_SQRT1_2, rng.gaussian() * M_SQRT1_2};
  const LogPsdVector psd = anc::welch_log_psd(std::span<const cdouble>(x), cfg);
  double mean = 0.0;
  for (double v : psd.values) mean += v;
  mean /= static_cast<double>(psd.values.size());
  for (double v : psd.values) CHECK(std::abs(v - mean) < 3.0);
  // unit-variance white input: the averaged level sits near 0 dB
  CHECK(std::abs(mean) < 1.0);
}

TEST_CASE("welch rejects too-short input and floors silence") {
  FeatureConfig cfg;
  std::vector<cdouble> tiny(10);
  CHECK_THROWS_AS(anc::welch_log_psd(std::span<const cdouble>(tiny), cfg),
                  anc::SizeError);
  std::vector<cdouble> zeros(1000, cdouble{0.0, 0.0});
  const LogPsdVector psd = anc::welch_log_psd(std::span<const cdouble>(zeros), cfg);
  for (double v : psd.values) CHECK(v == -300.0);
}

TEST_CASE("binarize follows the min-max midpoint threshold") {
  LogPsdVector p;
  p.values = {-30.0, 10.0, 9.0, -29.0};
  const BitVector bits = anc::binarize(p);
  CHECK(bits.bits == std::vector<std::uint8_t>{0, 1, 1, 0});

  LogPsdVector constant;
  constant.values.assign(16, -42.0);
  const BitVector ones = anc::binarize(constant);
  for (auto b : ones.bits) CHECK(b == 1);
}

TEST_CASE("binarize is invariant to a uniform log shift") {
  anc::Rng rng(17);
  LogPsdVector p;
  p.values.resize(128);
  for (auto& v : p.values) v = rng.gaussian() * 15.0;
  LogPsdVector shifted = p;
  for (auto& v : shifted.values) v += 23.5;
  CHECK(anc::binarize(p) == anc::binarize(shifted));
}

TEST_CASE("bit support of band-limited noise matches the rect mask near edges") {
  const anc::BandSpec spec{{{1000.0, 3000.0}}, {}};
  const anc::SignalBuffer x = anc::gen_bandlimited_noise(spec, 4.0, 16000.0, 21);
  // Unpadded segments: the window mainlobe then spans +/-2 bins, which is
  // the resolution the edge claim is stated at.
  FeatureConfig cfg;
  cfg.segment_len = 512;
  cfg.fft_len_V = 512;
  cfg.window = anc::Window::hamming;
  const BitVector bits = anc::binarize(anc::welch_log_psd(x.samples, cfg));

  const double bin_hz = 16000.0 / 512.0;
  for (int v = 0; v < 512; ++v) {
    const double f = v <= 256 ? v * bin_hz : (512 - v) * bin_hz;  // mirrored
    const bool inside = f >= 1000.0 && f <= 3000.0;
    const double edge_dist = std::min(std::abs(f - 1000.0), std::abs(f - 3000.0));
    if (edge_dist > 2.0 * bin_hz)
      CHECK(bits.bits[static_cast<std::size_t>(v)] == (inside ? 1 : 0));
  }
}

TEST_CASE("jaccard basics") {
  const BitVector a{{1, 0, 1}};
  CHECK(anc::jaccard(a, a) == 1.0);
  const BitVector b{{1, 1, 0}};
  const BitVector c{{1, 0, 0}};
  CHECK(anc::jaccard(b, c) == 0.5);
  const BitVector z{{0, 0, 0}};
  CHECK(anc::jaccard(z, z) == 1.0);
  const BitVector wrong{{1, 0}};
  CHECK_THROWS_AS(anc::jaccard(a, wrong), anc::DimensionError);
}

TEST_CASE("jaccard is symmetric and bounded on random vectors") {
  anc::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    BitVector a, b;
    a.bits.resize(64);
    b.bits.resize(64);
    for (auto& v : a.bits) v = rng.uniform() < 0.4 ? 1 : 0;
    for (auto& v : b.bits) v = rng.uniform() < 0.4 ? 1 : 0;
    const double ab = anc::jaccard(a, b);
    CHECK(ab == anc::jaccard(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(anc::jaccard(a, a) == 1.0);
  }
}

TEST_CASE("select_best picks the exact match and breaks ties low") {
  const BitVector query{{1, 1, 0, 0}};
  const std::vector<BitVector> candidates = {
      BitVector{{0, 0, 1, 1}}, BitVector{{0, 0, 0, 1}}, BitVector{{1, 1, 0, 0}}};
  CHECK(anc::select_best(query, candidates) == 2);

  const std::vector<BitVector> tied = {BitVector{{1, 0, 0, 0}},
                                       BitVector{{0, 1, 0, 0}}};
  CHECK(anc::select_best(query, tied) == 0);

  CHECK_THROWS_AS(anc::select_best(query, std::span<const BitVector>{}),
                  anc::ConfigError);
}

TEST_CASE("selection is invariant to input gain") {
  const anc::BandSpec spec{{{2000.0, 5000.0}}, {}};
  const anc::SignalBuffer x = anc::gen_bandlimited_noise(spec, 2.0, 16000.0, 9);
  anc::SignalBuffer scaled = x;
  for (auto& v : scaled.samples) v *= 37.5;

  FeatureConfig cfg;
  cfg.segment_len = 256;
  cfg.fft_len_V = 512;
  CHECK(anc::binarize(anc::welch_log_psd(x.samples, cfg)) ==
        anc::binarize(anc::welch_log_psd(scaled.samples, cfg)));
}

TEST_CASE("silent subbands and silent frames get all-zero signatures") {
  anc::SubbandFrame frame;
  frame.subbands.resize(3);
  anc::Rng rng(4);
  frame.subbands[0].resize(1000);
  for (auto& v : frame.subbands[0]) v = {rng.gaussian(), rng.gaussian()};
  frame.subbands[1].assign(1000, cdouble{0.0, 0.0});
  frame.subbands[2].resize(1000);
  for (auto& v : frame.subbands[2]) {
    // 60 dB below subband 0
    v = {rng.gaussian() * 1e-3, rng.gaussian() * 1e-3};
  }

  FeatureConfig cfg;
  const auto sigs = anc::subband_signatures(frame, cfg);
  REQUIRE(sigs.size() == 3);
  CHECK(sigs[0].popcount() > 0);
  CHECK(sigs[1].popcount() == 0);
  CHECK(sigs[2].popcount() == 0);

  std::vector<double> zeros(16000, 0.0);
  CHECK(anc::fullband_signature(zeros, cfg).popcount() == 0);
}
