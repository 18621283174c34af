#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "anc/errors.hpp"
#include "anc/fft.hpp"
#include "anc/rng.hpp"
#include "anc/signal.hpp"

using anc::Band;
using anc::BandSpec;
using anc::SignalBuffer;

namespace {

double variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  return var / static_cast<double>(x.size());
}

// Hann-windowed averaged periodogram, 4096 bins.
std::vector<double> periodogram(const std::vector<double>& x, std::size_t nfft) {
  anc::Fft fft(nfft);
  std::vector<double> acc(nfft, 0.0);
  std::vector<anc::cdouble> buf(nfft);
  std::size_t count = 0;
  for (std::size_t start = 0; start + nfft <= x.size(); start += nfft / 2) {
    for (std::size_t i = 0; i < nfft; ++i) {
      const double w =
          0.5 - 0.5 * std::cos(2.0 * M_PI * i / static_cast<double>(nfft - 1));
      buf[i] = {x[start + i] * w, 0.0};
    }
    fft.forward(buf);
    for (std::size_t k = 0; k < nfft; ++k) acc[k] += std::norm(buf[k]);
    ++count;
  }
  for (auto& v : acc) v /= static_cast<double>(count);
  return acc;
}

std::complex<double> freq_response(const std::vector<double>& h, double omega) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < h.size(); ++k)
    acc += h[k] * std::complex<double>{std::cos(-omega * static_cast<double>(k)),
                                       std::sin(-omega * static_cast<double>(k))};
  return acc;
}

}  // namespace

TEST_CASE("fullband noise is unit-variance gaussian") {
  const BandSpec spec{{{0.0, 8000.0}}, {}};
  const SignalBuffer x = anc::gen_bandlimited_noise(spec, 1.0, 16000.0, 7);
  CHECK(x.samples.size() == 16000);
  CHECK(variance(x.samples) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("multi-band noise keeps out-of-band energy at least 40 dB down") {
  const BandSpec spec{{{500.0, 2000.0}, {3000.0, 6000.0}, {7000.0, 7500.0}}, {}};
  const SignalBuffer x = anc::gen_bandlimited_noise(spec, 12.0, 16000.0, 11);
  const std::size_t nfft = 4096;
  const auto psd = periodogram(x.samples, nfft);
  // Guard of ten periodogram bins at each band edge: the Hann analysis
  // window smears energy over its mainlobe, which is a property of the
  // measurement, not of the generated signal.
  const double guard = 10.0 * 16000.0 / static_cast<double>(nfft);
  double in_band = 0.0, out_band = 0.0;
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double f = static_cast<double>(k) * 16000.0 / static_cast<double>(nfft);
    bool inside = false, near_edge = false;
    for (const Band& b : spec.bands) {
      if (f >= b.f_lo_hz && f <= b.f_hi_hz) inside = true;
      if (std::abs(f - b.f_lo_hz) < guard || std::abs(f - b.f_hi_hz) < guard)
        near_edge = true;
    }
    if (inside) {
      in_band += psd[k];
    } else if (!near_edge) {
      out_band += psd[k];
    }
  }
  CHECK(10.0 * std::log10(in_band / out_band) > 40.0);
}

TEST_CASE("noise generation is deterministic per seed") {
  const BandSpec spec{{{1000.0, 2000.0}}, {}};
  const SignalBuffer a = anc::gen_bandlimited_noise(spec, 0.5, 16000.0, 3);
  const SignalBuffer b = anc::gen_bandlimited_noise(spec, 0.5, 16000.0, 3);
  const SignalBuffer c = anc::gen_bandlimited_noise(spec, 0.5, 16000.0, 4);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
}

TEST_CASE("band spec validation") {
  CHECK_THROWS_AS(
      anc::gen_bandlimited_noise(BandSpec{{{2000.0, 1000.0}}, {}}, 1.0, 16000.0, 1),
      anc::BandSpecError);
  CHECK_THROWS_AS(
      anc::gen_bandlimited_noise(BandSpec{{{0.0, 9000.0}}, {}}, 1.0, 16000.0, 1),
      anc::BandSpecError);
  CHECK_THROWS_AS(
      anc::gen_bandlimited_noise(
          BandSpec{{{1000.0, 2000.0}, {1500.0, 3000.0}}, {}}, 1.0, 16000.0, 1),
      anc::BandSpecError);
  CHECK_THROWS_AS(
      anc::gen_bandlimited_noise(BandSpec{{{0.0, 8000.0}}, {}}, 1e-5, 16000.0, 1),
      anc::SizeError);
}

TEST_CASE("gain_shape scales per-band energy") {
  const BandSpec flat{{{1000.0, 2000.0}, {4000.0, 5000.0}}, {}};
  const BandSpec shaped{{{1000.0, 2000.0}, {4000.0, 5000.0}}, {1.0, 0.25}};
  const SignalBuffer x = anc::gen_bandlimited_noise(shaped, 4.0, 16000.0, 5);
  const auto psd = periodogram(x.samples, 4096);
  double low = 0.0, high = 0.0;
  for (std::size_t k = 0; k <= 2048; ++k) {
    const double f = static_cast<double>(k) * 16000.0 / 4096.0;
    if (f >= 1100.0 && f <= 1900.0) low += psd[k];
    if (f >= 4100.0 && f <= 4900.0) high += psd[k];
  }
  // amplitude 0.25 -> power 1/16, i.e. about -12 dB
  CHECK(10.0 * std::log10(low / high) == doctest::Approx(12.0).epsilon(0.15));
  (void)flat;
}

TEST_CASE("default path has the requested group delay at 1 kHz") {
  const anc::PathModel p = anc::design_bandpass_path(20.0, 7900.0, 256, 32, 12345, 16000.0);
  const double w1 = 2.0 * M_PI * 975.0 / 16000.0;
  const double w2 = 2.0 * M_PI * 1025.0 / 16000.0;
  const auto h1 = freq_response(p.impulse_response, w1);
  const auto h2 = freq_response(p.impulse_response, w2);
  double dphi = std::arg(h2) - std::arg(h1);
  while (dphi > M_PI) dphi -= 2.0 * M_PI;
  while (dphi < -M_PI) dphi += 2.0 * M_PI;
  const double group_delay = -dphi / (w2 - w1);
  CHECK(group_delay == doctest::Approx(32.0).epsilon(0.05));
}

TEST_CASE("path magnitude stays within 3 dB of unity inside the band") {
  const anc::PathModel p = anc::design_bandpass_path(20.0, 7900.0, 256, 32, 9, 16000.0);
  // Margin of one transition width of the 65-tap symmetric core.
  const double margin = 6.6 / 65.0 * 16000.0;
  for (double f = 20.0 + margin; f <= 7900.0 - margin; f += 50.0) {
    const double mag =
        std::abs(freq_response(p.impulse_response, 2.0 * M_PI * f / 16000.0));
    CHECK(20.0 * std::log10(mag) > -3.0);
    CHECK(20.0 * std::log10(mag) < 3.0);
  }
}

TEST_CASE("zero-delay unperturbed full-band path approximates an impulse") {
  const anc::PathModel p =
      anc::design_bandpass_path(0.0, 8000.0, 64, 0, 1, 16000.0, 0.0);
  const SignalBuffer x =
      anc::gen_bandlimited_noise(BandSpec{{{0.0, 8000.0}}, {}}, 1.0, 16000.0, 2);
  const SignalBuffer y = anc::apply_path(p, x);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    diff += (y.samples[i] - x.samples[i]) * (y.samples[i] - x.samples[i]);
    ref += x.samples[i] * x.samples[i];
  }
  CHECK(std::sqrt(diff / ref) < 0.01);
}

TEST_CASE("default secondary path is faster than the primary") {
  const anc::PathModel p = anc::design_bandpass_path(20.0, 7900.0, 256, 32, 101, 16000.0);
  const anc::PathModel s = anc::design_bandpass_path(20.0, 7900.0, 128, 16, 202, 16000.0);
  auto group_delay_1khz = [](const anc::PathModel& path) {
    const double w1 = 2.0 * M_PI * 975.0 / 16000.0;
    const double w2 = 2.0 * M_PI * 1025.0 / 16000.0;
    double dphi = std::arg(freq_response(path.impulse_response, w2)) -
                  std::arg(freq_response(path.impulse_response, w1));
    while (dphi > M_PI) dphi -= 2.0 * M_PI;
    while (dphi < -M_PI) dphi += 2.0 * M_PI;
    return -dphi / (w2 - w1);
  };
  // causal controllability: the secondary path leads the primary
  CHECK(group_delay_1khz(s) < group_delay_1khz(p));
  CHECK(group_delay_1khz(s) == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("path design rejects bad edges") {
  CHECK_THROWS_AS(anc::design_bandpass_path(5000.0, 1000.0, 64, 8, 1, 16000.0),
                  anc::BandSpecError);
  CHECK_THROWS_AS(anc::design_bandpass_path(20.0, 7900.0, 16, 16, 1, 16000.0),
                  anc::ConfigError);
}

TEST_CASE("apply_path identity and unit delay") {
  SignalBuffer x;
  x.samples = {3.0, 4.0, 5.0};
  x.sample_rate_hz = 16000.0;
  const SignalBuffer same = anc::apply_path({{1.0}, "id"}, x);
  CHECK(same.samples == std::vector<double>{3.0, 4.0, 5.0});
  const SignalBuffer delayed = anc::apply_path({{0.0, 1.0}, "z1"}, x);
  CHECK(delayed.samples == std::vector<double>{0.0, 3.0, 4.0});
}

TEST_CASE("apply_path matches brute-force convolution") {
  anc::Rng rng(77);
  anc::PathModel p;
  p.impulse_response.resize(64);
  for (auto& v : p.impulse_response) v = rng.gaussian();
  SignalBuffer x;
  x.sample_rate_hz = 16000.0;
  x.samples.resize(256);
  for (auto& v : x.samples) v = rng.gaussian();

  const SignalBuffer y = anc::apply_path(p, x);
  for (std::size_t n = 0; n < x.samples.size(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.impulse_response.size() && k <= n; ++k)
      acc += p.impulse_response[k] * x.samples[n - k];
    CHECK(y.samples[n] == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("apply_path is linear") {
  const BandSpec spec{{{500.0, 6000.0}}, {}};
  const SignalBuffer x = anc::gen_bandlimited_noise(spec, 0.25, 16000.0, 31);
  const SignalBuffer y = anc::gen_bandlimited_noise(spec, 0.25, 16000.0, 32);
  const anc::PathModel p = anc::design_bandpass_path(20.0, 7900.0, 128, 16, 3, 16000.0);

  const double a = 1.7, b = -0.4;
  SignalBuffer mix;
  mix.sample_rate_hz = 16000.0;
  mix.samples.resize(x.samples.size());
  for (std::size_t i = 0; i < mix.samples.size(); ++i)
    mix.samples[i] = a * x.samples[i] + b * y.samples[i];

  const auto lhs = anc::apply_path(p, mix);
  const auto px = anc::apply_path(p, x);
  const auto py = anc::apply_path(p, y);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < lhs.samples.size(); ++i) {
    const double rhs = a * px.samples[i] + b * py.samples[i];
    err += (lhs.samples[i] - rhs) * (lhs.samples[i] - rhs);
    ref += rhs * rhs;
  }
  CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(ref) + 1e-300);
}

TEST_CASE("measurement noise hits the requested snr") {
  const BandSpec spec{{{0.0, 8000.0}}, {}};
  const SignalBuffer x = anc::gen_bandlimited_noise(spec, 1.0, 16000.0, 8);

  SUBCASE("20 dB adds variance near 0.01") {
    const SignalBuffer noisy = anc::mix_measurement_noise(x, 20.0, 99);
    std::vector<double> q(x.samples.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = noisy.samples[i] - x.samples[i];
    CHECK(variance(q) == doctest::Approx(0.01).epsilon(0.05));
  }
  SUBCASE("0 dB matches the signal variance") {
    const SignalBuffer noisy = anc::mix_measurement_noise(x, 0.0, 99);
    std::vector<double> q(x.samples.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = noisy.samples[i] - x.samples[i];
    CHECK(variance(q) == doctest::Approx(variance(x.samples)).epsilon(0.05));
  }
  SUBCASE("clean sentinel returns the input unchanged") {
    const SignalBuffer noisy = anc::mix_measurement_noise(
        x, std::numeric_limits<double>::infinity(), 99);
    CHECK(noisy.samples == x.samples);
  }
  SUBCASE("realized snr stays within half a dB for one-second signals") {
    for (double snr : {10.0, 20.0, 30.0}) {
      const SignalBuffer noisy = anc::mix_measurement_noise(x, snr, 1234);
      std::vector<double> q(x.samples.size());
      for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = noisy.samples[i] - x.samples[i];
      const double realized = 10.0 * std::log10(variance(x.samples) / variance(q));
      CHECK(std::abs(realized - snr) < 0.5);
    }
  }
  SUBCASE("silent input is rejected") {
    SignalBuffer silent;
    silent.samples.assign(1000, 0.0);
    CHECK_THROWS_AS(anc::mix_measurement_noise(silent, 20.0, 1),
                    anc::DegenerateInputError);
  }
}
