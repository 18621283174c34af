#include "anc/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anc/errors.hpp"
#include "anc/fft.hpp"
#include "anc/kernels.hpp"
#include "anc/rng.hpp"

namespace anc {

void BandSpec::validate(double sample_rate_hz) const {
  if (bands.empty()) throw BandSpecError("band spec has no bands");
  const double nyquist = sample_rate_hz / 2.0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const Band& b = bands[i];
    if (!(b.f_lo_hz >= 0.0) || !(b.f_lo_hz < b.f_hi_hz) || !(b.f_hi_hz <= nyquist))
      throw BandSpecError("band edges must satisfy 0 <= lo < hi <= rate/2");
    if (i > 0 && !(bands[i - 1].f_hi_hz <= b.f_lo_hz))
      throw BandSpecError("bands must be sorted ascending and non-overlapping");
  }
  if (!gains.empty()) {
    if (gains.size() != bands.size())
      throw BandSpecError("gain_shape must have one entry per band");
    for (double g : gains)
      if (!(g >= 0.0) || !std::isfinite(g))
        throw BandSpecError("gain_shape entries must be finite and non-negative");
  }
}

SignalBuffer gen_bandlimited_noise(const BandSpec& spec, double duration_s,
                                   double rate_hz, std::uint64_t seed) {
  if (!(rate_hz > 0.0)) throw BandSpecError("sample rate must be positive");
  spec.validate(rate_hz);
  if (!(duration_s > 0.0)) throw SizeError("duration must be positive");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  if (n < 2) throw SizeError("duration yields fewer than 2 samples");

  Rng rng(seed);
  std::vector<cdouble> spectrum(n);
  for (auto& v : spectrum) v = {rng.gaussian(), 0.0};

  Dft dft(n);
  dft.forward(spectrum);

  // Rect masking: zero every bin outside the band union, scale kept bins by
  // the band gain. Bin k and its mirror are treated identically, so the
  // masked spectrum stays Hermitian.
  std::size_t kept = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kf = (k <= n / 2) ? k : n - k;
    const double f = static_cast<double>(kf) * rate_hz / static_cast<double>(n);
    double gain = 0.0;
    for (std::size_t b = 0; b < spec.bands.size(); ++b) {
      if (f >= spec.bands[b].f_lo_hz && f <= spec.bands[b].f_hi_hz) {
        gain = spec.gain_of(b);
        break;
      }
    }
    spectrum[k] *= gain;
    if (gain > 0.0) ++kept;
  }
  if (kept == 0) throw BandSpecError("band spec captures no FFT bins at this length");

  dft.inverse(spectrum);

  SignalBuffer out;
  out.sample_rate_hz = rate_hz;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = spectrum[i].real();

  double mean = 0.0;
  for (double v : out.samples) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : out.samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (var <= 0.0) throw BandSpecError("masked noise has zero variance");
  const double scale = 1.0 / std::sqrt(var);
  for (double& v : out.samples) v = (v - mean) * scale;
  return out;
}

PathModel design_bandpass_path(double f_lo_hz, double f_hi_hz, int num_taps,
                               int delay_taps, std::uint64_t seed,
                               double rate_hz, double perturb_frac) {
  if (!(rate_hz > 0.0)) throw BandSpecError("sample rate must be positive");
  if (!(f_lo_hz >= 0.0) || !(f_lo_hz < f_hi_hz) || !(f_hi_hz <= rate_hz / 2.0))
    throw BandSpecError("path band edges must satisfy 0 <= lo < hi <= rate/2");
  if (!(num_taps > delay_taps) || delay_taps < 0)
    throw ConfigError("path taps must satisfy num_taps > delay_taps >= 0");

  const double flo = f_lo_hz / rate_hz;
  const double fhi = f_hi_hz / rate_hz;
  auto sinc = [](double x) {
    if (x == 0.0) return 1.0;
    return std::sin(M_PI * x) / (M_PI * x);
  };

  // Linear-phase windowed-sinc core centred on the requested delay; the
  // symmetric span is limited by the shorter side so the group delay lands
  // exactly on delay_taps.
  const int span = std::min(delay_taps, num_taps - 1 - delay_taps);
  std::vector<double> h(static_cast<std::size_t>(num_taps), 0.0);
  for (int k = delay_taps - span; k <= delay_taps + span; ++k) {
    const double t = static_cast<double>(k - delay_taps);
    double w = 1.0;
    if (span > 0) w = 0.54 + 0.46 * std::cos(M_PI * t / static_cast<double>(span));
    h[static_cast<std::size_t>(k)] =
        w * (2.0 * fhi * sinc(2.0 * fhi * t) - 2.0 * flo * sinc(2.0 * flo * t));
  }

  // Normalize mid-band gain to unity.
  const double fc = 0.5 * (f_lo_hz + f_hi_hz) / rate_hz;
  double re = 0.0, im = 0.0;
  for (int k = 0; k < num_taps; ++k) {
    const double a = -2.0 * M_PI * fc * static_cast<double>(k);
    re += h[static_cast<std::size_t>(k)] * std::cos(a);
    im += h[static_cast<std::size_t>(k)] * std::sin(a);
  }
  const double mid_gain = std::hypot(re, im);
  if (mid_gain <= 0.0) throw NumericError("degenerate path design");
  for (double& v : h) v /= mid_gain;

  if (perturb_frac > 0.0) {
    Rng rng(seed);
    for (double& v : h) v *= 1.0 + perturb_frac * (2.0 * rng.uniform() - 1.0);
  }

  PathModel path;
  path.impulse_response = std::move(h);
  path.label = "bp" + std::to_string(static_cast<int>(f_lo_hz)) + "-" +
               std::to_string(static_cast<int>(f_hi_hz)) + "d" +
               std::to_string(delay_taps);
  return path;
}

SignalBuffer apply_path(const PathModel& path, const SignalBuffer& x) {
  if (path.impulse_response.empty()) throw DimensionError("path has no taps");
  SignalBuffer out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.samples.resize(x.samples.size());
  kernels::fir_same(x.samples, path.impulse_response, out.samples);
  return out;
}

SignalBuffer mix_measurement_noise(const SignalBuffer& x, double snr_db,
                                   std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return x;
  double mean = 0.0;
  for (double v : x.samples) mean += v;
  mean /= std::max<std::size_t>(1, x.samples.size());
  double var = 0.0;
  for (double v : x.samples) var += (v - mean) * (v - mean);
  var /= std::max<std::size_t>(1, x.samples.size());
  if (var <= 1e-300) throw DegenerateInputError("cannot set SNR on a silent signal");

  const double sigma_q = std::sqrt(var * std::pow(10.0, -snr_db / 10.0));
  Rng rng(seed);
  SignalBuffer out = x;
  for (double& v : out.samples) v += sigma_q * rng.gaussian();
  return out;
}

}  // namespace anc
