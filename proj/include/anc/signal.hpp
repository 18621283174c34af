#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace anc {

/// Uniformly sampled real time series; carrier of all fullband signals.
struct SignalBuffer {
  std::vector<double> samples;
  double sample_rate_hz = 16000.0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

struct Band {
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
};

/// Union of non-overlapping frequency bands with optional per-band
/// amplitude gains (unit gain when empty).
struct BandSpec {
  std::vector<Band> bands;
  std::vector<double> gains;  // empty, or one amplitude scalar per band

  /// Throws BandSpecError when edges are invalid for the given rate.
  void validate(double sample_rate_hz) const;
  double gain_of(std::size_t band_index) const {
    return gains.empty() ? 1.0 : gains[band_index];
  }
};

/// FIR acoustic path (primary, secondary, or secondary estimate).
struct PathModel {
  std::vector<double> impulse_response;
  std::string label;
};

/// Zero-mean Gaussian noise whose spectrum is masked to the union of
/// spec.bands (exact frequency-domain rect masking), rescaled to unit
/// sample variance. Deterministic for a fixed seed.
SignalBuffer gen_bandlimited_noise(const BandSpec& spec, double duration_s,
                                   double rate_hz, std::uint64_t seed);

/// Windowed-sinc band-pass FIR whose peak sits at delay_taps samples.
/// perturb_frac applies a seeded +/- multiplicative ripple per tap
/// (0 disables it).
PathModel design_bandpass_path(double f_lo_hz, double f_hi_hz, int num_taps,
                               int delay_taps, std::uint64_t seed,
                               double rate_hz, double perturb_frac = 0.05);

/// Streaming linear convolution; output length equals input length.
SignalBuffer apply_path(const PathModel& path, const SignalBuffer& x);

/// x + q with q zero-mean white Gaussian at the stated SNR.
/// snr_db = +infinity returns x unchanged.
SignalBuffer mix_measurement_noise(const SignalBuffer& x, double snr_db,
                                   std::uint64_t seed);

}  // namespace anc
