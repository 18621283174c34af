#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anc/fft.hpp"
#include "anc/filterbank.hpp"

namespace anc {

enum class Window : std::uint8_t { hann = 0, hamming = 1, rect = 2 };

/// Welch estimator parameters. fft_len_V bins are all retained (complex
/// subband inputs carry no symmetry to exploit).
struct FeatureConfig {
  int segment_len = 64;
  int fft_len_V = 128;
  double overlap_fraction = 0.5;
  Window window = Window::hann;

  void validate() const;
};

/// Log power per FFT bin in dB, floored at -300 dB.
struct LogPsdVector {
  std::vector<double> values;
};

/// Frequency-occupancy bits, one per PSD bin.
struct BitVector {
  std::vector<std::uint8_t> bits;

  bool operator==(const BitVector&) const = default;
  std::size_t popcount() const;
};

LogPsdVector welch_log_psd(std::span<const cdouble> x, const FeatureConfig& cfg);
LogPsdVector welch_log_psd(std::span<const double> x, const FeatureConfig& cfg);

/// bit_v = 1 iff p_v >= (max(p)+min(p))/2.
BitVector binarize(const LogPsdVector& p);

/// |a AND b| / |a OR b|; two all-zero vectors score 1 (silence matches
/// silence).
double jaccard(const BitVector& a, const BitVector& b);

/// Index of the highest-Jaccard candidate; ties break to the lowest index.
std::size_t select_best(const BitVector& query,
                        std::span<const BitVector> candidates);

/// Per-subband signatures of a decomposed frame. Subbands whose mean power
/// falls more than gate_db below the loudest subband (or is exactly zero)
/// are treated as silent and get the all-zero signature, pairing with the
/// empty-set Jaccard convention.
std::vector<BitVector> subband_signatures(const SubbandFrame& frame,
                                          const FeatureConfig& cfg,
                                          double gate_db = 40.0);

/// Fullband signature with the same silence handling (all-zero for an
/// essentially zero frame).
BitVector fullband_signature(std::span<const double> x, const FeatureConfig& cfg);

}  // namespace anc
