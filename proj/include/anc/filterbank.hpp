#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anc/fft.hpp"
#include "anc/signal.hpp"

namespace anc {

/// Low-pass prototype for the M-band single-sideband analysis bank.
/// Linear phase, length K (a multiple of M), unit DC gain.
struct PrototypeFilter {
  std::vector<double> coeffs;
  int num_bands_M = 0;
  int length_K = 0;

  std::uint64_t hash() const;
};

/// Windowed-sinc prototype whose adjacent-band crossover sits at -3 dB so
/// the squared-magnitude tiling of the modulated bank stays flat.
PrototypeFilter design_prototype(int M, int K);

/// Analysis bank configuration: M bands, decimation D = M/2, and only the
/// first M/2+1 subbands retained (real input).
struct AnalysisBank {
  PrototypeFilter prototype;

  int num_bands() const { return prototype.num_bands_M; }
  int decimation() const { return prototype.num_bands_M / 2; }
  int num_subbands() const { return prototype.num_bands_M / 2 + 1; }
};

AnalysisBank make_analysis_bank(PrototypeFilter prototype);
AnalysisBank make_analysis_bank(int M, int K);

/// Complex decimated subband signals, one sequence per retained subband.
struct SubbandFrame {
  std::vector<std::vector<cdouble>> subbands;  // [m][z], m in [0, M/2]
  double decimated_rate_hz = 0.0;

  std::size_t length() const {
    return subbands.empty() ? 0 : subbands.front().size();
  }
};

/// Streaming polyphase analysis: push one fullband sample at a time; every
/// D-th push produces one decimated output per retained subband.
class AnalysisState {
public:
  explicit AnalysisState(const AnalysisBank& bank);

  /// Returns true when `out` (length M/2+1) received a decimated output.
  bool push(cdouble x, std::span<cdouble> out);
  bool push(double x, std::span<cdouble> out) { return push(cdouble{x, 0.0}, out); }

private:
  const std::vector<double>* coeffs_;
  int num_bands_;
  int length_;
  int decimation_;
  int phase_ = 0;
  std::size_t pos_ = 0;
  std::vector<cdouble> history_;
  std::vector<cdouble> branch_;
  Fft fft_;
};

/// Batch analysis of a whole signal (polyphase realization).
SubbandFrame analyze(const AnalysisBank& bank, const SignalBuffer& x);
SubbandFrame analyze(const AnalysisBank& bank, std::span<const cdouble> x,
                     double rate_hz = 0.0);

/// Literal sum-form analysis, kept as the serial reference the polyphase
/// path is checked against.
SubbandFrame analyze_direct(const AnalysisBank& bank, const SignalBuffer& x);
SubbandFrame analyze_direct(const AnalysisBank& bank, std::span<const cdouble> x,
                            double rate_hz = 0.0);

/// The M/2+1 complex subband control-filter weight vectors (length L_s each)
/// for one fullband controller.
struct SubbandFilterSet {
  std::vector<std::vector<cdouble>> weights;  // time domain, [m][tap]
  int fullband_length_L = 0;

  int subband_length() const {
    return weights.empty() ? 0 : static_cast<int>(weights.front().size());
  }
};

/// FFT-1 weight stacking: assembles the fullband filter's frequency bins
/// directly from subband filter bins and inverse-transforms to time domain.
class WeightStacker {
public:
  WeightStacker(int L, int M);

  int fullband_length() const { return length_; }
  int subband_length() const { return subband_length_; }

  /// Time-domain subband weights in: L_s-point FFT per subband, then stack.
  void stack_time(const SubbandFilterSet& filters, std::span<double> out) const;
  void stack_time(std::span<const std::vector<cdouble>> weights,
                  std::span<double> out) const;

  /// Frequency-domain subband weights in (no forward FFTs).
  void stack_freq(std::span<const std::vector<cdouble>> freq,
                  std::span<double> out) const;

  /// Bin mapping of the stacking rule for l in [0, L/2): subband index uses
  /// round-half-away-from-zero on l*M/L, bin index is l mod (2L/M).
  static int subband_for_bin(int l, int L, int M);
  static int bin_within_subband(int l, int L, int M);

private:
  int length_;
  int num_bands_;
  int subband_length_;
  std::vector<int> bin_subband_;  // per l in [0, L/2)
  std::vector<int> bin_index_;
  Fft fft_sub_;
  Fft fft_full_;
};

/// Convenience wrapper over WeightStacker::stack_time.
std::vector<double> stack_fft1(const SubbandFilterSet& filters, int M);

}  // namespace anc
