#pragma once

#include <span>
#include <utility>
#include <vector>

#include "anc/filterbank.hpp"
#include "anc/signal.hpp"

namespace anc {

struct NlmsConfig {
  double step_size_mu = 0.01;
  double regularizer_eps = 1e-6;
  int fullband_length_L = 1024;
  int stack_stride = 1;      // decimated steps between fullband re-stackings
  int snapshot_every = 0;    // samples between weight snapshots, 0 = off

  void validate() const;
  void validate(int decimation) const;
};

struct FullbandFilter {
  std::vector<double> weights;
};

struct AdaptiveRunResult {
  SignalBuffer error;
  SignalBuffer disturbance;
  SubbandFilterSet final_subband_filters;
  FullbandFilter final_weights;
  std::vector<std::pair<std::size_t, FullbandFilter>> weight_snapshots;
  std::size_t update_steps = 0;
  std::size_t stack_events = 0;
};

/// One real NLMS update: w += mu * u * err / (u'u + eps).
void nlms_step(std::span<double> w, std::span<const double> u, double err,
               double mu, double eps);

/// One complex NLMS update: w += mu * conj(u) * err / (u^H u + eps).
void cnlms_step(std::span<cdouble> w, std::span<const cdouble> u, cdouble err,
                double mu, double eps);

/// Fullband FxNLMS baseline: per-sample filtering, secondary-path error
/// formation, and an L-tap normalized update on the filtered reference.
AdaptiveRunResult fullband_fxnlms(const SignalBuffer& reference,
                                  const SignalBuffer& disturbance,
                                  const PathModel& secondary,
                                  const PathModel& secondary_estimate,
                                  const NlmsConfig& cfg);

/// Delayless SAF-FxNLMS: fullband control filtering at the sample rate with
/// the most recently stacked weights; subband complex NLMS updates every
/// decimated step; FFT-1 re-stacking every stack_stride steps.
/// subband_order optionally permutes the per-step subband processing order
/// (diagnostic; results are identical for any permutation).
AdaptiveRunResult saf_fxnlms(const SignalBuffer& reference,
                             const SignalBuffer& disturbance,
                             const PathModel& secondary,
                             const PathModel& secondary_estimate,
                             const AnalysisBank& bank, const NlmsConfig& cfg,
                             std::span<const int> subband_order = {});

}  // namespace anc
