#pragma once

#include <cstdint>
#include <vector>

#include "anc/adaptive.hpp"
#include "anc/controllers.hpp"
#include "anc/database.hpp"
#include "anc/signal.hpp"

namespace anc {

enum class Algorithm { anc_off, saf_fxnlms, sfanc, sa_sfanc };

struct ScenarioSegment {
  BandSpec bands;
  double duration_s = 12.0;
};

struct ScenarioConfig {
  std::vector<ScenarioSegment> segments;
  double sample_rate_hz = 16000.0;
  double snr_db = 20.0;  // +inf for a clean reference
  PathModel primary;
  PathModel secondary;
  Algorithm algo = Algorithm::anc_off;
  std::uint64_t noise_seed = 1;
  std::uint64_t measurement_seed = 2;
};

/// Databases and adaptive configuration a scenario may need, depending on
/// the selected algorithm.
struct ScenarioResources {
  const AnalysisBank* bank = nullptr;
  const SubbandDatabase* subband_db = nullptr;
  const FullbandDatabase* fullband_db = nullptr;
  PathModel secondary_estimate;  // empty = use the true secondary path
  NlmsConfig nlms;
};

struct RunResult {
  SignalBuffer error;
  SignalBuffer disturbance;
  std::vector<double> nr_per_second_db;
  std::vector<ControlFrame> selections;  // fixed-filter modes only
  std::vector<std::pair<std::size_t, FullbandFilter>> weight_snapshots;  // adaptive
  std::size_t update_steps = 0;
  std::size_t selection_events = 0;
  std::size_t stack_events = 0;
  double runtime_s = 0.0;
};

/// Builds the concatenated primary noise, forms d = p (*) x and
/// r = x + q, runs the selected algorithm, and reports time-aligned e and d
/// with the per-second noise-reduction trace.
RunResult run_scenario(const ScenarioConfig& cfg, const ScenarioResources& res);

/// Same pipeline with an externally supplied primary noise (WAV input).
RunResult run_scenario_signal(const SignalBuffer& x, const ScenarioConfig& cfg,
                              const ScenarioResources& res);

/// NR[t] = 10 log10(sum d^2 / sum e^2) over whole second t; seconds with a
/// silent disturbance report 0 dB.
std::vector<double> noise_reduction_per_second(const SignalBuffer& d,
                                               const SignalBuffer& e);

/// Batch least-squares control filter: minimizes ||d - s (*) (w (*) r)||^2
/// over L taps via normal equations on the filtered reference, ridge
/// regularized. This is the oracle bound used throughout the tests.
FullbandFilter wiener_oracle(const SignalBuffer& reference,
                             const SignalBuffer& disturbance, int L,
                             const PathModel& secondary);

/// Empirical check of the mismatched-bandwidth excess-MSE analysis.
struct MseReport {
  double empirical_mse = 0.0;
  double predicted_mse = 0.0;
  double mmse = 0.0;
  double band_t_rad = 0.0;  // full bandwidths in radians
  double band_c_rad = 0.0;
  double sigma_q2 = 0.0;
};

/// Trains a fixed filter on a wide-band noise (measurement noise present),
/// applies it to a nested narrow-band noise, and compares the measured MSE
/// with mmse + sigma_q^2 * (B_t - B_c) / pi. Unit-gain paths, shared centre
/// frequency, B_t >= B_c.
MseReport validate_eq6(double band_t_hz, double band_c_hz, double centre_hz,
                       double snr_db, int num_seeds, double duration_s,
                       double rate_hz = 16000.0, int filter_len = 512,
                       std::uint64_t seed = 1);

}  // namespace anc
