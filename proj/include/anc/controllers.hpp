#pragma once

#include <cstdint>
#include <vector>

#include "anc/adaptive.hpp"
#include "anc/database.hpp"
#include "anc/features.hpp"
#include "anc/filterbank.hpp"
#include "anc/signal.hpp"

namespace anc {

/// Off-line training configuration shared by the subband method and the
/// fullband SFANC baseline.
struct TrainingSpec {
  std::vector<BandSpec> training_noises;
  double duration_s = 12.0;
  double sample_rate_hz = 16000.0;
  PathModel primary;
  PathModel secondary;
  PathModel secondary_estimate;
  NlmsConfig nlms;
  FeatureConfig features;            // subband features (64 / 128 by default)
  double min_final_nr_db = 10.0;
  std::uint64_t seed = 1;
};

/// Per-frame decision of the on-line control stage: selected sub-filter
/// index (one per subband for SA-SFANC, a single entry for SFANC), the
/// winning Jaccard scores, and the filter stacked from that selection
/// (applied from the next frame on).
struct ControlFrame {
  std::size_t frame_index = 0;
  std::vector<int> selected_indices;
  std::vector<double> scores;
  FullbandFilter stacked_filter;
};

struct ControlResult {
  SignalBuffer y;
  std::vector<ControlFrame> frames;
  std::size_t selection_events = 0;
  std::size_t stack_events = 0;
};

/// Trains one SAF-FxNLMS run per training noise (clean references), stores
/// the L_s-point FFT of each converged subband filter together with the
/// noise's per-subband binary PSD signature. final_nr_db, when given,
/// receives the final-second noise reduction of each training run.
SubbandDatabase train_sa_sfanc(const TrainingSpec& spec, const AnalysisBank& bank,
                               std::vector<double>* final_nr_db = nullptr);

/// Frame-rate SA-SFANC control: per 1 s frame, decompose, binarize, select
/// per subband, stack; the stacked filter takes effect at the start of the
/// next frame (frame 0 runs the zero filter).
ControlResult control_sa_sfanc(const SignalBuffer& reference,
                               const SubbandDatabase& db,
                               const AnalysisBank& bank);

/// Band supports of the SFANC baseline inventory: each training noise's
/// spectrum intersected with each subband's nominal range, every non-empty
/// piece promoted to a fullband training noise.
std::vector<BandSpec> sfanc_training_bands(const std::vector<BandSpec>& noises,
                                           int num_bands_M, double rate_hz);

/// Trains the SFANC baseline: one fullband FxNLMS filter per band support,
/// with fullband signatures (segment 256 / V 512 by default).
FullbandDatabase train_sfanc(const TrainingSpec& spec,
                             const std::vector<BandSpec>& bands,
                             const FeatureConfig& fullband_features,
                             std::vector<double>* final_nr_db = nullptr);

/// Frame-rate SFANC control: one fullband signature and one stored filter
/// per frame.
ControlResult control_sfanc(const SignalBuffer& reference,
                            const FullbandDatabase& db);

}  // namespace anc
