#include "anc/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "anc/errors.hpp"
#include "anc/kernels.hpp"

namespace anc {

namespace {

double final_second_nr_db(const SignalBuffer& d, const SignalBuffer& e) {
  const std::size_t rate = static_cast<std::size_t>(std::llround(d.sample_rate_hz));
  const std::size_t n = d.samples.size();
  const std::size_t start = n > rate ? n - rate : 0;
  double pd = 0.0, pe = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    pd += d.samples[i] * d.samples[i];
    pe += e.samples[i] * e.samples[i];
  }
  if (pd <= 0.0) return 0.0;
  return 10.0 * std::log10(pd / std::max(pe, 1e-300));
}

}  // namespace

SubbandDatabase train_sa_sfanc(const TrainingSpec& spec, const AnalysisBank& bank,
                               std::vector<double>* final_nr_db) {
  if (spec.training_noises.empty())
    throw ConfigError("training spec needs at least one noise");
  if (!(spec.duration_s > 0.0)) throw ConfigError("training duration must be positive");
  spec.nlms.validate(bank.decimation());
  spec.features.validate();

  DbMeta meta;
  meta.fullband_length_L = spec.nlms.fullband_length_L;
  meta.num_bands_M = bank.num_bands();
  meta.decimation_D = bank.decimation();
  meta.subband_length_Ls = spec.nlms.fullband_length_L / bank.decimation();
  meta.psd_bins_V = spec.features.fft_len_V;
  meta.sample_rate_hz = spec.sample_rate_hz;
  meta.features = spec.features;
  meta.prototype_hash = bank.prototype.hash();
  meta.num_noises_I = static_cast<int>(spec.training_noises.size());
  SubbandDatabase db(meta);

  Fft fft_sub(static_cast<std::size_t>(meta.subband_length_Ls));

  for (int i = 0; i < meta.num_noises_I; ++i) {
    // Training runs on clean references: measurement noise only enters the
    // on-line control stage.
    const SignalBuffer x = gen_bandlimited_noise(
        spec.training_noises[static_cast<std::size_t>(i)], spec.duration_s,
        spec.sample_rate_hz, spec.seed + static_cast<std::uint64_t>(i));
    const SignalBuffer d = apply_path(spec.primary, x);

    const AdaptiveRunResult run = saf_fxnlms(x, d, spec.secondary,
                                             spec.secondary_estimate, bank,
                                             spec.nlms);
    const double nr = final_second_nr_db(run.disturbance, run.error);
    if (final_nr_db != nullptr) final_nr_db->push_back(nr);
    if (nr < spec.min_final_nr_db)
      throw TrainingError(i, "training noise " + std::to_string(i) +
                                 " did not converge (final-second NR " +
                                 std::to_string(nr) + " dB)");

    const SubbandFrame decomposed = analyze(bank, x);
    const std::vector<BitVector> sigs = subband_signatures(decomposed, spec.features);

    for (int m = 0; m <= meta.num_bands_M / 2; ++m) {
      SubFilterRecord rec;
      rec.noise_index_i = i;
      rec.subband_m = m;
      rec.weights_freq =
          run.final_subband_filters.weights[static_cast<std::size_t>(m)];
      fft_sub.forward(rec.weights_freq);
      rec.signature = sigs[static_cast<std::size_t>(m)];
      db.insert(std::move(rec));
    }
  }
  return db;
}

ControlResult control_sa_sfanc(const SignalBuffer& reference,
                               const SubbandDatabase& db,
                               const AnalysisBank& bank) {
  const DbMeta& meta = db.meta();
  if (!db.complete()) throw DbError("control requires a complete database");
  if (meta.prototype_hash != bank.prototype.hash())
    throw DbIncompatibleError("database was trained with a different analysis bank");
  if (std::llround(reference.sample_rate_hz) != std::llround(meta.sample_rate_hz))
    throw ConfigError("reference sample rate does not match the database");

  const std::size_t frame_len =
      static_cast<std::size_t>(std::llround(reference.sample_rate_hz));
  const std::size_t n = reference.samples.size();
  const std::size_t n_sub = static_cast<std::size_t>(meta.num_bands_M / 2 + 1);

  // Candidate signatures per subband, fetched once.
  std::vector<std::vector<BitVector>> cand_sigs(n_sub);
  std::vector<std::vector<const std::vector<cdouble>*>> cand_weights(n_sub);
  for (std::size_t m = 0; m < n_sub; ++m) {
    const auto records = db.query(static_cast<int>(m));
    for (const SubFilterRecord* rec : records) {
      cand_sigs[m].push_back(rec->signature);
      cand_weights[m].push_back(&rec->weights_freq);
    }
  }

  WeightStacker stacker(meta.fullband_length_L, meta.num_bands_M);

  ControlResult result;
  result.y.sample_rate_hz = reference.sample_rate_hz;
  result.y.samples.assign(n, 0.0);

  // Frame 0 runs the zero filter; each full frame's selection takes effect
  // at the start of the next frame.
  std::vector<double> w(static_cast<std::size_t>(meta.fullband_length_L), 0.0);
  bool w_is_zero = true;

  std::size_t frame_index = 0;
  for (std::size_t start = 0; start < n; start += frame_len, ++frame_index) {
    const std::size_t end = std::min(start + frame_len, n);
    if (!w_is_zero)
      kernels::fir_segment(reference.samples, w, result.y.samples, start, end);

    const bool full_frame = (end - start) == frame_len;
    if (!full_frame) break;  // trailing partial frame: filtered, no selection

    std::vector<cdouble> frame_c(frame_len);
    for (std::size_t i = 0; i < frame_len; ++i)
      frame_c[i] = {reference.samples[start + i], 0.0};
    const SubbandFrame decomposed =
        analyze(bank, frame_c, reference.sample_rate_hz);
    const std::vector<BitVector> query = subband_signatures(decomposed, meta.features);

    ControlFrame frame;
    frame.frame_index = frame_index;
    frame.selected_indices.resize(n_sub);
    frame.scores.resize(n_sub);
    std::vector<std::vector<cdouble>> selected(n_sub);
    for (std::size_t m = 0; m < n_sub; ++m) {
      const std::size_t best = select_best(query[m], cand_sigs[m]);
      frame.selected_indices[m] = static_cast<int>(best);
      frame.scores[m] = jaccard(query[m], cand_sigs[m][best]);
      selected[m] = *cand_weights[m][best];
    }
    ++result.selection_events;

    stacker.stack_freq(selected, w);
    ++result.stack_events;
    w_is_zero = false;
    frame.stacked_filter.weights = w;
    result.frames.push_back(std::move(frame));
  }
  return result;
}

std::vector<BandSpec> sfanc_training_bands(const std::vector<BandSpec>& noises,
                                           int num_bands_M, double rate_hz) {
  std::vector<BandSpec> out;
  const double half_width = rate_hz / (2.0 * static_cast<double>(num_bands_M));
  for (const BandSpec& noise : noises) {
    for (int m = 0; m <= num_bands_M / 2; ++m) {
      const double centre =
          static_cast<double>(m) * rate_hz / static_cast<double>(num_bands_M);
      const double lo = std::max(0.0, centre - half_width);
      const double hi = std::min(rate_hz / 2.0, centre + half_width);
      BandSpec piece;
      for (const Band& b : noise.bands) {
        const double plo = std::max(b.f_lo_hz, lo);
        const double phi = std::min(b.f_hi_hz, hi);
        if (plo < phi) piece.bands.push_back({plo, phi});
      }
      if (!piece.bands.empty()) out.push_back(std::move(piece));
    }
  }
  return out;
}

FullbandDatabase train_sfanc(const TrainingSpec& spec,
                             const std::vector<BandSpec>& bands,
                             const FeatureConfig& fullband_features,
                             std::vector<double>* final_nr_db) {
  if (bands.empty()) throw ConfigError("SFANC training needs at least one band");
  spec.nlms.validate();
  fullband_features.validate();

  FullbandDbMeta meta;
  meta.fullband_length_L = spec.nlms.fullband_length_L;
  meta.psd_bins_V = fullband_features.fft_len_V;
  meta.sample_rate_hz = spec.sample_rate_hz;
  meta.features = fullband_features;
  FullbandDatabase db(meta);

  for (std::size_t k = 0; k < bands.size(); ++k) {
    const SignalBuffer x = gen_bandlimited_noise(
        bands[k], spec.duration_s, spec.sample_rate_hz,
        spec.seed + 1000 + static_cast<std::uint64_t>(k));
    const SignalBuffer d = apply_path(spec.primary, x);
    const AdaptiveRunResult run = fullband_fxnlms(x, d, spec.secondary,
                                                  spec.secondary_estimate,
                                                  spec.nlms);
    const double nr = final_second_nr_db(run.disturbance, run.error);
    if (final_nr_db != nullptr) final_nr_db->push_back(nr);
    if (nr < spec.min_final_nr_db)
      throw TrainingError(static_cast<int>(k),
                          "SFANC band " + std::to_string(k) +
                              " did not converge (final-second NR " +
                              std::to_string(nr) + " dB)");

    FullbandRecord rec;
    rec.filter_index = static_cast<int>(k);
    rec.weights_time = run.final_weights.weights;
    rec.signature = fullband_signature(x.samples, fullband_features);
    db.append(std::move(rec));
  }
  return db;
}

ControlResult control_sfanc(const SignalBuffer& reference,
                            const FullbandDatabase& db) {
  if (db.size() == 0) throw DbError("SFANC control requires a populated database");
  const FullbandDbMeta& meta = db.meta();
  if (std::llround(reference.sample_rate_hz) != std::llround(meta.sample_rate_hz))
    throw ConfigError("reference sample rate does not match the database");

  std::vector<BitVector> cand_sigs;
  cand_sigs.reserve(db.size());
  for (const FullbandRecord& rec : db.records()) cand_sigs.push_back(rec.signature);

  const std::size_t frame_len =
      static_cast<std::size_t>(std::llround(reference.sample_rate_hz));
  const std::size_t n = reference.samples.size();

  ControlResult result;
  result.y.sample_rate_hz = reference.sample_rate_hz;
  result.y.samples.assign(n, 0.0);

  const std::vector<double>* w = nullptr;  // frame 0: zero filter

  std::size_t frame_index = 0;
  for (std::size_t start = 0; start < n; start += frame_len, ++frame_index) {
    const std::size_t end = std::min(start + frame_len, n);
    if (w != nullptr)
      kernels::fir_segment(reference.samples, *w, result.y.samples, start, end);

    const bool full_frame = (end - start) == frame_len;
    if (!full_frame) break;

    const BitVector query = fullband_signature(
        std::span<const double>(reference.samples).subspan(start, frame_len),
        meta.features);
    const std::size_t best = select_best(query, cand_sigs);
    ++result.selection_events;
    ++result.stack_events;
    w = &db.at(best).weights_time;

    ControlFrame frame;
    frame.frame_index = frame_index;
    frame.selected_indices = {static_cast<int>(best)};
    frame.scores = {jaccard(query, cand_sigs[best])};
    frame.stacked_filter.weights = *w;
    result.frames.push_back(std::move(frame));
  }
  return result;
}

}  // namespace anc
