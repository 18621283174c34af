#include "anc/features.hpp"

#include <algorithm>
#include <cmath>

#include "anc/errors.hpp"

namespace anc {

namespace {

constexpr double kLogFloorDb = -300.0;
constexpr double kPowerFloor = 1e-30;  // 10*log10 -> -300 dB

std::vector<double> make_window(Window type, int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (n <= 1) return w;
  switch (type) {
    case Window::hann:
      for (int i = 0; i < n; ++i)
        w[static_cast<std::size_t>(i)] =
            0.5 - 0.5 * std::cos(2.0 * M_PI * i / static_cast<double>(n - 1));
      break;
    case Window::hamming:
      for (int i = 0; i < n; ++i)
        w[static_cast<std::size_t>(i)] =
            0.54 - 0.46 * std::cos(2.0 * M_PI * i / static_cast<double>(n - 1));
      break;
    case Window::rect:
      break;
  }
  return w;
}

}  // namespace

void FeatureConfig::validate() const {
  if (segment_len <= 0) throw ConfigError("segment_len must be positive");
  if (fft_len_V < segment_len) throw ConfigError("fft_len_V must be >= segment_len");
  if (!(overlap_fraction >= 0.0) || !(overlap_fraction < 1.0))
    throw ConfigError("overlap_fraction must be in [0, 1)");
}

std::size_t BitVector::popcount() const {
  std::size_t c = 0;
  for (auto b : bits) c += b != 0;
  return c;
}

LogPsdVector welch_log_psd(std::span<const cdouble> x, const FeatureConfig& cfg) {
  cfg.validate();
  const std::size_t seg = static_cast<std::size_t>(cfg.segment_len);
  const std::size_t v = static_cast<std::size_t>(cfg.fft_len_V);
  if (x.size() < seg) throw SizeError("welch_log_psd: input shorter than one segment");

  const std::size_t hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(static_cast<double>(cfg.segment_len) *
                          (1.0 - cfg.overlap_fraction))));
  const std::vector<double> window = make_window(cfg.window, cfg.segment_len);
  double win_energy = 0.0;
  for (double w : window) win_energy += w * w;

  Dft dft(v);
  std::vector<double> acc(v, 0.0);
  std::vector<cdouble> buf(v);
  std::size_t n_segments = 0;
  for (std::size_t start = 0; start + seg <= x.size(); start += hop) {
    for (std::size_t i = 0; i < seg; ++i) buf[i] = x[start + i] * window[i];
    std::fill(buf.begin() + static_cast<std::ptrdiff_t>(seg), buf.end(),
              cdouble{0.0, 0.0});
    dft.forward(buf);
    for (std::size_t k = 0; k < v; ++k) acc[k] += std::norm(buf[k]);
    ++n_segments;
  }

  LogPsdVector out;
  out.values.resize(v);
  const double scale = 1.0 / (win_energy * static_cast<double>(n_segments));
  for (std::size_t k = 0; k < v; ++k) {
    const double p = acc[k] * scale;
    out.values[k] = p <= kPowerFloor ? kLogFloorDb : 10.0 * std::log10(p);
  }
  return out;
}

LogPsdVector welch_log_psd(std::span<const double> x, const FeatureConfig& cfg) {
  std::vector<cdouble> c(x.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = {x[i], 0.0};
  return welch_log_psd(std::span<const cdouble>(c), cfg);
}

BitVector binarize(const LogPsdVector& p) {
  BitVector out;
  out.bits.resize(p.values.size(), 0);
  if (p.values.empty()) return out;
  const auto [mn, mx] = std::minmax_element(p.values.begin(), p.values.end());
  const double threshold = 0.5 * (*mn + *mx);
  for (std::size_t i = 0; i < p.values.size(); ++i)
    out.bits[i] = p.values[i] >= threshold ? 1 : 0;
  return out;
}

double jaccard(const BitVector& a, const BitVector& b) {
  if (a.bits.size() != b.bits.size())
    throw DimensionError("jaccard: bit vector length mismatch");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    const bool ba = a.bits[i] != 0, bb = b.bits[i] != 0;
    inter += ba && bb;
    uni += ba || bb;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t select_best(const BitVector& query,
                        std::span<const BitVector> candidates) {
  if (candidates.empty()) throw ConfigError("select_best: no candidates");
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = jaccard(query, candidates[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

std::vector<BitVector> subband_signatures(const SubbandFrame& frame,
                                          const FeatureConfig& cfg,
                                          double gate_db) {
  std::vector<double> mean_power(frame.subbands.size(), 0.0);
  double loudest = 0.0;
  for (std::size_t m = 0; m < frame.subbands.size(); ++m) {
    double acc = 0.0;
    for (const cdouble v : frame.subbands[m]) acc += std::norm(v);
    mean_power[m] = frame.subbands[m].empty()
                        ? 0.0
                        : acc / static_cast<double>(frame.subbands[m].size());
    loudest = std::max(loudest, mean_power[m]);
  }
  const double gate = loudest * std::pow(10.0, -gate_db / 10.0);

  std::vector<BitVector> sigs(frame.subbands.size());
  for (std::size_t m = 0; m < frame.subbands.size(); ++m) {
    if (loudest <= kPowerFloor || mean_power[m] < gate) {
      sigs[m].bits.assign(static_cast<std::size_t>(cfg.fft_len_V), 0);
    } else {
      sigs[m] = binarize(welch_log_psd(std::span<const cdouble>(frame.subbands[m]), cfg));
    }
  }
  return sigs;
}

BitVector fullband_signature(std::span<const double> x, const FeatureConfig& cfg) {
  double power = 0.0;
  for (double v : x) power += v * v;
  power /= std::max<std::size_t>(1, x.size());
  if (power <= kPowerFloor) {
    BitVector silent;
    silent.bits.assign(static_cast<std::size_t>(cfg.fft_len_V), 0);
    return silent;
  }
  return binarize(welch_log_psd(x, cfg));
}

}  // namespace anc
