#include "anc/filterbank.hpp"

#include <cmath>
#include <cstring>

#include "anc/errors.hpp"

namespace anc {

namespace {

std::vector<double> windowed_sinc_lowpass(int K, double cutoff_rad) {
  // Hamming-windowed sinc, linear phase, centre (K-1)/2.
  std::vector<double> h(static_cast<std::size_t>(K));
  const double c = 0.5 * static_cast<double>(K - 1);
  for (int k = 0; k < K; ++k) {
    const double t = static_cast<double>(k) - c;
    double s;
    if (t == 0.0) {
      s = cutoff_rad / M_PI;
    } else {
      s = std::sin(cutoff_rad * t) / (M_PI * t);
    }
    const double w =
        0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(k) /
                               static_cast<double>(K - 1));
    h[static_cast<std::size_t>(k)] = s * w;
  }
  return h;
}

double magnitude_at(const std::vector<double>& h, double omega) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double a = -omega * static_cast<double>(k);
    re += h[k] * std::cos(a);
    im += h[k] * std::sin(a);
  }
  return std::hypot(re, im);
}

}  // namespace

std::uint64_t PrototypeFilter::hash() const {
  // FNV-1a over the coefficient bytes plus the bank geometry.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(&num_bands_M, sizeof(num_bands_M));
  mix(&length_K, sizeof(length_K));
  if (!coeffs.empty()) mix(coeffs.data(), coeffs.size() * sizeof(double));
  return h;
}

PrototypeFilter design_prototype(int M, int K) {
  if (M < 4 || (M % 2) != 0) throw ConfigError("M must be even and >= 4");
  if (K <= 0 || (K % M) != 0) throw ConfigError("K must be a positive multiple of M");

  const double edge = M_PI / static_cast<double>(M);

  // Calibrate the cutoff so the response crosses -3 dB at the band edge
  // pi/M; a cutoff at exactly pi/M would put the crossover near -6 dB and
  // dent the bank's squared-magnitude tiling.
  double lo = 0.5 * edge, hi = std::min(2.5 * edge, M_PI * 0.999);
  std::vector<double> h;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    h = windowed_sinc_lowpass(K, mid);
    const double dc = magnitude_at(h, 0.0);
    const double ratio = magnitude_at(h, edge) / dc;
    if (ratio < M_SQRT1_2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  h = windowed_sinc_lowpass(K, 0.5 * (lo + hi));

  double sum = 0.0;
  for (double v : h) sum += v;
  for (double& v : h) v /= sum;

  PrototypeFilter p;
  p.coeffs = std::move(h);
  p.num_bands_M = M;
  p.length_K = K;
  return p;
}

AnalysisBank make_analysis_bank(PrototypeFilter prototype) {
  return AnalysisBank{std::move(prototype)};
}

AnalysisBank make_analysis_bank(int M, int K) {
  return AnalysisBank{design_prototype(M, K)};
}

AnalysisState::AnalysisState(const AnalysisBank& bank)
    : coeffs_(&bank.prototype.coeffs),
      num_bands_(bank.num_bands()),
      length_(bank.prototype.length_K),
      decimation_(bank.decimation()),
      history_(static_cast<std::size_t>(bank.prototype.length_K), cdouble{0.0, 0.0}),
      branch_(static_cast<std::size_t>(bank.num_bands())),
      fft_(static_cast<std::size_t>(bank.num_bands())) {}

bool AnalysisState::push(cdouble x, std::span<cdouble> out) {
  pos_ = (pos_ + 1) % history_.size();
  history_[pos_] = x;
  if (++phase_ < decimation_) return false;
  phase_ = 0;

  if (out.size() < static_cast<std::size_t>(num_bands_ / 2 + 1))
    throw DimensionError("analysis output span too short");

  // Polyphase branches: branch p accumulates taps k = q*M + p against the
  // history ending at the newest sample.
  const std::vector<double>& a = *coeffs_;
  const std::size_t K = static_cast<std::size_t>(length_);
  const std::size_t M = static_cast<std::size_t>(num_bands_);
  for (std::size_t p = 0; p < M; ++p) {
    cdouble acc{0.0, 0.0};
    for (std::size_t k = p; k < K; k += M) {
      const std::size_t idx = (pos_ + K - k) % K;
      acc += history_[idx] * a[k];
    }
    // conj here + conj after the forward FFT realizes the +j modulation
    // of the band filters.
    branch_[p] = std::conj(acc);
  }
  fft_.forward(branch_);
  for (int m = 0; m <= num_bands_ / 2; ++m)
    out[static_cast<std::size_t>(m)] = std::conj(branch_[static_cast<std::size_t>(m)]);
  return true;
}

namespace {

SubbandFrame analyze_stream(const AnalysisBank& bank, std::span<const cdouble> x,
                            double rate_hz) {
  const int D = bank.decimation();
  if (x.size() < static_cast<std::size_t>(D))
    throw SizeError("analysis input shorter than the decimation factor");
  const std::size_t n_out = x.size() / static_cast<std::size_t>(D);
  SubbandFrame frame;
  frame.decimated_rate_hz = rate_hz > 0.0 ? rate_hz / D : 0.0;
  frame.subbands.assign(static_cast<std::size_t>(bank.num_subbands()), {});
  for (auto& s : frame.subbands) s.reserve(n_out);

  AnalysisState state(bank);
  std::vector<cdouble> out(static_cast<std::size_t>(bank.num_subbands()));
  for (const cdouble v : x) {
    if (state.push(v, out)) {
      for (std::size_t m = 0; m < out.size(); ++m)
        frame.subbands[m].push_back(out[m]);
    }
  }
  return frame;
}

SubbandFrame analyze_direct_stream(const AnalysisBank& bank,
                                   std::span<const cdouble> x, double rate_hz) {
  const int D = bank.decimation();
  const int M = bank.num_bands();
  const int K = bank.prototype.length_K;
  if (x.size() < static_cast<std::size_t>(D))
    throw SizeError("analysis input shorter than the decimation factor");
  const std::size_t n_out = x.size() / static_cast<std::size_t>(D);

  SubbandFrame frame;
  frame.decimated_rate_hz = rate_hz > 0.0 ? rate_hz / D : 0.0;
  frame.subbands.assign(static_cast<std::size_t>(bank.num_subbands()),
                        std::vector<cdouble>(n_out));

  const std::vector<double>& a = bank.prototype.coeffs;
  for (std::size_t z = 1; z <= n_out; ++z) {
    const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(z) * D - 1;
    for (int m = 0; m <= M / 2; ++m) {
      cdouble acc{0.0, 0.0};
      for (int k = 0; k < K; ++k) {
        const std::ptrdiff_t idx = t - k;
        if (idx < 0) break;
        const int km = (k * m) % M;
        const double ang = 2.0 * M_PI * static_cast<double>(km) / static_cast<double>(M);
        acc += x[static_cast<std::size_t>(idx)] * a[static_cast<std::size_t>(k)] *
               cdouble{std::cos(ang), std::sin(ang)};
      }
      frame.subbands[static_cast<std::size_t>(m)][z - 1] = acc;
    }
  }
  return frame;
}

std::vector<cdouble> to_complex(const SignalBuffer& x) {
  std::vector<cdouble> c(x.samples.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = {x.samples[i], 0.0};
  return c;
}

}  // namespace

SubbandFrame analyze(const AnalysisBank& bank, const SignalBuffer& x) {
  const auto c = to_complex(x);
  return analyze_stream(bank, c, x.sample_rate_hz);
}

SubbandFrame analyze(const AnalysisBank& bank, std::span<const cdouble> x,
                     double rate_hz) {
  return analyze_stream(bank, x, rate_hz);
}

SubbandFrame analyze_direct(const AnalysisBank& bank, const SignalBuffer& x) {
  const auto c = to_complex(x);
  return analyze_direct_stream(bank, c, x.sample_rate_hz);
}

SubbandFrame analyze_direct(const AnalysisBank& bank, std::span<const cdouble> x,
                            double rate_hz) {
  return analyze_direct_stream(bank, x, rate_hz);
}

int WeightStacker::subband_for_bin(int l, int L, int M) {
  // round-half-away-from-zero of l*M/L for non-negative l
  return (2 * l * M + L) / (2 * L);
}

int WeightStacker::bin_within_subband(int l, int L, int M) {
  return l % (2 * L / M);
}

WeightStacker::WeightStacker(int L, int M)
    : length_(L),
      num_bands_(M),
      subband_length_(0),
      fft_sub_(1),
      fft_full_(1) {
  if (M < 4 || (M % 2) != 0) throw ConfigError("M must be even and >= 4");
  const int D = M / 2;
  if (L <= 0 || (L % D) != 0) throw DimensionError("L must be divisible by D = M/2");
  subband_length_ = L / D;
  fft_sub_ = Fft(static_cast<std::size_t>(subband_length_));
  fft_full_ = Fft(static_cast<std::size_t>(L));
  bin_subband_.resize(static_cast<std::size_t>(L / 2));
  bin_index_.resize(static_cast<std::size_t>(L / 2));
  for (int l = 0; l < L / 2; ++l) {
    bin_subband_[static_cast<std::size_t>(l)] = subband_for_bin(l, L, M);
    bin_index_[static_cast<std::size_t>(l)] = bin_within_subband(l, L, M);
  }
}

void WeightStacker::stack_freq(std::span<const std::vector<cdouble>> freq,
                               std::span<double> out) const {
  if (freq.size() != static_cast<std::size_t>(num_bands_ / 2 + 1))
    throw DimensionError("expected M/2+1 subband weight vectors");
  for (const auto& w : freq)
    if (w.size() != static_cast<std::size_t>(subband_length_))
      throw DimensionError("subband weight vector length must be L/D");
  if (out.size() != static_cast<std::size_t>(length_))
    throw DimensionError("output span must have length L");

  const std::size_t L = static_cast<std::size_t>(length_);
  std::vector<cdouble> W(L);
  for (std::size_t l = 0; l < L / 2; ++l)
    W[l] = freq[static_cast<std::size_t>(bin_subband_[l])]
               [static_cast<std::size_t>(bin_index_[l])];
  W[L / 2] = cdouble{0.0, 0.0};
  for (std::size_t l = L / 2 + 1; l < L; ++l) W[l] = std::conj(W[L - l]);

  fft_full_.inverse(W);
  for (std::size_t i = 0; i < L; ++i) out[i] = W[i].real();
}

void WeightStacker::stack_time(std::span<const std::vector<cdouble>> weights,
                               std::span<double> out) const {
  if (weights.size() != static_cast<std::size_t>(num_bands_ / 2 + 1))
    throw DimensionError("expected M/2+1 subband weight vectors");
  std::vector<std::vector<cdouble>> freq(weights.size());
  for (std::size_t m = 0; m < freq.size(); ++m) {
    if (weights[m].size() != static_cast<std::size_t>(subband_length_))
      throw DimensionError("subband weight vector length must be L/D");
    freq[m] = weights[m];
    fft_sub_.forward(freq[m]);
  }
  stack_freq(freq, out);
}

void WeightStacker::stack_time(const SubbandFilterSet& filters,
                               std::span<double> out) const {
  if (filters.fullband_length_L != length_)
    throw DimensionError("filter set fullband length mismatch");
  stack_time(std::span<const std::vector<cdouble>>(filters.weights), out);
}

std::vector<double> stack_fft1(const SubbandFilterSet& filters, int M) {
  WeightStacker stacker(filters.fullband_length_L, M);
  std::vector<double> out(static_cast<std::size_t>(filters.fullband_length_L));
  stacker.stack_time(filters, out);
  return out;
}

}  // namespace anc
