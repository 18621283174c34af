#include "anc/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anc/errors.hpp"
#include "anc/kernels.hpp"

namespace anc {

void NlmsConfig::validate() const {
  if (!(step_size_mu > 0.0) || step_size_mu > 2.0)
    throw ConfigError("step size must be in (0, 2]");
  if (!(regularizer_eps > 0.0)) throw ConfigError("regularizer must be positive");
  if (fullband_length_L <= 0) throw ConfigError("filter length must be positive");
  if (stack_stride <= 0) throw ConfigError("stack_stride must be positive");
}

void NlmsConfig::validate(int decimation) const {
  validate();
  if (fullband_length_L % decimation != 0)
    throw ConfigError("filter length must be divisible by the decimation factor");
}

void nlms_step(std::span<double> w, std::span<const double> u, double err,
               double mu, double eps) {
  if (w.size() != u.size()) throw DimensionError("nlms_step: length mismatch");
  double energy = 0.0;
  for (double v : u) energy += v * v;
  const double coef = mu * err / (energy + eps);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] += u[j] * coef;
}

void cnlms_step(std::span<cdouble> w, std::span<const cdouble> u, cdouble err,
                double mu, double eps) {
  if (w.size() != u.size()) throw DimensionError("cnlms_step: length mismatch");
  double energy = 0.0;
  for (const cdouble v : u) energy += std::norm(v);
  const cdouble coef = mu * err / (energy + eps);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] += std::conj(u[j]) * coef;
}

namespace {

inline double dot_history(std::span<const double> w, std::span<const double> x,
                          std::size_t n) {
  const std::size_t kmax = std::min(w.size() - 1, n);
  double acc = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) acc += w[k] * x[n - k];
  return acc;
}

}  // namespace

AdaptiveRunResult fullband_fxnlms(const SignalBuffer& reference,
                                  const SignalBuffer& disturbance,
                                  const PathModel& secondary,
                                  const PathModel& secondary_estimate,
                                  const NlmsConfig& cfg) {
  if (reference.samples.size() != disturbance.samples.size())
    throw DimensionError("reference and disturbance must have equal length");
  cfg.validate();

  const std::size_t n_samples = reference.samples.size();
  const std::size_t L = static_cast<std::size_t>(cfg.fullband_length_L);
  const double mu = cfg.step_size_mu;
  const double eps = cfg.regularizer_eps;

  std::vector<double> rp(n_samples);
  kernels::fir_same(reference.samples, secondary_estimate.impulse_response, rp);

  std::vector<double> w(L, 0.0);
  std::vector<double> y(n_samples, 0.0);
  AdaptiveRunResult result;
  result.disturbance = disturbance;
  result.error.sample_rate_hz = reference.sample_rate_hz;
  result.error.samples.resize(n_samples);

  const std::span<const double> r(reference.samples);
  const std::span<const double> s(secondary.impulse_response);

  for (std::size_t n = 0; n < n_samples; ++n) {
    y[n] = dot_history(w, r, n);
    const double anti = dot_history(s, y, n);
    const double e = disturbance.samples[n] - anti;
    result.error.samples[n] = e;

    const std::size_t kmax = std::min(L - 1, n);
    double energy = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) energy += rp[n - k] * rp[n - k];
    const double coef = mu * e / (energy + eps);
    for (std::size_t k = 0; k <= kmax; ++k) w[k] += rp[n - k] * coef;
    ++result.update_steps;

    if (cfg.snapshot_every > 0 &&
        (n + 1) % static_cast<std::size_t>(cfg.snapshot_every) == 0)
      result.weight_snapshots.emplace_back(n, FullbandFilter{w});
  }

  result.final_weights.weights = std::move(w);
  return result;
}

AdaptiveRunResult saf_fxnlms(const SignalBuffer& reference,
                             const SignalBuffer& disturbance,
                             const PathModel& secondary,
                             const PathModel& secondary_estimate,
                             const AnalysisBank& bank, const NlmsConfig& cfg,
                             std::span<const int> subband_order) {
  if (reference.samples.size() != disturbance.samples.size())
    throw DimensionError("reference and disturbance must have equal length");
  const int D = bank.decimation();
  cfg.validate(D);

  const std::size_t n_samples = reference.samples.size();
  const std::size_t L = static_cast<std::size_t>(cfg.fullband_length_L);
  const std::size_t Ls = L / static_cast<std::size_t>(D);
  const std::size_t n_sub = static_cast<std::size_t>(bank.num_subbands());
  const double mu = cfg.step_size_mu;
  const double eps = cfg.regularizer_eps;

  std::vector<int> natural(n_sub);
  std::iota(natural.begin(), natural.end(), 0);
  std::span<const int> order = subband_order.empty()
                                   ? std::span<const int>(natural)
                                   : subband_order;
  if (order.size() != n_sub)
    throw DimensionError("subband order must cover all retained subbands");

  // The filtered reference and its subband decomposition depend only on the
  // input, so both are computed up front.
  std::vector<double> rp(n_samples);
  kernels::fir_same(reference.samples, secondary_estimate.impulse_response, rp);
  std::vector<cdouble> rp_c(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) rp_c[i] = {rp[i], 0.0};
  const SubbandFrame rp_sub = analyze(bank, rp_c, reference.sample_rate_hz);

  AnalysisState err_bank(bank);
  WeightStacker stacker(cfg.fullband_length_L, bank.num_bands());

  std::vector<std::vector<cdouble>> w_sub(n_sub,
                                          std::vector<cdouble>(Ls, cdouble{0.0, 0.0}));
  std::vector<double> w(L, 0.0);
  std::vector<double> y(n_samples, 0.0);
  std::vector<cdouble> e_out(n_sub);

  AdaptiveRunResult result;
  result.disturbance = disturbance;
  result.error.sample_rate_hz = reference.sample_rate_hz;
  result.error.samples.resize(n_samples);

  const std::span<const double> r(reference.samples);
  const std::span<const double> s(secondary.impulse_response);

  std::size_t z = 0;           // decimated step counter
  int since_stack = 0;

  for (std::size_t n = 0; n < n_samples; ++n) {
    y[n] = dot_history(w, r, n);
    const double anti = dot_history(s, y, n);
    const double e = disturbance.samples[n] - anti;
    result.error.samples[n] = e;

    if (err_bank.push(e, e_out)) {
      for (const int m : order) {
        const std::vector<cdouble>& stream = rp_sub.subbands[static_cast<std::size_t>(m)];
        std::vector<cdouble>& wm = w_sub[static_cast<std::size_t>(m)];
        const std::size_t jmax = std::min(Ls - 1, z);
        double energy = 0.0;
        for (std::size_t j = 0; j <= jmax; ++j) energy += std::norm(stream[z - j]);
        const cdouble coef =
            mu * e_out[static_cast<std::size_t>(m)] / (energy + eps);
        for (std::size_t j = 0; j <= jmax; ++j)
          wm[j] += std::conj(stream[z - j]) * coef;
      }
      ++z;
      ++result.update_steps;

      if (++since_stack >= cfg.stack_stride) {
        since_stack = 0;
        stacker.stack_time(std::span<const std::vector<cdouble>>(w_sub), w);
        ++result.stack_events;
      }
    }

    if (cfg.snapshot_every > 0 &&
        (n + 1) % static_cast<std::size_t>(cfg.snapshot_every) == 0)
      result.weight_snapshots.emplace_back(n, FullbandFilter{w});
  }

  result.final_subband_filters.fullband_length_L = cfg.fullband_length_L;
  result.final_subband_filters.weights = std::move(w_sub);
  result.final_weights.weights = std::move(w);
  return result;
}

}  // namespace anc
