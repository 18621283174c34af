#include "anc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "anc/errors.hpp"
#include "anc/kernels.hpp"
#include "anc/linalg.hpp"

namespace anc {

namespace {

SignalBuffer concat_segments(const ScenarioConfig& cfg) {
  if (cfg.segments.empty()) throw ConfigError("scenario has no segments");
  SignalBuffer x;
  x.sample_rate_hz = cfg.sample_rate_hz;
  for (std::size_t s = 0; s < cfg.segments.size(); ++s) {
    const ScenarioSegment& seg = cfg.segments[s];
    const SignalBuffer piece =
        gen_bandlimited_noise(seg.bands, seg.duration_s, cfg.sample_rate_hz,
                              cfg.noise_seed + 100 * s);
    x.samples.insert(x.samples.end(), piece.samples.begin(), piece.samples.end());
  }
  return x;
}

}  // namespace

std::vector<double> noise_reduction_per_second(const SignalBuffer& d,
                                               const SignalBuffer& e) {
  if (d.samples.size() != e.samples.size())
    throw DimensionError("noise_reduction_per_second: length mismatch");
  const std::size_t rate = static_cast<std::size_t>(std::llround(d.sample_rate_hz));
  if (rate == 0 || d.samples.size() < rate)
    throw SizeError("noise_reduction_per_second: signals shorter than one second");
  const std::size_t n_seconds = d.samples.size() / rate;
  std::vector<double> nr(n_seconds);
  for (std::size_t t = 0; t < n_seconds; ++t) {
    double pd = 0.0, pe = 0.0;
    for (std::size_t i = t * rate; i < (t + 1) * rate; ++i) {
      pd += d.samples[i] * d.samples[i];
      pe += e.samples[i] * e.samples[i];
    }
    nr[t] = pd <= 0.0 ? 0.0 : 10.0 * std::log10(pd / std::max(pe, 1e-300));
  }
  return nr;
}

RunResult run_scenario_signal(const SignalBuffer& x, const ScenarioConfig& cfg,
                              const ScenarioResources& res) {
  const auto t0 = std::chrono::steady_clock::now();

  RunResult result;
  result.disturbance = apply_path(cfg.primary, x);
  const SignalBuffer reference =
      mix_measurement_noise(x, cfg.snr_db, cfg.measurement_seed);
  const PathModel& sec_est = res.secondary_estimate.impulse_response.empty()
                                 ? cfg.secondary
                                 : res.secondary_estimate;

  switch (cfg.algo) {
    case Algorithm::anc_off:
      result.error = result.disturbance;
      break;
    case Algorithm::saf_fxnlms: {
      if (res.bank == nullptr) throw ConfigError("SAF-FxNLMS needs an analysis bank");
      const AdaptiveRunResult run =
          saf_fxnlms(reference, result.disturbance, cfg.secondary, sec_est,
                     *res.bank, res.nlms);
      result.error = run.error;
      result.update_steps = run.update_steps;
      result.stack_events = run.stack_events;
      result.weight_snapshots = run.weight_snapshots;
      break;
    }
    case Algorithm::sa_sfanc: {
      if (res.bank == nullptr || res.subband_db == nullptr)
        throw ConfigError("SA-SFANC needs an analysis bank and a subband database");
      const ControlResult ctl = control_sa_sfanc(reference, *res.subband_db, *res.bank);
      const SignalBuffer anti = apply_path(cfg.secondary, ctl.y);
      result.error.sample_rate_hz = x.sample_rate_hz;
      result.error.samples.resize(x.samples.size());
      for (std::size_t i = 0; i < x.samples.size(); ++i)
        result.error.samples[i] = result.disturbance.samples[i] - anti.samples[i];
      result.selections = ctl.frames;
      result.selection_events = ctl.selection_events;
      result.stack_events = ctl.stack_events;
      break;
    }
    case Algorithm::sfanc: {
      if (res.fullband_db == nullptr)
        throw ConfigError("SFANC needs a fullband database");
      const ControlResult ctl = control_sfanc(reference, *res.fullband_db);
      const SignalBuffer anti = apply_path(cfg.secondary, ctl.y);
      result.error.sample_rate_hz = x.sample_rate_hz;
      result.error.samples.resize(x.samples.size());
      for (std::size_t i = 0; i < x.samples.size(); ++i)
        result.error.samples[i] = result.disturbance.samples[i] - anti.samples[i];
      result.selections = ctl.frames;
      result.selection_events = ctl.selection_events;
      result.stack_events = ctl.stack_events;
      break;
    }
  }

  result.nr_per_second_db =
      noise_reduction_per_second(result.disturbance, result.error);
  result.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

RunResult run_scenario(const ScenarioConfig& cfg, const ScenarioResources& res) {
  return run_scenario_signal(concat_segments(cfg), cfg, res);
}

FullbandFilter wiener_oracle(const SignalBuffer& reference,
                             const SignalBuffer& disturbance, int L,
                             const PathModel& secondary) {
  if (reference.samples.size() != disturbance.samples.size())
    throw DimensionError("wiener_oracle: length mismatch");
  if (L <= 0) throw ConfigError("wiener_oracle: L must be positive");
  const std::size_t n = reference.samples.size();
  const std::size_t len = static_cast<std::size_t>(L);
  if (n < 4 * len) throw SizeError("wiener_oracle: need at least 4*L samples");

  std::vector<double> rp(n);
  kernels::fir_same(reference.samples, secondary.impulse_response, rp);

  const std::size_t n0 = len - 1;

  // Covariance-method normal equations. The first row comes from lag
  // products; the remaining entries follow the diagonal shift recursion
  // R[i+1][j+1] = R[i][j] + rp[n0-1-i]*rp[n0-1-j] - rp[N-1-i]*rp[N-1-j].
  std::vector<double> row0(len);
  kernels::lag_products(rp, rp, n0, row0);

  std::vector<double> R(len * len);
  for (std::size_t j = 0; j < len; ++j) R[j] = row0[j];
  const std::ptrdiff_t n_diag = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t dd = 0; dd < n_diag; ++dd) {
    const std::size_t d = static_cast<std::size_t>(dd);
    for (std::size_t i = 0; i + 1 < len && i + 1 + d < len; ++i) {
      const std::size_t j = i + d;
      R[(i + 1) * len + (j + 1)] = R[i * len + j] +
                                   rp[n0 - 1 - i] * rp[n0 - 1 - j] -
                                   rp[n - 1 - i] * rp[n - 1 - j];
    }
  }
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; j < i; ++j) R[i * len + j] = R[j * len + i];

  double trace = 0.0;
  for (std::size_t i = 0; i < len; ++i) trace += R[i * len + i];
  const double ridge = 1e-8 * trace;
  for (std::size_t i = 0; i < len; ++i) R[i * len + i] += ridge;

  std::vector<double> p(len);
  kernels::lag_products(rp, disturbance.samples, n0, p);

  cholesky_solve_inplace(R, p, len);
  return FullbandFilter{std::move(p)};
}

MseReport validate_eq6(double band_t_hz, double band_c_hz, double centre_hz,
                       double snr_db, int num_seeds, double duration_s,
                       double rate_hz, int filter_len, std::uint64_t seed) {
  if (!(band_c_hz > 0.0) || band_t_hz < band_c_hz)
    throw BandSpecError("validate_eq6 requires B_t >= B_c > 0");
  const double lo_t = centre_hz - band_t_hz / 2.0;
  const double hi_t = centre_hz + band_t_hz / 2.0;
  if (lo_t < 0.0 || hi_t > rate_hz / 2.0)
    throw BandSpecError("training band exceeds the Nyquist range");
  if (num_seeds < 1) throw ConfigError("validate_eq6 needs at least one seed");

  const BandSpec wide{{{lo_t, hi_t}}, {}};
  const BandSpec narrow{
      {{centre_hz - band_c_hz / 2.0, centre_hz + band_c_hz / 2.0}}, {}};
  const PathModel identity{{1.0}, "delta"};
  // Unit-gain primary path realized as a pure delay of L/2 samples: the
  // ideal control response is a two-sided sinc, and the delay centres it
  // inside the causal FIR support.
  PathModel delay_path;
  delay_path.impulse_response.assign(static_cast<std::size_t>(filter_len / 2) + 1, 0.0);
  delay_path.impulse_response.back() = 1.0;
  delay_path.label = "delay";
  const bool clean = std::isinf(snr_db) && snr_db > 0.0;
  const double sigma_q2 = clean ? 0.0 : std::pow(10.0, -snr_db / 10.0);

  double empirical_acc = 0.0, mmse_acc = 0.0;
  for (int s = 0; s < num_seeds; ++s) {
    const std::uint64_t base = seed + 7919ULL * static_cast<std::uint64_t>(s);

    // Fixed filter trained on the wide band, measurement noise present.
    const SignalBuffer x_t = gen_bandlimited_noise(wide, duration_s, rate_hz, base);
    const SignalBuffer d_t = apply_path(delay_path, x_t);
    const SignalBuffer r_t = mix_measurement_noise(x_t, snr_db, base + 1);
    const FullbandFilter w_wide = wiener_oracle(r_t, d_t, filter_len, identity);

    // Matched-band filter from an independent realization.
    const SignalBuffer x_m =
        gen_bandlimited_noise(narrow, duration_s, rate_hz, base + 2);
    const SignalBuffer d_m = apply_path(delay_path, x_m);
    const SignalBuffer r_m = mix_measurement_noise(x_m, snr_db, base + 3);
    const FullbandFilter w_match = wiener_oracle(r_m, d_m, filter_len, identity);

    // Fresh control noise.
    const SignalBuffer x_c =
        gen_bandlimited_noise(narrow, duration_s, rate_hz, base + 4);
    const SignalBuffer d_c = apply_path(delay_path, x_c);
    const SignalBuffer r_c = mix_measurement_noise(x_c, snr_db, base + 5);

    std::vector<double> y(r_c.samples.size());
    const std::size_t skip = static_cast<std::size_t>(filter_len) * 2;
    auto mse_with = [&](const FullbandFilter& w) {
      kernels::fir_same(r_c.samples, w.weights, y);
      double acc = 0.0;
      for (std::size_t i = skip; i < y.size(); ++i) {
        const double e = d_c.samples[i] - y[i];
        acc += e * e;
      }
      return acc / static_cast<double>(y.size() - skip);
    };
    empirical_acc += mse_with(w_wide);
    mmse_acc += mse_with(w_match);
  }

  MseReport report;
  report.empirical_mse = empirical_acc / num_seeds;
  report.mmse = mmse_acc / num_seeds;
  report.band_t_rad = 2.0 * M_PI * band_t_hz / rate_hz;
  report.band_c_rad = 2.0 * M_PI * band_c_hz / rate_hz;
  report.sigma_q2 = sigma_q2;
  report.predicted_mse =
      report.mmse + sigma_q2 * (report.band_t_rad - report.band_c_rad) / M_PI;
  return report;
}

}  // namespace anc
