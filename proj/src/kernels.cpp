#include "anc/kernels.hpp"

#include <algorithm>

#include "anc/errors.hpp"

namespace anc::kernels {

namespace {

inline double fir_at(std::span<const double> x, std::span<const double> h,
                     std::size_t n) {
  const std::size_t kmax = std::min(h.size() - 1, n);
  double acc = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) acc += h[k] * x[n - k];
  return acc;
}

inline double lag_at(std::span<const double> x, std::span<const double> y,
                     std::size_t n0, std::size_t j) {
  double acc = 0.0;
  for (std::size_t n = n0; n < y.size(); ++n) acc += x[n - j] * y[n];
  return acc;
}

}  // namespace

void fir_same_serial(std::span<const double> x, std::span<const double> h,
                     std::span<double> y) {
  if (y.size() != x.size()) throw DimensionError("fir_same: output length mismatch");
  if (h.empty()) throw DimensionError("fir_same: empty filter");
  for (std::size_t n = 0; n < x.size(); ++n) y[n] = fir_at(x, h, n);
}

void fir_same(std::span<const double> x, std::span<const double> h,
              std::span<double> y) {
  if (y.size() != x.size()) throw DimensionError("fir_same: output length mismatch");
  if (h.empty()) throw DimensionError("fir_same: empty filter");
  const std::ptrdiff_t n_out = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < n_out; ++n)
    y[static_cast<std::size_t>(n)] = fir_at(x, h, static_cast<std::size_t>(n));
}

void fir_segment_serial(std::span<const double> x, std::span<const double> h,
                        std::span<double> y, std::size_t n0, std::size_t n1) {
  if (y.size() != x.size()) throw DimensionError("fir_segment: output length mismatch");
  if (n1 > x.size() || n0 > n1) throw DimensionError("fir_segment: bad range");
  for (std::size_t n = n0; n < n1; ++n) y[n] = fir_at(x, h, n);
}

void fir_segment(std::span<const double> x, std::span<const double> h,
                 std::span<double> y, std::size_t n0, std::size_t n1) {
  if (y.size() != x.size()) throw DimensionError("fir_segment: output length mismatch");
  if (n1 > x.size() || n0 > n1) throw DimensionError("fir_segment: bad range");
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = static_cast<std::ptrdiff_t>(n0);
       n < static_cast<std::ptrdiff_t>(n1); ++n)
    y[static_cast<std::size_t>(n)] = fir_at(x, h, static_cast<std::size_t>(n));
}

void lag_products_serial(std::span<const double> x, std::span<const double> y,
                         std::size_t n0, std::span<double> out) {
  if (x.size() != y.size()) throw DimensionError("lag_products: length mismatch");
  if (!out.empty() && n0 + 1 < out.size())
    throw DimensionError("lag_products: n0 too small for requested lags");
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = lag_at(x, y, n0, j);
}

void lag_products(std::span<const double> x, std::span<const double> y,
                  std::size_t n0, std::span<double> out) {
  if (x.size() != y.size()) throw DimensionError("lag_products: length mismatch");
  if (!out.empty() && n0 + 1 < out.size())
    throw DimensionError("lag_products: n0 too small for requested lags");
  const std::ptrdiff_t n_lags = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n_lags; ++j)
    out[static_cast<std::size_t>(j)] = lag_at(x, y, n0, static_cast<std::size_t>(j));
}

}  // namespace anc::kernels
