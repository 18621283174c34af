#pragma once

#include <cstddef>
#include <span>

namespace anc::kernels {

// Data-parallel inner kernels. Each has a serial reference implementation
// and an OpenMP version; outputs are bit-identical because every output
// element is computed independently in a fixed order (no cross-thread
// reductions), so results do not depend on the thread count.

/// y[n] = sum_k h[k] * x[n-k] with zero history, n in [0, x.size()).
/// Output length equals input length (convolution tail truncated).
void fir_same_serial(std::span<const double> x, std::span<const double> h,
                     std::span<double> y);
void fir_same(std::span<const double> x, std::span<const double> h,
              std::span<double> y);

/// Same kernel restricted to outputs n in [n0, n1); history still reaches
/// back into x before n0. Used for frame-wise filtering with a constant h.
void fir_segment_serial(std::span<const double> x, std::span<const double> h,
                        std::span<double> y, std::size_t n0, std::size_t n1);
void fir_segment(std::span<const double> x, std::span<const double> h,
                 std::span<double> y, std::size_t n0, std::size_t n1);

/// out[j] = sum_{n=n0}^{N-1} x[n-j] * y[n] for j in [0, out.size()).
/// Requires n0 >= out.size() - 1 so every window is fully populated.
void lag_products_serial(std::span<const double> x, std::span<const double> y,
                         std::size_t n0, std::span<double> out);
void lag_products(std::span<const double> x, std::span<const double> y,
                  std::size_t n0, std::span<double> out);

}  // namespace anc::kernels
