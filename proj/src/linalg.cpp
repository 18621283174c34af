#include "anc/linalg.hpp"

#include <cmath>

#include "anc/errors.hpp"

namespace anc {

void cholesky_solve_inplace(std::vector<double>& a, std::span<double> b,
                            std::size_t n) {
  if (a.size() != n * n || b.size() != n)
    throw DimensionError("cholesky_solve: dimension mismatch");

  // Right-looking factorization; the trailing update parallelizes over rows
  // with each element touched by exactly one thread, so the result does not
  // depend on the thread count.
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = a[k * n + k];
    if (!(pivot > 0.0) || !std::isfinite(pivot))
      throw NumericError("cholesky_solve: matrix is not positive definite");
    pivot = std::sqrt(pivot);
    a[k * n + k] = pivot;
    const double inv = 1.0 / pivot;
    for (std::size_t i = k + 1; i < n; ++i) a[i * n + k] *= inv;
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(k) + 1; ii < last; ++ii) {
      const std::size_t i = static_cast<std::size_t>(ii);
      const double lik = a[i * n + k];
      for (std::size_t j = k + 1; j <= i; ++j) a[i * n + j] -= lik * a[j * n + k];
    }
  }

  // Forward substitution L y = b
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[i];
    for (std::size_t j = 0; j < i; ++j) acc -= a[i * n + j] * b[j];
    b[i] = acc / a[i * n + i];
  }
  // Back substitution L^T x = y
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= a[j * n + ii] * b[j];
    b[ii] = acc / a[ii * n + ii];
  }
}

}  // namespace anc
