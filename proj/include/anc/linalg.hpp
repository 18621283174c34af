#pragma once

#include <span>
#include <vector>

namespace anc {

/// Solves the symmetric positive-definite system A x = b via Cholesky.
/// A is n x n row-major and is overwritten with its lower factor; b is
/// overwritten with the solution. Throws NumericError when a pivot fails.
void cholesky_solve_inplace(std::vector<double>& a, std::span<double> b,
                            std::size_t n);

}  // namespace anc
