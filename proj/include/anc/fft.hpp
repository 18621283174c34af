#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace anc {

using cdouble = std::complex<double>;

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
std::size_t next_pow2(std::size_t n);

/// Iterative radix-2 FFT plan for power-of-two sizes. Forward transform is
/// unscaled; the inverse applies the 1/N factor.
class Fft {
public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(std::span<cdouble> x) const;
  void inverse(std::span<cdouble> x) const;

private:
  void transform(std::span<cdouble> x, bool invert) const;

  std::size_t n_;
  std::vector<std::uint32_t> bitrev_;
  std::vector<cdouble> twiddle_;  // e^{-2pi i k / n}, k in [0, n/2)
};

/// DFT plan for arbitrary lengths: radix-2 fast path, Bluestein's algorithm
/// otherwise. Same scaling conventions as Fft.
class Dft {
public:
  explicit Dft(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(std::span<cdouble> x) const;
  void inverse(std::span<cdouble> x) const;

private:
  std::size_t n_;
  std::unique_ptr<Fft> direct_;    // set when n is a power of two
  std::unique_ptr<Fft> conv_;      // Bluestein convolution plan
  std::vector<cdouble> chirp_;     // e^{-i pi j^2 / n}
  std::vector<cdouble> kernel_ft_; // FFT of the wrapped conjugate chirp
};

}  // namespace anc
