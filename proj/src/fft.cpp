#include "anc/fft.hpp"

#include <cmath>

#include "anc/errors.hpp"

namespace anc {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(std::size_t n) : n_(n) {
  if (!is_pow2(n)) throw SizeError("Fft size must be a power of two");
  bitrev_.resize(n);
  std::uint32_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bitrev_[i] = j;
    std::size_t bit = n >> 1;
    while (j & bit) {
      j ^= static_cast<std::uint32_t>(bit);
      bit >>= 1;
    }
    j |= static_cast<std::uint32_t>(bit);
  }
  twiddle_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double a = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    twiddle_[k] = {std::cos(a), std::sin(a)};
  }
}

void Fft::transform(std::span<cdouble> x, bool invert) const {
  if (x.size() != n_) throw DimensionError("Fft buffer length mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = bitrev_[i];
    if (i < r) std::swap(x[i], x[r]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n_ / len;
    for (std::size_t i = 0; i < n_; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cdouble w = twiddle_[k * step];
        if (invert) w = std::conj(w);
        const cdouble u = x[i + k];
        const cdouble v = x[i + k + half] * w;
        x[i + k] = u + v;
        x[i + k + half] = u - v;
      }
    }
  }
  if (invert) {
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : x) v *= scale;
  }
}

void Fft::forward(std::span<cdouble> x) const { transform(x, false); }
void Fft::inverse(std::span<cdouble> x) const { transform(x, true); }

Dft::Dft(std::size_t n) : n_(n) {
  if (n == 0) throw SizeError("Dft size must be positive");
  if (is_pow2(n)) {
    direct_ = std::make_unique<Fft>(n);
    return;
  }
  const std::size_t m = next_pow2(2 * n - 1);
  conv_ = std::make_unique<Fft>(m);
  chirp_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    // j^2 mod 2n keeps the twiddle argument exact for large j
    const std::uint64_t q = (static_cast<std::uint64_t>(j) * j) % (2 * n);
    const double a = -M_PI * static_cast<double>(q) / static_cast<double>(n);
    chirp_[j] = {std::cos(a), std::sin(a)};
  }
  std::vector<cdouble> kernel(m, cdouble{0.0, 0.0});
  kernel[0] = std::conj(chirp_[0]);
  for (std::size_t j = 1; j < n; ++j) {
    kernel[j] = std::conj(chirp_[j]);
    kernel[m - j] = std::conj(chirp_[j]);
  }
  conv_->forward(kernel);
  kernel_ft_ = std::move(kernel);
}

void Dft::forward(std::span<cdouble> x) const {
  if (x.size() != n_) throw DimensionError("Dft buffer length mismatch");
  if (direct_) {
    direct_->forward(x);
    return;
  }
  const std::size_t m = conv_->size();
  std::vector<cdouble> a(m, cdouble{0.0, 0.0});
  for (std::size_t j = 0; j < n_; ++j) a[j] = x[j] * chirp_[j];
  conv_->forward(a);
  for (std::size_t j = 0; j < m; ++j) a[j] *= kernel_ft_[j];
  conv_->inverse(a);
  for (std::size_t k = 0; k < n_; ++k) x[k] = a[k] * chirp_[k];
}

void Dft::inverse(std::span<cdouble> x) const {
  if (x.size() != n_) throw DimensionError("Dft buffer length mismatch");
  if (direct_) {
    direct_->inverse(x);
    return;
  }
  for (auto& v : x) v = std::conj(v);
  forward(x);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : x) v = std::conj(v) * scale;
}

}  // namespace anc
