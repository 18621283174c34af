#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "anc/errors.hpp"
#include "anc/fft.hpp"
#include "anc/rng.hpp"

using anc::cdouble;

namespace {

// Quadratic-time DFT oracle.
std::vector<cdouble> naive_dft(const std::vector<cdouble>& x) {
  const std::size_t n = x.size();
  std::vector<cdouble> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cdouble acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = -2.0 * M_PI * static_cast<double>(j * k % n) /
                       static_cast<double>(n);
      acc += x[j] * cdouble{std::cos(a), std::sin(a)};
    }
    out[k] = acc;
  }
  return out;
}

std::vector<cdouble> random_signal(std::size_t n, std::uint64_t seed) {
  anc::Rng rng(seed);
  std::vector<cdouble> x(n);
  for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
  return x;
}

}  // namespace

TEST_CASE("pow2 fft matches the naive dft") {
  for (std::size_t n : {2u, 8u, 64u, 256u}) {
    auto x = random_signal(n, 42 + n);
    auto expected = naive_dft(x);
    anc::Fft fft(n);
    fft.forward(x);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(x[k] - expected[k]) < 1e-9 * static_cast<double>(n));
  }
}

TEST_CASE("bluestein dft matches the naive dft on non-pow2 lengths") {
  for (std::size_t n : {3u, 12u, 100u, 375u, 1000u}) {
    auto x = random_signal(n, 7 + n);
    auto expected = naive_dft(x);
    anc::Dft dft(n);
    dft.forward(x);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(x[k] - expected[k]) < 1e-8 * static_cast<double>(n));
  }
}

TEST_CASE("inverse undoes forward") {
  for (std::size_t n : {16u, 48u, 192u}) {
    const auto original = random_signal(n, 99 + n);
    auto x = original;
    anc::Dft dft(n);
    dft.forward(x);
    dft.inverse(x);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(x[k] - original[k]) < 1e-11);
  }
}

TEST_CASE("fft rejects wrong sizes") {
  CHECK_THROWS_AS(anc::Fft(12), anc::SizeError);
  anc::Fft fft(8);
  std::vector<cdouble> x(4);
  CHECK_THROWS_AS(fft.forward(x), anc::DimensionError);
}
