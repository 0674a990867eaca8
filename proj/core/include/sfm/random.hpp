#pragma once

// Seeded random streams and the sampling primitives used across the library.
//
// All distribution code is written against raw 64-bit engine output so that a
// given seed produces the same values on every platform and standard library.
// Draw counts that contracts rely on:
//   uniform01 / uniform_open01 / uniform_range : 1 engine call
//   standard_normal / half_normal              : 2 engine calls
//   poisson                                    : variable (rejection)

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace sfm::rng {

template <class G>
concept Engine64 = requires(G g) {
  { g() } -> std::convertible_to<std::uint64_t>;
} && G::max() == std::numeric_limits<std::uint64_t>::max() && G::min() == 0;

using engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Per-item stream id: hash of the master seed and the item's index. Used by
// the batch pipeline so that item k sees the same stream regardless of how
// many workers run or in which order items complete.
inline std::uint64_t derive_stream_id(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x51ed270b7a649c5dull));
}

inline engine make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return engine(derive_stream_id(master_seed, index));
}

// Uniform on [0, 1), 53-bit resolution, exactly one engine call.
template <Engine64 G>
double uniform01(G& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1): both endpoints excluded so log() stays finite. 52-bit
// resolution; at 53 bits the + 0.5 offset is no longer representable and the
// top draw would round up to exactly 1.0.
template <Engine64 G>
double uniform_open01(G& g) {
  return (static_cast<double>(g() >> 12) + 0.5) * 0x1.0p-52;
}

template <Engine64 G>
double uniform_range(double lo, double hi, G& g) {
  return lo + (hi - lo) * uniform01(g);
}

// Standard normal via the trigonometric Box-Muller transform. Exactly two
// engine calls; the sine branch of the pair is discarded so the draw count
// stays fixed.
template <Engine64 G>
double standard_normal(G& g) {
  const double u1 = uniform_open01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// |N(0, sigma^2)|, two engine calls. Mean is sigma * sqrt(2/pi).
template <Engine64 G>
double half_normal(double sigma, G& g) {
  return std::abs(sigma * standard_normal(g));
}

namespace detail {

// Knuth's product method. O(lambda) draws; only used for small lambda.
template <Engine64 G>
std::uint64_t poisson_small(double lambda, G& g) {
  const double limit = std::exp(-lambda);
  std::uint64_t k = 0;
  double p = uniform_open01(g);
  while (p > limit) {
    ++k;
    p *= uniform_open01(g);
  }
  return k;
}

// Hormann's PTRS transformed-rejection sampler for lambda >= 10.
template <Engine64 G>
std::uint64_t poisson_ptrs(double lambda, G& g) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform01(g) - 0.5;
    const double v = uniform_open01(g);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -lambda + k * loglam - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(k);
  }
}

}  // namespace detail

template <Engine64 G>
std::uint64_t poisson(double lambda, G& g) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("poisson: lambda must be >= 0");
  if (lambda == 0.0) return 0;
  return lambda < 30.0 ? detail::poisson_small(lambda, g) : detail::poisson_ptrs(lambda, g);
}

}  // namespace sfm::rng
