#pragma once

// Quarter-annulus masks over the DCT coefficient grid.
//
// A coefficient at zero-based indices (u, v) sits at radius sqrt(u^2 + v^2)
// from the DC corner. For an H x W grid the nominal maximum radius is
// r_max = sqrt(H^2 + W^2); every actual grid cell lies strictly inside it.
// A MaskSpec zeroes the half-open annulus r_inner <= r < r_outer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sfm/random.hpp"

namespace sfm {

enum class MaskMode { central, targeted };

struct Dims {
  int height = 0;
  int width = 0;
};

inline double max_radius(Dims d) {
  return std::hypot(static_cast<double>(d.height), static_cast<double>(d.width));
}

// Sampled annulus parameters. r_center / sigma_delta are present exactly when
// mode == targeted.
struct MaskSpec {
  MaskMode mode = MaskMode::central;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double r_max = 0.0;
  std::optional<double> r_center;
  std::optional<double> sigma_delta;
};

// Realized binary mask: bit 1 keeps the coefficient, 0 zeroes it. One mask is
// shared by all channels of an image.
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  bool keep(int u, int v) const {
    return bits[static_cast<std::size_t>(u) * width + v] != 0;
  }
  std::size_t masked_count() const {
    std::size_t n = 0;
    for (auto b : bits) n += (b == 0);
    return n;
  }
};

// Probability that the band at radius r is masked by a central-mode draw:
//   P = 2 * (r/r_max - (r/r_max)^2).
// Zero at DC and at r_max, maximum 1/2 at r_max/2.
double band_mask_probability(double r, double r_max);

// Central mode: both annulus edges are independent Uniform[0, r_max] draws,
// swapped if needed so r_inner <= r_outer. Consumes exactly two engine calls.
template <rng::Engine64 G>
MaskSpec sample_central(Dims dims, G& g) {
  if (dims.height < 1 || dims.width < 1)
    throw std::invalid_argument("sample_central: dimensions must be >= 1");
  const double r_max = max_radius(dims);
  double a = r_max * rng::uniform01(g);
  double b = r_max * rng::uniform01(g);
  if (a > b) std::swap(a, b);
  MaskSpec spec;
  spec.mode = MaskMode::central;
  spec.r_inner = a;
  spec.r_outer = b;
  spec.r_max = r_max;
  return spec;
}

// Targeted mode: the annulus always covers r_center, with half-normal offsets
//   r_inner = max(0, r_center - |N(0, sigma_delta^2)|)
//   r_outer = min(r_max * sqrt(2), r_center + |N(0, sigma_delta^2)|).
// Consumes exactly four engine calls (two per half-normal draw).
template <rng::Engine64 G>
MaskSpec sample_targeted(Dims dims, double r_center, double sigma_delta, G& g) {
  if (dims.height < 1 || dims.width < 1)
    throw std::invalid_argument("sample_targeted: dimensions must be >= 1");
  const double r_max = max_radius(dims);
  if (!(r_center >= 0.0) || r_center > r_max)
    throw std::invalid_argument("sample_targeted: r_center must lie in [0, r_max]");
  if (!(sigma_delta > 0.0))
    throw std::invalid_argument("sample_targeted: sigma_delta must be > 0");
  const double delta_in = rng::half_normal(sigma_delta, g);
  const double delta_out = rng::half_normal(sigma_delta, g);
  MaskSpec spec;
  spec.mode = MaskMode::targeted;
  spec.r_inner = std::max(0.0, r_center - delta_in);
  spec.r_outer = std::min(r_max * std::sqrt(2.0), r_center + delta_out);
  // Keep the center band strictly inside the half-open interval even when the
  // outer offset underflows to zero width.
  if (spec.r_outer <= r_center)
    spec.r_outer = std::nextafter(r_center, std::numeric_limits<double>::infinity());
  spec.r_max = r_max;
  spec.r_center = r_center;
  spec.sigma_delta = sigma_delta;
  return spec;
}

// Rasterizes a spec onto the coefficient grid: cell (u, v) is zeroed when
// r_inner <= sqrt(u^2+v^2) < r_outer. spec.r_max must match the grid.
Mask realize(const MaskSpec& spec, Dims dims);

}  // namespace sfm
