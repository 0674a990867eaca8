#include "sfm/mask.hpp"

namespace sfm {

double band_mask_probability(double r, double r_max) {
  if (!(r_max > 0.0)) throw std::invalid_argument("band_mask_probability: r_max must be > 0");
  if (!(r >= 0.0) || r > r_max)
    throw std::invalid_argument("band_mask_probability: r must lie in [0, r_max]");
  const double t = r / r_max;
  return 2.0 * (t - t * t);
}

Mask realize(const MaskSpec& spec, Dims dims) {
  if (dims.height < 1 || dims.width < 1)
    throw std::invalid_argument("realize: dimensions must be >= 1");
  if (!(spec.r_inner >= 0.0) || !(spec.r_outer >= spec.r_inner))
    throw std::invalid_argument("realize: need 0 <= r_inner <= r_outer");
  const double r_max = max_radius(dims);
  if (std::abs(spec.r_max - r_max) > 1e-9 * std::max(1.0, r_max))
    throw std::invalid_argument("realize: spec.r_max does not match the grid");
  Mask m;
  m.height = dims.height;
  m.width = dims.width;
  m.bits.assign(static_cast<std::size_t>(dims.height) * dims.width, 1);
  for (int u = 0; u < dims.height; ++u) {
    for (int v = 0; v < dims.width; ++v) {
      const double r = std::hypot(static_cast<double>(u), static_cast<double>(v));
      if (r >= spec.r_inner && r < spec.r_outer)
        m.bits[static_cast<std::size_t>(u) * dims.width + v] = 0;
    }
  }
  return m;
}

}  // namespace sfm
