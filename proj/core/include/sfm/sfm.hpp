#pragma once

// Stochastic frequency masking: zero a sampled annulus of an image's DCT
// coefficients and transform back.

#include <optional>
#include <utility>

#include "sfm/image.hpp"
#include "sfm/mask.hpp"
#include "sfm/random.hpp"
#include "sfm/transform.hpp"

namespace sfm {

struct SfmConfig {
  MaskMode mode = MaskMode::central;
  // Probability that maybe_apply_sfm masks a given image.
  double rate = 0.5;
  // Targeted-mode parameters, as fractions of the grid's r_max so one config
  // covers images of any size.
  double r_center_frac = 0.85;
  double sigma_delta_frac = 0.15;
  // Clamp the output to the image's nominal range. Off by default: masking is
  // a linear operation and downstream consumers may want the raw result.
  bool clamp_output = false;
};

struct SfmOutcome {
  Image image;
  bool applied = false;
  std::optional<MaskSpec> spec;  // present iff applied
};

// Forward DCT, zero the masked coefficients, inverse DCT. The same mask is
// applied to every channel. Returns the filtered image and the realized mask.
// Output is not clamped.
std::pair<Image, Mask> apply_sfm(const Image& img, const MaskSpec& spec);

// Draws the annulus parameters for an image of the given size. Consumes
// exactly two engine calls in central mode, four in targeted mode.
template <rng::Engine64 G>
MaskSpec sample_spec(Dims dims, const SfmConfig& cfg, G& g) {
  if (cfg.mode == MaskMode::central) return sample_central(dims, g);
  const double r_max = max_radius(dims);
  return sample_targeted(dims, cfg.r_center_frac * r_max, cfg.sigma_delta_frac * r_max, g);
}

// Applies SFM with probability cfg.rate. Both branches consume the same fixed
// number of engine calls (1 gate + 2 central or 4 targeted spec draws), so a
// stream stays aligned no matter which branch is taken.
template <rng::Engine64 G>
SfmOutcome maybe_apply_sfm(const Image& img, const SfmConfig& cfg, G& g) {
  validate_image(img, "maybe_apply_sfm");
  if (!(cfg.rate >= 0.0) || !(cfg.rate <= 1.0))
    throw std::invalid_argument("maybe_apply_sfm: rate must lie in [0, 1]");
  const bool fire = rng::uniform01(g) < cfg.rate;
  const MaskSpec spec = sample_spec({img.height, img.width}, cfg, g);
  SfmOutcome out;
  if (!fire) {
    out.image = img;
    return out;
  }
  out.image = apply_sfm(img, spec).first;
  out.applied = true;
  out.spec = spec;
  if (cfg.clamp_output) clamp_to_range(out.image);
  return out;
}

}  // namespace sfm
