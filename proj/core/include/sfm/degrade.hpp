#pragma once

// Super-resolution degradation chain: blur -> downsample -> noise.
//
// Noise parameters (sigma, sigma_min/max, read_sigma, gain) are always
// expressed on the byte scale [0, 255]. Applied to a unit-range image they
// are divided by 255, so one parameterization means the same physical noise
// at either range.

#include <optional>
#include <stdexcept>
#include <vector>

#include "sfm/image.hpp"
#include "sfm/random.hpp"

namespace sfm {

enum class KernelKind { gaussian, bicubic_prefilter };

// 2D blur kernel with odd side and taps summing to 1. Kernels built by the
// factories below are outer products of a symmetric 1D profile, kept in `sep`
// so convolve() can run the two-pass path.
struct BlurKernel {
  KernelKind kind = KernelKind::gaussian;
  int side = 1;
  std::optional<double> sigma;
  std::vector<double> taps;  // side * side, row-major
  std::vector<double> sep;   // 1D profile (size == side) when separable
};

// Single unit tap: convolving with it is the identity.
BlurKernel identity_kernel();

// Isotropic Gaussian, side = 2*ceil(3*sigma) + 1, normalized to sum 1.
BlurKernel gaussian_kernel(double sigma);

// Antialias prefilter for bicubic downscaling by `scale`: the Keys cubic
// (a = -0.5) stretched by the scale factor and sampled on the integer grid.
BlurKernel bicubic_prefilter(int scale);

enum class DownsampleKind { decimate, bicubic };

enum class NoiseKind { none, awgn_fixed, awgn_blind, poisson_gaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;                        // awgn_fixed
  double sigma_min = 0.0, sigma_max = 0.0;   // awgn_blind
  double gain = 1.0, read_sigma = 0.0;       // poisson_gaussian
};

inline NoiseModel no_noise() { return {}; }
NoiseModel awgn(double sigma);
NoiseModel awgn_blind(double sigma_min, double sigma_max);
NoiseModel poisson_gaussian(double gain, double read_sigma);

struct DegradationConfig {
  BlurKernel kernel = identity_kernel();
  int scale = 1;  // one of {1, 2, 3, 4, 8}
  NoiseModel noise;
};

// Throws std::invalid_argument if the config violates its contract
// (unknown scale factor, malformed kernel, bad noise parameters).
void validate_degradation(const DegradationConfig& cfg);

// Same-size convolution with symmetric (edge-repeating) boundary reflection.
// The kernel must be odd-sided and no larger than twice the image extent.
Image convolve(const Image& img, const BlurKernel& k);

// Reduces each axis by an integer factor; output is floor(H/T) x floor(W/T).
//   decimate : keep every T-th sample starting at index 0 (no filtering).
//   bicubic  : Keys cubic resampling (a = -0.5), center-aligned source
//              mapping src = (dst + 0.5)*T - 0.5, with the kernel stretched
//              by T as the antialias prefilter. T = 1 is the identity.
Image downsample(const Image& img, int factor, DownsampleKind kind);

struct NoiseApplication {
  Image image;
  // Byte-scale sigma drawn by awgn_blind; empty for the other models.
  std::optional<double> sigma_drawn;
};

namespace detail {
void validate_noise(const NoiseModel& m);

template <rng::Engine64 G>
void add_gaussian_field(Image& img, double sigma, G& g) {
  // Pairwise Box-Muller: two engine calls yield two samples.
  const std::size_t n = img.data.size();
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    const double u1 = rng::uniform_open01(g);
    const double u2 = rng::uniform01(g);
    const double m = std::sqrt(-2.0 * std::log(u1));
    img.data[i] += sigma * m * std::cos(2.0 * M_PI * u2);
    img.data[i + 1] += sigma * m * std::sin(2.0 * M_PI * u2);
  }
  if (n % 2 != 0) img.data[n - 1] += sigma * rng::standard_normal(g);
}
}  // namespace detail

// Adds noise per the model; the input is otherwise untouched (no clamping).
template <rng::Engine64 G>
NoiseApplication add_noise_traced(const Image& img, const NoiseModel& m, G& g) {
  validate_image(img, "add_noise");
  detail::validate_noise(m);
  NoiseApplication out;
  out.image = img;
  const double unit = img.range == NominalRange::byte ? 1.0 : 1.0 / 255.0;
  switch (m.kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::awgn_fixed:
      detail::add_gaussian_field(out.image, m.sigma * unit, g);
      break;
    case NoiseKind::awgn_blind: {
      const double sigma = rng::uniform_range(m.sigma_min, m.sigma_max, g);
      out.sigma_drawn = sigma;
      detail::add_gaussian_field(out.image, sigma * unit, g);
      break;
    }
    case NoiseKind::poisson_gaussian: {
      const double gain = m.gain * unit;
      const double read = m.read_sigma * unit;
      for (double& v : out.image.data) {
        if (v < 0.0)
          throw std::invalid_argument("add_noise: poisson_gaussian needs samples >= 0");
        v = gain * static_cast<double>(rng::poisson(v / gain, g));
        if (read > 0.0) v += read * rng::standard_normal(g);
      }
      break;
    }
  }
  return out;
}

template <rng::Engine64 G>
Image add_noise(const Image& img, const NoiseModel& m, G& g) {
  return add_noise_traced(img, m, g).image;
}

struct DegradeOutcome {
  Image image;
  std::optional<double> sigma_drawn;
};

// Full chain. The bicubic-prefilter kernel folds the blur into the bicubic
// resampler; a Gaussian kernel convolves first and then decimates.
template <rng::Engine64 G>
DegradeOutcome degrade_sr_traced(const Image& hr, const DegradationConfig& cfg, G& g) {
  validate_image(hr, "degrade_sr");
  validate_degradation(cfg);
  Image low;
  if (cfg.kernel.kind == KernelKind::bicubic_prefilter) {
    low = downsample(hr, cfg.scale, DownsampleKind::bicubic);
  } else {
    low = downsample(convolve(hr, cfg.kernel), cfg.scale, DownsampleKind::decimate);
  }
  NoiseApplication noisy = add_noise_traced(low, cfg.noise, g);
  return {std::move(noisy.image), noisy.sigma_drawn};
}

template <rng::Engine64 G>
Image degrade_sr(const Image& hr, const DegradationConfig& cfg, G& g) {
  return degrade_sr_traced(hr, cfg, g).image;
}

}  // namespace sfm
