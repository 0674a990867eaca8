#include "sfm/degrade.hpp"

#include <cmath>

namespace sfm {

namespace {

// Keys cubic interpolation kernel with a = -0.5.
double cubic(double x) {
  x = std::abs(x);
  if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
  if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
  return 0.0;
}

BlurKernel from_profile(KernelKind kind, std::vector<double> profile,
                        std::optional<double> sigma) {
  const int side = static_cast<int>(profile.size());
  double sum = 0.0;
  for (double v : profile) sum += v;
  for (double& v : profile) v /= sum;
  BlurKernel k;
  k.kind = kind;
  k.side = side;
  k.sigma = sigma;
  k.sep = profile;
  k.taps.resize(static_cast<std::size_t>(side) * side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      k.taps[static_cast<std::size_t>(y) * side + x] = profile[y] * profile[x];
  return k;
}

// Symmetric extension with the edge sample repeated: ..., x1, x0 | x0, x1, ...
// This matches the extension the DCT-II implies, so blurring commutes with the
// transform up to roundoff. The loop folds as often as needed.
inline int reflect(int i, int n) {
  if (i >= 0 && i < n) return i;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

void validate_kernel(const BlurKernel& k) {
  if (k.side < 1 || k.side % 2 == 0)
    throw std::invalid_argument("convolve: kernel side must be odd and >= 1");
  if (k.taps.size() != static_cast<std::size_t>(k.side) * k.side)
    throw std::invalid_argument("convolve: tap count does not match kernel side");
  if (!k.sep.empty() && k.sep.size() != static_cast<std::size_t>(k.side))
    throw std::invalid_argument("convolve: separable profile size does not match side");
}

// Resampling weights for one axis of a bicubic downscale.
struct AxisWeights {
  int count;              // taps per output sample
  std::vector<double> w;  // count weights per output index, row-major
};

int bicubic_lo(int j, int factor) {
  const double src = (j + 0.5) * static_cast<double>(factor) - 0.5;
  return static_cast<int>(std::ceil(src - 2.0 * factor));
}

AxisWeights bicubic_axis(int out_n, int factor) {
  const double t = static_cast<double>(factor);
  AxisWeights aw;
  aw.count = 4 * factor + 1;
  aw.w.resize(static_cast<std::size_t>(out_n) * aw.count);
  for (int j = 0; j < out_n; ++j) {
    const double src = (j + 0.5) * t - 0.5;
    const int lo = bicubic_lo(j, factor);
    double sum = 0.0;
    for (int k = 0; k < aw.count; ++k) {
      const double v = cubic((static_cast<double>(lo + k) - src) / t) / t;
      aw.w[static_cast<std::size_t>(j) * aw.count + k] = v;
      sum += v;
    }
    for (int k = 0; k < aw.count; ++k)
      aw.w[static_cast<std::size_t>(j) * aw.count + k] /= sum;
  }
  return aw;
}

}  // namespace

BlurKernel identity_kernel() {
  return from_profile(KernelKind::gaussian, {1.0}, std::nullopt);
}

BlurKernel gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> profile(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    profile[i + radius] = std::exp(-0.5 * (static_cast<double>(i) * i) / (sigma * sigma));
  return from_profile(KernelKind::gaussian, std::move(profile), sigma);
}

BlurKernel bicubic_prefilter(int scale) {
  if (scale < 1) throw std::invalid_argument("bicubic_prefilter: scale must be >= 1");
  const int radius = 2 * scale - 1;  // cubic support is (-2, 2) after stretching
  std::vector<double> profile(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    profile[i + radius] = cubic(static_cast<double>(i) / scale) / scale;
  return from_profile(KernelKind::bicubic_prefilter, std::move(profile), std::nullopt);
}

NoiseModel awgn(double sigma) {
  NoiseModel m;
  m.kind = NoiseKind::awgn_fixed;
  m.sigma = sigma;
  return m;
}

NoiseModel awgn_blind(double sigma_min, double sigma_max) {
  NoiseModel m;
  m.kind = NoiseKind::awgn_blind;
  m.sigma_min = sigma_min;
  m.sigma_max = sigma_max;
  return m;
}

NoiseModel poisson_gaussian(double gain, double read_sigma) {
  NoiseModel m;
  m.kind = NoiseKind::poisson_gaussian;
  m.gain = gain;
  m.read_sigma = read_sigma;
  return m;
}

namespace detail {

void validate_noise(const NoiseModel& m) {
  switch (m.kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::awgn_fixed:
      if (!(m.sigma >= 0.0)) throw std::invalid_argument("noise: sigma must be >= 0");
      break;
    case NoiseKind::awgn_blind:
      if (!(m.sigma_min >= 0.0) || !(m.sigma_max >= m.sigma_min))
        throw std::invalid_argument("noise: need 0 <= sigma_min <= sigma_max");
      break;
    case NoiseKind::poisson_gaussian:
      if (!(m.gain > 0.0)) throw std::invalid_argument("noise: gain must be > 0");
      if (!(m.read_sigma >= 0.0))
        throw std::invalid_argument("noise: read_sigma must be >= 0");
      break;
  }
}

}  // namespace detail

void validate_degradation(const DegradationConfig& cfg) {
  validate_kernel(cfg.kernel);
  if (cfg.scale != 1 && cfg.scale != 2 && cfg.scale != 3 && cfg.scale != 4 &&
      cfg.scale != 8)
    throw std::invalid_argument("degrade_sr: scale must be one of {1, 2, 3, 4, 8}");
  detail::validate_noise(cfg.noise);
}

Image convolve(const Image& img, const BlurKernel& k) {
  validate_image(img, "convolve");
  validate_kernel(k);
  const int r = (k.side - 1) / 2;
  if (k.side > 2 * img.height - 1 || k.side > 2 * img.width - 1)
    throw std::invalid_argument("convolve: kernel larger than twice the image extent");
  const int h = img.height, w = img.width;
  Image out(h, w, img.channels, img.range);
  if (!k.sep.empty()) {
    // Two-pass separable path.
    std::vector<double> tmp(img.plane_size());
    for (int c = 0; c < img.channels; ++c) {
      const double* src = img.plane(c);
      double* dst = out.plane(c);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int i = -r; i <= r; ++i)
            acc += k.sep[i + r] * src[static_cast<std::size_t>(y) * w + reflect(x + i, w)];
          tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
      }
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int i = -r; i <= r; ++i)
            acc += k.sep[i + r] * tmp[static_cast<std::size_t>(reflect(y + i, h)) * w + x];
          dst[static_cast<std::size_t>(y) * w + x] = acc;
        }
      }
    }
    return out;
  }
  for (int c = 0; c < img.channels; ++c) {
    const double* src = img.plane(c);
    double* dst = out.plane(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          const std::size_t row = static_cast<std::size_t>(reflect(y + dy, h)) * w;
          const double* tap = &k.taps[static_cast<std::size_t>(dy + r) * k.side];
          for (int dx = -r; dx <= r; ++dx) acc += tap[dx + r] * src[row + reflect(x + dx, w)];
        }
        dst[static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
  }
  return out;
}

Image downsample(const Image& img, int factor, DownsampleKind kind) {
  validate_image(img, "downsample");
  if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
  const int oh = img.height / factor;
  const int ow = img.width / factor;
  if (oh < 1 || ow < 1)
    throw std::invalid_argument("downsample: output dimension would be zero");
  if (kind == DownsampleKind::decimate) {
    Image out(oh, ow, img.channels, img.range);
    for (int c = 0; c < img.channels; ++c)
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) out.at(y, x, c) = img.at(y * factor, x * factor, c);
    return out;
  }
  // Bicubic: resample rows, then columns.
  const AxisWeights wx = bicubic_axis(ow, factor);
  const AxisWeights wy = bicubic_axis(oh, factor);
  Image mid(img.height, ow, img.channels, img.range);
  for (int c = 0; c < img.channels; ++c) {
    const double* src = img.plane(c);
    double* dst = mid.plane(c);
    for (int y = 0; y < img.height; ++y) {
      for (int j = 0; j < ow; ++j) {
        const int lo = bicubic_lo(j, factor);
        double acc = 0.0;
        for (int k = 0; k < wx.count; ++k)
          acc += wx.w[static_cast<std::size_t>(j) * wx.count + k] *
                 src[static_cast<std::size_t>(y) * img.width + reflect(lo + k, img.width)];
        dst[static_cast<std::size_t>(y) * ow + j] = acc;
      }
    }
  }
  Image out(oh, ow, img.channels, img.range);
  for (int c = 0; c < img.channels; ++c) {
    const double* src = mid.plane(c);
    double* dst = out.plane(c);
    for (int j = 0; j < oh; ++j) {
      const int lo = bicubic_lo(j, factor);
      for (int x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (int k = 0; k < wy.count; ++k)
          acc += wy.w[static_cast<std::size_t>(j) * wy.count + k] *
                 src[static_cast<std::size_t>(reflect(lo + k, img.height)) * ow + x];
        dst[static_cast<std::size_t>(j) * ow + x] = acc;
      }
    }
  }
  return out;
}

}  // namespace sfm
