#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfm {

// Nominal sample range of a raster. Arithmetic never clamps to it; it only
// drives encode/decode scaling and optional output clamping.
enum class NominalRange { unit, byte };

inline double range_max(NominalRange r) {
  return r == NominalRange::byte ? 255.0 : 1.0;
}

// Planar raster of double samples: data[(c * height + y) * width + x].
// channels is 1 (grayscale) or 3 (RGB).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 1;
  NominalRange range = NominalRange::unit;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c, NominalRange r = NominalRange::unit)
      : height(h),
        width(w),
        channels(c),
        range(r),
        data(static_cast<std::size_t>(h < 0 ? 0 : h) * (w < 0 ? 0 : w) *
                 (c < 0 ? 0 : c),
             0.0) {}

  std::size_t plane_size() const {
    return static_cast<std::size_t>(height) * width;
  }
  std::size_t sample_count() const { return data.size(); }

  double& at(int y, int x, int c = 0) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int y, int x, int c = 0) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }

  double* plane(int c) { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
  const double* plane(int c) const {
    return data.data() + static_cast<std::size_t>(c) * plane_size();
  }
};

// Throws std::invalid_argument unless the raster has positive dimensions,
// 1 or 3 channels, and a backing store of matching size.
inline void validate_image(const Image& img, const char* what = "image") {
  if (img.height < 1 || img.width < 1)
    throw std::invalid_argument(std::string(what) + ": dimensions must be >= 1");
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument(std::string(what) + ": channels must be 1 or 3");
  const std::size_t want = static_cast<std::size_t>(img.height) * img.width * img.channels;
  if (img.data.size() != want)
    throw std::invalid_argument(std::string(what) + ": data size does not match dimensions");
}

// Clamps every sample to the raster's nominal range, in place.
inline void clamp_to_range(Image& img) {
  const double hi = range_max(img.range);
  for (double& v : img.data) {
    if (v < 0.0) v = 0.0;
    if (v > hi) v = hi;
  }
}

inline double channel_mean(const Image& img, int c) {
  const double* p = img.plane(c);
  double acc = 0.0;
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) acc += p[i];
  return acc / static_cast<double>(n);
}

}  // namespace sfm
