// Shared helpers for the unit and acceptance suites.
#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sfm/image.hpp"
#include "sfm/random.hpp"
#include "sfm/transform.hpp"

namespace testsupport {

inline sfm::Image random_image(int h, int w, int channels, sfm::NominalRange range,
                               std::uint64_t seed) {
  sfm::Image img(h, w, channels, range);
  sfm::rng::engine g(seed);
  const double max = sfm::range_max(range);
  for (auto& v : img.data) v = sfm::rng::uniform01(g) * max;
  return img;
}

// Byte-range image quantized to integers, so png8/pgm/ppm round trips are exact.
inline sfm::Image random_byte_image(int h, int w, int channels, std::uint64_t seed) {
  sfm::Image img(h, w, channels, sfm::NominalRange::byte);
  sfm::rng::engine g(seed);
  for (auto& v : img.data) v = static_cast<double>(g() % 256);
  return img;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double sum_squares(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

// DCT-III along an axis by the defining sum; inverse counterpart of the naive
// forward transform, used as an oracle only.
inline void naive_idct_axis(const double* in, double* out, int n) {
  const double s0 = std::sqrt(1.0 / n);
  const double s1 = std::sqrt(2.0 / n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k)
      acc += (k == 0 ? s0 : s1) * in[k] *
             std::cos(M_PI * (2.0 * i + 1.0) * k / (2.0 * n));
    out[i] = acc;
  }
}

inline sfm::Image naive_dct2_inverse(const sfm::Spectrum& spec) {
  sfm::Image img(spec.height, spec.width, spec.channels, spec.range);
  const int h = spec.height, w = spec.width;
  std::vector<double> row_out(w), col_in(h), col_out(h);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < spec.channels; ++c) {
    const double* src = spec.coeffs.data() + c * plane;
    double* dst = img.data.data() + c * plane;
    for (int y = 0; y < h; ++y) {
      naive_idct_axis(src + static_cast<std::size_t>(y) * w, row_out.data(), w);
      for (int x = 0; x < w; ++x) dst[static_cast<std::size_t>(y) * w + x] = row_out[x];
    }
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) col_in[y] = dst[static_cast<std::size_t>(y) * w + x];
      naive_idct_axis(col_in.data(), col_out.data(), h);
      for (int y = 0; y < h; ++y) dst[static_cast<std::size_t>(y) * w + x] = col_out[y];
    }
  }
  return img;
}

// Random field whose radial PSD follows A * rho^(-alpha): coefficient (u, v)
// gets a standard normal amplitude times rho^(-alpha / 2), DC stays zero.
inline sfm::Image power_law_field(int h, int w, double alpha, sfm::rng::engine& g) {
  sfm::Spectrum spec;
  spec.height = h;
  spec.width = w;
  spec.channels = 1;
  spec.range = sfm::NominalRange::unit;
  spec.coeffs.assign(static_cast<std::size_t>(h) * w, 0.0);
  const double r_max = std::hypot(static_cast<double>(h), static_cast<double>(w));
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      if (u == 0 && v == 0) continue;
      const double rho = std::hypot(static_cast<double>(u), static_cast<double>(v)) / r_max;
      spec.coeffs[static_cast<std::size_t>(u) * w + v] =
          sfm::rng::standard_normal(g) * std::pow(rho, -alpha / 2.0);
    }
  return sfm::dct2_inverse(spec);
}

// Scoped temporary directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sfm_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
