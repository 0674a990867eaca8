#pragma once

// Orthonormal 2D DCT-II / DCT-III, applied separably per channel.
//
// With the orthonormal scaling, coeffs[0,0] of a channel equals
// mean(channel) * sqrt(height * width), and Parseval holds:
// sum(img^2) == sum(coeffs^2).

#include <vector>

#include "sfm/image.hpp"

namespace sfm {

enum class SpectrumNorm { orthonormal };

// DCT-II coefficient block, planar like Image: coeffs[(c*H + u)*W + v] is the
// coefficient at vertical index u, horizontal index v of channel c; (0,0) is DC.
struct Spectrum {
  int height = 0;
  int width = 0;
  int channels = 1;
  NominalRange range = NominalRange::unit;  // carried through for the inverse
  SpectrumNorm norm = SpectrumNorm::orthonormal;
  std::vector<double> coeffs;

  std::size_t plane_size() const {
    return static_cast<std::size_t>(height) * width;
  }
  double& at(int u, int v, int c = 0) {
    return coeffs[(static_cast<std::size_t>(c) * height + u) * width + v];
  }
  double at(int u, int v, int c = 0) const {
    return coeffs[(static_cast<std::size_t>(c) * height + u) * width + v];
  }
  double* plane(int c) { return coeffs.data() + static_cast<std::size_t>(c) * plane_size(); }
  const double* plane(int c) const {
    return coeffs.data() + static_cast<std::size_t>(c) * plane_size();
  }
};

// Fast forward transform, O(H*W*log(H*W)) per channel. Any size >= 1 works,
// powers of two are not required.
Spectrum dct2_forward(const Image& img);

// Fast inverse transform. Round-trips with dct2_forward to ~1e-12 absolute
// error on unit-range images.
Image dct2_inverse(const Spectrum& spec);

// Reference implementation straight from the DCT-II defining sum, O(N^2) per
// axis. Serves as the numerical oracle for the fast path; guarded to
// height, width <= 256.
Spectrum dct2_forward_naive(const Image& img);

}  // namespace sfm
