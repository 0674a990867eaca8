#include "sfm/transform.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fft.hpp"

namespace sfm {

namespace {

// Applies a 1D transform along rows, then columns, of every channel plane.
template <class RowOp, class ColOp>
void apply_separable(const double* in, double* out, int h, int w, int channels,
                     const RowOp& row_op, const ColOp& col_op) {
  std::vector<double> row_out(w);
  std::vector<double> col_in(h);
  std::vector<double> col_out(h);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < channels; ++c) {
    const double* src = in + c * plane;
    double* dst = out + c * plane;
    for (int y = 0; y < h; ++y) {
      row_op(src + static_cast<std::size_t>(y) * w, row_out.data());
      for (int x = 0; x < w; ++x) dst[static_cast<std::size_t>(y) * w + x] = row_out[x];
    }
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) col_in[y] = dst[static_cast<std::size_t>(y) * w + x];
      col_op(col_in.data(), col_out.data());
      for (int y = 0; y < h; ++y) dst[static_cast<std::size_t>(y) * w + x] = col_out[y];
    }
  }
}

}  // namespace

Spectrum dct2_forward(const Image& img) {
  validate_image(img, "dct2_forward");
  Spectrum spec;
  spec.height = img.height;
  spec.width = img.width;
  spec.channels = img.channels;
  spec.range = img.range;
  spec.coeffs.resize(img.data.size());
  const detail::Dct1d row_plan(img.width);
  const detail::Dct1d col_plan(img.height);
  auto row_fwd = [&](const double* in, double* out) { row_plan.forward(in, out); };
  auto col_fwd = [&](const double* in, double* out) { col_plan.forward(in, out); };
  apply_separable(img.data.data(), spec.coeffs.data(), img.height, img.width,
                  img.channels, row_fwd, col_fwd);
  return spec;
}

Image dct2_inverse(const Spectrum& spec) {
  if (spec.height < 1 || spec.width < 1)
    throw std::invalid_argument("dct2_inverse: dimensions must be >= 1");
  if (spec.channels != 1 && spec.channels != 3)
    throw std::invalid_argument("dct2_inverse: channels must be 1 or 3");
  const std::size_t want =
      static_cast<std::size_t>(spec.height) * spec.width * spec.channels;
  if (spec.coeffs.size() != want)
    throw std::invalid_argument("dct2_inverse: coeff size does not match dimensions");
  Image img(spec.height, spec.width, spec.channels, spec.range);
  const detail::Dct1d row_plan(spec.width);
  const detail::Dct1d col_plan(spec.height);
  auto row_inv = [&](const double* in, double* out) { row_plan.inverse(in, out); };
  auto col_inv = [&](const double* in, double* out) { col_plan.inverse(in, out); };
  apply_separable(spec.coeffs.data(), img.data.data(), spec.height, spec.width,
                  spec.channels, row_inv, col_inv);
  return img;
}

namespace {

// DCT-II of one axis by the defining sum.
void naive_dct_axis(const double* in, double* out, int n) {
  const double s0 = std::sqrt(1.0 / n);
  const double s1 = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += in[i] * std::cos(M_PI * (2.0 * i + 1.0) * k / (2.0 * n));
    out[k] = acc * (k == 0 ? s0 : s1);
  }
}

}  // namespace

Spectrum dct2_forward_naive(const Image& img) {
  validate_image(img, "dct2_forward_naive");
  if (img.height > 256 || img.width > 256)
    throw std::invalid_argument("dct2_forward_naive: guarded to dimensions <= 256");
  Spectrum spec;
  spec.height = img.height;
  spec.width = img.width;
  spec.channels = img.channels;
  spec.range = img.range;
  spec.coeffs.resize(img.data.size());
  auto axis = [](const double* in, double* out, int n) { naive_dct_axis(in, out, n); };
  std::vector<double> row_out(img.width), col_in(img.height), col_out(img.height);
  const std::size_t plane = img.plane_size();
  for (int c = 0; c < img.channels; ++c) {
    const double* src = img.data.data() + c * plane;
    double* dst = spec.coeffs.data() + c * plane;
    for (int y = 0; y < img.height; ++y) {
      axis(src + static_cast<std::size_t>(y) * img.width, row_out.data(), img.width);
      for (int x = 0; x < img.width; ++x)
        dst[static_cast<std::size_t>(y) * img.width + x] = row_out[x];
    }
    for (int x = 0; x < img.width; ++x) {
      for (int y = 0; y < img.height; ++y)
        col_in[y] = dst[static_cast<std::size_t>(y) * img.width + x];
      axis(col_in.data(), col_out.data(), img.height);
      for (int y = 0; y < img.height; ++y)
        dst[static_cast<std::size_t>(y) * img.width + x] = col_out[y];
    }
  }
  return spec;
}

}  // namespace sfm
