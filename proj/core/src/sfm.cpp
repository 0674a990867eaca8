#include "sfm/sfm.hpp"

namespace sfm {

std::pair<Image, Mask> apply_sfm(const Image& img, const MaskSpec& spec) {
  validate_image(img, "apply_sfm");
  const Dims dims{img.height, img.width};
  Mask mask = realize(spec, dims);  // also validates spec against the grid
  Spectrum s = dct2_forward(img);
  const std::size_t plane = s.plane_size();
  for (int c = 0; c < s.channels; ++c) {
    double* coeffs = s.plane(c);
    for (std::size_t i = 0; i < plane; ++i)
      if (mask.bits[i] == 0) coeffs[i] = 0.0;
  }
  return {dct2_inverse(s), std::move(mask)};
}

}  // namespace sfm
