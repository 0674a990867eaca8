#include <doctest.h>

#include <cmath>

#include "sfm/transform.hpp"
#include "support.hpp"

using sfm::Image;
using sfm::NominalRange;
using sfm::Spectrum;

namespace {

Image row_image(std::vector<double> values) {
  Image img(1, static_cast<int>(values.size()), 1, NominalRange::unit);
  img.data = std::move(values);
  return img;
}

}  // namespace

TEST_CASE("dct matches hand-computed coefficients") {
  SUBCASE("length 2") {
    const Spectrum s = sfm::dct2_forward(row_image({1.0, 0.0}));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(s.at(0, 0, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
    CHECK(s.at(0, 1, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  }
  SUBCASE("length 4 impulse") {
    const Spectrum s = sfm::dct2_forward(row_image({1.0, 0.0, 0.0, 0.0}));
    CHECK(s.at(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.at(0, 1, 0) == doctest::Approx(0.65328148243818826).epsilon(1e-12));
    CHECK(s.at(0, 2, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.at(0, 3, 0) == doctest::Approx(0.27059805007309851).epsilon(1e-12));
  }
}

TEST_CASE("dct of a constant image is a lone dc term") {
  Image img(8, 8, 1, NominalRange::unit);
  img.data.assign(img.data.size(), 1.0);
  const Spectrum s = sfm::dct2_forward(img);
  CHECK(s.at(0, 0, 0) == doctest::Approx(8.0).epsilon(1e-12));
  double off_dc = 0.0;
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v)
      if (u != 0 || v != 0) off_dc = std::max(off_dc, std::abs(s.at(u, v, 0)));
  CHECK(off_dc < 1e-12);
}

TEST_CASE("fast dct agrees with the defining sum") {
  const std::pair<int, int> sizes[] = {{1, 1},  {1, 2},  {2, 3},   {4, 4},
                                       {5, 7},  {8, 8},  {12, 16}, {17, 31},
                                       {32, 9}, {33, 5}, {48, 64}, {64, 64}};
  std::uint64_t seed = 71;
  for (const auto& [h, w] : sizes) {
    CAPTURE(h);
    CAPTURE(w);
    const Image img = testsupport::random_image(h, w, 1, NominalRange::unit, seed++);
    const Spectrum fast = sfm::dct2_forward(img);
    const Spectrum naive = sfm::dct2_forward_naive(img);
    CHECK(testsupport::max_abs_diff(fast.coeffs, naive.coeffs) < 1e-8);
  }
}

TEST_CASE("fast inverse agrees with the defining sum") {
  const std::pair<int, int> sizes[] = {{1, 3}, {5, 5}, {8, 16}, {23, 11}, {32, 32}};
  std::uint64_t seed = 403;
  for (const auto& [h, w] : sizes) {
    CAPTURE(h);
    CAPTURE(w);
    const Image img = testsupport::random_image(h, w, 1, NominalRange::unit, seed++);
    const Spectrum spec = sfm::dct2_forward(img);
    const Image fast = sfm::dct2_inverse(spec);
    const Image naive = testsupport::naive_dct2_inverse(spec);
    CHECK(testsupport::max_abs_diff(fast.data, naive.data) < 1e-8);
  }
}

TEST_CASE("round trip reconstructs the image") {
  const std::pair<int, int> sizes[] = {{1, 1}, {3, 3}, {7, 24}, {31, 31}, {64, 40}, {100, 100}};
  std::uint64_t seed = 11;
  for (const auto& [h, w] : sizes) {
    CAPTURE(h);
    CAPTURE(w);
    const Image img = testsupport::random_image(h, w, 3, NominalRange::byte, seed++);
    const Image back = sfm::dct2_inverse(sfm::dct2_forward(img));
    CHECK(testsupport::max_abs_diff(img.data, back.data) < 1e-6);
    CHECK(back.range == img.range);
  }
}

TEST_CASE("transform preserves energy") {
  const Image img = testsupport::random_image(48, 31, 1, NominalRange::byte, 5);
  const Spectrum spec = sfm::dct2_forward(img);
  const double ei = testsupport::sum_squares(img.data);
  const double ec = testsupport::sum_squares(spec.coeffs);
  CHECK(std::abs(ei - ec) / ei < 1e-9);
}

TEST_CASE("transform is linear") {
  const Image a = testsupport::random_image(19, 13, 1, NominalRange::unit, 21);
  const Image b = testsupport::random_image(19, 13, 1, NominalRange::unit, 22);
  Image mix = a;
  for (std::size_t i = 0; i < mix.data.size(); ++i)
    mix.data[i] = 2.5 * a.data[i] - 0.75 * b.data[i];
  const Spectrum sa = sfm::dct2_forward(a);
  const Spectrum sb = sfm::dct2_forward(b);
  const Spectrum sm = sfm::dct2_forward(mix);
  double err = 0.0;
  for (std::size_t i = 0; i < sm.coeffs.size(); ++i)
    err = std::max(err, std::abs(sm.coeffs[i] - (2.5 * sa.coeffs[i] - 0.75 * sb.coeffs[i])));
  CHECK(err < 1e-9);
}

TEST_CASE("channels transform independently") {
  const Image rgb = testsupport::random_image(9, 14, 3, NominalRange::byte, 33);
  const Spectrum full = sfm::dct2_forward(rgb);
  for (int c = 0; c < 3; ++c) {
    Image mono(9, 14, 1, NominalRange::byte);
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 14; ++x) mono.at(y, x, 0) = rgb.at(y, x, c);
    const Spectrum ref = sfm::dct2_forward(mono);
    double err = 0.0;
    for (int u = 0; u < 9; ++u)
      for (int v = 0; v < 14; ++v)
        err = std::max(err, std::abs(full.at(u, v, c) - ref.at(u, v, 0)));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("naive transform rejects large images") {
  const Image img = testsupport::random_image(257, 4, 1, NominalRange::unit, 2);
  CHECK_THROWS_AS((void)sfm::dct2_forward_naive(img), std::invalid_argument);
}

TEST_CASE("transforms validate their inputs") {
  Image bad(4, 4, 1, NominalRange::unit);
  bad.data.resize(7);
  CHECK_THROWS_AS((void)sfm::dct2_forward(bad), std::invalid_argument);

  Spectrum spec;
  spec.height = 4;
  spec.width = 4;
  spec.channels = 2;
  spec.coeffs.assign(32, 0.0);
  CHECK_THROWS_AS((void)sfm::dct2_inverse(spec), std::invalid_argument);
}
