#pragma once

// Raster encode/decode.
//
// Range conventions:
//   png8 / pgm / ppm : 8-bit samples; decoded images are byte-range [0, 255].
//   png16            : 16-bit samples; decoded images are unit-range, v/65535.
//   npy              : raw float64, shape (H, W, C), bit-exact round trip.
//                      The format carries no range tag; decoded images are
//                      tagged unit-range.
// Encoding converts from the image's nominal range to the target depth and
// clamps out-of-range samples; SaveInfo reports whether clamping happened.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfm/image.hpp"

namespace sfm {

enum class ImageFormat { png8, png16, pgm, ppm, npy };

// "png8", "png16", "pgm", "ppm", "npy".
std::optional<ImageFormat> format_from_string(std::string_view name);
const char* format_name(ImageFormat f);
const char* format_extension(ImageFormat f);  // includes the dot

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sniffs the container by magic bytes (PNG, P5/P6 PNM, NPY).
Image load_image(const std::filesystem::path& file);
Image decode_image(const std::vector<std::uint8_t>& bytes, const std::string& context);

struct SaveInfo {
  bool clamped = false;  // samples fell outside the representable range
};

SaveInfo save_image(const Image& img, const std::filesystem::path& file, ImageFormat f);

// In-memory encode; used by the pipeline to hash outputs exactly as written.
std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat f,
                                       bool* clamped = nullptr);

}  // namespace sfm
