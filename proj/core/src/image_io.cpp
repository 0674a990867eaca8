#include "sfm/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

namespace sfm {

namespace {

constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
constexpr std::uint8_t kNpyMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw DecodeError(context + ": " + what);
}

// ---------------------------------------------------------------------------
// PNG

struct PngReadState {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void png_read_fn(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->pos + len > st->size) png_error(png, "unexpected end of stream");
  std::memcpy(out, st->data + st->pos, len);
  st->pos += len;
}

void png_write_fn(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_fn(png_structp) {}

Image decode_png(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(context, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(context, "png_create_info_struct failed");
  }
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> raster;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(context, "corrupt PNG stream");
  }
  PngReadState st{bytes.data(), bytes.size(), 0};
  png_set_read_fn(png, &st, png_read_fn);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
    png_set_strip_alpha(png);
  png_read_update_info(png, info);

  depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) fail(context, "unsupported channel count");
  if (depth != 8 && depth != 16) fail(context, "unsupported bit depth");

  const std::size_t stride = png_get_rowbytes(png, info);
  raster.resize(stride * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raster.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(static_cast<int>(h), static_cast<int>(w), channels,
            depth == 8 ? NominalRange::byte : NominalRange::unit);
  for (png_uint_32 y = 0; y < h; ++y) {
    const std::uint8_t* row = raster.data() + y * stride;
    for (png_uint_32 x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        if (depth == 8) {
          img.at(static_cast<int>(y), static_cast<int>(x), c) = row[x * channels + c];
        } else {
          const std::size_t o = (x * channels + c) * 2;  // network byte order
          const unsigned v = (static_cast<unsigned>(row[o]) << 8) | row[o + 1];
          img.at(static_cast<int>(y), static_cast<int>(x), c) = v / 65535.0;
        }
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_png(const Image& img, int depth, bool* clamped) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png encode failed");
  }
  png_set_write_fn(png, &out, png_write_fn, png_flush_fn);
  png_set_IHDR(png, info, img.width, img.height, depth,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const double in_max = range_max(img.range);
  const double out_max = depth == 8 ? 255.0 : 65535.0;
  const double scale = out_max / in_max;
  const std::size_t stride =
      static_cast<std::size_t>(img.width) * img.channels * (depth / 8);
  std::vector<std::uint8_t> row(stride);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        double v = img.at(y, x, c) * scale;
        if (v < 0.0 || v > out_max) {
          if (clamped) *clamped = true;
          v = v < 0.0 ? 0.0 : out_max;
        }
        const auto q = static_cast<unsigned>(std::lround(v));
        if (depth == 8) {
          row[x * img.channels + c] = static_cast<std::uint8_t>(q);
        } else {
          row[(x * img.channels + c) * 2] = static_cast<std::uint8_t>(q >> 8);
          row[(x * img.channels + c) * 2 + 1] = static_cast<std::uint8_t>(q & 0xff);
        }
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return out;
}

// ---------------------------------------------------------------------------
// PNM (binary P5 / P6)

Image decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  std::size_t pos = 0;
  auto token = [&]() -> std::string {
    // Skip whitespace and '#' comments between header fields.
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(bytes[pos++]);
    if (t.empty()) fail(context, "truncated PNM header");
    return t;
  };
  const std::string magic = token();
  const int channels = magic == "P5" ? 1 : magic == "P6" ? 3 : 0;
  if (channels == 0) fail(context, "not a binary PNM stream");
  int w = 0, h = 0;
  long maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stol(token());
  } catch (const std::exception&) {
    fail(context, "malformed PNM header");
  }
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) fail(context, "bad PNM geometry");
  ++pos;  // single whitespace byte after maxval
  const int bps = maxval > 255 ? 2 : 1;
  const std::size_t need =
      static_cast<std::size_t>(w) * h * channels * bps;
  if (bytes.size() - pos < need) fail(context, "truncated PNM payload");
  Image img(h, w, channels, bps == 1 ? NominalRange::byte : NominalRange::unit);
  const std::uint8_t* p = bytes.data() + pos;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        if (bps == 1) {
          img.at(y, x, c) = *p++;
        } else {
          const unsigned v = (static_cast<unsigned>(p[0]) << 8) | p[1];  // big-endian
          p += 2;
          img.at(y, x, c) = static_cast<double>(v) / static_cast<double>(maxval);
        }
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_pnm(const Image& img, int channels, bool* clamped) {
  if (img.channels != channels)
    throw std::invalid_argument(channels == 1 ? "encode: pgm requires 1 channel"
                                              : "encode: ppm requires 3 channels");
  std::string header = std::string(channels == 1 ? "P5" : "P6") + "\n" +
                       std::to_string(img.width) + " " + std::to_string(img.height) +
                       "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.sample_count());
  const double scale = 255.0 / range_max(img.range);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < channels; ++c) {
        double v = img.at(y, x, c) * scale;
        if (v < 0.0 || v > 255.0) {
          if (clamped) *clamped = true;
          v = v < 0.0 ? 0.0 : 255.0;
        }
        out.push_back(static_cast<std::uint8_t>(std::lround(v)));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// NPY (version 1.0, <f8, C order, shape (H, W, C))

std::vector<std::uint8_t> encode_npy(const Image& img) {
  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                     std::to_string(img.height) + ", " + std::to_string(img.width) +
                     ", " + std::to_string(img.channels) + "), }";
  const std::size_t base = 6 + 2 + 2;  // magic + version + header length field
  std::size_t header_len = dict.size() + 1;
  const std::size_t pad = (64 - (base + header_len) % 64) % 64;
  header_len += pad;
  dict.append(pad, ' ');
  dict.push_back('\n');

  std::vector<std::uint8_t> out;
  out.reserve(base + header_len + img.sample_count() * 8);
  for (int i = 0; i < 6; ++i) out.push_back(kNpyMagic[i]);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(header_len & 0xff));
  out.push_back(static_cast<std::uint8_t>(header_len >> 8));
  out.insert(out.end(), dict.begin(), dict.end());
  // Interleave samples: row-major (H, W, C), little-endian doubles.
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        const double v = img.at(y, x, c);
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int b = 0; b < 8; ++b)
          out.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff));
      }
    }
  }
  return out;
}

// Pulls "key: value" items out of the tiny python-literal header dict.
std::string npy_dict_value(const std::string& dict, const std::string& key,
                           const std::string& context) {
  const std::size_t kpos = dict.find("'" + key + "'");
  if (kpos == std::string::npos) fail(context, "npy header missing '" + key + "'");
  std::size_t vpos = dict.find(':', kpos);
  if (vpos == std::string::npos) fail(context, "malformed npy header");
  ++vpos;
  while (vpos < dict.size() && dict[vpos] == ' ') ++vpos;
  std::size_t vend = vpos;
  int depth = 0;
  while (vend < dict.size()) {
    const char ch = dict[vend];
    if (ch == '(') ++depth;
    if (ch == ')') {
      if (depth == 0) break;
      --depth;
      ++vend;
      continue;
    }
    if ((ch == ',' || ch == '}') && depth == 0) break;
    ++vend;
  }
  return dict.substr(vpos, vend - vpos);
}

Image decode_npy(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  if (bytes.size() < 10) fail(context, "truncated npy header");
  const int major = bytes[6];
  std::size_t header_len, data_off;
  if (major == 1) {
    header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8);
    data_off = 10 + header_len;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(context, "truncated npy header");
    header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8) |
                 (static_cast<std::size_t>(bytes[10]) << 16) |
                 (static_cast<std::size_t>(bytes[11]) << 24);
    data_off = 12 + header_len;
  } else {
    fail(context, "unsupported npy version");
  }
  if (bytes.size() < data_off) fail(context, "truncated npy header");
  const std::string dict(bytes.begin() + (major == 1 ? 10 : 12),
                         bytes.begin() + data_off);

  const std::string descr = npy_dict_value(dict, "descr", context);
  const bool f8 = descr.find("<f8") != std::string::npos;
  const bool f4 = descr.find("<f4") != std::string::npos;
  if (!f8 && !f4) fail(context, "npy dtype must be <f4 or <f8");
  if (npy_dict_value(dict, "fortran_order", context).find("True") != std::string::npos)
    fail(context, "fortran-order npy is not supported");

  std::string shape = npy_dict_value(dict, "shape", context);
  std::vector<long> dims;
  std::string num;
  for (const char ch : shape + ",") {
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      num.push_back(ch);
    } else if (!num.empty()) {
      dims.push_back(std::stol(num));
      num.clear();
    }
  }
  if (dims.size() != 2 && dims.size() != 3) fail(context, "npy shape must be 2D or 3D");
  const long h = dims[0], w = dims[1];
  const long c = dims.size() == 3 ? dims[2] : 1;
  if (h < 1 || w < 1 || (c != 1 && c != 3)) fail(context, "unsupported npy shape");

  const std::size_t elsize = f8 ? 8 : 4;
  const std::size_t count = static_cast<std::size_t>(h) * w * c;
  if (bytes.size() - data_off < count * elsize) fail(context, "truncated npy payload");
  Image img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c),
            NominalRange::unit);
  const std::uint8_t* p = bytes.data() + data_off;
  std::size_t i = 0;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (long ch = 0; ch < c; ++ch, ++i) {
        double v;
        if (f8) {
          std::uint64_t bits = 0;
          for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(p[i * 8 + b]) << (8 * b);
          std::memcpy(&v, &bits, 8);
        } else {
          std::uint32_t bits = 0;
          for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(p[i * 4 + b]) << (8 * b);
          float f;
          std::memcpy(&f, &bits, 4);
          v = f;
        }
        img.at(static_cast<int>(y), static_cast<int>(x), static_cast<int>(ch)) = v;
      }
    }
  }
  for (const double v : img.data)
    if (!std::isfinite(v)) fail(context, "npy payload contains non-finite samples");
  return img;
}

}  // namespace

std::optional<ImageFormat> format_from_string(std::string_view name) {
  if (name == "png8") return ImageFormat::png8;
  if (name == "png16") return ImageFormat::png16;
  if (name == "pgm") return ImageFormat::pgm;
  if (name == "ppm") return ImageFormat::ppm;
  if (name == "npy") return ImageFormat::npy;
  return std::nullopt;
}

const char* format_name(ImageFormat f) {
  switch (f) {
    case ImageFormat::png8: return "png8";
    case ImageFormat::png16: return "png16";
    case ImageFormat::pgm: return "pgm";
    case ImageFormat::ppm: return "ppm";
    case ImageFormat::npy: return "npy";
  }
  return "?";
}

const char* format_extension(ImageFormat f) {
  switch (f) {
    case ImageFormat::png8:
    case ImageFormat::png16: return ".png";
    case ImageFormat::pgm: return ".pgm";
    case ImageFormat::ppm: return ".ppm";
    case ImageFormat::npy: return ".npy";
  }
  return "";
}

Image decode_image(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0)
    return decode_png(bytes, context);
  if (bytes.size() >= 6 && std::memcmp(bytes.data(), kNpyMagic, 6) == 0)
    return decode_npy(bytes, context);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
    return decode_pnm(bytes, context);
  fail(context, "unrecognized image container");
}

Image load_image(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DecodeError(file.string() + ": cannot open");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_image(bytes, file.string());
}

std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat f, bool* clamped) {
  validate_image(img, "encode_image");
  if (clamped) *clamped = false;
  switch (f) {
    case ImageFormat::png8: return encode_png(img, 8, clamped);
    case ImageFormat::png16: return encode_png(img, 16, clamped);
    case ImageFormat::pgm: return encode_pnm(img, 1, clamped);
    case ImageFormat::ppm: return encode_pnm(img, 3, clamped);
    case ImageFormat::npy: return encode_npy(img);
  }
  throw std::invalid_argument("encode_image: unknown format");
}

SaveInfo save_image(const Image& img, const std::filesystem::path& file, ImageFormat f) {
  SaveInfo info;
  const std::vector<std::uint8_t> bytes = encode_image(img, f, &info.clamped);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(file.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(file.string() + ": write failed");
  return info;
}

}  // namespace sfm
