#include "peaktag/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "peaktag/error.hpp"

namespace peaktag {

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::EmptyImage, "negative image size");
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

namespace {

bool is_png(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return b.size() >= 8 && std::equal(sig, sig + 8, b.begin());
}

bool is_jpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::Io, std::string("png: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  RasterImage out(static_cast<int>(img.width), static_cast<int>(img.height));
  auto* buffer = reinterpret_cast<png_bytep>(out.pixels().data());
  if (!png_image_finish_read(&img, nullptr, buffer, 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorCode::Io, "png: " + msg);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  RasterImage out;
  std::vector<std::uint8_t> row;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::Io, std::string("jpeg: ") + jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out = RasterImage(static_cast<int>(cinfo.output_width),
                    static_cast<int>(cinfo.output_height));
  row.resize(static_cast<std::size_t>(cinfo.output_width) * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    JSAMPROW rows[1] = {row.data()};
    jpeg_read_scanlines(&cinfo, rows, 1);
    for (int x = 0; x < out.width(); ++x) {
      out.at(x, y) = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

std::vector<std::uint8_t> encode_png_raw(const void* data, int width, int height,
                                         png_uint_32 format) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, data, 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png encode: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, data, 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png encode: ") + img.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) return decode_jpeg(bytes);
  throw Error(ErrorCode::Io, "unsupported image format (expected PNG or JPEG)");
}

RasterImage read_image(const std::filesystem::path& path) {
  return decode_image(read_file(path));
}

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  if (image.empty()) throw Error(ErrorCode::EmptyImage, "cannot encode empty image");
  return encode_png_raw(image.pixels().data(), image.width(), image.height(),
                        PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  if (image.width == 0 || image.height == 0) {
    throw Error(ErrorCode::EmptyImage, "cannot encode empty image");
  }
  return encode_png_raw(image.pixels.data(), image.width, image.height,
                        PNG_FORMAT_GRAY);
}

void write_png(const std::filesystem::path& path, const RasterImage& image) {
  write_file(path, encode_png(image));
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  write_file(path, encode_png(image));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

namespace {

struct Tap {
  int first = 0;
  std::vector<double> weights;
};

std::vector<Tap> triangle_taps(int src, int dst) {
  const double ratio = static_cast<double>(dst) / src;
  const double support = std::max(1.0, 1.0 / ratio);
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  for (int i = 0; i < dst; ++i) {
    const double center = (i + 0.5) / ratio - 0.5;
    const int lo = static_cast<int>(std::floor(center - support));
    const int hi = static_cast<int>(std::ceil(center + support));
    Tap& tap = taps[static_cast<std::size_t>(i)];
    tap.first = lo;
    double sum = 0.0;
    for (int s = lo; s <= hi; ++s) {
      const double w = std::max(0.0, 1.0 - std::abs(s - center) / support);
      tap.weights.push_back(w);
      sum += w;
    }
    for (double& w : tap.weights) w /= sum;
  }
  return taps;
}

}  // namespace

RasterImage resize(const RasterImage& image, int width, int height) {
  if (image.empty() || width <= 0 || height <= 0) {
    throw Error(ErrorCode::EmptyImage, "resize of empty image");
  }
  if (width == image.width() && height == image.height()) return image;

  const auto htaps = triangle_taps(image.width(), width);
  const auto vtaps = triangle_taps(image.height(), height);
  const int sw = image.width();
  const int sh = image.height();

  std::vector<double> tmp(static_cast<std::size_t>(width) * sh * 3);
  for (int y = 0; y < sh; ++y) {
    for (int x = 0; x < width; ++x) {
      const Tap& tap = htaps[static_cast<std::size_t>(x)];
      double acc[3] = {0, 0, 0};
      for (std::size_t k = 0; k < tap.weights.size(); ++k) {
        const int sx = std::clamp(tap.first + static_cast<int>(k), 0, sw - 1);
        const Rgb& p = image.at(sx, y);
        acc[0] += tap.weights[k] * p.r;
        acc[1] += tap.weights[k] * p.g;
        acc[2] += tap.weights[k] * p.b;
      }
      double* dst = &tmp[(static_cast<std::size_t>(y) * width + x) * 3];
      dst[0] = acc[0];
      dst[1] = acc[1];
      dst[2] = acc[2];
    }
  }

  auto to_u8 = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  RasterImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const Tap& tap = vtaps[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      double acc[3] = {0, 0, 0};
      for (std::size_t k = 0; k < tap.weights.size(); ++k) {
        const int sy = std::clamp(tap.first + static_cast<int>(k), 0, sh - 1);
        const double* src = &tmp[(static_cast<std::size_t>(sy) * width + x) * 3];
        acc[0] += tap.weights[k] * src[0];
        acc[1] += tap.weights[k] * src[1];
        acc[2] += tap.weights[k] * src[2];
      }
      out.at(x, y) = {to_u8(acc[0]), to_u8(acc[1]), to_u8(acc[2])};
    }
  }
  return out;
}

}  // namespace peaktag
