#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peaktag/image.hpp"

namespace peaktag::testing {

struct ExifFields {
  std::optional<std::string> make;
  std::optional<std::string> model;
  // Stored as a RATIONAL numerator/denominator pair.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> focal_length;
};

/// Little-endian TIFF block holding IFD0 (make, model, Exif pointer) and the
/// Exif sub-IFD (focal length).
std::vector<std::uint8_t> build_tiff_exif(const ExifFields& fields);

/// Baseline JPEG of `image`, with an APP1 Exif segment when `fields` is set.
std::vector<std::uint8_t> build_jpeg(const RasterImage& image,
                                     const std::optional<ExifFields>& fields);

}  // namespace peaktag::testing
