#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace peaktag {

/// Camera metadata extracted from a photograph. Pixel dimensions always come
/// from the decoded raster, never from EXIF.
struct PhotoMeta {
  std::optional<double> focal_length_mm;
  std::string make;
  std::string model;
  int width_px = 0;
  int height_px = 0;
};

struct CameraSpec {
  std::string make;
  std::string model;
  double sensor_width_mm = 0.0;
};

struct CameraMatch {
  CameraSpec spec;
  double similarity = 0.0;
};

struct FovScale {
  double fov_rad = 0.0;
  double scale_factor = 0.0;
};

/// Below this similarity the sensor lookup is rejected with LowConfidence.
inline constexpr double kMinCameraSimilarity = 0.5;

// Raw EXIF access. Returns nullopt when the container has no EXIF block.
struct ExifTags {
  std::optional<double> focal_length_mm;  // tag 37386
  std::optional<std::string> make;        // tag 271
  std::optional<std::string> model;       // tag 272
};
std::optional<ExifTags> read_exif(std::span<const std::uint8_t> file_bytes);

/// Parses EXIF from a JPEG, PNG (eXIf chunk) or TIFF byte stream.
/// Throws MissingExif / MissingFocalLength; pixel size comes from decoding.
PhotoMeta parse_photo_meta(std::span<const std::uint8_t> file_bytes);
PhotoMeta parse_photo_meta(const std::filesystem::path& path);

std::string normalize_camera_name(std::string_view make, std::string_view model);

/// Recursive longest-common-substring ratio 2m / (|a| + |b|).
double text_similarity(std::string_view a, std::string_view b);

/// Best database row by text_similarity of normalized names; first row wins
/// ties. Throws LowConfidence below kMinCameraSimilarity.
CameraMatch match_camera(const PhotoMeta& meta, std::span<const CameraSpec> db);

/// CSV with header `make,model,sensor_width_mm`.
std::vector<CameraSpec> parse_sensor_db(std::string_view csv);
std::vector<CameraSpec> load_sensor_db(const std::filesystem::path& path);

/// 2·atan(s / 2l), radians.
double estimate_fov(double focal_length_mm, double sensor_width_mm);

/// FOV·w_r / (2π·w_p): after scaling the photo by this factor one photo pixel
/// spans the same angle as one panorama pixel.
double compute_scale_factor(double fov_rad, int photo_width, int pano_width);

}  // namespace peaktag
