#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "peaktag/evaluation.hpp"
#include "peaktag/image.hpp"
#include "peaktag/matching.hpp"
#include "peaktag/peaks.hpp"

namespace peaktag {

/// 360° cylindrical render at q pixels per degree; width == round(360·q).
struct Panorama {
  RasterImage raster;
  double q = 20.0;
  std::vector<Peak> peaks;
};

int panorama_width_for(double q);

/// JSON array of {name, x, y}. Throws MalformedPeaks. Empty text is an empty list.
std::vector<Peak> parse_peaks(std::string_view json_text);
std::vector<Peak> load_peaks(const std::filesystem::path& path);

/// Throws WidthMismatch when the image width disagrees with q.
Panorama make_panorama(RasterImage raster, double q, std::vector<Peak> peaks);
Panorama load_panorama(const std::filesystem::path& image_path,
                       const std::filesystem::path& peaks_path, double q);

struct SynthConfig {
  std::uint64_t seed = 1;
  double q = 20.0;
  int layers = 3;
  double photo_fov_deg = 40.0;
  double noise_density = 0.0;
  int peak_count = 5;
  int pano_height = 400;
  int photo_height = 300;
  bool recolor_photo = false;
  // Photo raster is resampled by this factor after cropping.
  double photo_scale = 1.0;
  // Peaks are at least this many panorama pixels apart.
  int min_peak_spacing = 60;
  // When positive, photo content around each visible peak is displaced by a
  // random integer shift with components in [-max, max].
  int peak_shift_max = 0;
};

struct SynthCase {
  Panorama panorama;
  RasterImage photo;
  Alignment truth_alignment;
  GroundTruth truth;
  double photo_fov_deg = 0.0;
  // Photo spans the whole cylinder, so dx is only defined mod 360°.
  bool degenerate = false;
  // Injected displacement per truth pair, scaled photo pixels.
  std::vector<std::pair<int, int>> peak_shifts;
};

/// Deterministic in cfg.seed.
SynthCase gen_synthetic_case(const SynthConfig& cfg);

/// Writes {panorama.png, photo.png, peaks.json, truth.json}.
void write_synthetic_case(const SynthCase& c, const std::filesystem::path& dir);

/// Heights of one wrap-around ridgeline (row of the silhouette top per column).
std::vector<double> midpoint_ridgeline(int width, double base, double amplitude,
                                       double roughness, std::uint64_t seed);

}  // namespace peaktag
