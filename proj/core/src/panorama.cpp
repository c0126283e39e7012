#include "peaktag/panorama.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>

#include "peaktag/error.hpp"

namespace peaktag {

int panorama_width_for(double q) {
  if (!(q > 0.0)) throw Error(ErrorCode::NonPositiveInput, "q must be positive");
  return static_cast<int>(std::lround(360.0 * q));
}

std::vector<Peak> parse_peaks(std::string_view json_text) {
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedPeaks, std::string("peaks file is not JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::MalformedPeaks, "peaks file must be a JSON array");
  std::vector<Peak> peaks;
  for (const auto& item : doc) {
    try {
      peaks.push_back(item.get<Peak>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedPeaks,
                  std::string("peak entries need name, x, y: ") + e.what());
    }
  }
  return peaks;
}

std::vector<Peak> load_peaks(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_peaks(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Panorama make_panorama(RasterImage raster, double q, std::vector<Peak> peaks) {
  const int expected = panorama_width_for(q);
  if (raster.width() != expected) {
    throw Error(ErrorCode::WidthMismatch,
                "panorama is " + std::to_string(raster.width()) + " px wide but q=" +
                    std::to_string(q) + " requires " + std::to_string(expected));
  }
  for (const Peak& p : peaks) {
    if (p.pano_x < 0.0 || p.pano_x >= raster.width() || p.pano_y < 0.0 ||
        p.pano_y >= raster.height()) {
      throw Error(ErrorCode::MalformedPeaks, "peak '" + p.name + "' lies outside the panorama");
    }
  }
  return Panorama{std::move(raster), q, std::move(peaks)};
}

Panorama load_panorama(const std::filesystem::path& image_path,
                       const std::filesystem::path& peaks_path, double q) {
  return make_panorama(read_image(image_path), q, load_peaks(peaks_path));
}

}  // namespace peaktag
