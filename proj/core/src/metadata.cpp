#include "peaktag/metadata.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "peaktag/error.hpp"
#include "peaktag/image.hpp"

namespace peaktag {

namespace detail {
std::optional<std::pair<int, int>> tiff_dimensions(std::span<const std::uint8_t> bytes);
}

PhotoMeta parse_photo_meta(std::span<const std::uint8_t> bytes) {
  const auto exif = read_exif(bytes);
  if (!exif) throw Error(ErrorCode::MissingExif, "photo has no EXIF block");
  if (!exif->focal_length_mm || !(*exif->focal_length_mm > 0.0)) {
    throw Error(ErrorCode::MissingFocalLength, "EXIF FocalLength (37386) is missing");
  }

  PhotoMeta meta;
  meta.focal_length_mm = exif->focal_length_mm;
  meta.make = exif->make.value_or("");
  meta.model = exif->model.value_or("");
  if (auto dims = detail::tiff_dimensions(bytes)) {
    meta.width_px = dims->first;
    meta.height_px = dims->second;
  } else {
    const RasterImage raster = decode_image(bytes);
    meta.width_px = raster.width();
    meta.height_px = raster.height();
  }
  if (meta.width_px < 1 || meta.height_px < 1) {
    throw Error(ErrorCode::EmptyImage, "photo has no pixels");
  }
  return meta;
}

PhotoMeta parse_photo_meta(const std::filesystem::path& path) {
  return parse_photo_meta(read_file(path));
}

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// Characters shared by a and b: longest common substring (first occurrence)
// plus the same count recursively on the left and right remainders.
std::size_t common_chars(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) return 0;
  std::size_t best = 0, pos_a = 0, pos_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t k = 0;
      while (i + k < a.size() && j + k < b.size() && a[i + k] == b[j + k]) ++k;
      if (k > best) {
        best = k;
        pos_a = i;
        pos_b = j;
      }
    }
  }
  if (best == 0) return 0;
  return best + common_chars(a.substr(0, pos_a), b.substr(0, pos_b)) +
         common_chars(a.substr(pos_a + best), b.substr(pos_b + best));
}

}  // namespace

std::string normalize_camera_name(std::string_view make_in, std::string_view model_in) {
  std::string make = collapse_spaces(to_lower(make_in));
  std::string model = to_lower(model_in);
  if (make.find("nikon") != std::string::npos) make = "nikon";
  if (make.find("olympus") != std::string::npos) make = "olympus";
  if (!make.empty()) {
    if (auto pos = model.find(make); pos != std::string::npos) model.erase(pos, make.size());
  }
  return collapse_spaces(make + " " + model);
}

double text_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  return 2.0 * static_cast<double>(common_chars(a, b)) /
         static_cast<double>(a.size() + b.size());
}

CameraMatch match_camera(const PhotoMeta& meta, std::span<const CameraSpec> db) {
  if (db.empty()) throw Error(ErrorCode::MalformedInput, "sensor database is empty");
  const std::string query = normalize_camera_name(meta.make, meta.model);
  CameraMatch best{db.front(), -1.0};
  for (const CameraSpec& spec : db) {
    const double s = text_similarity(query, normalize_camera_name(spec.make, spec.model));
    if (s > best.similarity) best = {spec, s};
  }
  if (best.similarity < kMinCameraSimilarity) {
    std::ostringstream msg;
    msg << "no confident sensor match for '" << query << "' (best '"
        << normalize_camera_name(best.spec.make, best.spec.model)
        << "', similarity " << best.similarity << ")";
    throw Error(ErrorCode::LowConfidence, msg.str());
  }
  return best;
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  for (auto& f : fields) {
    while (!f.empty() && std::isspace(static_cast<unsigned char>(f.back()))) f.pop_back();
    std::size_t lead = 0;
    while (lead < f.size() && std::isspace(static_cast<unsigned char>(f[lead]))) ++lead;
    f.erase(0, lead);
  }
  return fields;
}

}  // namespace

std::vector<CameraSpec> parse_sensor_db(std::string_view csv) {
  std::vector<CameraSpec> rows;
  std::istringstream in{std::string(csv)};
  std::string line;
  int make_col = -1, model_col = -1, width_col = -1;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header && line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = to_lower(fields[i]);
        if (name == "make") make_col = static_cast<int>(i);
        if (name == "model") model_col = static_cast<int>(i);
        if (name == "sensor_width_mm") width_col = static_cast<int>(i);
      }
      if (make_col < 0 || model_col < 0 || width_col < 0) {
        throw Error(ErrorCode::MalformedInput,
                    "sensor database header must contain make,model,sensor_width_mm");
      }
      header = false;
      continue;
    }
    const int needed = std::max({make_col, model_col, width_col});
    if (static_cast<int>(fields.size()) <= needed) {
      throw Error(ErrorCode::MalformedInput,
                  "sensor database line " + std::to_string(line_no) + " has too few fields");
    }
    CameraSpec spec;
    spec.make = fields[static_cast<std::size_t>(make_col)];
    spec.model = fields[static_cast<std::size_t>(model_col)];
    try {
      std::size_t used = 0;
      const std::string& w = fields[static_cast<std::size_t>(width_col)];
      spec.sensor_width_mm = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedInput,
                  "sensor database line " + std::to_string(line_no) + ": bad sensor width");
    }
    if (!(spec.sensor_width_mm > 0.0)) {
      throw Error(ErrorCode::MalformedInput,
                  "sensor database line " + std::to_string(line_no) +
                      ": sensor width must be positive");
    }
    rows.push_back(std::move(spec));
  }
  if (header) throw Error(ErrorCode::MalformedInput, "sensor database has no header row");
  return rows;
}

std::vector<CameraSpec> load_sensor_db(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_sensor_db(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                          bytes.size()));
}

double estimate_fov(double focal_length_mm, double sensor_width_mm) {
  if (!(focal_length_mm > 0.0) || !(sensor_width_mm > 0.0) ||
      !std::isfinite(focal_length_mm) || !std::isfinite(sensor_width_mm)) {
    throw Error(ErrorCode::NonPositiveInput, "focal length and sensor width must be positive");
  }
  return 2.0 * std::atan(sensor_width_mm / (2.0 * focal_length_mm));
}

double compute_scale_factor(double fov_rad, int photo_width, int pano_width) {
  if (!(fov_rad > 0.0) || !std::isfinite(fov_rad) || photo_width <= 0 || pano_width <= 0) {
    throw Error(ErrorCode::NonPositiveInput, "FOV and widths must be positive");
  }
  return fov_rad * pano_width / (2.0 * std::numbers::pi * photo_width);
}

}  // namespace peaktag
