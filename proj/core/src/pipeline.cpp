#include "peaktag/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

#include "peaktag/error.hpp"

namespace peaktag {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::MissingExif: return "MissingExif";
    case ErrorCode::MissingFocalLength: return "MissingFocalLength";
    case ErrorCode::LowConfidence: return "LowConfidence";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::PhotoWiderThanPanorama: return "PhotoWiderThanPanorama";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::MalformedPeaks: return "MalformedPeaks";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::NoPairs: return "NoPairs";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw Error(ErrorCode::InvalidConfig,
                "bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  int out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::InvalidConfig,
                "bad integer '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw Error(ErrorCode::InvalidConfig,
              "bad boolean '" + std::string(value) + "' for " + std::string(key));
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"rho_p", [](RunConfig& c, auto k, auto v) { c.photo_threshold = parse_double(k, v); }},
      {"rho_r", [](RunConfig& c, auto k, auto v) { c.pano_threshold = parse_double(k, v); }},
      {"b_p", [](RunConfig& c, auto k, auto v) { c.photo_base = parse_double(k, v); }},
      {"b_r", [](RunConfig& c, auto k, auto v) { c.pano_base = parse_double(k, v); }},
      {"l_p", [](RunConfig& c, auto k, auto v) { c.photo_segment = parse_int(k, v); }},
      {"l_r", [](RunConfig& c, auto k, auto v) { c.pano_segment = parse_int(k, v); }},
      {"scale_sweep", [](RunConfig& c, auto k, auto v) { c.scale_sweep_pct = parse_double(k, v); }},
      {"sweep_steps", [](RunConfig& c, auto k, auto v) { c.sweep_steps = parse_int(k, v); }},
      {"sigma", [](RunConfig& c, auto k, auto v) { c.sigma = parse_double(k, v); }},
      {"kernel_radius", [](RunConfig& c, auto k, auto v) { c.kernel_radius = parse_int(k, v); }},
      {"max_shift", [](RunConfig& c, auto k, auto v) { c.max_shift = parse_int(k, v); }},
      {"robust", [](RunConfig& c, auto k, auto v) { c.robust = parse_bool(k, v); }},
      {"robust.a", [](RunConfig& c, auto k, auto v) { c.robust_cfg.exponent = parse_double(k, v); }},
      {"robust.c", [](RunConfig& c, auto k, auto v) { c.robust_cfg.penalty = parse_double(k, v); }},
      {"robust.l_fit",
       [](RunConfig& c, auto k, auto v) { c.robust_cfg.fit_length = parse_double(k, v); }},
      {"robust.r_n",
       [](RunConfig& c, auto k, auto v) { c.robust_cfg.neighborhood_radius = parse_int(k, v); }},
      {"robust.d",
       [](RunConfig& c, auto k, auto v) { c.robust_cfg.cluster_distance = parse_double(k, v); }},
      {"robust.top_n", [](RunConfig& c, auto k, auto v) { c.robust_cfg.top_n = parse_int(k, v); }},
      {"robust.nms_radius",
       [](RunConfig& c, auto k, auto v) { c.robust_cfg.nms_radius = parse_int(k, v); }},
      {"threshold", [](RunConfig& c, auto k, auto v) { c.threshold_deg = parse_double(k, v); }},
      {"decay_indexing",
       [](RunConfig& c, auto k, std::string_view v) {
         if (v == "cumulative") {
           c.decay_indexing = DecayIndexing::Cumulative;
         } else if (v == "per_run") {
           c.decay_indexing = DecayIndexing::PerRun;
         } else {
           throw Error(ErrorCode::InvalidConfig,
                       "bad value '" + std::string(v) + "' for " + std::string(k) +
                           " (cumulative | per_run)");
         }
       }},
      {"fov", [](RunConfig& c, auto k, auto v) { c.fov_deg = parse_double(k, v); }},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      set(cfg, key, value);
      return;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(line_no) + " is not key=value");
    }
    apply_config_value(cfg, content.substr(0, eq), content.substr(eq + 1));
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& entry : setters()) keys.push_back(entry.first);
  return keys;
}

FovResolution resolve_fov(const std::optional<PhotoMeta>& meta,
                          const std::vector<CameraSpec>& sensors, const RunConfig& cfg) {
  if (cfg.fov_deg) {
    if (!(*cfg.fov_deg > 0.0) || *cfg.fov_deg > 360.0) {
      throw Error(ErrorCode::NonPositiveInput, "FOV must be in (0, 360] degrees");
    }
    return {*cfg.fov_deg * std::numbers::pi / 180.0, std::nullopt};
  }
  if (!meta || !meta->focal_length_mm) {
    throw Error(ErrorCode::MissingFocalLength,
                "focal length unavailable; pass --fov to set the field of view");
  }
  if (sensors.empty()) {
    throw Error(ErrorCode::LowConfidence,
                "no sensor database given; pass --sensors or --fov");
  }
  CameraMatch match = match_camera(*meta, sensors);
  const double fov = estimate_fov(*meta->focal_length_mm, match.spec.sensor_width_mm);
  return {fov, std::move(match)};
}

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_[stage] = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }

 private:
  std::map<std::string, double>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

AlignmentReport run_alignment(const RasterImage& photo, const std::optional<PhotoMeta>& meta,
                              const Panorama& panorama, const std::vector<CameraSpec>& sensors,
                              const RunConfig& cfg, bool tag_peaks) {
  if (photo.empty()) throw Error(ErrorCode::EmptyImage, "photo is empty");
  AlignmentReport report;
  report.photo_meta = meta;
  StageTimer timer(report.timings_ms);

  const FovResolution fov = resolve_fov(meta, sensors, cfg);
  report.fov_rad = fov.fov_rad;
  report.camera_match = fov.camera_match;
  const double base_scale =
      compute_scale_factor(fov.fov_rad, photo.width(), panorama.raster.width());
  timer.mark("fov");

  report.pano_edges =
      filter_edges(detect_edges(panorama.raster, cfg.pano_detect()), cfg.pano_filter());
  timer.mark("panorama_edges");

  SweepConfig sweep;
  sweep.base_scale = base_scale;
  sweep.sweep = cfg.scale_sweep_pct / 100.0;
  sweep.steps = cfg.sweep_steps;
  sweep.detect = cfg.photo_detect();
  sweep.filter = cfg.photo_filter();
  sweep.pano_q = panorama.q;
  SweepResult matched = scale_sweep(photo, report.pano_edges, sweep);
  report.alignment = matched.alignment;
  report.scale = matched.alignment.scale;
  report.photo_edges = std::move(matched.photo_edges);
  timer.mark("vcc");

  if (cfg.robust) {
    report.alignment = robust_rescore(report.photo_edges, report.pano_edges, matched.grid,
                                      cfg.robust_cfg, report.scale, panorama.q);
    timer.mark("robust");
  }

  if (tag_peaks) {
    report.peak_tags = tag_all_peaks(report.photo_edges, report.pano_edges, panorama.peaks,
                                     report.alignment, cfg.refine());
    timer.mark("peaks");
  }
  return report;
}

void to_json(nlohmann::json& j, const AlignmentReport& r) {
  j = nlohmann::json{{"alignment", r.alignment},
                     {"peaks", r.peak_tags},
                     {"fov_rad", r.fov_rad},
                     {"fov_deg", r.fov_rad * 180.0 / std::numbers::pi},
                     {"scale", r.scale},
                     {"timings_ms", r.timings_ms}};
  if (r.camera_match) {
    j["camera"] = {{"make", r.camera_match->spec.make},
                   {"model", r.camera_match->spec.model},
                   {"sensor_width_mm", r.camera_match->spec.sensor_width_mm},
                   {"similarity", r.camera_match->similarity}};
  } else {
    j["camera"] = nullptr;
  }
  if (r.photo_meta) {
    nlohmann::json m{{"make", r.photo_meta->make},
                     {"model", r.photo_meta->model},
                     {"width_px", r.photo_meta->width_px},
                     {"height_px", r.photo_meta->height_px}};
    m["focal_length_mm"] =
        r.photo_meta->focal_length_mm ? nlohmann::json(*r.photo_meta->focal_length_mm) : nlohmann::json(nullptr);
    j["photo_meta"] = m;
  }
}

RasterImage render_overlay(const EdgeMap& photo_edges, const EdgeMap& pano_edges,
                           const Alignment& alignment, int margin) {
  const int wr = pano_edges.width();
  const int width = std::min(wr, photo_edges.width() + 2 * margin);
  const int x_start = alignment.dx - (width - photo_edges.width()) / 2;
  const int top = std::min(0, alignment.dy);
  const int bottom = std::max(pano_edges.height(), alignment.dy + photo_edges.height());
  RasterImage out(width, bottom - top, Rgb{255, 255, 255});
  for (int y = top; y < bottom; ++y) {
    for (int cx = 0; cx < width; ++cx) {
      const int pano_x = ((x_start + cx) % wr + wr) % wr;
      const bool pano_edge =
          y >= 0 && y < pano_edges.height() && pano_edges.strength(pano_x, y) > 0.0;
      const int px = ((pano_x - alignment.dx) % wr + wr) % wr;
      const int py = y - alignment.dy;
      const bool photo_edge = px < photo_edges.width() && py >= 0 &&
                              py < photo_edges.height() && photo_edges.strength(px, py) > 0.0;
      Rgb& dst = out.at(cx, y - top);
      if (pano_edge && photo_edge) {
        dst = {160, 0, 160};
      } else if (pano_edge) {
        dst = {220, 0, 0};
      } else if (photo_edge) {
        dst = {0, 0, 220};
      }
    }
  }
  return out;
}

}  // namespace peaktag
