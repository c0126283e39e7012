#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "peaktag/edges.hpp"
#include "peaktag/matching.hpp"
#include "peaktag/metadata.hpp"
#include "peaktag/panorama.hpp"
#include "peaktag/peaks.hpp"

namespace peaktag {

/// Every tunable of the end-to-end run. Defaults are the tuned operating point.
struct RunConfig {
  double photo_threshold = 0.3;   // ρ_p
  double pano_threshold = 0.2;    // ρ_r
  double photo_base = 0.7;        // b_p
  double pano_base = 1.0;         // b_r
  int photo_segment = 2;          // l_p
  int pano_segment = 2;           // l_r
  double scale_sweep_pct = 0.0;   // ±k %
  int sweep_steps = 1;
  double sigma = 1.0;
  int kernel_radius = 200;
  int max_shift = 50;
  bool robust = false;
  RobustConfig robust_cfg;
  double threshold_deg = 4.0;
  DecayIndexing decay_indexing = DecayIndexing::Cumulative;
  std::optional<double> fov_deg;  // overrides EXIF + sensor lookup

  EdgeDetectConfig photo_detect() const { return {sigma, photo_threshold}; }
  EdgeDetectConfig pano_detect() const { return {sigma, pano_threshold}; }
  FilterConfig photo_filter() const { return {photo_base, photo_segment, decay_indexing}; }
  FilterConfig pano_filter() const { return {pano_base, pano_segment, decay_indexing}; }
  RefineConfig refine() const { return {kernel_radius, max_shift}; }
};

/// Sets one field from its key (e.g. "rho_p", "b_p", "robust.top_n").
/// Throws InvalidConfig for unknown keys or unparsable values.
void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// `key=value` lines with `#` comments.
void apply_config_text(RunConfig& cfg, std::string_view text);

/// All keys understood by apply_config_value.
std::vector<std::string> config_keys();

struct AlignmentReport {
  Alignment alignment;
  std::vector<PeakTag> peak_tags;
  double fov_rad = 0.0;
  double scale = 1.0;
  std::optional<CameraMatch> camera_match;
  std::optional<PhotoMeta> photo_meta;
  std::map<std::string, double> timings_ms;
  // Working data, not serialized.
  EdgeMap photo_edges;
  EdgeMap pano_edges;
};

void to_json(nlohmann::json& j, const AlignmentReport& r);

/// FOV from the config override, else from EXIF focal length and the sensor
/// database. Throws MissingFocalLength / LowConfidence as appropriate.
struct FovResolution {
  double fov_rad = 0.0;
  std::optional<CameraMatch> camera_match;
};
FovResolution resolve_fov(const std::optional<PhotoMeta>& meta,
                          const std::vector<CameraSpec>& sensors, const RunConfig& cfg);

/// FOV/scale, edges, filtering, VCC (optionally robust), then peak tagging.
AlignmentReport run_alignment(const RasterImage& photo, const std::optional<PhotoMeta>& meta,
                              const Panorama& panorama,
                              const std::vector<CameraSpec>& sensors,
                              const RunConfig& cfg, bool tag_peaks = true);

/// Blue photo edges over red panorama edges, cropped to the photo footprint
/// plus a margin.
RasterImage render_overlay(const EdgeMap& photo_edges, const EdgeMap& pano_edges,
                           const Alignment& alignment, int margin = 50);

}  // namespace peaktag
