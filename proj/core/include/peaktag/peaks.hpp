#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "peaktag/edges.hpp"
#include "peaktag/matching.hpp"

namespace peaktag {

struct Peak {
  std::string name;
  double pano_x = 0.0;
  double pano_y = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

void to_json(nlohmann::json& j, const Peak& p);
void from_json(const nlohmann::json& j, Peak& p);

struct PeakTag {
  std::string name;
  bool visible = false;
  double photo_x = 0.0;  // refined position on the scaled photo
  double photo_y = 0.0;
  int refinement_dx = 0;
  int refinement_dy = 0;
  double confidence = 0.0;
};

void to_json(nlohmann::json& j, const PeakTag& t);

struct RefineConfig {
  int kernel_radius = 200;
  int max_shift = 50;
};

/// (1 − (d/r)²)³ inside the radius, 0 outside.
double triweight(double d, double r);

/// (2r+1)² window around `center`, strengths weighted by triweight of the
/// distance to the center. Pixels outside the source map read as zero.
EdgeMap extract_peak_pattern(const EdgeMap& edges, int center_x, int center_y,
                             const RefineConfig& cfg);

/// Best shift (sx, sy), |s| ≤ max_shift, of the photo pattern against the
/// panorama pattern. Ties prefer the shortest shift.
struct LocalMatch {
  int dx = 0;
  int dy = 0;
  double score = 0.0;
};
LocalMatch match_patterns(const EdgeMap& photo_pattern, const EdgeMap& pano_pattern,
                          int max_shift);

PeakTag refine_peak(const EdgeMap& photo_edges, const EdgeMap& pano_edges,
                    const Peak& peak, const Alignment& alignment,
                    const RefineConfig& cfg);

std::vector<PeakTag> tag_all_peaks(const EdgeMap& photo_edges, const EdgeMap& pano_edges,
                                   const std::vector<Peak>& peaks,
                                   const Alignment& alignment, const RefineConfig& cfg);

}  // namespace peaktag
