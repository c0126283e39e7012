#include "peaktag/peaks.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "peaktag/error.hpp"

namespace peaktag {

void to_json(nlohmann::json& j, const Peak& p) {
  j = nlohmann::json{{"name", p.name}, {"x", p.pano_x}, {"y", p.pano_y}};
}

void from_json(const nlohmann::json& j, Peak& p) {
  p.name = j.at("name").get<std::string>();
  p.pano_x = j.at("x").get<double>();
  p.pano_y = j.at("y").get<double>();
}

void to_json(nlohmann::json& j, const PeakTag& t) {
  j = nlohmann::json{{"name", t.name},           {"x", t.photo_x},
                     {"y", t.photo_y},           {"dx", t.refinement_dx},
                     {"dy", t.refinement_dy},    {"visible", t.visible},
                     {"confidence", t.confidence}};
}

double triweight(double d, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveInput, "kernel radius must be positive");
  if (d < 0.0) d = -d;
  if (d >= r) return 0.0;
  const double u = d / r;
  const double v = 1.0 - u * u;
  return v * v * v;
}

namespace {

EdgeMap extract_pattern(const EdgeMap& edges, int cx, int cy, int r, bool wrap_columns) {
  const int size = 2 * r + 1;
  EdgeMap pattern(size, size);
  const int w = edges.width();
  for (int oy = -r; oy <= r; ++oy) {
    const int sy = cy + oy;
    if (sy < 0 || sy >= edges.height()) continue;
    for (int ox = -r; ox <= r; ++ox) {
      int sx = cx + ox;
      if (wrap_columns) {
        sx = (sx % w + w) % w;
      } else if (sx < 0 || sx >= w) {
        continue;
      }
      const double rho = edges.strength(sx, sy);
      if (rho <= 0.0) continue;
      const double weight = triweight(std::hypot(ox, oy), r);
      if (weight <= 0.0) continue;
      pattern.set(ox + r, oy + r, rho * weight, edges.direction(sx, sy));
    }
  }
  return pattern;
}

double self_score(const EdgeMap& e) {
  double s = 0.0;
  for (double rho : e.strengths()) s += rho * rho * rho * rho;
  return s;
}

void check_refine(const RefineConfig& cfg) {
  if (cfg.kernel_radius <= 0 || cfg.max_shift < 0 || cfg.max_shift > cfg.kernel_radius) {
    throw Error(ErrorCode::InvalidConfig, "refinement needs r > 0 and 0 <= max_shift <= r");
  }
}

}  // namespace

EdgeMap extract_peak_pattern(const EdgeMap& edges, int center_x, int center_y,
                             const RefineConfig& cfg) {
  check_refine(cfg);
  return extract_pattern(edges, center_x, center_y, cfg.kernel_radius, false);
}

LocalMatch match_patterns(const EdgeMap& photo_pattern, const EdgeMap& pano_pattern,
                          int max_shift) {
  if (photo_pattern.width() != pano_pattern.width() ||
      photo_pattern.height() != pano_pattern.height()) {
    throw Error(ErrorCode::MalformedInput, "patterns must have equal size");
  }
  // score(s) = Re Σ_u photo(u + s)·conj(pano(u)). The photo pattern takes the
  // panorama role with max_shift zero columns appended, so circular column
  // indexing never folds real content into the searched shifts.
  const int w = photo_pattern.width();
  const int h = photo_pattern.height();
  EdgeMap padded(w + max_shift, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double rho = photo_pattern.strength(x, y);
      if (rho > 0.0) padded.set(x, y, rho, photo_pattern.direction(x, y));
    }
  }
  const ScoreGrid grid = compute_vcc_grid(pano_pattern, padded);

  const double scale = std::max(std::sqrt(self_score(photo_pattern) * self_score(pano_pattern)),
                                std::numeric_limits<double>::min());
  const double tie = 1e-9 * scale;
  LocalMatch best{0, 0, -std::numeric_limits<double>::infinity()};
  int best_len = 0;
  const int m2 = max_shift * max_shift;
  for (int sy = -max_shift; sy <= max_shift; ++sy) {
    if (sy < grid.dy_min() || sy > grid.dy_max()) continue;
    for (int sx = -max_shift; sx <= max_shift; ++sx) {
      const int len = sx * sx + sy * sy;
      if (len > m2) continue;
      const int col = ((sx % grid.width()) + grid.width()) % grid.width();
      const double s = grid.at(sy, col);
      const bool better = s > best.score + tie ||
                          (std::abs(s - best.score) <= tie && len < best_len);
      if (better) {
        best = {sx, sy, s};
        best_len = len;
      }
    }
  }
  return best;
}

PeakTag refine_peak(const EdgeMap& photo_edges, const EdgeMap& pano_edges, const Peak& peak,
                    const Alignment& alignment, const RefineConfig& cfg) {
  check_refine(cfg);
  PeakTag tag;
  tag.name = peak.name;

  const int wr = pano_edges.width();
  double px = std::fmod(peak.pano_x - alignment.dx, static_cast<double>(wr));
  if (px < 0.0) px += wr;
  const double py = peak.pano_y - alignment.dy;
  tag.photo_x = px;
  tag.photo_y = py;
  if (px < 0.0 || px >= photo_edges.width() || py < 0.0 || py >= photo_edges.height()) {
    tag.visible = false;
    return tag;
  }
  tag.visible = true;

  const int r = cfg.kernel_radius;
  const EdgeMap pano_pattern =
      extract_pattern(pano_edges, static_cast<int>(std::lround(peak.pano_x)),
                      static_cast<int>(std::lround(peak.pano_y)), r, true);
  const EdgeMap photo_pattern = extract_pattern(
      photo_edges, static_cast<int>(std::lround(px)), static_cast<int>(std::lround(py)), r,
      false);

  const double photo_self = self_score(photo_pattern);
  if (photo_self == 0.0 && self_score(pano_pattern) == 0.0) return tag;  // degenerate

  const LocalMatch m = match_patterns(photo_pattern, pano_pattern, cfg.max_shift);
  tag.refinement_dx = m.dx;
  tag.refinement_dy = m.dy;
  tag.photo_x = px + m.dx;
  tag.photo_y = py + m.dy;
  tag.confidence = photo_self > 0.0 ? m.score / photo_self : 0.0;
  return tag;
}

std::vector<PeakTag> tag_all_peaks(const EdgeMap& photo_edges, const EdgeMap& pano_edges,
                                   const std::vector<Peak>& peaks, const Alignment& alignment,
                                   const RefineConfig& cfg) {
  std::vector<PeakTag> tags;
  tags.reserve(peaks.size());
  for (const Peak& peak : peaks) {
    try {
      tags.push_back(refine_peak(photo_edges, pano_edges, peak, alignment, cfg));
    } catch (const Error&) {
      PeakTag hidden;
      hidden.name = peak.name;
      tags.push_back(hidden);
    }
  }
  return tags;
}

}  // namespace peaktag
