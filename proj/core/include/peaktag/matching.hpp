#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "peaktag/edges.hpp"
#include "peaktag/image.hpp"

namespace peaktag {

/// VCC likelihood for every overlap of the photo on the panorama cylinder.
/// Rows are vertical offsets dy in [dy_min, dy_max], columns horizontal
/// offsets dx in [0, width).
class ScoreGrid {
 public:
  ScoreGrid() = default;
  ScoreGrid(int dy_min, int dy_max, int width)
      : dy_min_(dy_min),
        dy_max_(dy_max),
        width_(width),
        scores_(static_cast<std::size_t>(dy_max - dy_min + 1) * width, 0.0) {}

  int dy_min() const noexcept { return dy_min_; }
  int dy_max() const noexcept { return dy_max_; }
  int rows() const noexcept { return dy_max_ - dy_min_ + 1; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return scores_.empty(); }

  double& at(int dy, int dx) { return scores_[index(dy, dx)]; }
  double at(int dy, int dx) const { return scores_[index(dy, dx)]; }

  const std::vector<double>& values() const noexcept { return scores_; }

 private:
  std::size_t index(int dy, int dx) const {
    return static_cast<std::size_t>(dy - dy_min_) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(dx);
  }

  int dy_min_ = 0;
  int dy_max_ = -1;
  int width_ = 0;
  std::vector<double> scores_;
};

struct Alignment {
  int dx = 0;  // panorama column of the photo's left edge
  int dy = 0;  // panorama row of the photo's top edge, may be negative
  double scale = 1.0;
  double score = 0.0;
  double azimuth_deg = 0.0;

  friend bool operator==(const Alignment&, const Alignment&) = default;
};

void to_json(nlohmann::json& j, const Alignment& a);
void from_json(const nlohmann::json& j, Alignment& a);

struct RobustConfig {
  double exponent = 2.0;
  double penalty = 5.0;
  double fit_length = 3.0;
  int neighborhood_radius = 2;
  double cluster_distance = 2.0;
  int top_n = 10;
  int nms_radius = 5;
};

/// ρ₁²ρ₂²·cos 2(θ₁−θ₂).
double edge_similarity(double rho1, double theta1, double rho2, double theta2);

/// Direct summation over every offset. Reference path for compute_vcc_grid.
ScoreGrid vcc_brute_force(const EdgeMap& photo, const EdgeMap& pano);

/// Same contract as vcc_brute_force, evaluated with 2D FFTs over the
/// horizontally circular, vertically zero-padded panorama.
ScoreGrid compute_vcc_grid(const EdgeMap& photo, const EdgeMap& pano);

/// Bearing in degrees of the photo's center column; panorama column 0 is 0°.
double offset_to_azimuth(double dx, int photo_width, double pano_q);

/// Global maximum; ties go to the smallest dy, then the smallest dx.
Alignment best_alignment(const ScoreGrid& grid, double scale, double pano_q,
                         int photo_width);

struct GridPeak {
  int dy = 0;
  int dx = 0;
  double score = 0.0;
};

/// Up to `count` local maxima in descending score order, suppressing any
/// entry within `radius` of an already selected one (dx distance wraps).
std::vector<GridPeak> top_candidates(const ScoreGrid& grid, int count, int radius);

/// Silhouette overlap score of the photo placed at (dx, dy) on the panorama.
double robust_score(const EdgeMap& photo, const EdgeMap& pano, int dx, int dy,
                    const RobustConfig& cfg);

/// Re-ranks the top VCC candidates by robust_score. Throws NoCandidates when
/// the grid holds no positive score.
Alignment robust_rescore(const EdgeMap& photo, const EdgeMap& pano,
                         const ScoreGrid& grid, const RobustConfig& cfg,
                         double scale, double pano_q);

struct SweepConfig {
  double base_scale = 1.0;
  double sweep = 0.0;  // fraction, 0.05 means ±5 %
  int steps = 1;
  EdgeDetectConfig detect = kPhotoDetectDefaults;
  FilterConfig filter = kPhotoFilterDefaults;
  double pano_q = 20.0;
};

struct SweepResult {
  Alignment alignment;
  EdgeMap photo_edges;  // filtered edges of the photo at the chosen scale
  ScoreGrid grid;
  std::vector<double> candidate_scales;
  std::vector<double> normalized_scores;
};

/// Candidate scales evenly spaced over base·(1 ± sweep); steps == 1 or
/// sweep == 0 yields just the base scale.
std::vector<double> sweep_scales(double base_scale, double sweep, int steps);

/// Rescales the photo, detects and filters edges, and keeps the scale whose
/// VCC maximum is best after dividing by the relative photo area.
SweepResult scale_sweep(const RasterImage& photo, const EdgeMap& pano_edges,
                        const SweepConfig& cfg);

/// Photo resized by `scale`; identity when the rounded size is unchanged.
RasterImage scale_photo(const RasterImage& photo, double scale);

/// Normalizes scores to 0..255 for a heatmap (dy_min on the top row).
GrayImage score_grid_to_gray(const ScoreGrid& grid);

}  // namespace peaktag
