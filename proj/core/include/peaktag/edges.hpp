#pragma once

#include <cstddef>
#include <vector>

#include "peaktag/image.hpp"

namespace peaktag {

/// Per-pixel edge strength in [0,1] and tangent direction in [0, 2π).
/// Direction is kept at 0 wherever strength is 0.
class EdgeMap {
 public:
  EdgeMap() = default;
  EdgeMap(int width, int height)
      : width_(width),
        height_(height),
        strength_(static_cast<std::size_t>(width) * height, 0.0),
        direction_(static_cast<std::size_t>(width) * height, 0.0) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return strength_.size(); }

  double strength(int x, int y) const { return strength_[index(x, y)]; }
  double direction(int x, int y) const { return direction_[index(x, y)]; }

  /// Stores an edge vector; θ is wrapped into [0, 2π) and zeroed with ρ.
  void set(int x, int y, double rho, double theta);

  const std::vector<double>& strengths() const noexcept { return strength_; }
  const std::vector<double>& directions() const noexcept { return direction_; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  friend bool operator==(const EdgeMap&, const EdgeMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> strength_;
  std::vector<double> direction_;
};

struct EdgeDetectConfig {
  double gaussian_sigma = 1.0;
  double strength_threshold = 0.3;
};

inline constexpr EdgeDetectConfig kPhotoDetectDefaults{1.0, 0.3};
inline constexpr EdgeDetectConfig kPanoramaDetectDefaults{1.0, 0.2};

enum class DecayIndexing {
  Cumulative,  // subsegment index keeps counting down the whole column
  PerRun,      // index restarts at each zero-separated run
};

struct FilterConfig {
  double base = 0.7;
  int max_segment_length = 2;
  DecayIndexing indexing = DecayIndexing::Cumulative;
};

inline constexpr FilterConfig kPhotoFilterDefaults{0.7, 2, DecayIndexing::Cumulative};
inline constexpr FilterConfig kPanoramaFilterDefaults{1.0, 2, DecayIndexing::Cumulative};

/// Gaussian-derivative color structure tensor detector. Throws EmptyImage.
EdgeMap detect_edges(const RasterImage& image, const EdgeDetectConfig& config);

/// Column-wise geometric decay of edge strength, top of the column first.
EdgeMap filter_edges(const EdgeMap& edges, const FilterConfig& config);

/// Strength as 8-bit grayscale for inspection.
GrayImage edge_map_to_gray(const EdgeMap& edges);

}  // namespace peaktag
