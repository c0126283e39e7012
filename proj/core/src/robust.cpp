// Second-stage re-ranking of VCC candidates by contiguous silhouette overlap.

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "peaktag/error.hpp"
#include "peaktag/matching.hpp"

namespace peaktag {
namespace {

struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] != 0;
  }
};

BinaryMap binarize(const EdgeMap& e) {
  BinaryMap b{e.width(), e.height(), std::vector<std::uint8_t>(e.size(), 0)};
  for (std::size_t i = 0; i < e.size(); ++i) b.bits[i] = e.strengths()[i] > 0.0 ? 1 : 0;
  return b;
}

// Every pixel within `radius` (Euclidean) of an edge pixel; columns wrap.
BinaryMap dilate(const BinaryMap& src, int radius) {
  BinaryMap out{src.width, src.height, std::vector<std::uint8_t>(src.bits.size(), 0)};
  const int r2 = radius * radius;
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      if (!src.at(x, y)) continue;
      for (int oy = -radius; oy <= radius; ++oy) {
        const int ny = y + oy;
        if (ny < 0 || ny >= src.height) continue;
        for (int ox = -radius; ox <= radius; ++ox) {
          if (ox * ox + oy * oy > r2) continue;
          const int nx = ((x + ox) % src.width + src.width) % src.width;
          out.bits[static_cast<std::size_t>(ny) * src.width + nx] = 1;
        }
      }
    }
  }
  return out;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

struct PanoEdgeRef {
  int x = 0;  // unwrapped column, may lie outside [0, width)
  int y = 0;
  double theta = 0.0;
};

// Nearest raw panorama edge pixel to (x, y) within `radius`; columns wrap.
std::optional<PanoEdgeRef> nearest_pano_edge(const EdgeMap& pano, double x, double y,
                                             int radius) {
  std::optional<PanoEdgeRef> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  const int cx = static_cast<int>(std::lround(x));
  const int cy = static_cast<int>(std::lround(y));
  const int w = pano.width();
  for (int oy = -radius; oy <= radius; ++oy) {
    const int ny = cy + oy;
    if (ny < 0 || ny >= pano.height()) continue;
    for (int ox = -radius; ox <= radius; ++ox) {
      const int ux = cx + ox;
      const int nx = (ux % w + w) % w;
      if (pano.strength(nx, ny) <= 0.0) continue;
      const double d2 = (ux - x) * (ux - x) + (ny - y) * (ny - y);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = PanoEdgeRef{ux, ny, pano.direction(nx, ny)};
      }
    }
  }
  return best;
}

double robust_score_impl(const BinaryMap& photo_bits, const EdgeMap& pano,
                         const BinaryMap& band, int dx, int dy, const RobustConfig& cfg) {
  const int wp = photo_bits.width, hp = photo_bits.height;
  const int wr = band.width, hr = band.height;

  auto in_band = [&](int x, int y) {
    const int py = y + dy;
    if (py < 0 || py >= hr) return false;
    return band.at((x + dx) % wr, py);
  };

  // Intersection pixels, indexed for clustering.
  std::vector<int> label(static_cast<std::size_t>(wp) * hp, -1);
  std::vector<std::pair<int, int>> points;
  for (int y = 0; y < hp; ++y) {
    for (int x = 0; x < wp; ++x) {
      if (photo_bits.at(x, y) && in_band(x, y)) {
        label[static_cast<std::size_t>(y) * wp + x] = static_cast<int>(points.size());
        points.emplace_back(x, y);
      }
    }
  }
  if (points.empty()) return 0.0;

  const double d = cfg.cluster_distance;
  const int reach = std::max(1, static_cast<int>(std::ceil(d)));
  DisjointSet sets(static_cast<int>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = points[i];
    for (int oy = 0; oy <= reach; ++oy) {
      for (int ox = -reach; ox <= reach; ++ox) {
        if (oy == 0 && ox <= 0) continue;
        if (ox * ox + oy * oy >= d * d) continue;
        const int nx = x + ox, ny = y + oy;
        if (nx < 0 || nx >= wp || ny >= hp) continue;
        const int j = label[static_cast<std::size_t>(ny) * wp + nx];
        if (j >= 0) sets.unite(static_cast<int>(i), j);
      }
    }
  }

  struct Cluster {
    std::vector<std::size_t> members;
  };
  std::vector<int> root_to_cluster(points.size(), -1);
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int root = sets.find(static_cast<int>(i));
    int& c = root_to_cluster[static_cast<std::size_t>(root)];
    if (c < 0) {
      c = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(c)].members.push_back(i);
  }

  const int search = cfg.neighborhood_radius + 2;
  double total = 0.0;
  for (const Cluster& cluster : clusters) {
    const double length = static_cast<double>(cluster.members.size());
    if (length >= cfg.fit_length) {
      total += std::pow(length, cfg.exponent);
      continue;
    }

    // Side of the panorama edge on which the photo edge leaves the band.
    double cx = 0.0, cy = 0.0;
    for (std::size_t m : cluster.members) {
      cx += points[m].first;
      cy += points[m].second;
    }
    cx = cx / length + dx;
    cy = cy / length + dy;
    bool left = false, right = false;
    if (auto ref = nearest_pano_edge(pano, cx, cy, search + static_cast<int>(cfg.fit_length))) {
      const double tx = std::cos(ref->theta), ty = std::sin(ref->theta);
      for (std::size_t m : cluster.members) {
        const auto [x, y] = points[m];
        for (int oy = -1; oy <= 1; ++oy) {
          for (int ox = -1; ox <= 1; ++ox) {
            const int ex = x + ox, ey = y + oy;
            if (ex < 0 || ex >= wp || ey < 0 || ey >= hp) continue;
            if (!photo_bits.at(ex, ey) || label[static_cast<std::size_t>(ey) * wp + ex] >= 0) {
              continue;
            }
            const double px = ex + dx, py = ey + dy;
            const auto near = nearest_pano_edge(pano, px, py, search);
            if (!near) continue;
            const double cross = tx * (py - near->y) - ty * (px - near->x);
            if (cross > 0.0) right = true;
            if (cross < 0.0) left = true;
          }
        }
      }
    }
    if (left && right) {
      total -= cfg.penalty;
    } else {
      total += std::pow(length, cfg.exponent);
    }
  }
  return total;
}

void check_robust(const RobustConfig& cfg) {
  if (cfg.exponent < 1.0 || cfg.penalty < 0.0 || cfg.fit_length < 0.0 || cfg.top_n < 1 ||
      cfg.neighborhood_radius < 0 || cfg.cluster_distance <= 0.0) {
    throw Error(ErrorCode::InvalidConfig, "invalid robust matching configuration");
  }
}

}  // namespace

double robust_score(const EdgeMap& photo, const EdgeMap& pano, int dx, int dy,
                    const RobustConfig& cfg) {
  check_robust(cfg);
  if (photo.width() > pano.width()) {
    throw Error(ErrorCode::PhotoWiderThanPanorama, "photo edge map is wider than the panorama");
  }
  const int w = pano.width();
  const BinaryMap band = dilate(binarize(pano), cfg.neighborhood_radius);
  return robust_score_impl(binarize(photo), pano, band, ((dx % w) + w) % w, dy, cfg);
}

Alignment robust_rescore(const EdgeMap& photo, const EdgeMap& pano, const ScoreGrid& grid,
                         const RobustConfig& cfg, double scale, double pano_q) {
  check_robust(cfg);
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "score grid is empty");
  if (static_cast<std::size_t>(cfg.top_n) > grid.values().size()) {
    throw Error(ErrorCode::InvalidConfig, "top_n exceeds the number of grid entries");
  }
  const auto candidates = top_candidates(grid, cfg.top_n, cfg.nms_radius);
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "score grid has no positive peak");

  const BinaryMap photo_bits = binarize(photo);
  const BinaryMap band = dilate(binarize(pano), cfg.neighborhood_radius);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s =
        robust_score_impl(photo_bits, pano, band, candidates[i].dx, candidates[i].dy, cfg);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  Alignment a;
  a.dx = candidates[best].dx;
  a.dy = candidates[best].dy;
  a.score = candidates[best].score;
  a.scale = scale;
  a.azimuth_deg = offset_to_azimuth(a.dx, photo.width(), pano_q);
  return a;
}

}  // namespace peaktag
