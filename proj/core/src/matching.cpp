#include "peaktag/matching.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <nlohmann/json.hpp>

#include "fft.hpp"
#include "peaktag/error.hpp"

namespace peaktag {

void to_json(nlohmann::json& j, const Alignment& a) {
  j = nlohmann::json{{"dx", a.dx},
                     {"dy", a.dy},
                     {"scale", a.scale},
                     {"score", a.score},
                     {"azimuth_deg", a.azimuth_deg}};
}

void from_json(const nlohmann::json& j, Alignment& a) {
  a.dx = j.at("dx").get<int>();
  a.dy = j.at("dy").get<int>();
  a.scale = j.value("scale", 1.0);
  a.score = j.value("score", 0.0);
  a.azimuth_deg = j.value("azimuth_deg", 0.0);
}

double edge_similarity(double rho1, double theta1, double rho2, double theta2) {
  return rho1 * rho1 * rho2 * rho2 * std::cos(2.0 * (theta1 - theta2));
}

namespace {

// (ρ·e^{iθ})² for every pixel.
std::vector<std::complex<double>> squared_field(const EdgeMap& e) {
  std::vector<std::complex<double>> z(e.size());
  const auto& s = e.strengths();
  const auto& d = e.directions();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r2 = s[i] * s[i];
    z[i] = std::polar(r2, 2.0 * d[i]);
  }
  return z;
}

void check_sizes(const EdgeMap& photo, const EdgeMap& pano) {
  if (photo.width() > pano.width()) {
    throw Error(ErrorCode::PhotoWiderThanPanorama, "photo edge map is wider than the panorama");
  }
  if (photo.size() == 0 || pano.size() == 0) {
    throw Error(ErrorCode::EmptyImage, "VCC of an empty edge map");
  }
}

}  // namespace

ScoreGrid vcc_brute_force(const EdgeMap& photo, const EdgeMap& pano) {
  check_sizes(photo, pano);
  const int hp = photo.height(), wp = photo.width();
  const int hr = pano.height(), wr = pano.width();
  const auto zp = squared_field(photo);
  const auto zr = squared_field(pano);
  ScoreGrid grid(-hp, hr, wr);
  for (int dy = -hp; dy <= hr; ++dy) {
    const int y0 = std::max(0, -dy);
    const int y1 = std::min(hp, hr - dy);
    for (int dx = 0; dx < wr; ++dx) {
      double acc = 0.0;
      for (int y = y0; y < y1; ++y) {
        const std::size_t prow = static_cast<std::size_t>(y) * wp;
        const std::size_t rrow = static_cast<std::size_t>(y + dy) * wr;
        for (int x = 0; x < wp; ++x) {
          const auto& a = zp[prow + x];
          if (a == 0.0) continue;
          const auto& b = zr[rrow + static_cast<std::size_t>((x + dx) % wr)];
          acc += a.real() * b.real() + a.imag() * b.imag();
        }
      }
      grid.at(dy, dx) = acc;
    }
  }
  return grid;
}

ScoreGrid compute_vcc_grid(const EdgeMap& photo, const EdgeMap& pano) {
  check_sizes(photo, pano);
  const int hp = photo.height(), wp = photo.width();
  const int hr = pano.height(), wr = pano.width();
  // Panorama sits between hp zero rows above and at least hp below, so no
  // vertical offset in [-hp, hr] wraps around.
  const int rows = detail::next_fast_size(hr + 2 * hp);
  const std::size_t count = static_cast<std::size_t>(rows) * wr;

  detail::Fft2d fft(rows, wr);
  detail::ComplexBuffer p(count);
  detail::ComplexBuffer r(count);
  {
    const auto& s = photo.strengths();
    const auto& d = photo.directions();
    for (int y = 0; y < hp; ++y) {
      for (int x = 0; x < wp; ++x) {
        const std::size_t i = photo.index(x, y);
        p[static_cast<std::size_t>(y) * wr + x] = std::polar(s[i] * s[i], 2.0 * d[i]);
      }
    }
  }
  {
    const auto& s = pano.strengths();
    const auto& d = pano.directions();
    for (int y = 0; y < hr; ++y) {
      for (int x = 0; x < wr; ++x) {
        const std::size_t i = pano.index(x, y);
        r[static_cast<std::size_t>(y + hp) * wr + x] = std::polar(s[i] * s[i], 2.0 * d[i]);
      }
    }
  }
  fft.forward(p);
  fft.forward(r);
  for (std::size_t i = 0; i < count; ++i) r[i] *= std::conj(p[i]);
  fft.inverse(r);

  const double norm = 1.0 / static_cast<double>(count);
  ScoreGrid grid(-hp, hr, wr);
  for (int dy = -hp; dy <= hr; ++dy) {
    const std::size_t row = static_cast<std::size_t>(dy + hp) * wr;
    for (int dx = 0; dx < wr; ++dx) grid.at(dy, dx) = r[row + dx].real() * norm;
  }
  return grid;
}

double offset_to_azimuth(double dx, int photo_width, double pano_q) {
  if (!(pano_q > 0.0)) throw Error(ErrorCode::NonPositiveInput, "q must be positive");
  double az = std::fmod((dx + photo_width / 2.0) / pano_q, 360.0);
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az = 0.0;
  return az;
}

Alignment best_alignment(const ScoreGrid& grid, double scale, double pano_q, int photo_width) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "score grid is empty");
  // FFT round-off separates exact ties by ~1e-15 relative; scores within the
  // grid's accuracy count as equal so the scan-order tie-break still applies.
  double top = -std::numeric_limits<double>::infinity();
  double magnitude = 0.0;
  for (double s : grid.values()) {
    top = std::max(top, s);
    magnitude = std::max(magnitude, std::abs(s));
  }
  const double tie = 1e-9 * magnitude;
  Alignment best;
  bool found = false;
  for (int dy = grid.dy_min(); dy <= grid.dy_max() && !found; ++dy) {
    for (int dx = 0; dx < grid.width(); ++dx) {
      const double s = grid.at(dy, dx);
      if (s >= top - tie) {
        best.dx = dx;
        best.dy = dy;
        best.score = s;
        found = true;
        break;
      }
    }
  }
  best.scale = scale;
  best.azimuth_deg = offset_to_azimuth(best.dx, photo_width, pano_q);
  return best;
}

std::vector<GridPeak> top_candidates(const ScoreGrid& grid, int count, int radius) {
  std::vector<GridPeak> maxima;
  const int w = grid.width();
  for (int dy = grid.dy_min(); dy <= grid.dy_max(); ++dy) {
    for (int dx = 0; dx < w; ++dx) {
      const double s = grid.at(dy, dx);
      if (!(s > 0.0)) continue;
      bool is_max = true;
      for (int oy = -1; oy <= 1 && is_max; ++oy) {
        const int ny = dy + oy;
        if (ny < grid.dy_min() || ny > grid.dy_max()) continue;
        for (int ox = -1; ox <= 1; ++ox) {
          if (ox == 0 && oy == 0) continue;
          if (grid.at(ny, ((dx + ox) % w + w) % w) > s) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) maxima.push_back({dy, dx, s});
    }
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [](const GridPeak& a, const GridPeak& b) { return a.score > b.score; });

  std::vector<GridPeak> picked;
  const double r2 = static_cast<double>(radius) * radius;
  for (const GridPeak& m : maxima) {
    if (static_cast<int>(picked.size()) >= count) break;
    const bool suppressed = std::any_of(picked.begin(), picked.end(), [&](const GridPeak& p) {
      int ddx = std::abs(p.dx - m.dx);
      ddx = std::min(ddx, w - ddx);
      const int ddy = p.dy - m.dy;
      return static_cast<double>(ddx) * ddx + static_cast<double>(ddy) * ddy <= r2;
    });
    if (!suppressed) picked.push_back(m);
  }
  return picked;
}

RasterImage scale_photo(const RasterImage& photo, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::NonPositiveInput, "scale factor must be positive");
  }
  const int w = std::max(1, static_cast<int>(std::lround(photo.width() * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(photo.height() * scale)));
  return resize(photo, w, h);
}

std::vector<double> sweep_scales(double base_scale, double sweep, int steps) {
  if (!(base_scale > 0.0) || sweep < 0.0 || steps < 1) {
    throw Error(ErrorCode::InvalidConfig, "scale sweep needs base > 0, sweep >= 0, steps >= 1");
  }
  if (sweep == 0.0 || steps == 1) return {base_scale};
  std::vector<double> scales;
  for (int i = 0; i < steps; ++i) {
    const double t = -sweep + 2.0 * sweep * i / (steps - 1);
    scales.push_back(base_scale * (1.0 + t));
  }
  return scales;
}

SweepResult scale_sweep(const RasterImage& photo, const EdgeMap& pano_edges,
                        const SweepConfig& cfg) {
  if (photo.empty()) throw Error(ErrorCode::EmptyImage, "photo is empty");
  const auto scales = sweep_scales(cfg.base_scale, cfg.sweep, cfg.steps);

  // Evaluate the base scale first so it wins exact ties.
  std::vector<std::size_t> order(scales.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(scales[a] - cfg.base_scale) < std::abs(scales[b] - cfg.base_scale);
  });

  const RasterImage base = scale_photo(photo, cfg.base_scale);
  const double base_area = static_cast<double>(base.width()) * base.height();

  SweepResult result;
  result.candidate_scales = scales;
  result.normalized_scores.assign(scales.size(), 0.0);
  double best = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::size_t idx : order) {
    const double s = scales[idx];
    const RasterImage scaled = scales.size() == 1 ? base : scale_photo(photo, s);
    EdgeMap edges = filter_edges(detect_edges(scaled, cfg.detect), cfg.filter);
    ScoreGrid grid = compute_vcc_grid(edges, pano_edges);
    Alignment a = best_alignment(grid, s, cfg.pano_q, scaled.width());
    const double area_ratio = static_cast<double>(scaled.width()) * scaled.height() / base_area;
    const double normalized = a.score / area_ratio;
    result.normalized_scores[idx] = normalized;
    if (!have || normalized > best) {
      best = normalized;
      have = true;
      result.alignment = a;
      result.photo_edges = std::move(edges);
      result.grid = std::move(grid);
    }
  }
  return result;
}

GrayImage score_grid_to_gray(const ScoreGrid& grid) {
  GrayImage g{grid.width(), grid.rows(), {}};
  g.pixels.resize(grid.values().size());
  if (grid.empty()) return g;
  const auto [lo_it, hi_it] = std::minmax_element(grid.values().begin(), grid.values().end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    g.pixels[i] =
        static_cast<std::uint8_t>(std::lround(255.0 * (grid.values()[i] - lo) / span));
  }
  return g;
}

}  // namespace peaktag
