// Seeded synthetic panorama/photo pairs with exact ground truth.

#include <algorithm>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <string>

#include "peaktag/error.hpp"
#include "peaktag/panorama.hpp"

namespace peaktag {
namespace {

// mt19937_64 output is fixed by the standard; the <random> distributions are
// not, so uniform draws are derived from the raw bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

void subdivide(std::vector<double>& h, int a, int b, double amplitude, double roughness,
               int width, Rng& rng) {
  if (b - a < 2) return;
  const int mid = a + (b - a) / 2;
  const double ha = h[static_cast<std::size_t>(a % width)];
  const double hb = h[static_cast<std::size_t>(b % width)];
  const double span = static_cast<double>(b - a) / width;
  h[static_cast<std::size_t>(mid)] =
      0.5 * (ha + hb) + amplitude * std::pow(span, roughness) * rng.uniform(-1.0, 1.0);
  subdivide(h, a, mid, amplitude, roughness, width, rng);
  subdivide(h, mid, b, amplitude, roughness, width, rng);
}

// Hazy, low-contrast terrain as seen through the atmosphere; adjacent
// entries differ by roughly 0.35-0.45 in normalized edge strength.
constexpr std::array<Rgb, 7> kPhotoPalette = {{
    {200, 220, 250},  // sky
    {95, 115, 145},
    {195, 215, 190},
    {70, 95, 60},
    {175, 170, 120},
    {60, 60, 90},
    {170, 175, 205},
}};

std::vector<Rgb> panorama_palette(int layers) {
  std::vector<Rgb> p{{255, 255, 255}};
  for (int i = 0; i < layers; ++i) {
    const auto g = static_cast<std::uint8_t>(
        std::lround(255.0 * (layers - 1 - i) / layers));
    p.push_back({g, g, g});
  }
  return p;
}

std::vector<Rgb> photo_palette(int layers) {
  std::vector<Rgb> p;
  for (int i = 0; i <= layers; ++i) {
    p.push_back(kPhotoPalette[static_cast<std::size_t>(i) % kPhotoPalette.size()]);
  }
  return p;
}

struct Terrain {
  int width = 0;
  int height = 0;
  std::vector<std::vector<int>> ridges;  // per layer, far to near: first filled row

  int wrap(int x) const { return ((x % width) + width) % width; }

  // Palette index at a panorama pixel (0 = sky).
  int layer_at(int x, int y) const {
    const int cx = wrap(x);
    for (int i = static_cast<int>(ridges.size()) - 1; i >= 0; --i) {
      if (y >= ridges[static_cast<std::size_t>(i)][static_cast<std::size_t>(cx)]) return i + 1;
    }
    return 0;
  }
};

Terrain build_terrain(const SynthConfig& cfg, int width, Rng& rng) {
  Terrain t;
  t.width = width;
  t.height = cfg.pano_height;
  const double h = cfg.pano_height;
  for (int i = 0; i < cfg.layers; ++i) {
    const double depth = cfg.layers == 1 ? 0.5 : static_cast<double>(i) / (cfg.layers - 1);
    const double base = h * (0.32 + 0.30 * depth);
    const double amplitude = h * (0.30 - 0.08 * depth);
    const auto line = midpoint_ridgeline(width, base, amplitude, 0.75, rng.next());
    std::vector<int> rows(static_cast<std::size_t>(width));
    for (int x = 0; x < width; ++x) {
      const double v = std::clamp(line[static_cast<std::size_t>(x)], 0.08 * h, 0.92 * h);
      rows[static_cast<std::size_t>(x)] = static_cast<int>(std::lround(v));
    }
    t.ridges.push_back(std::move(rows));
  }
  return t;
}

struct PeakSite {
  int x = 0;
  int y = 0;
};

// Visible summits: strict local tops of a layer's ridge within ±window that no
// nearer layer hides.
std::vector<PeakSite> candidate_peaks(const Terrain& t, int window) {
  std::vector<PeakSite> sites;
  const int layers = static_cast<int>(t.ridges.size());
  for (int i = 0; i < layers; ++i) {
    const auto& ridge = t.ridges[static_cast<std::size_t>(i)];
    for (int x = 0; x < t.width; ++x) {
      const int y = ridge[static_cast<std::size_t>(x)];
      bool top = true;
      for (int o = -window; o <= window && top; ++o) {
        if (o == 0) continue;
        const int other = ridge[static_cast<std::size_t>(t.wrap(x + o))];
        // Plateaus keep only their leftmost column.
        if (other < y || (other == y && o < 0)) top = false;
      }
      if (!top) continue;
      bool hidden = false;
      for (int j = i + 1; j < layers; ++j) {
        if (t.ridges[static_cast<std::size_t>(j)][static_cast<std::size_t>(x)] <= y + 2) {
          hidden = true;
        }
      }
      if (!hidden) sites.push_back({x, y});
    }
  }
  std::sort(sites.begin(), sites.end(),
            [](const PeakSite& a, const PeakSite& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  return sites;
}

int cyclic_distance(int a, int b, int width) {
  const int d = std::abs(a - b) % width;
  return std::min(d, width - d);
}

void draw_noise(RasterImage& photo, double density, Rng& rng) {
  if (density <= 0.0) return;
  // Flat ellipses in the lower third: rocks, bushes and roofs whose upper
  // outlines look like short ridgelines.
  const int y0 = (2 * photo.height()) / 3;
  const double area = static_cast<double>(photo.width()) * (photo.height() - y0);
  constexpr double kMinRx = 10.0, kMaxRx = 40.0, kMinRy = 1.5, kMaxRy = 3.0;
  const double mean_area = std::numbers::pi * 0.5 * (kMinRx + kMaxRx) * 0.5 * (kMinRy + kMaxRy);
  const int count = static_cast<int>(std::lround(density * area / mean_area));
  for (int k = 0; k < count; ++k) {
    const double cx = rng.uniform(0.0, photo.width());
    const double cy = rng.uniform(y0, photo.height());
    const double rx = rng.uniform(kMinRx, kMaxRx);
    const double ry = rng.uniform(kMinRy, kMaxRy);
    const auto corner = rng.integer(0, 7);
    const Rgb color{static_cast<std::uint8_t>(corner & 1 ? 255 : 0),
                    static_cast<std::uint8_t>(corner & 2 ? 255 : 0),
                    static_cast<std::uint8_t>(corner & 4 ? 255 : 0)};
    const int xa = std::max(0, static_cast<int>(std::floor(cx - rx)));
    const int xb = std::min(photo.width() - 1, static_cast<int>(std::ceil(cx + rx)));
    const int ya = std::max(y0, static_cast<int>(std::floor(cy - ry)));
    const int yb = std::min(photo.height() - 1, static_cast<int>(std::ceil(cy + ry)));
    for (int y = ya; y <= yb; ++y) {
      for (int x = xa; x <= xb; ++x) {
        const double u = (x - cx) / rx, v = (y - cy) / ry;
        if (u * u + v * v <= 1.0) photo.at(x, y) = color;
      }
    }
  }
}

void validate(const SynthConfig& cfg) {
  if (cfg.layers < 1 || !(cfg.q > 0.0) || !(cfg.photo_fov_deg > 0.0) ||
      cfg.photo_fov_deg > 360.0 || cfg.noise_density < 0.0 || cfg.noise_density > 1.0 ||
      cfg.peak_count < 0 || cfg.pano_height < 8 || cfg.photo_height < 1 ||
      cfg.photo_height > cfg.pano_height || !(cfg.photo_scale > 0.0) || cfg.peak_shift_max < 0 ||
      cfg.min_peak_spacing < 0) {
    throw Error(ErrorCode::InvalidConfig, "invalid synthetic case configuration");
  }
}

}  // namespace

std::vector<double> midpoint_ridgeline(int width, double base, double amplitude,
                                       double roughness, std::uint64_t seed) {
  if (width < 1) throw Error(ErrorCode::InvalidConfig, "ridgeline width must be positive");
  Rng rng(seed);
  std::vector<double> h(static_cast<std::size_t>(width), base);
  // A few periodic control points, then recursive midpoint displacement
  // between neighbours; the segment ending at `width` reuses column 0.
  const int anchors = std::min(width, 8);
  std::vector<int> xs;
  for (int k = 0; k < anchors; ++k) xs.push_back(static_cast<int>(static_cast<long>(k) * width / anchors));
  for (int x : xs) h[static_cast<std::size_t>(x)] = base + 0.5 * amplitude * rng.uniform(-1.0, 1.0);
  for (int k = 0; k < anchors; ++k) {
    const int a = xs[static_cast<std::size_t>(k)];
    const int b = k + 1 < anchors ? xs[static_cast<std::size_t>(k + 1)] : width;
    subdivide(h, a, b, amplitude, roughness, width, rng);
  }
  return h;
}

SynthCase gen_synthetic_case(const SynthConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const int width = panorama_width_for(cfg.q);
  const Terrain terrain = build_terrain(cfg, width, rng);

  const auto pano_colors = panorama_palette(cfg.layers);
  RasterImage pano(width, cfg.pano_height);
  for (int y = 0; y < cfg.pano_height; ++y) {
    for (int x = 0; x < width; ++x) {
      pano.at(x, y) = pano_colors[static_cast<std::size_t>(terrain.layer_at(x, y))];
    }
  }

  // Peaks: random visible summits, greedily spaced.
  auto sites = candidate_peaks(terrain, 20);
  for (std::size_t i = sites.size(); i > 1; --i) {
    std::swap(sites[i - 1], sites[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i) - 1))]);
  }
  std::vector<Peak> peaks;
  std::vector<PeakSite> chosen;
  for (const PeakSite& s : sites) {
    if (static_cast<int>(chosen.size()) >= cfg.peak_count) break;
    const bool crowded = std::any_of(chosen.begin(), chosen.end(), [&](const PeakSite& c) {
      return cyclic_distance(c.x, s.x, width) < cfg.min_peak_spacing;
    });
    if (!crowded) chosen.push_back(s);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const PeakSite& a, const PeakSite& b) { return a.x < b.x; });
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    peaks.push_back({"Peak " + std::to_string(i + 1), static_cast<double>(chosen[i].x),
                     static_cast<double>(chosen[i].y)});
  }

  // Photo footprint on the panorama.
  const int crop_w = std::min(width, static_cast<int>(std::lround(cfg.photo_fov_deg * cfg.q)));
  const int crop_h = cfg.photo_height;
  const int x0 = rng.integer(0, width - 1);
  const int y0 = rng.integer(0, cfg.pano_height - crop_h);

  // Peaks inside the footprint, with an optional per-peak displacement that
  // applies to the band of columns closest to that peak.
  struct Visible {
    std::size_t peak;
    int cx, cy;
    int sx = 0, sy = 0;
  };
  std::vector<Visible> visible;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    const int cx = terrain.wrap(static_cast<int>(peaks[i].pano_x) - x0);
    const int cy = static_cast<int>(peaks[i].pano_y) - y0;
    if (cx < crop_w && cy >= 0 && cy < crop_h) visible.push_back({i, cx, cy});
  }
  std::sort(visible.begin(), visible.end(),
            [](const Visible& a, const Visible& b) { return a.cx < b.cx; });
  if (cfg.peak_shift_max > 0) {
    for (Visible& v : visible) {
      v.sx = rng.integer(-cfg.peak_shift_max, cfg.peak_shift_max);
      v.sy = rng.integer(-cfg.peak_shift_max, cfg.peak_shift_max);
    }
  }
  auto band_of = [&](int x) -> const Visible* {
    if (cfg.peak_shift_max <= 0 || visible.empty()) return nullptr;
    std::size_t b = 0;
    while (b + 1 < visible.size() && 2 * x >= visible[b].cx + visible[b + 1].cx) ++b;
    return &visible[b];
  };

  const auto colors = cfg.recolor_photo ? photo_palette(cfg.layers) : pano_colors;
  RasterImage crop(crop_w, crop_h);
  for (int x = 0; x < crop_w; ++x) {
    const Visible* band = band_of(x);
    const int sx = band ? band->sx : 0;
    const int sy = band ? band->sy : 0;
    for (int y = 0; y < crop_h; ++y) {
      const int py = std::clamp(y0 + y - sy, 0, cfg.pano_height - 1);
      crop.at(x, y) = colors[static_cast<std::size_t>(terrain.layer_at(x0 + x - sx, py))];
    }
  }

  RasterImage photo = crop;
  if (cfg.photo_scale != 1.0) {
    photo = resize(crop, std::max(1, static_cast<int>(std::lround(crop_w * cfg.photo_scale))),
                   std::max(1, static_cast<int>(std::lround(crop_h * cfg.photo_scale))));
  }
  draw_noise(photo, cfg.noise_density, rng);

  SynthCase out;
  out.photo_fov_deg = cfg.photo_fov_deg;
  out.degenerate = crop_w >= width;
  const double to_photo = static_cast<double>(photo.width()) / crop_w;
  out.truth_alignment.dx = x0;
  out.truth_alignment.dy = y0;
  out.truth_alignment.scale = 1.0 / to_photo;
  out.truth_alignment.score = 0.0;
  out.truth_alignment.azimuth_deg = offset_to_azimuth(x0, crop_w, cfg.q);

  for (const Visible& v : visible) {
    const Peak& p = peaks[v.peak];
    out.truth.pairs.push_back({{(v.cx + v.sx) * to_photo, (v.cy + v.sy) * to_photo},
                               {p.pano_x, p.pano_y}});
    out.peak_shifts.emplace_back(v.sx, v.sy);
  }
  if (out.truth.pairs.empty()) {
    // No summit in view: the footprint centre still has a known position.
    const int cx = crop_w / 2, cy = crop_h / 2;
    out.truth.pairs.push_back({{cx * to_photo, cy * to_photo},
                               {static_cast<double>(terrain.wrap(x0 + cx)),
                                static_cast<double>(y0 + cy)}});
    out.peak_shifts.emplace_back(0, 0);
  }
  out.truth.categories = {
      {kCategorySource, "synthetic"},
      {kCategoryClouds, "none"},
      {kCategorySkyline, cfg.noise_density > 0.0 ? "cluttered foreground" : "clear"},
  };
  out.truth.fov_deg = cfg.photo_fov_deg;
  out.truth.alignment = out.truth_alignment;

  out.panorama = Panorama{std::move(pano), cfg.q, std::move(peaks)};
  out.photo = std::move(photo);
  return out;
}

void write_synthetic_case(const SynthCase& c, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  write_png(dir / "panorama.png", c.panorama.raster);
  write_png(dir / "photo.png", c.photo);

  const std::string peaks = nlohmann::json(c.panorama.peaks).dump(2) + "\n";
  write_file(dir / "peaks.json",
             std::span(reinterpret_cast<const std::uint8_t*>(peaks.data()), peaks.size()));

  nlohmann::json truth = c.truth;
  truth["q"] = c.panorama.q;
  truth["degenerate"] = c.degenerate;
  const std::string text = truth.dump(2) + "\n";
  write_file(dir / "truth.json",
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace peaktag
