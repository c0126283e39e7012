#include "peaktag/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "peaktag/error.hpp"

namespace peaktag {

void EdgeMap::set(int x, int y, double rho, double theta) {
  const std::size_t i = index(x, y);
  if (!(rho > 0.0)) {
    strength_[i] = 0.0;
    direction_[i] = 0.0;
    return;
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  strength_[i] = rho;
  direction_[i] = t;
}

namespace {

struct Kernels {
  int radius = 0;
  std::vector<double> smooth;  // index k + radius
  std::vector<double> deriv;
};

Kernels make_kernels(double sigma) {
  Kernels k;
  k.radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  const int n = 2 * k.radius + 1;
  k.smooth.resize(static_cast<std::size_t>(n));
  k.deriv.resize(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (int i = -k.radius; i <= k.radius; ++i) {
    const double g = std::exp(-0.5 * i * i / (sigma * sigma));
    k.smooth[static_cast<std::size_t>(i + k.radius)] = g;
    sum += g;
  }
  for (int i = -k.radius; i <= k.radius; ++i) {
    auto& g = k.smooth[static_cast<std::size_t>(i + k.radius)];
    g /= sum;
    k.deriv[static_cast<std::size_t>(i + k.radius)] = -i * g / (sigma * sigma);
  }
  return k;
}

// out(x) = Σ_k kernel(k) · in(x − k), replicate borders. Stride selects axis.
void convolve_line(const double* in, double* out, int n, std::ptrdiff_t stride,
                   const std::vector<double>& kernel, int radius) {
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const int sx = std::clamp(x - k, 0, n - 1);
      acc += kernel[static_cast<std::size_t>(k + radius)] * in[sx * stride];
    }
    out[x * stride] = acc;
  }
}

void convolve_rows(const std::vector<double>& in, std::vector<double>& out, int w, int h,
                   const std::vector<double>& kernel, int radius) {
  for (int y = 0; y < h; ++y) {
    convolve_line(&in[static_cast<std::size_t>(y) * w], &out[static_cast<std::size_t>(y) * w],
                  w, 1, kernel, radius);
  }
}

void convolve_cols(const std::vector<double>& in, std::vector<double>& out, int w, int h,
                   const std::vector<double>& kernel, int radius) {
  for (int x = 0; x < w; ++x) {
    convolve_line(&in[static_cast<std::size_t>(x)], &out[static_cast<std::size_t>(x)], h, w,
                  kernel, radius);
  }
}

}  // namespace

EdgeMap detect_edges(const RasterImage& image, const EdgeDetectConfig& config) {
  if (image.empty()) throw Error(ErrorCode::EmptyImage, "edge detection on empty image");
  if (!(config.gaussian_sigma > 0.0) || config.strength_threshold < 0.0 ||
      config.strength_threshold > 1.0) {
    throw Error(ErrorCode::InvalidConfig, "edge detector needs sigma > 0 and τ in [0,1]");
  }
  const int w = image.width();
  const int h = image.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const Kernels k = make_kernels(config.gaussian_sigma);

  // Largest response of the derivative kernel to 8-bit input, per channel.
  double positive_taps = 0.0;
  for (double d : k.deriv) positive_taps += std::max(d, 0.0);
  const double max_magnitude = std::sqrt(3.0) * 255.0 * positive_taps;

  std::vector<double> jxx(n, 0.0), jyy(n, 0.0), jxy(n, 0.0);
  std::vector<double> channel(n), tmp(n), gx(n), gy(n);
  for (int c = 0; c < 3; ++c) {
    const auto pixels = image.pixels();
    for (std::size_t i = 0; i < n; ++i) {
      const Rgb& p = pixels[i];
      channel[i] = c == 0 ? p.r : (c == 1 ? p.g : p.b);
    }
    convolve_rows(channel, tmp, w, h, k.deriv, k.radius);
    convolve_cols(tmp, gx, w, h, k.smooth, k.radius);
    convolve_rows(channel, tmp, w, h, k.smooth, k.radius);
    convolve_cols(tmp, gy, w, h, k.deriv, k.radius);
    for (std::size_t i = 0; i < n; ++i) {
      jxx[i] += gx[i] * gx[i];
      jyy[i] += gy[i] * gy[i];
      jxy[i] += gx[i] * gy[i];
    }
  }

  EdgeMap edges(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double diff = jxx[i] - jyy[i];
      const double lambda =
          0.5 * (jxx[i] + jyy[i] + std::sqrt(diff * diff + 4.0 * jxy[i] * jxy[i]));
      const double rho = std::min(1.0, std::sqrt(std::max(lambda, 0.0)) / max_magnitude);
      if (rho < config.strength_threshold || rho <= 0.0) continue;
      const double gradient_angle = 0.5 * std::atan2(2.0 * jxy[i], diff);
      edges.set(x, y, rho, gradient_angle + 0.5 * std::numbers::pi);
    }
  }
  return edges;
}

EdgeMap filter_edges(const EdgeMap& edges, const FilterConfig& config) {
  if (!(config.base > 0.0) || config.base > 1.0 || config.max_segment_length < 1) {
    throw Error(ErrorCode::InvalidConfig, "filter needs 0 < b <= 1 and n >= 1");
  }
  EdgeMap out = edges;
  if (config.base == 1.0) return out;
  const int n = config.max_segment_length;
  for (int x = 0; x < edges.width(); ++x) {
    int segment = 0;  // 1-based index of the current subsegment
    int run_pos = -1;
    for (int y = 0; y < edges.height(); ++y) {
      const double rho = edges.strength(x, y);
      if (rho <= 0.0) {
        run_pos = -1;
        continue;
      }
      if (run_pos < 0 && config.indexing == DecayIndexing::PerRun) segment = 0;
      ++run_pos;
      if (run_pos % n == 0) ++segment;
      out.set(x, y, rho * std::pow(config.base, segment - 1), edges.direction(x, y));
    }
  }
  return out;
}

GrayImage edge_map_to_gray(const EdgeMap& edges) {
  GrayImage g{edges.width(), edges.height(), {}};
  g.pixels.resize(edges.size());
  const auto& s = edges.strengths();
  for (std::size_t i = 0; i < s.size(); ++i) {
    g.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(s[i], 0.0, 1.0) * 255.0));
  }
  return g;
}

}  // namespace peaktag
