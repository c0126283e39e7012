#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "peaktag/panorama.hpp"
#include "test_util.hpp"

namespace peaktag {
namespace {

TEST(Panorama, WidthFor) {
  EXPECT_EQ(panorama_width_for(20.0), 7200);
  EXPECT_EQ(panorama_width_for(10.0), 3600);
  EXPECT_EQ(panorama_width_for(2.5), 900);
  EXPECT_PEAKTAG_ERROR(panorama_width_for(0.0), ErrorCode::NonPositiveInput);
}

TEST(Panorama, WidthMismatch) {
  testing::TempDir dir;
  write_png(dir.path() / "pano.png", RasterImage(7200, 4));
  testing::write_text(dir.path() / "peaks.json", "[]");
  EXPECT_PEAKTAG_ERROR(load_panorama(dir.path() / "pano.png", dir.path() / "peaks.json", 10.0),
                       ErrorCode::WidthMismatch);
  const Panorama p = load_panorama(dir.path() / "pano.png", dir.path() / "peaks.json", 20.0);
  EXPECT_EQ(p.raster.width(), 7200);
  EXPECT_TRUE(p.peaks.empty());
}

TEST(Panorama, EmptyPeaksFile) {
  testing::TempDir dir;
  write_png(dir.path() / "pano.png", RasterImage(900, 3));
  testing::write_text(dir.path() / "peaks.json", "");
  EXPECT_TRUE(load_panorama(dir.path() / "pano.png", dir.path() / "peaks.json", 2.5).peaks.empty());
}

TEST(Panorama, ParsePeaks) {
  const auto peaks = parse_peaks(R"([{"name": "Eiger", "x": 12.5, "y": 3}, {"name": "Monch", "x": 40, "y": 7}])");
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0], (Peak{"Eiger", 12.5, 3.0}));
  EXPECT_EQ(peaks[1].name, "Monch");
  EXPECT_TRUE(parse_peaks("  \n").empty());
}

TEST(Panorama, MalformedPeaks) {
  EXPECT_PEAKTAG_ERROR(parse_peaks("{"), ErrorCode::MalformedPeaks);
  EXPECT_PEAKTAG_ERROR(parse_peaks(R"({"name": "x"})"), ErrorCode::MalformedPeaks);
  EXPECT_PEAKTAG_ERROR(parse_peaks(R"([{"name": "x", "x": 1}])"), ErrorCode::MalformedPeaks);
  EXPECT_PEAKTAG_ERROR(parse_peaks(R"([{"name": "x", "x": "1", "y": 2}])"),
                       ErrorCode::MalformedPeaks);
}

TEST(Panorama, PeakOutsideRaster) {
  EXPECT_PEAKTAG_ERROR(make_panorama(RasterImage(900, 10), 2.5, {{"far", 900.0, 1.0}}),
                       ErrorCode::MalformedPeaks);
  EXPECT_PEAKTAG_ERROR(make_panorama(RasterImage(900, 10), 2.5, {{"low", 1.0, 10.0}}),
                       ErrorCode::MalformedPeaks);
  EXPECT_NO_THROW(make_panorama(RasterImage(900, 10), 2.5, {{"ok", 899.5, 9.5}}));
}

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.q = 5.0;
  cfg.pano_height = 150;
  cfg.photo_height = 100;
  return cfg;
}

TEST(Synth, DeterministicInSeed) {
  const SynthCase a = gen_synthetic_case(small_config(7));
  const SynthCase b = gen_synthetic_case(small_config(7));
  const SynthCase c = gen_synthetic_case(small_config(8));
  EXPECT_EQ(encode_png(a.panorama.raster), encode_png(b.panorama.raster));
  EXPECT_EQ(encode_png(a.photo), encode_png(b.photo));
  EXPECT_EQ(a.panorama.peaks, b.panorama.peaks);
  EXPECT_EQ(a.truth_alignment, b.truth_alignment);
  EXPECT_NE(encode_png(a.panorama.raster), encode_png(c.panorama.raster));
}

TEST(Synth, Shapes) {
  const SynthCase s = gen_synthetic_case(small_config(3));
  EXPECT_EQ(s.panorama.raster.width(), 1800);
  EXPECT_EQ(s.panorama.raster.height(), 150);
  EXPECT_EQ(s.photo.width(), 200);
  EXPECT_EQ(s.photo.height(), 100);
  EXPECT_FALSE(s.degenerate);
  EXPECT_NO_THROW(make_panorama(s.panorama.raster, s.panorama.q, s.panorama.peaks));
  for (std::size_t i = 0; i < s.panorama.peaks.size(); ++i) {
    for (std::size_t j = i + 1; j < s.panorama.peaks.size(); ++j) {
      const double d = std::abs(s.panorama.peaks[i].pano_x - s.panorama.peaks[j].pano_x);
      EXPECT_GE(std::min(d, 1800.0 - d), 60.0);
    }
  }
}

TEST(Synth, TruthIsConsistent) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig cfg = small_config(seed);
    cfg.photo_scale = seed % 2 == 0 ? 0.6 : 1.0;
    const SynthCase s = gen_synthetic_case(cfg);
    ASSERT_FALSE(s.truth.pairs.empty());
    EXPECT_EQ(s.peak_shifts.size(), s.truth.pairs.size());
    EXPECT_NEAR(alignment_error(s.truth, s.truth_alignment, cfg.q), 0.0, 1e-9) << seed;
    ASSERT_TRUE(s.truth.alignment.has_value());
    EXPECT_EQ(*s.truth.alignment, s.truth_alignment);
    EXPECT_EQ(s.truth.fov_deg, cfg.photo_fov_deg);
  }
}

TEST(Synth, FullCircleIsDegenerate) {
  SynthConfig cfg = small_config(2);
  cfg.photo_fov_deg = 360.0;
  const SynthCase s = gen_synthetic_case(cfg);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.photo.width(), s.panorama.raster.width());
}

TEST(Synth, WriteCase) {
  testing::TempDir dir;
  const SynthCase s = gen_synthetic_case(small_config(4));
  write_synthetic_case(s, dir.path());
  for (const char* name : {"panorama.png", "photo.png", "peaks.json", "truth.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / name)) << name;
  }
  EXPECT_EQ(read_image(dir.path() / "photo.png"), s.photo);
  EXPECT_EQ(load_peaks(dir.path() / "peaks.json"), s.panorama.peaks);
  const GroundTruth t = load_ground_truth(dir.path() / "truth.json");
  EXPECT_EQ(t.pairs.size(), s.truth.pairs.size());
  EXPECT_EQ(t.alignment, s.truth.alignment);
}

TEST(Ridgeline, DeterministicAndContinuousAcrossSeam) {
  const auto a = midpoint_ridgeline(1000, 50.0, 30.0, 0.75, 9);
  EXPECT_EQ(a, midpoint_ridgeline(1000, 50.0, 30.0, 0.75, 9));
  ASSERT_EQ(a.size(), 1000u);
  double max_step = 0.0;
  for (std::size_t x = 0; x + 1 < a.size(); ++x) {
    max_step = std::max(max_step, std::abs(a[x + 1] - a[x]));
  }
  EXPECT_LE(std::abs(a.front() - a.back()), max_step);
  EXPECT_PEAKTAG_ERROR(midpoint_ridgeline(0, 1.0, 1.0, 0.5, 1), ErrorCode::InvalidConfig);
}

}  // namespace
}  // namespace peaktag
