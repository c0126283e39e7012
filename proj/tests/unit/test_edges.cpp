#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "peaktag/edges.hpp"
#include "test_util.hpp"

namespace peaktag {
namespace {

constexpr double kPi = std::numbers::pi;

RasterImage vertical_step(int w, int h, int split, Rgb left, Rgb right) {
  RasterImage img(w, h, left);
  for (int y = 0; y < h; ++y) {
    for (int x = split; x < w; ++x) img.at(x, y) = right;
  }
  return img;
}

TEST(DetectEdges, UniformImageHasNoEdges) {
  const EdgeMap e = detect_edges(RasterImage(20, 12, Rgb{100, 150, 30}), kPhotoDetectDefaults);
  for (double rho : e.strengths()) EXPECT_EQ(rho, 0.0);
  for (double theta : e.directions()) EXPECT_EQ(theta, 0.0);
}

TEST(DetectEdges, VerticalStepHasVerticalTangent) {
  const RasterImage img = vertical_step(20, 10, 10, Rgb{0, 0, 0}, Rgb{255, 255, 255});
  const EdgeMap e = detect_edges(img, {1.0, 0.0});
  for (int y = 0; y < 10; ++y) {
    double best = 0.0;
    for (int x = 0; x < 20; ++x) best = std::max(best, e.strength(x, y));
    EXPECT_DOUBLE_EQ(best, 1.0);
    for (int x : {9, 10}) {
      EXPECT_DOUBLE_EQ(e.strength(x, y), best);
      EXPECT_NEAR(e.direction(x, y), kPi / 2, 1e-12);
    }
    EXPECT_LT(e.strength(7, y), e.strength(8, y));
    EXPECT_LT(e.strength(8, y), e.strength(9, y));
  }
}

TEST(DetectEdges, HorizontalStepHasHorizontalTangent) {
  RasterImage img(16, 16, Rgb{40, 110, 230});
  for (int y = 8; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) img.at(x, y) = Rgb{245, 245, 240};
  }
  const EdgeMap e = detect_edges(img, kPhotoDetectDefaults);
  for (int x = 0; x < 16; ++x) {
    ASSERT_GT(e.strength(x, 7), 0.0);
    EXPECT_NEAR(std::cos(2 * e.direction(x, 7)), 1.0, 1e-12);
  }
}

TEST(DetectEdges, GreyStepStrengthScalesWithContrast) {
  // A step of 85 grey levels in every channel has strength 85/255.
  const RasterImage img = vertical_step(20, 6, 10, Rgb{170, 170, 170}, Rgb{85, 85, 85});
  const EdgeMap e = detect_edges(img, {1.0, 0.0});
  EXPECT_NEAR(e.strength(9, 3), 85.0 / 255.0, 1e-12);
}

TEST(DetectEdges, FullThresholdRemovesUnsaturatedEdges) {
  const RasterImage img = vertical_step(20, 6, 10, Rgb{100, 100, 100}, Rgb{160, 90, 120});
  const EdgeMap e = detect_edges(img, {1.0, 1.0});
  for (double rho : e.strengths()) EXPECT_EQ(rho, 0.0);
}

TEST(DetectEdges, RangeInvariants) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> byte(0, 255);
  RasterImage img(31, 17);
  for (Rgb& p : img.pixels()) {
    p = {static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
         static_cast<std::uint8_t>(byte(rng))};
  }
  for (double tau : {0.0, 0.2, 0.5}) {
    const EdgeMap e = detect_edges(img, {1.5, tau});
    ASSERT_EQ(e.width(), 31);
    ASSERT_EQ(e.height(), 17);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double rho = e.strengths()[i];
      const double theta = e.directions()[i];
      EXPECT_TRUE(rho == 0.0 || (rho >= tau && rho <= 1.0));
      EXPECT_GE(theta, 0.0);
      EXPECT_LT(theta, 2 * kPi);
      if (rho == 0.0) {
        EXPECT_EQ(theta, 0.0);
      }
    }
  }
}

TEST(DetectEdges, Errors) {
  EXPECT_PEAKTAG_ERROR(detect_edges(RasterImage{}, kPhotoDetectDefaults), ErrorCode::EmptyImage);
  const RasterImage img(4, 4);
  EXPECT_PEAKTAG_ERROR(detect_edges(img, {0.0, 0.3}), ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(detect_edges(img, {1.0, 1.5}), ErrorCode::InvalidConfig);
}

TEST(EdgeMap, SetWrapsDirection) {
  EdgeMap e(2, 1);
  e.set(0, 0, 0.5, -kPi / 2);
  EXPECT_NEAR(e.direction(0, 0), 3 * kPi / 2, 1e-12);
  e.set(1, 0, 0.0, 1.0);
  EXPECT_EQ(e.direction(1, 0), 0.0);
}

EdgeMap column(const std::vector<double>& rho) {
  EdgeMap e(1, static_cast<int>(rho.size()));
  for (int y = 0; y < static_cast<int>(rho.size()); ++y) e.set(0, y, rho[y], 0.3);
  return e;
}

std::vector<double> strengths_of(const EdgeMap& e) { return e.strengths(); }

TEST(FilterEdges, UnitBaseIsIdentity) {
  std::mt19937_64 rng(3);
  const EdgeMap e = testing::random_edge_map(23, 19, rng);
  EXPECT_EQ(filter_edges(e, {1.0, 2}), e);
  EXPECT_EQ(filter_edges(e, kPanoramaFilterDefaults), e);
}

TEST(FilterEdges, WorkedColumn) {
  const auto out = strengths_of(filter_edges(column({0.9, 0.9, 0.9, 0.0, 0.8}), {0.7, 2}));
  const std::vector<double> expected{0.9, 0.9, 0.63, 0.0, 0.392};
  ASSERT_EQ(out.size(), expected.size());
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], expected[i], 1e-12) << i;
}

TEST(FilterEdges, PerRunIndexingRestartsAtGaps) {
  const auto out = strengths_of(filter_edges(column({0.9, 0.9, 0.9, 0.0, 0.8}),
                                             {0.7, 2, DecayIndexing::PerRun}));
  const std::vector<double> expected{0.9, 0.9, 0.63, 0.0, 0.8};
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], expected[i], 1e-12) << i;
}

TEST(FilterEdges, ZeroColumnStaysZero) {
  const auto out = strengths_of(filter_edges(column({0, 0, 0, 0}), {0.7, 2}));
  for (double v : out) EXPECT_EQ(v, 0.0);
}

TEST(FilterEdges, NeverIncreasesAndKeepsSupport) {
  std::mt19937_64 rng(11);
  const EdgeMap e = testing::random_edge_map(17, 40, rng, 0.6);
  for (double b : {0.1, 0.5, 0.7, 0.95}) {
    for (int n : {1, 2, 5}) {
      const EdgeMap f = filter_edges(e, {b, n});
      for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_LE(f.strengths()[i], e.strengths()[i]);
        EXPECT_EQ(f.strengths()[i] > 0.0, e.strengths()[i] > 0.0);
        EXPECT_EQ(f.directions()[i], e.directions()[i]);
      }
    }
  }
}

TEST(FilterEdges, TopSegmentUntouched) {
  std::mt19937_64 rng(5);
  const EdgeMap e = testing::random_edge_map(9, 9, rng, 1.0);
  const EdgeMap f = filter_edges(e, {0.3, 2});
  for (int x = 0; x < 9; ++x) {
    EXPECT_EQ(f.strength(x, 0), e.strength(x, 0));
    EXPECT_EQ(f.strength(x, 1), e.strength(x, 1));
    EXPECT_NEAR(f.strength(x, 2), 0.3 * e.strength(x, 2), 1e-15);
  }
}

TEST(FilterEdges, InvalidConfig) {
  const EdgeMap e(2, 2);
  EXPECT_PEAKTAG_ERROR(filter_edges(e, {0.0, 2}), ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(filter_edges(e, {1.2, 2}), ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(filter_edges(e, {0.7, 0}), ErrorCode::InvalidConfig);
}

TEST(EdgeMapToGray, ScalesStrength) {
  EdgeMap e(2, 1);
  e.set(1, 0, 1.0, 0.0);
  const GrayImage g = edge_map_to_gray(e);
  EXPECT_EQ(g.pixels[0], 0);
  EXPECT_EQ(g.pixels[1], 255);
}

}  // namespace
}  // namespace peaktag
