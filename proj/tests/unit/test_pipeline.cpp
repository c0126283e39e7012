#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "peaktag/pipeline.hpp"
#include "test_util.hpp"

namespace peaktag {
namespace {

TEST(RunConfig, Defaults) {
  const RunConfig c;
  EXPECT_EQ(c.photo_threshold, 0.3);
  EXPECT_EQ(c.pano_threshold, 0.2);
  EXPECT_EQ(c.photo_base, 0.7);
  EXPECT_EQ(c.pano_base, 1.0);
  EXPECT_EQ(c.photo_segment, 2);
  EXPECT_EQ(c.pano_segment, 2);
  EXPECT_EQ(c.scale_sweep_pct, 0.0);
  EXPECT_EQ(c.sigma, 1.0);
  EXPECT_EQ(c.kernel_radius, 200);
  EXPECT_EQ(c.max_shift, 50);
  EXPECT_EQ(c.threshold_deg, 4.0);
  EXPECT_FALSE(c.robust);
  EXPECT_FALSE(c.fov_deg.has_value());
  EXPECT_EQ(c.decay_indexing, DecayIndexing::Cumulative);
  EXPECT_EQ(c.robust_cfg.exponent, 2.0);
  EXPECT_EQ(c.robust_cfg.penalty, 5.0);
  EXPECT_EQ(c.robust_cfg.fit_length, 3.0);
  EXPECT_EQ(c.robust_cfg.neighborhood_radius, 2);
  EXPECT_EQ(c.robust_cfg.cluster_distance, 2.0);
}

TEST(RunConfig, DerivedStageConfigs) {
  RunConfig c;
  c.photo_base = 0.5;
  c.pano_segment = 4;
  EXPECT_EQ(c.photo_filter().base, 0.5);
  EXPECT_EQ(c.pano_filter().max_segment_length, 4);
  EXPECT_EQ(c.photo_detect().strength_threshold, 0.3);
  EXPECT_EQ(c.pano_detect().strength_threshold, 0.2);
  EXPECT_EQ(c.refine().kernel_radius, 200);
}

TEST(RunConfig, ApplyValues) {
  RunConfig c;
  apply_config_value(c, "b_p", "0.9");
  apply_config_value(c, " l_p ", " 3 ");
  apply_config_value(c, "robust", "yes");
  apply_config_value(c, "robust.top_n", "4");
  apply_config_value(c, "decay_indexing", "per_run");
  apply_config_value(c, "fov", "55.5");
  EXPECT_EQ(c.photo_base, 0.9);
  EXPECT_EQ(c.photo_segment, 3);
  EXPECT_TRUE(c.robust);
  EXPECT_EQ(c.robust_cfg.top_n, 4);
  EXPECT_EQ(c.decay_indexing, DecayIndexing::PerRun);
  EXPECT_EQ(c.fov_deg, 55.5);
}

TEST(RunConfig, BadValues) {
  RunConfig c;
  EXPECT_PEAKTAG_ERROR(apply_config_value(c, "nope", "1"), ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(apply_config_value(c, "b_p", "abc"), ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(apply_config_value(c, "l_p", "2.5"), ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(apply_config_value(c, "robust", "maybe"), ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(apply_config_value(c, "decay_indexing", "linear"),
                       ErrorCode::InvalidConfig);
  EXPECT_PEAKTAG_ERROR(apply_config_value(c, "sigma", "inf"), ErrorCode::InvalidConfig);
}

TEST(RunConfig, ConfigText) {
  RunConfig c;
  apply_config_text(c, "# tuned\n\nb_p = 0.8   # photo\nthreshold=2\r\n");
  EXPECT_EQ(c.photo_base, 0.8);
  EXPECT_EQ(c.threshold_deg, 2.0);
  try {
    apply_config_text(c, "b_p=1\nrho_p\n");
    FAIL() << "expected InvalidConfig";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(RunConfig, LaterValuesWin) {
  RunConfig c;
  apply_config_text(c, "b_p=0.8");
  apply_config_value(c, "b_p", "0.6");
  EXPECT_EQ(c.photo_base, 0.6);
}

TEST(RunConfig, EveryKeyIsSettable) {
  const auto keys = config_keys();
  EXPECT_GE(keys.size(), 20u);
  for (const std::string& key : keys) {
    RunConfig c;
    const std::string value = key == "robust" ? "true" : key == "decay_indexing" ? "per_run" : "3";
    EXPECT_NO_THROW(apply_config_value(c, key, value)) << key;
  }
}

TEST(ResolveFov, Override) {
  RunConfig c;
  c.fov_deg = 90.0;
  const FovResolution r = resolve_fov(std::nullopt, {}, c);
  EXPECT_DOUBLE_EQ(r.fov_rad, std::numbers::pi / 2.0);
  EXPECT_FALSE(r.camera_match.has_value());
  c.fov_deg = 0.0;
  EXPECT_PEAKTAG_ERROR(resolve_fov(std::nullopt, {}, c), ErrorCode::NonPositiveInput);
  c.fov_deg = 361.0;
  EXPECT_PEAKTAG_ERROR(resolve_fov(std::nullopt, {}, c), ErrorCode::NonPositiveInput);
}

TEST(ResolveFov, FromMetadata) {
  PhotoMeta meta;
  meta.make = "NIKON CORPORATION";
  meta.model = "NIKON D5000";
  meta.focal_length_mm = 23.6 / 2.0;
  const std::vector<CameraSpec> sensors{{"Canon", "Canon EOS 5D", 35.8},
                                        {"Nikon", "Nikon D5000", 23.6}};
  const FovResolution r = resolve_fov(meta, sensors, RunConfig{});
  EXPECT_NEAR(r.fov_rad, std::numbers::pi / 2.0, 1e-12);
  ASSERT_TRUE(r.camera_match.has_value());
  EXPECT_EQ(r.camera_match->spec.model, "Nikon D5000");
}

TEST(ResolveFov, Errors) {
  EXPECT_PEAKTAG_ERROR(resolve_fov(std::nullopt, {}, RunConfig{}),
                       ErrorCode::MissingFocalLength);
  PhotoMeta no_focal;
  no_focal.model = "X";
  EXPECT_PEAKTAG_ERROR(resolve_fov(no_focal, {{"a", "b", 1.0}}, RunConfig{}),
                       ErrorCode::MissingFocalLength);
  PhotoMeta meta;
  meta.focal_length_mm = 10.0;
  EXPECT_PEAKTAG_ERROR(resolve_fov(meta, {}, RunConfig{}), ErrorCode::LowConfidence);
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.q = 10.0;
    cfg.pano_height = 220;
    cfg.photo_height = 200;
    synth_ = new SynthCase(gen_synthetic_case(cfg));
  }
  static void TearDownTestSuite() { delete synth_; }
  static RunConfig config() {
    RunConfig c;
    c.fov_deg = synth_->photo_fov_deg;
    c.kernel_radius = 60;
    c.max_shift = 15;
    return c;
  }
  static SynthCase* synth_;
};
SynthCase* PipelineTest::synth_ = nullptr;

TEST_F(PipelineTest, FindsTruth) {
  const AlignmentReport r =
      run_alignment(synth_->photo, std::nullopt, synth_->panorama, {}, config());
  EXPECT_EQ(r.alignment.dx, synth_->truth_alignment.dx);
  EXPECT_EQ(r.alignment.dy, synth_->truth_alignment.dy);
  EXPECT_NEAR(r.scale, 1.0, 1e-12);
  EXPECT_NEAR(alignment_error(synth_->truth, r.alignment, synth_->panorama.q), 0.0, 1e-9);
  EXPECT_EQ(r.peak_tags.size(), synth_->panorama.peaks.size());
  for (const char* stage : {"fov", "panorama_edges", "vcc", "peaks"}) {
    EXPECT_TRUE(r.timings_ms.contains(stage)) << stage;
  }
  for (const PeakTag& t : r.peak_tags) {
    if (!t.visible) continue;
    EXPECT_EQ(t.refinement_dx, 0) << t.name;
    EXPECT_EQ(t.refinement_dy, 0) << t.name;
  }
}

TEST_F(PipelineTest, RobustAgrees) {
  RunConfig c = config();
  c.robust = true;
  const AlignmentReport r =
      run_alignment(synth_->photo, std::nullopt, synth_->panorama, {}, c, false);
  EXPECT_EQ(r.alignment.dx, synth_->truth_alignment.dx);
  EXPECT_EQ(r.alignment.dy, synth_->truth_alignment.dy);
  EXPECT_TRUE(r.peak_tags.empty());
  EXPECT_TRUE(r.timings_ms.contains("robust"));
}

TEST_F(PipelineTest, ReportJson) {
  const AlignmentReport r =
      run_alignment(synth_->photo, std::nullopt, synth_->panorama, {}, config(), false);
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("alignment").get<Alignment>(), r.alignment);
  EXPECT_NEAR(j.at("fov_deg").get<double>(), synth_->photo_fov_deg, 1e-9);
  EXPECT_TRUE(j.at("camera").is_null());
  EXPECT_TRUE(j.at("peaks").is_array());
  EXPECT_TRUE(j.at("timings_ms").contains("vcc"));
}

TEST_F(PipelineTest, Overlay) {
  const AlignmentReport r =
      run_alignment(synth_->photo, std::nullopt, synth_->panorama, {}, config(), false);
  const RasterImage overlay = render_overlay(r.photo_edges, r.pano_edges, r.alignment, 50);
  EXPECT_EQ(overlay.width(), r.photo_edges.width() + 100);
  EXPECT_GE(overlay.height(), r.pano_edges.height());
}

TEST(Pipeline, EmptyPhoto) {
  RunConfig c;
  c.fov_deg = 40.0;
  const Panorama pano = make_panorama(RasterImage(900, 20), 2.5, {});
  EXPECT_PEAKTAG_ERROR(run_alignment(RasterImage{}, std::nullopt, pano, {}, c),
                       ErrorCode::EmptyImage);
}

TEST(ErrorName, Names) {
  EXPECT_EQ(error_name(ErrorCode::MissingFocalLength), "MissingFocalLength");
  EXPECT_EQ(error_name(ErrorCode::EmptyDataset), "EmptyDataset");
}

}  // namespace
}  // namespace peaktag
