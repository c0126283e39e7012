#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "commands.hpp"
#include "peaktag/image.hpp"
#include "test_util.hpp"

namespace peaktag::cli {
namespace {

using nlohmann::json;

SynthConfig small_synth() {
  SynthConfig s;
  s.q = 5.0;
  s.pano_height = 150;
  s.photo_height = 100;
  return s;
}

// Writes `count` small synthetic cases under `dir`.
void make_dataset(const fs::path& dir, int count) {
  Options o;
  o.out_dir = dir;
  o.count = count;
  o.synth = small_synth();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_synth(o, out, err), 0) << err.str();
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorCode::Io), 11);
  EXPECT_NE(exit_code_for(ErrorCode::MissingFocalLength), exit_code_for(ErrorCode::EmptyDataset));
  EXPECT_GT(exit_code_for(ErrorCode::InvalidConfig), kExitUsage);
}

TEST(Cli, ConfigPrecedence) {
  testing::TempDir dir;
  testing::write_text(dir.path() / "run.cfg", "b_p = 0.8\nrho_p = 0.25\n");
  Options o;
  EXPECT_EQ(build_run_config(o).photo_base, 0.7);
  o.config = dir.path() / "run.cfg";
  EXPECT_EQ(build_run_config(o).photo_base, 0.8);
  o.overrides = {{"b_p", "0.6"}};
  const RunConfig c = build_run_config(o);
  EXPECT_EQ(c.photo_base, 0.6);
  EXPECT_EQ(c.photo_threshold, 0.25);
}

TEST(Cli, BadConfigIsReported) {
  testing::TempDir dir;
  testing::write_text(dir.path() / "run.cfg", "unknown=1\n");
  Options o;
  o.config = dir.path() / "run.cfg";
  o.json = true;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_fov(o, out, err), exit_code_for(ErrorCode::InvalidConfig));
  const json doc = json::parse(out.str());
  EXPECT_EQ(doc.at("error"), "InvalidConfig");
  EXPECT_EQ(doc.at("exit_code"), exit_code_for(ErrorCode::InvalidConfig));
}

TEST(Cli, Fov) {
  Options o;
  o.json = true;
  o.overrides = {{"fov", "90"}};
  std::ostringstream out, err;
  ASSERT_EQ(cmd_fov(o, out, err), 0) << err.str();
  EXPECT_DOUBLE_EQ(json::parse(out.str()).at("fov_deg").get<double>(), 90.0);
}

TEST(Cli, AlignWithoutFocalLength) {
  testing::TempDir dir;
  make_dataset(dir.path(), 1);
  const fs::path c = dir.path() / "case_000001";
  Options o;
  o.photo = c / "photo.png";
  o.panorama = c / "panorama.png";
  o.q = 5.0;
  o.json = true;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_align(o, out, err), exit_code_for(ErrorCode::MissingFocalLength));
  EXPECT_EQ(json::parse(out.str()).at("error"), "MissingFocalLength");
}

TEST(Cli, AlignSyntheticCase) {
  testing::TempDir dir;
  make_dataset(dir.path(), 1);
  const fs::path c = dir.path() / "case_000001";
  Options o;
  o.photo = c / "photo.png";
  o.panorama = c / "panorama.png";
  o.peaks = c / "peaks.json";
  o.truth = c / "truth.json";
  o.overlay = dir.path() / "overlay.png";
  o.q = 5.0;
  o.json = true;
  o.overrides = {{"fov", "40"}, {"kernel_radius", "40"}, {"max_shift", "10"}};
  std::ostringstream out, err;
  ASSERT_EQ(cmd_align(o, out, err), 0) << err.str();
  const json doc = json::parse(out.str());
  EXPECT_NEAR(doc.at("error_deg").get<double>(), 0.0, 1e-9);
  EXPECT_EQ(doc.at("correct"), true);
  EXPECT_FALSE(read_image(*o.overlay).empty());

  // tag-peaks reusing the saved report.
  testing::write_text(dir.path() / "report.json", out.str());
  Options t = o;
  t.alignment = dir.path() / "report.json";
  t.truth.reset();
  std::ostringstream tout, terr;
  ASSERT_EQ(cmd_tag_peaks(t, tout, terr), 0) << terr.str();
  EXPECT_EQ(json::parse(tout.str()).at("peaks"), doc.at("peaks"));
}

TEST(Cli, EvaluateEmptyDirectory) {
  testing::TempDir dir;
  Options o;
  o.dataset = dir.path();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_evaluate(o, out, err), exit_code_for(ErrorCode::EmptyDataset));
  o.dataset = dir.path() / "missing";
  EXPECT_EQ(cmd_evaluate(o, out, err), exit_code_for(ErrorCode::Io));
}

TEST(Cli, EvaluateThresholdMonotonic) {
  testing::TempDir dir;
  make_dataset(dir.path(), 3);
  Options o;
  o.dataset = dir.path();
  o.json = true;
  o.jobs = 2;
  auto correct_at = [&](const char* threshold) {
    Options run = o;
    run.overrides = {{"threshold", threshold}};
    std::ostringstream out, err;
    EXPECT_EQ(cmd_evaluate(run, out, err), 0) << err.str();
    return json::parse(out.str()).at("correct").get<int>();
  };
  const int strict = correct_at("0.01");
  const int loose = correct_at("4");
  EXPECT_LE(strict, loose);
  EXPECT_EQ(loose, 3);
}

TEST(Cli, SynthCountZeroAndDeterminism) {
  testing::TempDir dir;
  Options o;
  o.out_dir = dir.path() / "none";
  o.count = 0;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_synth(o, out, err), 0);
  EXPECT_TRUE(fs::is_directory(o.out_dir));
  EXPECT_TRUE(fs::is_empty(o.out_dir));

  make_dataset(dir.path() / "a", 1);
  make_dataset(dir.path() / "b", 1);
  for (const char* name : {"panorama.png", "photo.png", "peaks.json", "truth.json"}) {
    EXPECT_EQ(read_file(dir.path() / "a/case_000001" / name),
              read_file(dir.path() / "b/case_000001" / name))
        << name;
  }
  o.count = -1;
  EXPECT_EQ(cmd_synth(o, out, err), exit_code_for(ErrorCode::InvalidConfig));
}

}  // namespace
}  // namespace peaktag::cli
