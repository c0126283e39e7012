#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "peaktag/error.hpp"
#include "peaktag/panorama.hpp"
#include "peaktag/pipeline.hpp"

namespace peaktag::cli {

namespace fs = std::filesystem;

struct Options {
  std::optional<fs::path> photo;
  std::optional<fs::path> panorama;
  std::optional<fs::path> peaks;
  std::optional<fs::path> sensors;
  std::optional<fs::path> overlay;
  std::optional<fs::path> config;
  std::optional<fs::path> truth;
  std::optional<fs::path> alignment;  // tag-peaks: reuse a saved alignment
  fs::path dataset;
  fs::path out_dir;
  // RunConfig overrides from flags, applied after the config file in order.
  std::vector<std::pair<std::string, std::string>> overrides;
  bool json = false;
  int jobs = 1;
  double q = 20.0;
  std::uint64_t seed = 1;
  int count = 1;
  SynthConfig synth;
};

// Exit status for a library error. Zero is success, 1 an unexpected failure,
// 2 a command-line usage error.
int exit_code_for(ErrorCode code);
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitUsage = 2;

/// Defaults, then the --config file, then flag overrides.
RunConfig build_run_config(const Options& opts);

int cmd_align(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_tag_peaks(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_synth(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_fov(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace peaktag::cli
