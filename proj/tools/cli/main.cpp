#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "commands.hpp"

namespace {

using peaktag::cli::Options;

std::string flag_for(std::string key) {
  for (char& ch : key) {
    if (ch == '_' || ch == '.') ch = '-';
  }
  return "--" + key;
}

// One flag per RunConfig key; values are applied after the config file.
struct RunFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool robust = false;
  CLI::Option* robust_flag = nullptr;

  void attach(CLI::App* app, Options& opts) {
    app->add_option("--config", opts.config, "key=value file; flags override it")
        ->check(CLI::ExistingFile);
    app->add_option("--sensors", opts.sensors, "Sensor database CSV")->check(CLI::ExistingFile);
    app->add_option("--q", opts.q, "Panorama resolution, pixels per degree");
    app->add_flag("--json", opts.json, "Print machine-readable JSON on stdout");
    for (const std::string& key : peaktag::config_keys()) {
      if (key == "robust") {
        robust_flag = app->add_flag("--robust", robust, "Enable robust candidate rescoring");
        continue;
      }
      options[key] = app->add_option(flag_for(key), values[key], "Overrides config key " + key);
    }
  }

  void collect(Options& opts) const {
    for (const auto& [key, option] : options) {
      if (option->count() > 0) opts.overrides.emplace_back(key, values.at(key));
    }
    if (robust_flag && robust_flag->count() > 0) {
      opts.overrides.emplace_back("robust", robust ? "true" : "false");
    }
  }
};

void add_case_inputs(CLI::App* app, Options& opts) {
  app->add_option("--photo", opts.photo, "Photograph (JPEG or PNG)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--panorama", opts.panorama, "Cylindrical panorama PNG")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--peaks", opts.peaks, "Peaks JSON")->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Align mountain photographs with panorama renders and tag peaks"};
  app.require_subcommand(1);
  Options opts;

  auto* align = app.add_subcommand("align", "Estimate the photo's viewing direction");
  RunFlags align_flags;
  add_case_inputs(align, opts);
  align_flags.attach(align, opts);
  align->add_option("--overlay", opts.overlay, "Write an edge overlay PNG");
  align->add_option("--truth", opts.truth, "Ground truth JSON; adds error_deg to the report")
      ->check(CLI::ExistingFile);

  auto* tag = app.add_subcommand("tag-peaks", "Locate panorama peaks inside the photo");
  RunFlags tag_flags;
  add_case_inputs(tag, opts);
  tag_flags.attach(tag, opts);
  tag->add_option("--alignment", opts.alignment, "Reuse an alignment or report JSON")
      ->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "Run every case directory and summarize");
  RunFlags eval_flags;
  evaluate->add_option("dataset", opts.dataset, "Directory of case directories")->required();
  eval_flags.attach(evaluate, opts);
  evaluate->add_option("--jobs", opts.jobs, "Cases processed in parallel")
      ->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Generate synthetic cases");
  auto& sc = opts.synth;
  synth->add_option("--out", opts.out_dir, "Output directory")->required();
  synth->add_option("--seed", opts.seed, "First seed");
  synth->add_option("--count", opts.count, "Number of cases");
  synth->add_option("--q", sc.q, "Panorama pixels per degree");
  synth->add_option("--layers", sc.layers, "Terrain layers");
  synth->add_option("--photo-fov", sc.photo_fov_deg, "Photo field of view, degrees");
  synth->add_option("--noise", sc.noise_density, "Foreground noise density in [0,1]");
  synth->add_flag("--recolor", sc.recolor_photo, "Use a different palette for the photo");
  synth->add_option("--peak-count", sc.peak_count, "Labelled peaks per panorama");
  synth->add_option("--pano-height", sc.pano_height, "Panorama height, pixels");
  synth->add_option("--photo-height", sc.photo_height, "Photo height, pixels");
  synth->add_option("--photo-scale", sc.photo_scale, "Resample the photo by this factor");
  synth->add_option("--min-peak-spacing", sc.min_peak_spacing, "Minimum peak distance, pixels");
  synth->add_option("--peak-shift", sc.peak_shift_max, "Max per-peak displacement, pixels");
  synth->add_flag("--json", opts.json, "Print machine-readable JSON on stdout");

  auto* fov = app.add_subcommand("fov", "Field of view and scale factor of a photo");
  RunFlags fov_flags;
  fov->add_option("--photo", opts.photo, "Photograph")->check(CLI::ExistingFile);
  fov_flags.attach(fov, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : peaktag::cli::kExitUsage;
  }

  if (*align) {
    align_flags.collect(opts);
    return peaktag::cli::cmd_align(opts, std::cout, std::cerr);
  }
  if (*tag) {
    tag_flags.collect(opts);
    return peaktag::cli::cmd_tag_peaks(opts, std::cout, std::cerr);
  }
  if (*evaluate) {
    eval_flags.collect(opts);
    return peaktag::cli::cmd_evaluate(opts, std::cout, std::cerr);
  }
  if (*synth) {
    return peaktag::cli::cmd_synth(opts, std::cout, std::cerr);
  }
  fov_flags.collect(opts);
  return peaktag::cli::cmd_fov(opts, std::cout, std::cerr);
}
