#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>
#include <thread>

#include "peaktag/evaluation.hpp"
#include "peaktag/image.hpp"
#include "peaktag/metadata.hpp"

namespace peaktag::cli {

using nlohmann::json;

int exit_code_for(ErrorCode code) { return 10 + static_cast<int>(code); }

namespace {

std::string text_of(const std::vector<std::uint8_t>& bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

json read_json(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedInput, path.string() + ": " + e.what());
  }
}

const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
  if (!p) throw Error(ErrorCode::MalformedInput, std::string(flag) + " is required");
  return *p;
}

// Reports the error in both forms and maps it to an exit status.
template <typename Body>
int guarded(const Options& opts, std::ostream& out, std::ostream& err, Body&& body) {
  auto fail = [&](int status, std::string_view name, const std::string& message) {
    err << "error: " << message << "\n";
    const json doc{{"error", name}, {"exit_code", status}, {"message", message}};
    (opts.json ? out : err) << doc.dump() << "\n";
    return status;
  };
  try {
    return body();
  } catch (const Error& e) {
    return fail(exit_code_for(e.code()), error_name(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(exit_code_for(ErrorCode::MalformedInput), error_name(ErrorCode::MalformedInput),
                e.what());
  } catch (const std::exception& e) {
    return fail(kExitUnexpected, "Unexpected", e.what());
  }
}

// EXIF is optional when the FOV comes from elsewhere; a photo without it
// surfaces as MissingFocalLength during FOV resolution.
std::optional<PhotoMeta> try_photo_meta(const std::vector<std::uint8_t>& bytes) {
  try {
    return parse_photo_meta(bytes);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MissingExif || e.code() == ErrorCode::MissingFocalLength) {
      return std::nullopt;
    }
    throw;
  }
}

std::vector<CameraSpec> sensors_for(const Options& opts) {
  if (!opts.sensors) return {};
  return load_sensor_db(*opts.sensors);
}

Panorama panorama_for(const Options& opts, double q) {
  const fs::path& image = require(opts.panorama, "--panorama");
  std::vector<Peak> peaks;
  if (opts.peaks) peaks = load_peaks(*opts.peaks);
  return make_panorama(read_image(image), q, std::move(peaks));
}

void print_tags(std::ostream& out, const std::vector<PeakTag>& tags) {
  for (const PeakTag& t : tags) {
    out << "  " << std::left << std::setw(20) << t.name << std::right;
    if (t.visible) {
      out << " x=" << std::setw(7) << t.photo_x << " y=" << std::setw(7) << t.photo_y
          << " shift=(" << t.refinement_dx << "," << t.refinement_dy
          << ") confidence=" << t.confidence << "\n";
    } else {
      out << " not visible\n";
    }
  }
}

struct CaseFiles {
  fs::path photo;
  fs::path panorama;
  std::optional<fs::path> peaks;
  fs::path truth;
};

CaseFiles case_files(const fs::path& dir) {
  CaseFiles files;
  for (const char* name : {"photo.png", "photo.jpg", "photo.jpeg"}) {
    if (fs::exists(dir / name)) {
      files.photo = dir / name;
      break;
    }
  }
  if (files.photo.empty()) throw Error(ErrorCode::Io, dir.string() + ": no photo file");
  files.panorama = dir / "panorama.png";
  if (fs::exists(dir / "peaks.json")) files.peaks = dir / "peaks.json";
  files.truth = dir / "truth.json";
  return files;
}

EvalCase evaluate_case(const fs::path& dir, const Options& opts, const RunConfig& base,
                       const std::vector<CameraSpec>& sensors) {
  EvalCase c;
  c.id = dir.filename().string();
  c.q = opts.q;
  try {
    const CaseFiles files = case_files(dir);
    const json truth_doc = read_json(files.truth);
    c.truth = truth_doc.get<GroundTruth>();
    if (truth_doc.contains("q")) c.q = truth_doc.at("q").get<double>();

    const auto photo_bytes = read_file(files.photo);
    const RasterImage photo = decode_image(photo_bytes);
    const std::optional<PhotoMeta> meta = try_photo_meta(photo_bytes);
    RunConfig cfg = base;
    // Cases without usable EXIF fall back to the FOV recorded in the truth file.
    if (!cfg.fov_deg && (!meta || !meta->focal_length_mm) && c.truth.fov_deg) {
      cfg.fov_deg = c.truth.fov_deg;
    }
    std::vector<Peak> peaks;
    if (files.peaks) peaks = load_peaks(*files.peaks);
    const Panorama pano = make_panorama(read_image(files.panorama), c.q, std::move(peaks));
    c.alignment = run_alignment(photo, meta, pano, sensors, cfg, false).alignment;
  } catch (const Error& e) {
    c.failure = std::string(error_name(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    c.failure = e.what();
  }
  return c;
}

}  // namespace

RunConfig build_run_config(const Options& opts) {
  RunConfig cfg;
  if (opts.config) apply_config_text(cfg, text_of(read_file(*opts.config)));
  for (const auto& [key, value] : opts.overrides) apply_config_value(cfg, key, value);
  return cfg;
}

int cmd_align(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, out, err, [&] {
    const RunConfig cfg = build_run_config(opts);
    const auto photo_bytes = read_file(require(opts.photo, "--photo"));
    const RasterImage photo = decode_image(photo_bytes);
    const std::optional<PhotoMeta> meta = try_photo_meta(photo_bytes);
    const Panorama pano = panorama_for(opts, opts.q);
    const AlignmentReport report = run_alignment(photo, meta, pano, sensors_for(opts), cfg);

    json doc = report;
    if (opts.truth) {
      const GroundTruth truth = load_ground_truth(*opts.truth);
      const double e = alignment_error(truth, report.alignment, pano.q);
      doc["error_deg"] = e;
      doc["correct"] = e < cfg.threshold_deg;
    }
    if (opts.overlay) {
      write_png(*opts.overlay, render_overlay(report.photo_edges, report.pano_edges,
                                              report.alignment));
    }

    if (opts.json) {
      out << doc.dump(2) << "\n";
    } else {
      const Alignment& a = report.alignment;
      out << "azimuth " << a.azimuth_deg << " deg  offset (" << a.dx << ", " << a.dy
          << ")  scale " << a.scale << "  score " << a.score << "\n";
      out << "fov " << doc["fov_deg"].get<double>() << " deg";
      if (report.camera_match) {
        out << "  camera " << report.camera_match->spec.make << " "
            << report.camera_match->spec.model << " (similarity "
            << report.camera_match->similarity << ")";
      }
      out << "\n";
      if (doc.contains("error_deg")) out << "error " << doc["error_deg"].get<double>() << " deg\n";
      print_tags(out, report.peak_tags);
    }
    return 0;
  });
}

int cmd_tag_peaks(const Options& opts, std::ostream& out, std::ostream& err) {
  if (!opts.alignment) return cmd_align(opts, out, err);
  return guarded(opts, out, err, [&] {
    const RunConfig cfg = build_run_config(opts);
    json saved = read_json(*opts.alignment);
    if (saved.contains("alignment")) saved = saved.at("alignment");
    const Alignment a = saved.get<Alignment>();
    const RasterImage photo = read_image(require(opts.photo, "--photo"));
    const Panorama pano = panorama_for(opts, opts.q);

    const EdgeMap pano_edges =
        filter_edges(detect_edges(pano.raster, cfg.pano_detect()), cfg.pano_filter());
    const EdgeMap photo_edges = filter_edges(
        detect_edges(scale_photo(photo, a.scale), cfg.photo_detect()), cfg.photo_filter());
    const auto tags = tag_all_peaks(photo_edges, pano_edges, pano.peaks, a, cfg.refine());

    if (opts.json) {
      out << json{{"alignment", a}, {"peaks", tags}}.dump(2) << "\n";
    } else {
      print_tags(out, tags);
    }
    return 0;
  });
}

int cmd_evaluate(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, out, err, [&] {
    const RunConfig cfg = build_run_config(opts);
    if (!fs::is_directory(opts.dataset)) {
      throw Error(ErrorCode::Io, opts.dataset.string() + " is not a directory");
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(opts.dataset)) {
      if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw Error(ErrorCode::EmptyDataset, opts.dataset.string() + " has no cases");

    const std::vector<CameraSpec> sensors = sensors_for(opts);
    std::vector<EvalCase> cases(dirs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < dirs.size(); i = next++) {
        cases[i] = evaluate_case(dirs[i], opts, cfg, sensors);
      }
    };
    const int jobs = std::clamp(opts.jobs, 1, static_cast<int>(dirs.size()));
    std::vector<std::jthread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    pool.clear();

    const EvalSummary summary = evaluate_dataset(cases, cfg.threshold_deg);
    if (opts.json) {
      out << json(summary).dump(2) << "\n";
    } else {
      out << format_summary_table(summary);
    }
    return 0;
  });
}

int cmd_synth(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, out, err, [&] {
    if (opts.count < 0) throw Error(ErrorCode::InvalidConfig, "--count must be >= 0");
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + opts.out_dir.string());
    json written = json::array();
    for (int i = 0; i < opts.count; ++i) {
      SynthConfig sc = opts.synth;
      sc.seed = opts.seed + static_cast<std::uint64_t>(i);
      char name[32];
      std::snprintf(name, sizeof name, "case_%06llu", static_cast<unsigned long long>(sc.seed));
      const fs::path dir = opts.out_dir / name;
      write_synthetic_case(gen_synthetic_case(sc), dir);
      written.push_back(dir.string());
      if (!opts.json) out << dir.string() << "\n";
    }
    if (opts.json) out << json{{"cases", written}}.dump(2) << "\n";
    return 0;
  });
}

int cmd_fov(const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(opts, out, err, [&] {
    const RunConfig cfg = build_run_config(opts);
    std::optional<PhotoMeta> meta;
    int photo_width = 0;
    if (opts.photo) {
      const auto bytes = read_file(*opts.photo);
      meta = try_photo_meta(bytes);
      photo_width = meta ? meta->width_px : decode_image(bytes).width();
    }
    const FovResolution fov = resolve_fov(meta, sensors_for(opts), cfg);
    json doc{{"fov_rad", fov.fov_rad}, {"fov_deg", fov.fov_rad * 180.0 / std::numbers::pi}};
    if (fov.camera_match) {
      doc["camera"] = {{"make", fov.camera_match->spec.make},
                       {"model", fov.camera_match->spec.model},
                       {"sensor_width_mm", fov.camera_match->spec.sensor_width_mm},
                       {"similarity", fov.camera_match->similarity}};
    }
    if (photo_width > 0) {
      doc["scale"] = compute_scale_factor(fov.fov_rad, photo_width, panorama_width_for(opts.q));
    }
    if (opts.json) {
      out << doc.dump(2) << "\n";
    } else {
      out << "fov " << doc["fov_deg"].get<double>() << " deg";
      if (doc.contains("scale")) out << "  scale " << doc["scale"].get<double>();
      out << "\n";
    }
    return 0;
  });
}

}  // namespace peaktag::cli
