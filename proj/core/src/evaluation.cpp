#include "peaktag/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "peaktag/error.hpp"
#include "peaktag/image.hpp"

namespace peaktag {

void to_json(nlohmann::json& j, const GroundTruth& t) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const PointPair& p : t.pairs) {
    pairs.push_back({{"photo", {p.photo.x, p.photo.y}}, {"pano", {p.pano.x, p.pano.y}}});
  }
  j = nlohmann::json{{"pairs", pairs}, {"categories", t.categories}};
  if (t.fov_deg) j["fov_deg"] = *t.fov_deg;
  if (t.alignment) j["alignment"] = *t.alignment;
}

void from_json(const nlohmann::json& j, GroundTruth& t) {
  t = {};
  for (const auto& p : j.at("pairs")) {
    const auto& ph = p.at("photo");
    const auto& pa = p.at("pano");
    t.pairs.push_back({{ph.at(0).get<double>(), ph.at(1).get<double>()},
                       {pa.at(0).get<double>(), pa.at(1).get<double>()}});
  }
  if (j.contains("categories")) {
    for (const auto& [k, v] : j.at("categories").items()) t.categories[k] = v.get<std::string>();
  }
  if (j.contains("fov_deg")) t.fov_deg = j.at("fov_deg").get<double>();
  if (j.contains("alignment")) t.alignment = j.at("alignment").get<Alignment>();
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end()).get<GroundTruth>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, path.string() + ": " + e.what());
  }
}

Point2 project_to_panorama(const Point2& photo, const Alignment& a, double q) {
  const double width = 360.0 * q;
  double x = std::fmod(photo.x * a.scale + a.dx, width);
  if (x < 0.0) x += width;
  return {x, photo.y * a.scale + a.dy};
}

double alignment_error(const GroundTruth& truth, const Alignment& alignment, double q) {
  if (truth.pairs.empty()) throw Error(ErrorCode::NoPairs, "ground truth has no point pairs");
  if (!(q > 0.0)) throw Error(ErrorCode::NonPositiveInput, "q must be positive");
  const double width = 360.0 * q;
  double sum_dx = 0.0, sum_dy = 0.0;
  for (const PointPair& p : truth.pairs) {
    const Point2 projected = project_to_panorama(p.photo, alignment, q);
    double dx = std::fmod(projected.x - p.pano.x, width);
    if (dx > width / 2.0) dx -= width;
    if (dx < -width / 2.0) dx += width;
    sum_dx += dx;
    sum_dy += projected.y - p.pano.y;
  }
  return std::hypot(sum_dx, sum_dy) / (static_cast<double>(truth.pairs.size()) * q);
}

EvalSummary evaluate_dataset(const std::vector<EvalCase>& cases, double threshold_deg) {
  if (cases.empty()) throw Error(ErrorCode::EmptyDataset, "no cases to evaluate");
  EvalSummary s;
  s.threshold_deg = threshold_deg;
  s.histogram.assign(kHistogramBins, 0);
  for (const EvalCase& c : cases) {
    std::optional<double> error;
    if (c.alignment) {
      try {
        error = alignment_error(c.truth, *c.alignment, c.q);
      } catch (const Error& e) {
        s.failures.push_back(c.id + ": " + e.what());
      }
    } else {
      s.failures.push_back(c.id + ": " + (c.failure.empty() ? "no alignment" : c.failure));
    }
    const bool correct = error && *error < threshold_deg;
    s.ids.push_back(c.id);
    s.errors.push_back(error);
    if (correct) ++s.correct;
    int bin = kHistogramBins - 1;
    if (error) bin = std::min(kHistogramBins - 1, static_cast<int>(std::floor(*error)));
    ++s.histogram[static_cast<std::size_t>(bin)];
    for (const auto& [category, option] : c.truth.categories) {
      CategoryRate& r = s.per_category[category][option];
      ++r.total;
      if (correct) ++r.correct;
    }
  }
  s.correct_rate = static_cast<double>(s.correct) / static_cast<double>(cases.size());
  return s;
}

void to_json(nlohmann::json& j, const EvalSummary& s) {
  nlohmann::json cases = nlohmann::json::array();
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    nlohmann::json c{{"id", s.ids[i]}};
    if (s.errors[i]) {
      c["error_deg"] = *s.errors[i];
      c["correct"] = *s.errors[i] < s.threshold_deg;
    } else {
      c["error_deg"] = nullptr;
      c["correct"] = false;
    }
    cases.push_back(std::move(c));
  }
  nlohmann::json categories = nlohmann::json::object();
  for (const auto& [category, options] : s.per_category) {
    for (const auto& [option, r] : options) {
      categories[category][option] = {{"total", r.total}, {"correct", r.correct},
                                      {"rate", r.rate()}};
    }
  }
  j = nlohmann::json{{"threshold_deg", s.threshold_deg},
                     {"count", s.ids.size()},
                     {"correct", s.correct},
                     {"correct_rate", s.correct_rate},
                     {"cases", cases},
                     {"categories", categories},
                     {"histogram", s.histogram},
                     {"failures", s.failures}};
}

std::string format_summary_table(const EvalSummary& s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "Correct (< " << s.threshold_deg << " deg): " << s.correct << "/" << s.ids.size()
      << " (" << 100.0 * s.correct_rate << "%)\n";
  for (const auto& [category, options] : s.per_category) {
    out << "\n" << category << "\n";
    for (const auto& [option, r] : options) {
      out << "  " << std::left << std::setw(28) << option << std::right << std::setw(4)
          << r.correct << "/" << std::left << std::setw(4) << r.total << std::right
          << std::setw(7) << 100.0 * r.rate() << "%\n";
    }
  }
  if (!s.failures.empty()) {
    out << "\nFailures:\n";
    for (const auto& f : s.failures) out << "  " << f << "\n";
  }
  return out.str();
}

}  // namespace peaktag
