#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "peaktag/matching.hpp"

namespace peaktag {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct PointPair {
  Point2 photo;  // original photo pixels
  Point2 pano;
};

/// Category taxonomy used when reporting rates.
inline constexpr const char* kCategorySource = "source";
inline constexpr const char* kCategoryClouds = "clouds";
inline constexpr const char* kCategorySkyline = "skyline";

struct GroundTruth {
  std::vector<PointPair> pairs;
  std::map<std::string, std::string> categories;
  // Optional extras carried by synthetic cases.
  std::optional<double> fov_deg;
  std::optional<Alignment> alignment;
};

void to_json(nlohmann::json& j, const GroundTruth& t);
void from_json(const nlohmann::json& j, GroundTruth& t);
GroundTruth load_ground_truth(const std::filesystem::path& path);

/// √((Σ dxᵢ)² + (Σ dyᵢ)²) / (N·q) in degrees, with each photo point projected
/// through the alignment and dxᵢ wrapped to the shortest way around the
/// cylinder. Throws NoPairs.
double alignment_error(const GroundTruth& truth, const Alignment& alignment, double q);

/// Panorama position of a photo point under an alignment.
Point2 project_to_panorama(const Point2& photo, const Alignment& alignment, double q);

struct EvalCase {
  std::string id;
  GroundTruth truth;
  std::optional<Alignment> alignment;  // empty when the pipeline failed
  double q = 20.0;
  std::string failure;
};

struct CategoryRate {
  int total = 0;
  int correct = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

inline constexpr int kHistogramBins = 181;  // 1° bins, last bin collects ≥ 180° and failures

struct EvalSummary {
  std::vector<std::string> ids;
  std::vector<std::optional<double>> errors;
  double threshold_deg = 4.0;
  int correct = 0;
  double correct_rate = 0.0;
  std::map<std::string, std::map<std::string, CategoryRate>> per_category;
  std::vector<int> histogram;
  std::vector<std::string> failures;
};

/// A case is correct iff its error is strictly below the threshold.
/// Throws EmptyDataset.
EvalSummary evaluate_dataset(const std::vector<EvalCase>& cases, double threshold_deg);

void to_json(nlohmann::json& j, const EvalSummary& s);

/// Plain-text table: one block per category, one row per option.
std::string format_summary_table(const EvalSummary& s);

}  // namespace peaktag
