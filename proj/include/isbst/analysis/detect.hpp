#pragma once
// "Behaves differently": per-measure Mann-Whitney tests of a version's
// final populations against the reference version's.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isbst/analysis/mahalanobis.hpp"
#include "isbst/analysis/sax.hpp"
#include "isbst/fbd/interpreter.hpp"
#include "isbst/objectives/objectives.hpp"

namespace isbst::analysis {

// The 7 objectives in table order, then the 7 post-hoc metrics.
inline constexpr std::size_t kMetricCount = 7;
inline constexpr std::size_t kMeasureCount = objectives::kObjectiveCount + kMetricCount;
using MeasureVector = std::array<double, kMeasureCount>;

enum class Metric : std::uint8_t { LCS17, LCS18, E29, E69, SAX29, SAX69, Mref };

const std::array<std::string_view, kMeasureCount>& measure_tags();
inline constexpr std::size_t metric_index(Metric m) { return objectives::kObjectiveCount + static_cast<std::size_t>(m); }
inline constexpr bool is_objective_measure(std::size_t i) { return i < objectives::kObjectiveCount; }

// Fitted on Output_9 features of reference-version candidates.
ReferenceModel fit_reference_model(std::span<const fbd::TraceSet> reference_outputs);

MeasureVector measure_candidate(const fbd::TraceSet& inputs, const fbd::TraceSet& outputs,
                                const objectives::ScoreVector& raw, const ReferenceModel& model,
                                const SaxParams& sax = {});

// All measured candidates of one run's final population.
struct RunMeasures {
  int version_id = 0;
  std::uint64_t seed = 0;
  std::vector<MeasureVector> candidates;
};

// What one test observation is.
enum class SampleUnit {
  Candidate,  // every candidate of every run
  RunMedian,  // per run, the median over its candidates
  RunMean,    // per run, the mean over its candidates
};

std::string_view to_string(SampleUnit u);
SampleUnit sample_unit_from_string(std::string_view s);  // throws kInvalidArgument

struct DetectOptions {
  double alpha = 0.05;
  SampleUnit unit = SampleUnit::RunMedian;
};

struct MeasureResult {
  double u = 0.0;
  double p = 1.0;
  bool flagged = false;
};

struct VersionDetection {
  int version_id = 0;
  std::string label;
  std::array<MeasureResult, kMeasureCount> measures{};
  bool detected = false;
  std::optional<std::string> error;  // the version's runs failed; no test result

  std::size_t objective_flags() const;
  std::size_t metric_flags() const;
};

// Throws kInvalidArgument on empty runs or runs without candidates.
VersionDetection detect(std::span<const RunMeasures> version_runs, std::span<const RunMeasures> reference_runs,
                        const DetectOptions& options = {});

struct DetectionReport {
  DetectOptions options;
  std::vector<VersionDetection> versions;

  std::size_t detected_count() const;
};

nlohmann::json to_json(const DetectionReport& report);
// Rows are measures plus a final "detected" row; each version contributes a
// p-value column and a flag column.
std::string to_csv(const DetectionReport& report);

}  // namespace isbst::analysis
