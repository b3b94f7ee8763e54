#pragma once
// Headless laboratory runs and the blinded evaluation layout.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isbst/analysis/detect.hpp"
#include "isbst/faults/study_set.hpp"
#include "isbst/session/protocol.hpp"
#include "isbst/session/session.hpp"

namespace isbst::lab {

// Weights applied while paused at the given event index, before the next
// segment. Empty = the initial weights throughout.
using WeightSchedule = std::map<std::size_t, objectives::ObjectiveWeights>;

WeightSchedule schedule_from_json(const nlohmann::json& j);

struct LabPlan {
  std::vector<int> versions;  // empty = every version in the study set
  std::size_t events = 10;
  std::size_t n_steps = 50;
  std::vector<std::uint64_t> seeds;
  objectives::ObjectiveWeights initial_weights;
  WeightSchedule schedule;
  search::DeParams de;
  analysis::DetectOptions detect;
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate(const faults::StudySet& study) const;  // throws kInvalidArgument / kUnknownVersion
};

struct RunRecord {
  int version_id = 0;
  std::uint64_t seed = 0;
  search::SearchCounters counters;
  session::SessionLog log;            // events trimmed to the final one
  search::Population final_population;
  std::optional<std::string> error;
};

struct LabResult {
  LabPlan plan;
  std::vector<RunRecord> runs;  // version-major, seed order
  std::vector<analysis::RunMeasures> measures;  // parallel to runs; empty for failed runs
  analysis::DetectionReport report;

  bool any_failed() const;
};

// Reference runs (version 1) are always executed. Matrix columns are the
// planned versions other than the reference, or the reference alone when
// it is the only one planned.
LabResult run_lab(const faults::StudySet& study, const LabPlan& plan);

// report.json, report.csv, candidates.csv, runs.csv and runs/vNN_sS.json.
void write_lab_outputs(const LabResult& result, const std::filesystem::path& dir);

nlohmann::json lab_summary(const LabResult& result);

// Parses "all", "1,3,5" or "2..7".
std::vector<int> parse_versions(const std::string& list, const faults::StudySet& study);
// Parses "1..10" or "1,2,9".
std::vector<std::uint64_t> parse_seeds(const std::string& list);

struct EvalSlot {
  int position = 0;  // 1-based
  int version_id = 0;
  std::string label;  // blinded "i_vj"
};

// Reference first, then the first version of each fault category.
std::vector<EvalSlot> eval_layout(const faults::StudySet& study);

// Protocol options offering only the layout's versions under blinded
// labels; stopped sessions write their logs to dir/participant/<label>.json.
session::ProtocolOptions eval_protocol_options(const std::vector<EvalSlot>& layout, const std::string& participant,
                                               const std::filesystem::path& dir);

}  // namespace isbst::lab
