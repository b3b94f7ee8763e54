#include "isbst/analysis/detect.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isbst/analysis/distance.hpp"
#include "isbst/analysis/lcs.hpp"
#include "isbst/analysis/mann_whitney.hpp"
#include "isbst/error.hpp"
#include "isbst/fbd/ramp.hpp"

namespace isbst::analysis {
namespace {

namespace ch = fbd::channel;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> sample(std::span<const RunMeasures> runs, std::size_t measure, SampleUnit unit) {
  std::vector<double> out;
  for (const auto& run : runs) {
    if (run.candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "run without candidates");
    if (unit == SampleUnit::Candidate) {
      for (const auto& c : run.candidates) out.push_back(c[measure]);
    } else if (unit == SampleUnit::RunMean) {
      double sum = 0.0;
      for (const auto& c : run.candidates) sum += c[measure];
      out.push_back(sum / static_cast<double>(run.candidates.size()));
    } else {
      std::vector<double> column;
      column.reserve(run.candidates.size());
      for (const auto& c : run.candidates) column.push_back(c[measure]);
      out.push_back(median(std::move(column)));
    }
  }
  return out;
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", p);
  return buf;
}

}  // namespace

const std::array<std::string_view, kMeasureCount>& measure_tags() {
  static constexpr std::array<std::string_view, kMeasureCount> tags{
      "minimum.min", "maximum.max", "amplitude", "max.increase", "max.derivative", "min.mean", "max.decrease",
      "LCS17",       "LCS18",       "E29",       "E69",          "SAX29",          "SAX69",    "Mref",
  };
  return tags;
}

ReferenceModel fit_reference_model(std::span<const fbd::TraceSet> reference_outputs) {
  std::vector<FeatureVector> features;
  features.reserve(reference_outputs.size());
  for (const auto& outs : reference_outputs) features.push_back(output_features(fbd::find_trace(outs, ch::kOutput).samples));
  return ReferenceModel::fit(features);
}

MeasureVector measure_candidate(const fbd::TraceSet& inputs, const fbd::TraceSet& outputs,
                                const objectives::ScoreVector& raw, const ReferenceModel& model, const SaxParams& sax) {
  MeasureVector m{};
  std::copy(raw.begin(), raw.end(), m.begin());
  const auto& reset = fbd::find_trace(inputs, ch::kReset).samples;
  const auto& reset_val = fbd::find_trace(inputs, ch::kResetVal).samples;
  const auto& input = fbd::find_trace(inputs, ch::kInput).samples;
  const auto& dec = fbd::find_trace(outputs, ch::kDec).samples;
  const auto& pasv = fbd::find_trace(outputs, ch::kPasv).samples;
  const auto& out = fbd::find_trace(outputs, ch::kOutput).samples;
  m[metric_index(Metric::LCS17)] = static_cast<double>(lcs_length(reset, dec));
  m[metric_index(Metric::LCS18)] = static_cast<double>(lcs_length(reset, pasv));
  m[metric_index(Metric::E29)] = euclidean(reset_val, out);
  m[metric_index(Metric::E69)] = euclidean(input, out);
  m[metric_index(Metric::SAX29)] = sax_mindist(reset_val, out, sax);
  m[metric_index(Metric::SAX69)] = sax_mindist(input, out, sax);
  const auto f = output_features(out);
  m[metric_index(Metric::Mref)] = model.distance(f);
  return m;
}

std::string_view to_string(SampleUnit u) {
  switch (u) {
    case SampleUnit::Candidate: return "candidate";
    case SampleUnit::RunMedian: return "run-median";
    case SampleUnit::RunMean: return "run-mean";
  }
  return "?";
}

SampleUnit sample_unit_from_string(std::string_view s) {
  if (s == "candidate") return SampleUnit::Candidate;
  if (s == "run-median") return SampleUnit::RunMedian;
  if (s == "run-mean") return SampleUnit::RunMean;
  throw Error(ErrorCode::kInvalidArgument, "unknown sample unit '" + std::string(s) + "'");
}

std::size_t VersionDetection::objective_flags() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < objectives::kObjectiveCount; ++i) n += measures[i].flagged;
  return n;
}

std::size_t VersionDetection::metric_flags() const {
  std::size_t n = 0;
  for (std::size_t i = objectives::kObjectiveCount; i < kMeasureCount; ++i) n += measures[i].flagged;
  return n;
}

VersionDetection detect(std::span<const RunMeasures> version_runs, std::span<const RunMeasures> reference_runs,
                        const DetectOptions& options) {
  if (version_runs.empty() || reference_runs.empty()) throw Error(ErrorCode::kInvalidArgument, "detect needs runs on both sides");
  VersionDetection d;
  d.version_id = version_runs.front().version_id;
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    const auto a = sample(version_runs, i, options.unit);
    const auto b = sample(reference_runs, i, options.unit);
    const auto r = mann_whitney_u(a, b);
    d.measures[i] = {r.u, r.p, r.p < options.alpha};
  }
  d.detected = d.objective_flags() > 0 && d.metric_flags() > 0;
  return d;
}

std::size_t DetectionReport::detected_count() const {
  return static_cast<std::size_t>(std::count_if(versions.begin(), versions.end(), [](const auto& v) { return v.detected; }));
}

nlohmann::json to_json(const DetectionReport& report) {
  nlohmann::json j{{"alpha", report.options.alpha},
                   {"sample_unit", to_string(report.options.unit)},
                   {"test", "Mann-Whitney U, two-sided, no multiple-comparison correction"},
                   {"measures", measure_tags()},
                   {"detected_count", report.detected_count()},
                   {"versions", nlohmann::json::array()}};
  for (const auto& v : report.versions) {
    nlohmann::json e{{"version_id", v.version_id}, {"label", v.label}, {"detected", v.detected}};
    if (v.error) {
      e["error"] = *v.error;
    } else {
      auto m = nlohmann::json::object();
      for (std::size_t i = 0; i < kMeasureCount; ++i) {
        m[std::string(measure_tags()[i])] = {{"u", v.measures[i].u}, {"p", v.measures[i].p}, {"flagged", v.measures[i].flagged}};
      }
      e["measures"] = std::move(m);
    }
    j["versions"].push_back(std::move(e));
  }
  return j;
}

std::string to_csv(const DetectionReport& report) {
  std::ostringstream out;
  out << "measure";
  for (const auto& v : report.versions) out << ",v" << v.version_id << "_p,v" << v.version_id << "_flag";
  out << '\n';
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    out << measure_tags()[i];
    for (const auto& v : report.versions) {
      if (v.error) {
        out << ",,";
      } else {
        out << ',' << format_p(v.measures[i].p) << ',' << (v.measures[i].flagged ? 1 : 0);
      }
    }
    out << '\n';
  }
  out << "detected";
  for (const auto& v : report.versions) out << ",," << (v.error ? "error" : (v.detected ? "1" : "0"));
  out << '\n';
  return out.str();
}

}  // namespace isbst::analysis
