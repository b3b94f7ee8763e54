#include "isbst/lab/lab.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace isbst::lab {
namespace {

using analysis::kMeasureCount;

std::string run_file(int version, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "v%02d_s%llu.json", version, static_cast<unsigned long long>(seed));
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunRecord execute_run(const faults::StudySet& study, const LabPlan& plan, int version, std::uint64_t seed) {
  RunRecord r;
  r.version_id = version;
  r.seed = seed;
  try {
    session::SessionConfig cfg;
    cfg.version_id = version;
    cfg.de = plan.de;
    cfg.weights = plan.initial_weights;
    cfg.n_steps = plan.n_steps;
    cfg.max_events = plan.events;
    cfg.seed = seed;
    session::Session s(cfg, study);
    for (std::size_t e = 0; e < plan.events; ++e) {
      if (const auto it = plan.schedule.find(e); it != plan.schedule.end()) s.set_weights(it->second);
      s.run_segment();
    }
    r.counters = s.last_event().counters;
    r.final_population = *s.last_event().current;
    r.log = s.stop();
    r.log.events = {r.log.events.back()};
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

WeightSchedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "weight schedule must map event indices to weights");
  WeightSchedule s;
  for (const auto& [key, value] : j.items()) {
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
    if (ec != std::errc() || ptr != key.data() + key.size()) {
      throw Error(ErrorCode::kInvalidArgument, "schedule key '" + key + "' is not an event index");
    }
    s[index] = objectives::weights_from_json(value, objectives::ObjectiveWeights::zeros());
  }
  return s;
}

void LabPlan::validate(const faults::StudySet& study) const {
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "lab plan needs at least one seed");
  if (events == 0) throw Error(ErrorCode::kInvalidArgument, "lab plan needs at least one event");
  if (n_steps == 0) throw Error(ErrorCode::kInvalidArgument, "n_steps must be at least 1");
  if (seeds.size() < 3) throw Error(ErrorCode::kInvalidArgument, "detection needs at least 3 seeds");
  de.validate();
  for (const int v : versions) study.version(v);
}

bool LabResult::any_failed() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.error.has_value(); });
}

LabResult run_lab(const faults::StudySet& study, const LabPlan& plan) {
  plan.validate(study);
  LabResult result;
  result.plan = plan;

  std::vector<int> versions = plan.versions;
  if (versions.empty()) {
    for (const auto& v : study.versions) versions.push_back(v.version_id);
  }
  std::vector<int> columns;
  for (const int v : versions) {
    if (v != faults::kReferenceVersion) columns.push_back(v);
  }
  if (columns.empty()) columns.push_back(faults::kReferenceVersion);
  std::vector<int> executed{faults::kReferenceVersion};
  for (const int v : columns) {
    if (v != faults::kReferenceVersion) executed.push_back(v);
  }
  result.plan.versions = versions;

  const std::size_t n_seeds = plan.seeds.size();
  result.runs.resize(executed.size() * n_seeds);
  parallel_for(result.runs.size(), plan.threads, [&](std::size_t i) {
    result.runs[i] = execute_run(study, plan, executed[i / n_seeds], plan.seeds[i % n_seeds]);
  });

  // Reference model from every successful reference candidate.
  std::vector<fbd::TraceSet> ref_outputs;
  for (std::size_t i = 0; i < n_seeds; ++i) {
    const auto& r = result.runs[i];
    for (const auto& c : r.final_population) {
      if (!c.failed) ref_outputs.push_back(c.outputs);
    }
  }
  std::optional<analysis::ReferenceModel> model;
  std::string model_error;
  try {
    model = analysis::fit_reference_model(ref_outputs);
  } catch (const std::exception& e) {
    model_error = e.what();
  }

  result.measures.resize(result.runs.size());
  if (model) {
    parallel_for(result.runs.size(), plan.threads, [&](std::size_t i) {
      auto& r = result.runs[i];
      if (r.error) return;
      auto& m = result.measures[i];
      m.version_id = r.version_id;
      m.seed = r.seed;
      try {
        for (const auto& c : r.final_population) {
          if (!c.failed) m.candidates.push_back(analysis::measure_candidate(c.inputs, c.outputs, c.raw, *model));
        }
        if (m.candidates.empty()) r.error = "every candidate failed";
      } catch (const std::exception& e) {
        r.error = std::string("measuring failed: ") + e.what();
      }
    });
  }

  const auto runs_of = [&](int version, std::string& error) {
    std::vector<analysis::RunMeasures> out;
    const auto k = static_cast<std::size_t>(std::find(executed.begin(), executed.end(), version) - executed.begin());
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const auto& r = result.runs[k * n_seeds + s];
      if (r.error) {
        error = "seed " + std::to_string(r.seed) + ": " + *r.error;
        continue;
      }
      out.push_back(result.measures[k * n_seeds + s]);
    }
    return out;
  };

  result.report.options = plan.detect;
  std::string ref_error = model ? "" : "reference model: " + model_error;
  const auto reference = runs_of(faults::kReferenceVersion, ref_error);
  for (const int v : columns) {
    analysis::VersionDetection d;
    d.version_id = v;
    d.label = study.version(v).label;
    std::string error;
    const auto runs = runs_of(v, error);
    if (!ref_error.empty()) {
      d.error = "reference runs failed: " + ref_error;
    } else if (!error.empty()) {
      d.error = error;
    } else {
      try {
        d = analysis::detect(runs, reference, plan.detect);
        d.label = study.version(v).label;
      } catch (const std::exception& e) {
        d.error = e.what();
      }
    }
    result.report.versions.push_back(std::move(d));
  }
  return result;
}

nlohmann::json lab_summary(const LabResult& result) {
  auto j = analysis::to_json(result.report);
  const std::uint64_t iterations = result.plan.events * result.plan.n_steps;
  j["plan"] = {{"versions", result.plan.versions},
               {"events", result.plan.events},
               {"n_steps", result.plan.n_steps},
               {"seeds", result.plan.seeds},
               {"pop_size", result.plan.de.pop_size},
               {"initial_weights", objectives::to_json(result.plan.initial_weights)},
               {"iterations_per_run", iterations},
               {"evaluations_per_run", result.plan.de.pop_size * (iterations + 1)}};
  auto runs = nlohmann::json::array();
  for (const auto& r : result.runs) {
    nlohmann::json e{{"version_id", r.version_id},
                     {"seed", r.seed},
                     {"iterations", r.counters.iterations},
                     {"evaluations", r.counters.evaluations}};
    if (r.error) e["error"] = *r.error;
    runs.push_back(std::move(e));
  }
  j["runs"] = std::move(runs);
  return j;
}

void write_lab_outputs(const LabResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "runs", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  write_text(dir / "report.json", lab_summary(result).dump(2) + "\n");
  write_text(dir / "report.csv", analysis::to_csv(result.report));

  std::ostringstream runs;
  runs << "version_id,seed,iterations,evaluations,status\n";
  for (const auto& r : result.runs) {
    runs << r.version_id << ',' << r.seed << ',' << r.counters.iterations << ',' << r.counters.evaluations << ','
         << (r.error ? "failed" : "ok") << '\n';
  }
  write_text(dir / "runs.csv", runs.str());

  std::ostringstream cands;
  cands << "version_id,seed,candidate_id";
  for (const auto tag : analysis::measure_tags()) cands << ',' << tag;
  cands << '\n';
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& r = result.runs[i];
    if (r.error) continue;
    std::size_t k = 0;
    for (const auto& c : r.final_population) {
      if (c.failed) continue;
      cands << r.version_id << ',' << r.seed << ',' << c.id;
      for (const double v : result.measures[i].candidates[k]) cands << ',' << format_double(v);
      cands << '\n';
      ++k;
    }
  }
  write_text(dir / "candidates.csv", cands.str());

  for (const auto& r : result.runs) {
    nlohmann::json j = r.error ? nlohmann::json{{"version_id", r.version_id}, {"seed", r.seed}, {"error", *r.error}}
                               : session::to_json(r.log);
    write_text(dir / "runs" / run_file(r.version_id, r.seed), j.dump() + "\n");
  }
}

std::vector<int> parse_versions(const std::string& list, const faults::StudySet& study) {
  std::vector<int> out;
  if (list == "all") {
    for (const auto& v : study.versions) out.push_back(v.version_id);
    return out;
  }
  for (const auto s : parse_seeds(list)) {
    const int v = static_cast<int>(s);
    study.version(v);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> out;
  const auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad number '" + std::string(s) + "' in '" + list + "'");
    }
    return v;
  };
  std::string_view rest = list;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = number(item.substr(0, dots)), hi = number(item.substr(dots + 2));
      if (hi < lo || hi - lo > 100000) throw Error(ErrorCode::kInvalidArgument, "bad range '" + std::string(item) + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(number(item));
    }
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty list '" + list + "'");
  return out;
}

std::vector<EvalSlot> eval_layout(const faults::StudySet& study) {
  std::vector<int> ids{study.reference().version_id};
  for (const auto category : faults::kAllCategories) {
    for (const auto& v : study.versions) {
      if (v.mutation && v.mutation->category == category) {
        ids.push_back(v.version_id);
        break;
      }
    }
  }
  std::vector<EvalSlot> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int pos = static_cast<int>(i) + 1;
    out.push_back({pos, ids[i], std::to_string(pos) + "_v" + std::to_string(ids[i])});
  }
  return out;
}

session::ProtocolOptions eval_protocol_options(const std::vector<EvalSlot>& layout, const std::string& participant,
                                               const std::filesystem::path& dir) {
  session::ProtocolOptions o;
  std::map<int, std::string> labels;
  for (const auto& s : layout) {
    o.versions.push_back(s.version_id);
    labels[s.version_id] = s.label;
  }
  o.label_overrides = labels;
  const auto out = dir / participant;
  o.export_dir = out;
  o.on_stop = [labels, out](const std::string& session, const session::SessionLog& log) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    const auto it = labels.find(log.config.version_id);
    const std::string label = it != labels.end() ? it->second : "v" + std::to_string(log.config.version_id);
    session::save_log(log, out / (label + "_" + session + ".json"));
  };
  return o;
}

}  // namespace isbst::lab
