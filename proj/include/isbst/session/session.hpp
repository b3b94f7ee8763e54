#pragma once
// The outer cycle: a paused search that advances n_steps generations per
// interaction event and takes weight changes only while paused.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isbst/faults/study_set.hpp"
#include "isbst/objectives/objectives.hpp"
#include "isbst/search/de.hpp"

namespace isbst::session {

struct SessionConfig {
  int version_id = faults::kReferenceVersion;
  search::DeParams de;  // de.seed is overwritten by `seed`
  objectives::ObjectiveWeights weights;
  std::size_t n_steps = 50;
  std::size_t max_events = 0;  // run_segment calls allowed; 0 = unlimited
  bool freeze_bounds = false;
  std::uint64_t seed = 1;

  void validate() const;  // throws kInvalidArgument
};

nlohmann::json to_json(const SessionConfig& c);
// Missing fields keep their defaults.
SessionConfig config_from_json(const nlohmann::json& j);

using Snapshot = std::shared_ptr<const search::Population>;

struct InteractionEvent {
  std::size_t index = 0;
  Snapshot current;
  Snapshot previous;  // null at event 0
  objectives::NormalizationBounds bounds;
  search::SearchCounters counters;
  objectives::ObjectiveWeights weights;  // weights the segment ran with
};

// Wire payload: candidates carry id, genome, raw scores, ratios and DFF
// under the event's bounds, but no traces.
nlohmann::json to_json(const InteractionEvent& e, int version_id);

struct WeightChange {
  std::size_t event_index = 0;  // applied while paused at this event
  objectives::ObjectiveWeights weights;
  std::string timestamp;
};

struct SessionLog {
  SessionConfig config;
  std::vector<WeightChange> weight_changes;
  std::vector<nlohmann::json> events;  // wire payloads, in order
  search::SearchCounters counters;
  bool stopped = false;
};

nlohmann::json to_json(const SessionLog& log);
SessionLog log_from_json(const nlohmann::json& j);
void save_log(const SessionLog& log, const std::filesystem::path& path);
SessionLog load_log(const std::filesystem::path& path);

struct ExportedTestCase {
  int version_id = 0;
  std::uint64_t seed = 0;
  std::size_t event_index = 0;
  std::uint64_t candidate_id = 0;
  fbd::TraceSet inputs;
  fbd::TraceSet outputs;
  objectives::ScoreVector raw{};
  SessionConfig config;
};

// `csv_path` gets one row per tick (Input_0..Input_6, Output_7..Output_9);
// the metadata sidecar sits next to it with a .json extension.
void write_test_case(const ExportedTestCase& tc, const std::filesystem::path& csv_path);
ExportedTestCase read_test_case(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);
std::string traces_to_csv(const fbd::TraceSet& inputs, const fbd::TraceSet& outputs);

std::string utc_timestamp();

// Single-threaded session core.
class Session {
 public:
  // Initializes and evaluates the population: event 0. Throws kUnknownVersion.
  Session(const SessionConfig& config, const faults::StudySet& study);

  const SessionConfig& config() const noexcept { return config_; }
  const InteractionEvent& last_event() const noexcept { return event_; }
  const objectives::ObjectiveWeights& weights() const noexcept { return weights_; }
  bool stopped() const noexcept { return log_.stopped; }
  bool exhausted() const noexcept;

  void set_weights(const objectives::ObjectiveWeights& w);  // throws kStopped
  const InteractionEvent& run_segment();                    // throws kStopped

  // Candidates of the current or previous snapshot; throws kUnknownCandidate.
  const search::Candidate& candidate(std::uint64_t id) const;
  ExportedTestCase export_candidate(std::uint64_t id, const std::filesystem::path& csv_path) const;

  // Idempotent.
  const SessionLog& stop();
  const SessionLog& log() const noexcept { return log_; }

 private:
  void emit();

  SessionConfig config_;
  search::DeParams params_;
  search::Evaluator sut_;
  search::SearchState state_;
  objectives::ObjectiveWeights weights_;
  InteractionEvent event_;
  SessionLog log_;
};

// Runs the log's weight schedule against a fresh session; the returned
// session is paused at the log's last event.
std::unique_ptr<Session> replay(const SessionLog& log, const faults::StudySet& study);

// Thread-safe registry of isolated sessions. run_segment executes on a
// worker thread; mutating commands on a running session fail with kBusy
// while status stays readable.
class SessionManager {
 public:
  using Listener = std::function<void(const std::string& session_id, const nlohmann::json& event)>;

  explicit SessionManager(std::shared_ptr<const faults::StudySet> study);
  ~SessionManager();

  const faults::StudySet& study() const noexcept { return *study_; }

  // Returns the session id; event 0 is available from last_event.
  std::string start(const SessionConfig& config);
  void set_weights(const std::string& id, const objectives::ObjectiveWeights& w);
  // The future yields the event payload or rethrows the segment's error.
  // Listeners are called from the worker before the future becomes ready.
  std::shared_future<nlohmann::json> run_segment(const std::string& id);
  nlohmann::json last_event(const std::string& id) const;
  nlohmann::json candidate_detail(const std::string& id, std::uint64_t candidate) const;
  nlohmann::json export_candidate(const std::string& id, std::uint64_t candidate, const std::filesystem::path& path) const;
  // Waits for an in-flight segment, then stops. Unknown ids fail with
  // kUnknownSession; stopping twice returns the same log.
  SessionLog stop(const std::string& id);
  nlohmann::json status(const std::string& id) const;
  bool running(const std::string& id) const;

  void add_listener(Listener l);

 private:
  struct Entry;
  std::shared_ptr<Entry> entry(const std::string& id) const;
  void notify(const std::string& id, const nlohmann::json& event);

  std::shared_ptr<const faults::StudySet> study_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
  std::mutex listeners_mu_;
  std::vector<Listener> listeners_;
};

}  // namespace isbst::session
