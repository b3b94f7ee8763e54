#include "isbst/session/session.hpp"

#include <ctime>
#include <fstream>

namespace isbst::session {

namespace obj = objectives;

void SessionConfig::validate() const {
  if (n_steps < 1) throw Error(ErrorCode::kInvalidArgument, "n_steps must be at least 1");
  de.validate();
}

nlohmann::json to_json(const SessionConfig& c) {
  return {{"version_id", c.version_id},
          {"de",
           {{"f", c.de.f},
            {"cr", c.de.cr},
            {"pop_size", c.de.pop_size},
            {"control_points", c.de.layout.control_points},
            {"trace_length", c.de.layout.trace_length}}},
          {"weights", obj::to_json(c.weights)},
          {"n_steps", c.n_steps},
          {"max_events", c.max_events},
          {"freeze_bounds", c.freeze_bounds},
          {"seed", c.seed}};
}

SessionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "session config must be an object");
  SessionConfig c;
  try {
    c.version_id = j.value("version_id", c.version_id);
    if (j.contains("de")) {
      const auto& d = j.at("de");
      c.de.f = d.value("f", c.de.f);
      c.de.cr = d.value("cr", c.de.cr);
      c.de.pop_size = d.value("pop_size", c.de.pop_size);
      c.de.layout.control_points = d.value("control_points", c.de.layout.control_points);
      c.de.layout.trace_length = d.value("trace_length", c.de.layout.trace_length);
    }
    if (j.contains("weights")) c.weights = obj::weights_from_json(j.at("weights"), c.weights);
    c.n_steps = j.value("n_steps", c.n_steps);
    c.max_events = j.value("max_events", c.max_events);
    c.freeze_bounds = j.value("freeze_bounds", c.freeze_bounds);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed session config: ") + e.what());
  }
  c.de.seed = c.seed;
  c.validate();
  return c;
}

namespace {

nlohmann::json candidates_json(const search::Population& pop, const obj::NormalizationBounds& bounds,
                               const obj::ObjectiveWeights& w) {
  auto arr = nlohmann::json::array();
  for (const auto& c : pop) {
    const auto ratios = obj::oriented_ratios(c.raw, bounds);
    arr.push_back({{"id", c.id},
                   {"generation", c.generation},
                   {"failed", c.failed},
                   {"dff", c.failed ? 0.0 : obj::dff(ratios, w)},
                   {"raw", c.raw},
                   {"ratios", ratios},
                   {"genome", c.genome}});
  }
  return arr;
}

}  // namespace

nlohmann::json to_json(const InteractionEvent& e, int version_id) {
  auto tags = nlohmann::json::array();
  for (const auto& d : obj::registry()) tags.push_back(d.tag);
  return {{"event", e.index},
          {"version_id", version_id},
          {"objectives", std::move(tags)},
          {"weights", obj::to_json(e.weights)},
          {"bounds", obj::to_json(e.bounds)},
          {"counters", {{"iterations", e.counters.iterations}, {"evaluations", e.counters.evaluations}}},
          {"current", candidates_json(*e.current, e.bounds, e.weights)},
          {"previous", e.previous ? candidates_json(*e.previous, e.bounds, e.weights) : nlohmann::json::array()}};
}

nlohmann::json to_json(const SessionLog& log) {
  auto changes = nlohmann::json::array();
  for (const auto& w : log.weight_changes) {
    changes.push_back({{"event_index", w.event_index}, {"weights", obj::to_json(w.weights)}, {"timestamp", w.timestamp}});
  }
  return {{"config", to_json(log.config)},
          {"weight_changes", std::move(changes)},
          {"events", log.events},
          {"counters", {{"iterations", log.counters.iterations}, {"evaluations", log.counters.evaluations}}},
          {"stopped", log.stopped}};
}

SessionLog log_from_json(const nlohmann::json& j) {
  try {
    SessionLog log;
    log.config = config_from_json(j.at("config"));
    for (const auto& w : j.at("weight_changes")) {
      log.weight_changes.push_back({w.at("event_index").get<std::size_t>(),
                                    obj::weights_from_json(w.at("weights"), obj::ObjectiveWeights::zeros()),
                                    w.value("timestamp", "")});
    }
    for (const auto& e : j.at("events")) log.events.push_back(e);
    log.counters.iterations = j.at("counters").at("iterations").get<std::uint64_t>();
    log.counters.evaluations = j.at("counters").at("evaluations").get<std::uint64_t>();
    log.stopped = j.value("stopped", false);
    return log;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed session log: ") + e.what());
  }
}

void save_log(const SessionLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json(log).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

SessionLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  try {
    return log_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, "malformed log " + path.string() + ": " + e.what());
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%03dZ", static_cast<int>(ms));
  return buf;
}

namespace {

search::DeParams params_for(const SessionConfig& c) {
  c.validate();
  auto p = c.de;
  p.seed = c.seed;
  return p;
}

}  // namespace

Session::Session(const SessionConfig& config, const faults::StudySet& study)
    : config_(config),
      params_(params_for(config)),
      sut_(study.version(config.version_id).diagram, params_.layout),
      state_(search::init_search(params_, sut_, config.weights)),
      weights_(config.weights) {
  config_.de.seed = config_.seed;
  if (config_.freeze_bounds) state_.bounds.freeze();
  log_.config = config_;
  emit();
}

bool Session::exhausted() const noexcept { return config_.max_events != 0 && event_.index >= config_.max_events; }

void Session::emit() {
  InteractionEvent next;
  next.index = log_.events.empty() ? 0 : event_.index + 1;
  next.previous = event_.current;
  next.current = std::make_shared<const search::Population>(state_.population);
  next.bounds = state_.bounds;
  next.counters = state_.counters;
  next.weights = weights_;
  event_ = std::move(next);
  log_.events.push_back(to_json(event_, config_.version_id));
  log_.counters = state_.counters;
}

void Session::set_weights(const obj::ObjectiveWeights& w) {
  if (stopped()) throw Error(ErrorCode::kStopped, "session is stopped");
  weights_ = w;
  log_.weight_changes.push_back({event_.index, w, utc_timestamp()});
}

const InteractionEvent& Session::run_segment() {
  if (stopped()) throw Error(ErrorCode::kStopped, "session is stopped");
  if (exhausted()) throw Error(ErrorCode::kStopped, "session reached its event budget");
  for (std::size_t i = 0; i < config_.n_steps; ++i) search::step(state_, weights_, sut_, params_);
  emit();
  return event_;
}

const search::Candidate& Session::candidate(std::uint64_t id) const {
  for (const auto* snap : {event_.current.get(), event_.previous.get()}) {
    if (!snap) continue;
    for (const auto& c : *snap) {
      if (c.id == id) return c;
    }
  }
  throw Error(ErrorCode::kUnknownCandidate, "candidate " + std::to_string(id) + " is not in the visible snapshots");
}

ExportedTestCase Session::export_candidate(std::uint64_t id, const std::filesystem::path& csv_path) const {
  const auto& c = candidate(id);
  ExportedTestCase tc{config_.version_id, config_.seed, event_.index, c.id, c.inputs, c.outputs, c.raw, config_};
  write_test_case(tc, csv_path);
  return tc;
}

const SessionLog& Session::stop() {
  log_.stopped = true;
  return log_;
}

std::unique_ptr<Session> replay(const SessionLog& log, const faults::StudySet& study) {
  auto s = std::make_unique<Session>(log.config, study);
  std::size_t next_change = 0;
  const auto apply_changes = [&](std::size_t at) {
    while (next_change < log.weight_changes.size() && log.weight_changes[next_change].event_index == at) {
      s->set_weights(log.weight_changes[next_change].weights);
      ++next_change;
    }
  };
  // The last payload's index counts the segments, so logs trimmed to their
  // final event replay too.
  const std::size_t segments = log.events.empty() ? 0 : log.events.back().at("event").get<std::size_t>();
  for (std::size_t k = 0; k < segments; ++k) {
    apply_changes(k);
    s->run_segment();
  }
  apply_changes(segments);
  return s;
}

// ---------------------------------------------------------------------------

struct SessionManager::Entry {
  std::mutex mu;  // guards session
  std::unique_ptr<Session> session;
  std::atomic<bool> busy{false};
  std::shared_future<nlohmann::json> inflight;
  std::optional<SessionLog> final_log;

  mutable std::mutex status_mu;  // guards the fields below
  nlohmann::json status;
};

SessionManager::SessionManager(std::shared_ptr<const faults::StudySet> study) : study_(std::move(study)) {}

SessionManager::~SessionManager() {
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, e] : sessions_) all.push_back(e);
  }
  for (auto& e : all) {
    if (e->inflight.valid()) e->inflight.wait();
  }
}

namespace {

nlohmann::json status_of(const std::string& id, const Session& s, std::string_view state) {
  const auto& e = s.last_event();
  return {{"session", id},
          {"version_id", s.config().version_id},
          {"state", state},
          {"event", e.index},
          {"counters", {{"iterations", e.counters.iterations}, {"evaluations", e.counters.evaluations}}},
          {"weights", obj::to_json(s.weights())}};
}

}  // namespace

std::shared_ptr<SessionManager::Entry> SessionManager::entry(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "no session '" + id + "'");
  return it->second;
}

std::string SessionManager::start(const SessionConfig& config) {
  auto e = std::make_shared<Entry>();
  e->session = std::make_unique<Session>(config, *study_);
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_id_++);
    e->status = status_of(id, *e->session, "paused");
    sessions_.emplace(id, e);
  }
  return id;
}

void SessionManager::set_weights(const std::string& id, const obj::ObjectiveWeights& w) {
  auto e = entry(id);
  if (e->busy) throw Error(ErrorCode::kBusy, "session '" + id + "' is running a segment");
  std::lock_guard lock(e->mu);
  e->session->set_weights(w);
  std::lock_guard sl(e->status_mu);
  e->status["weights"] = obj::to_json(w);
}

std::shared_future<nlohmann::json> SessionManager::run_segment(const std::string& id) {
  auto e = entry(id);
  bool expected = false;
  if (!e->busy.compare_exchange_strong(expected, true)) {
    throw Error(ErrorCode::kBusy, "session '" + id + "' is running a segment");
  }
  {
    std::lock_guard lock(e->mu);
    if (e->session->stopped() || e->session->exhausted()) {
      e->busy = false;
      throw Error(ErrorCode::kStopped, e->session->stopped() ? "session is stopped" : "session reached its event budget");
    }
    std::lock_guard sl(e->status_mu);
    e->status["state"] = "running";
  }
  auto fut = std::async(std::launch::async, [this, e, id]() -> nlohmann::json {
    nlohmann::json payload;
    try {
      std::lock_guard lock(e->mu);
      const auto& ev = e->session->run_segment();
      payload = to_json(ev, e->session->config().version_id);
      std::lock_guard sl(e->status_mu);
      e->status = status_of(id, *e->session, "paused");
    } catch (...) {
      {
        std::lock_guard sl(e->status_mu);
        e->status["state"] = "paused";
      }
      e->busy = false;
      throw;
    }
    notify(id, payload);
    e->busy = false;
    return payload;
  });
  std::shared_future<nlohmann::json> shared = fut.share();
  e->inflight = shared;
  return shared;
}

nlohmann::json SessionManager::last_event(const std::string& id) const {
  auto e = entry(id);
  if (e->busy) throw Error(ErrorCode::kBusy, "session '" + id + "' is running a segment");
  std::lock_guard lock(e->mu);
  return to_json(e->session->last_event(), e->session->config().version_id);
}

nlohmann::json SessionManager::candidate_detail(const std::string& id, std::uint64_t candidate) const {
  auto e = entry(id);
  if (e->busy) throw Error(ErrorCode::kBusy, "session '" + id + "' is running a segment");
  std::lock_guard lock(e->mu);
  const auto& c = e->session->candidate(candidate);
  const auto trace_json = [](const fbd::TraceSet& ts) {
    auto arr = nlohmann::json::array();
    for (const auto& t : ts) {
      arr.push_back({{"channel", t.channel}, {"kind", to_string(t.kind)}, {"samples", t.samples}});
    }
    return arr;
  };
  return {{"id", c.id},       {"generation", c.generation},     {"failed", c.failed}, {"raw", c.raw},
          {"genome", c.genome}, {"inputs", trace_json(c.inputs)}, {"outputs", trace_json(c.outputs)}};
}

nlohmann::json SessionManager::export_candidate(const std::string& id, std::uint64_t candidate,
                                                const std::filesystem::path& path) const {
  auto e = entry(id);
  if (e->busy) throw Error(ErrorCode::kBusy, "session '" + id + "' is running a segment");
  std::lock_guard lock(e->mu);
  const auto tc = e->session->export_candidate(candidate, path);
  return {{"csv", path.string()}, {"sidecar", sidecar_path(path).string()}, {"rows", tc.inputs.front().length()}};
}

SessionLog SessionManager::stop(const std::string& id) {
  auto e = entry(id);
  if (e->inflight.valid()) e->inflight.wait();
  std::lock_guard lock(e->mu);
  if (!e->final_log) {
    e->final_log = e->session->stop();
    std::lock_guard sl(e->status_mu);
    e->status["state"] = "stopped";
  }
  return *e->final_log;
}

nlohmann::json SessionManager::status(const std::string& id) const {
  auto e = entry(id);
  std::lock_guard sl(e->status_mu);
  return e->status;
}

bool SessionManager::running(const std::string& id) const { return entry(id)->busy; }

void SessionManager::add_listener(Listener l) {
  std::lock_guard lock(listeners_mu_);
  listeners_.push_back(std::move(l));
}

void SessionManager::notify(const std::string& id, const nlohmann::json& event) {
  std::vector<Listener> copy;
  {
    std::lock_guard lock(listeners_mu_);
    copy = listeners_;
  }
  for (const auto& l : copy) l(id, event);
}

}  // namespace isbst::session
