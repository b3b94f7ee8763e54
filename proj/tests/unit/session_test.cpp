#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "isbst/session/session.hpp"
#include "test_util.hpp"

namespace isbst::session {
namespace {

namespace obj = objectives;
namespace fs = std::filesystem;

SessionConfig small_config(int version = 1, std::uint64_t seed = 3) {
  SessionConfig c;
  c.version_id = version;
  c.seed = seed;
  c.de.pop_size = 12;
  c.n_steps = 5;
  return c;
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("isbst_session_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(Session, EventZeroIsDeterministic) {
  const auto study = testing::shipped_study();
  Session a(small_config(), *study), b(small_config(), *study);
  EXPECT_EQ(a.log().events.at(0).dump(), b.log().events.at(0).dump());
  EXPECT_EQ(a.last_event().index, 0u);
  EXPECT_EQ(a.last_event().previous, nullptr);
  EXPECT_EQ(a.last_event().counters.evaluations, 12u);
  Session c(small_config(1, 4), *study);
  EXPECT_NE(a.log().events.at(0).dump(), c.log().events.at(0).dump());
}

TEST(Session, SegmentsAdvanceCountersAndKeepPrevious) {
  const auto study = testing::shipped_study();
  Session s(small_config(), *study);
  const auto before = s.last_event().current;
  const auto& e = s.run_segment();
  EXPECT_EQ(e.index, 1u);
  EXPECT_EQ(e.previous, before);
  EXPECT_EQ(e.counters.iterations, 5u);
  EXPECT_EQ(e.counters.evaluations, 12u * 6);
  EXPECT_EQ(e.current->size(), 12u);
  EXPECT_EQ(s.log().events.size(), 2u);
}

TEST(Session, WeightsTakeEffectOnTheNextSegment) {
  const auto study = testing::shipped_study();
  Session s(small_config(), *study);
  const auto w = obj::ObjectiveWeights::only(obj::Objective::Amplitude);
  s.set_weights(w);
  EXPECT_EQ(s.last_event().weights, obj::ObjectiveWeights{});
  EXPECT_EQ(s.run_segment().weights, w);
  ASSERT_EQ(s.log().weight_changes.size(), 1u);
  EXPECT_EQ(s.log().weight_changes[0].event_index, 0u);
  EXPECT_FALSE(s.log().weight_changes[0].timestamp.empty());
  const auto& j = s.log().events.back();
  EXPECT_EQ(j.at("weights").at("amplitude"), 1.0);
  EXPECT_EQ(j.at("weights").at("min.mean"), 0.0);
}

TEST(Session, CandidateScope) {
  const auto study = testing::shipped_study();
  Session s(small_config(), *study);
  const auto first_id = s.last_event().current->front().id;
  s.run_segment();
  EXPECT_NO_THROW(s.candidate(first_id));
  EXPECT_NO_THROW(s.candidate(s.last_event().current->back().id));
  s.run_segment();
  bool still_current = false;
  for (const auto& c : *s.last_event().current) still_current |= c.id == first_id;
  for (const auto& c : *s.last_event().previous) still_current |= c.id == first_id;
  if (!still_current) {
    try {
      s.candidate(first_id);
      ADD_FAILURE() << "expected unknown candidate";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kUnknownCandidate);
    }
  }
  EXPECT_THROW(s.candidate(999999), Error);
}

TEST(Session, ExportRoundTrip) {
  const auto study = testing::shipped_study();
  Session s(small_config(), *study);
  s.run_segment();
  const auto& c = s.last_event().current->at(3);
  const auto dir = temp_dir("export");
  const auto path = dir / "case.csv";
  s.export_candidate(c.id, path);
  std::ifstream in(path);
  std::size_t lines = 0;
  std::string line, header;
  std::getline(in, header);
  ++lines;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 51u);
  EXPECT_EQ(header, "Input_0,Input_1,Input_2,Input_3,Input_4,Input_5,Input_6,Output_7,Output_8,Output_9");
  EXPECT_TRUE(fs::exists(sidecar_path(path)));

  const auto tc = read_test_case(path);
  EXPECT_EQ(tc.candidate_id, c.id);
  EXPECT_EQ(tc.inputs, c.inputs);
  EXPECT_EQ(tc.outputs, c.outputs);
  EXPECT_EQ(tc.raw, c.raw);
  EXPECT_EQ(tc.version_id, 1);
  EXPECT_EQ(tc.event_index, 1u);
  // The exported inputs reproduce the outputs on the version they came from.
  EXPECT_EQ(fbd::execute(study->version(tc.version_id).diagram, tc.inputs), tc.outputs);
  fs::remove_all(dir);
}

TEST(Session, StopIsIdempotentAndFinal) {
  const auto study = testing::shipped_study();
  Session s(small_config(), *study);
  s.run_segment();
  const auto a = to_json(s.stop()).dump();
  EXPECT_EQ(to_json(s.stop()).dump(), a);
  EXPECT_TRUE(s.stopped());
  EXPECT_THROW(s.run_segment(), Error);
  EXPECT_THROW(s.set_weights(obj::ObjectiveWeights{}), Error);
}

TEST(Session, EventBudget) {
  auto c = small_config();
  c.max_events = 2;
  Session s(c, *testing::shipped_study());
  s.run_segment();
  s.run_segment();
  EXPECT_TRUE(s.exhausted());
  EXPECT_THROW(s.run_segment(), Error);
}

TEST(Session, ReplayReproducesEveryEvent) {
  const auto study = testing::shipped_study();
  Session s(small_config(5, 8), *study);
  s.run_segment();
  s.set_weights(obj::ObjectiveWeights::only(obj::Objective::MaxDecrease));
  s.run_segment();
  s.set_weights(obj::ObjectiveWeights::only(obj::Objective::MinimumMin));
  s.set_weights(obj::ObjectiveWeights::only(obj::Objective::MaximumMax, 2));
  s.run_segment();
  const auto log = s.stop();

  const auto dir = temp_dir("replay");
  save_log(log, dir / "log.json");
  const auto loaded = load_log(dir / "log.json");
  const auto r = replay(loaded, *study);
  ASSERT_EQ(r->log().events.size(), log.events.size());
  for (std::size_t k = 0; k < log.events.size(); ++k) EXPECT_EQ(r->log().events[k].dump(), log.events[k].dump()) << k;
  EXPECT_EQ(r->weights(), s.weights());
  fs::remove_all(dir);
}

TEST(Session, ConfigJsonRoundTripAndValidation) {
  auto c = small_config(7, 11);
  c.freeze_bounds = true;
  c.max_events = 4;
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_THROW(config_from_json(nlohmann::json{{"n_steps", 0}}), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"de", {{"pop_size", 2}}}}), Error);
  EXPECT_THROW(Session(small_config(99), *testing::shipped_study()), Error);
}

TEST(SessionManager, SessionsAreIsolated) {
  SessionManager m(testing::shipped_study());
  const auto a = m.start(small_config());
  const auto b = m.start(small_config());
  EXPECT_NE(a, b);
  EXPECT_EQ(m.last_event(a).dump(), m.last_event(b).dump());
  m.set_weights(a, obj::ObjectiveWeights::zeros());
  m.run_segment(a).get();
  EXPECT_EQ(m.status(a).at("event"), 1);
  EXPECT_EQ(m.status(b).at("event"), 0);
  EXPECT_EQ(m.status(b).at("weights").at("amplitude"), 1.0);
  EXPECT_THROW(m.status("nope"), Error);
}

TEST(SessionManager, BusyWhileRunning) {
  SessionManager m(testing::shipped_study());
  auto c = small_config();
  c.n_steps = 400;
  c.de.pop_size = 50;
  const auto id = m.start(c);
  std::atomic<int> notified{0};
  m.add_listener([&](const std::string& s, const nlohmann::json& e) {
    if (s == id && e.at("event") == 1) ++notified;
  });
  auto fut = m.run_segment(id);
  bool saw_busy = false;
  while (fut.wait_for(std::chrono::milliseconds(0)) != std::future_status::ready) {
    try {
      m.set_weights(id, obj::ObjectiveWeights::zeros());
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBusy);
      saw_busy = true;
      EXPECT_EQ(m.status(id).at("state"), "running");
      break;
    }
    std::this_thread::yield();
  }
  EXPECT_EQ(fut.get().at("event"), 1);
  EXPECT_EQ(notified.load(), 1);
  EXPECT_NO_THROW(m.set_weights(id, obj::ObjectiveWeights::zeros()));
  if (!saw_busy) GTEST_SKIP() << "segment finished before a mutating call landed";
}

TEST(SessionManager, StopWaitsAndCachesLog) {
  SessionManager m(testing::shipped_study());
  const auto id = m.start(small_config());
  m.run_segment(id);
  const auto log = m.stop(id);
  EXPECT_TRUE(log.stopped);
  EXPECT_EQ(log.events.size(), 2u);
  EXPECT_EQ(to_json(m.stop(id)).dump(), to_json(log).dump());
  EXPECT_EQ(m.status(id).at("state"), "stopped");
  EXPECT_THROW(m.set_weights(id, obj::ObjectiveWeights{}), Error);
  EXPECT_THROW(m.stop("s999"), Error);
}

TEST(SessionManager, CandidateDetailCarriesTraces) {
  SessionManager m(testing::shipped_study());
  const auto id = m.start(small_config());
  const auto ev = m.last_event(id);
  const auto cid = ev.at("current").at(0).at("id").get<std::uint64_t>();
  const auto d = m.candidate_detail(id, cid);
  EXPECT_EQ(d.at("inputs").size(), 7u);
  EXPECT_EQ(d.at("outputs").size(), 3u);
  EXPECT_EQ(d.at("outputs").at(2).at("channel"), 9);
  EXPECT_EQ(d.at("outputs").at(2).at("samples").size(), 50u);
}

}  // namespace
}  // namespace isbst::session
