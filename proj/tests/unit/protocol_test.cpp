#include <gtest/gtest.h>

#include <condition_variable>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "isbst/session/protocol.hpp"
#include "isbst/session/server.hpp"
#include "test_util.hpp"

namespace isbst::session {
namespace {

using nlohmann::json;

json msg(const std::string& type, const std::string& session, std::int64_t seq, json payload = json::object()) {
  json m{{"type", type}, {"seq", seq}, {"payload", std::move(payload)}};
  m["session"] = session.empty() ? json(nullptr) : json(session);
  return m;
}

json small_start(int version = 1) {
  return {{"version_id", version}, {"seed", 2}, {"n_steps", 4}, {"de", {{"pop_size", 10}}}};
}

class ProtocolTest : public ::testing::Test {
 protected:
  SessionManager manager{testing::shipped_study()};
  ProtocolDispatcher dispatcher{manager};

  std::string start(int version = 1) {
    const auto r = dispatcher.handle(msg("start", "", 0, small_start(version)));
    EXPECT_TRUE(r.at("ok").get<bool>()) << r.dump();
    return r.at("session").get<std::string>();
  }
};

TEST_F(ProtocolTest, ListVersions) {
  const auto r = dispatcher.handle(msg("list_versions", "", 0));
  ASSERT_TRUE(r.at("ok").get<bool>());
  EXPECT_EQ(r.at("payload").at("versions").size(), 16u);
  EXPECT_EQ(r.at("payload").at("versions").at(0).at("version_id"), 1);
}

TEST_F(ProtocolTest, StartReturnsEventZero) {
  const auto r = dispatcher.handle(msg("start", "", 0, small_start()));
  ASSERT_TRUE(r.at("ok").get<bool>());
  const auto& e = r.at("payload").at("event");
  EXPECT_EQ(e.at("event"), 0);
  EXPECT_EQ(e.at("current").size(), 10u);
  EXPECT_EQ(e.at("objectives").size(), 7u);
}

TEST_F(ProtocolTest, SequenceMustIncrease) {
  const auto s = start();
  EXPECT_TRUE(dispatcher.handle(msg("status", s, 1)).at("ok").get<bool>());
  const auto stale = dispatcher.handle(msg("status", s, 1));
  EXPECT_FALSE(stale.at("ok").get<bool>());
  EXPECT_EQ(stale.at("error").at("code"), "stale_sequence");
  EXPECT_EQ(dispatcher.handle(msg("status", s, 0)).at("error").at("code"), "stale_sequence");
  EXPECT_TRUE(dispatcher.handle(msg("status", s, 7)).at("ok").get<bool>());
  EXPECT_EQ(dispatcher.handle(msg("status", s, -1)).at("error").at("code"), "invalid_argument");
}

TEST_F(ProtocolTest, SetWeightsIsEchoedInTheNextEvent) {
  const auto s = start();
  const auto w = dispatcher.handle(msg("set_weights", s, 1, {{"weights", {{"amplitude", 3.5}}}}));
  ASSERT_TRUE(w.at("ok").get<bool>()) << w.dump();
  EXPECT_EQ(w.at("payload").at("weights").at("amplitude"), 3.5);
  EXPECT_EQ(w.at("payload").at("weights").at("min.mean"), 1.0);
  const auto r = dispatcher.handle(msg("run_segment", s, 2, {{"wait", true}}));
  ASSERT_TRUE(r.at("ok").get<bool>()) << r.dump();
  EXPECT_EQ(r.at("payload").at("event").at("weights").at("amplitude"), 3.5);
  EXPECT_EQ(r.at("payload").at("event").at("event"), 1);

  const auto z = dispatcher.handle(msg("set_weights", s, 3, {{"weights", {{"max.decrease", 1}}}, {"replace", true}}));
  EXPECT_EQ(z.at("payload").at("weights").at("amplitude"), 0.0);
  EXPECT_EQ(dispatcher.handle(msg("set_weights", s, 4, {{"weights", {{"max.jerk", 1}}}})).at("error").at("code"),
            "unknown_objective");
}

TEST_F(ProtocolTest, RunSegmentPushesEvent) {
  const auto s = start();
  std::mutex mu;
  std::condition_variable cv;
  std::vector<json> pushed;
  dispatcher.on_push([&](const json& m) {
    std::lock_guard lock(mu);
    pushed.push_back(m);
    cv.notify_all();
  });
  const auto r = dispatcher.handle(msg("run_segment", s, 5));
  ASSERT_TRUE(r.at("ok").get<bool>());
  EXPECT_TRUE(r.at("payload").at("accepted").get<bool>());
  std::unique_lock lock(mu);
  ASSERT_TRUE(cv.wait_for(lock, std::chrono::seconds(30), [&] { return !pushed.empty(); }));
  EXPECT_EQ(pushed[0].at("type"), "event");
  EXPECT_EQ(pushed[0].at("session"), s);
  EXPECT_EQ(pushed[0].at("seq"), 5);
  EXPECT_EQ(pushed[0].at("payload").at("event"), 1);
}

TEST_F(ProtocolTest, CandidateDetailHasFiftyPointTraces) {
  const auto s = start();
  const auto ev = dispatcher.handle(msg("status", s, 1));
  const auto e0 = manager.last_event(s);
  const auto id = e0.at("current").at(0).at("id").get<std::uint64_t>();
  const auto d = dispatcher.handle(msg("candidate_detail", s, 2, {{"candidate", id}}));
  ASSERT_TRUE(d.at("ok").get<bool>()) << d.dump();
  for (const auto& t : d.at("payload").at("outputs")) EXPECT_EQ(t.at("samples").size(), 50u);
  EXPECT_EQ(dispatcher.handle(msg("candidate_detail", s, 3, {{"candidate", 424242}})).at("error").at("code"),
            "unknown_candidate");
}

TEST_F(ProtocolTest, ExportAndStop) {
  const auto s = start();
  const auto dir = std::filesystem::temp_directory_path() / "isbst_protocol_export";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto id = manager.last_event(s).at("current").at(1).at("id").get<std::uint64_t>();
  const auto x = dispatcher.handle(msg("export_candidate", s, 1, {{"candidate", id}, {"path", (dir / "c.csv").string()}}));
  ASSERT_TRUE(x.at("ok").get<bool>()) << x.dump();
  EXPECT_EQ(x.at("payload").at("rows"), 50);
  EXPECT_TRUE(std::filesystem::exists(dir / "c.csv"));
  const auto stop = dispatcher.handle(msg("stop", s, 2));
  ASSERT_TRUE(stop.at("ok").get<bool>());
  EXPECT_TRUE(stop.at("payload").at("log").at("stopped").get<bool>());
  EXPECT_EQ(dispatcher.handle(msg("run_segment", s, 3)).at("error").at("code"), "stopped");
  std::filesystem::remove_all(dir);
}

TEST_F(ProtocolTest, MalformedMessages) {
  EXPECT_EQ(dispatcher.handle(msg("status", "s404", 1)).at("error").at("code"), "unknown_session");
  const auto s = start();
  EXPECT_EQ(dispatcher.handle(msg("teleport", s, 1)).at("error").at("code"), "invalid_argument");
  EXPECT_EQ(dispatcher.handle(json::array()).at("ok"), false);
  EXPECT_EQ(dispatcher.handle(json{{"type", "status"}, {"session", s}}).at("ok"), false);
  EXPECT_EQ(dispatcher.handle(msg("start", "", 0, {{"version_id", 77}})).at("error").at("code"), "unknown_version");
  const auto text = json::parse(dispatcher.handle_text("{not json"));
  EXPECT_EQ(text.at("ok"), false);
}

TEST(ProtocolOptionsTest, BlindedLabelsAndRestrictedVersions) {
  SessionManager m(testing::shipped_study());
  ProtocolOptions o;
  o.versions = {1, 5};
  o.label_overrides = {{1, "1_v1"}, {5, "2_v5"}};
  std::vector<std::string> stopped;
  o.on_stop = [&](const std::string& s, const SessionLog&) { stopped.push_back(s); };
  ProtocolDispatcher d(m, o);
  const auto v = d.handle(msg("list_versions", "", 0)).at("payload").at("versions");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.at(1).at("label"), "2_v5");
  EXPECT_EQ(d.handle(msg("start", "", 0, small_start(2))).at("error").at("code"), "unknown_version");
  const auto s = d.handle(msg("start", "", 0, small_start(5))).at("session").get<std::string>();
  d.handle(msg("stop", s, 1));
  EXPECT_EQ(stopped, std::vector<std::string>{s});
}

TEST(ServerTest, HttpRoundTripAndEventStream) {
  SessionManager m(testing::shipped_study());
  Server server(m);
  const int port = server.bind_any("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.serve_bound(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);
  auto health = cli.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);

  auto r = cli.Post("/api", msg("start", "", 0, small_start()).dump(), "application/json");
  ASSERT_TRUE(r);
  const auto started = json::parse(r->body);
  ASSERT_TRUE(started.at("ok").get<bool>());
  const auto s = started.at("session").get<std::string>();

  std::string stream;
  std::atomic<bool> got_event{false};
  std::thread listener([&] {
    httplib::Client sse("127.0.0.1", port);
    sse.set_read_timeout(30, 0);
    sse.Get("/events?session=" + s, [&](const char* data, std::size_t n) {
      stream.append(data, n);
      if (stream.find("\"type\":\"event\"") != std::string::npos) {
        got_event = true;
        return false;
      }
      return true;
    });
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  r = cli.Post("/api", msg("run_segment", s, 1).dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_TRUE(json::parse(r->body).at("ok").get<bool>());
  listener.join();
  EXPECT_TRUE(got_event.load());
  EXPECT_NE(stream.find("data: "), std::string::npos);

  server.stop();
  t.join();
}

}  // namespace
}  // namespace isbst::session
