#include "isbst/session/protocol.hpp"

#include <algorithm>

namespace isbst::session {

namespace obj = objectives;

ProtocolDispatcher::ProtocolDispatcher(SessionManager& manager, ProtocolOptions options)
    : manager_(manager), options_(std::move(options)) {
  manager_.add_listener([this](const std::string& id, const nlohmann::json& event) {
    std::uint64_t seq = 0;
    {
      std::lock_guard lock(mu_);
      if (const auto it = pending_seq_.find(id); it != pending_seq_.end()) seq = it->second;
    }
    const nlohmann::json msg{{"type", "event"}, {"session", id}, {"seq", seq}, {"payload", event}};
    std::vector<Push> copy;
    {
      std::lock_guard lock(push_mu_);
      copy = pushes_;
    }
    for (const auto& p : copy) p(msg);
  });
}

void ProtocolDispatcher::on_push(Push push) {
  std::lock_guard lock(push_mu_);
  pushes_.push_back(std::move(push));
}

void ProtocolDispatcher::check_seq(const std::string& session, std::uint64_t seq) {
  std::lock_guard lock(mu_);
  auto& last = last_seq_[session];
  if (seq <= last) {
    throw Error(ErrorCode::kStaleSequence,
                "seq " + std::to_string(seq) + " is not after " + std::to_string(last) + " for session " + session);
  }
  last = seq;
}

nlohmann::json ProtocolDispatcher::dispatch(const std::string& type, const std::string& session, std::uint64_t seq,
                                            const nlohmann::json& payload, std::string& session_out) {
  if (type == "list_versions") {
    auto arr = nlohmann::json::array();
    for (const auto& v : manager_.study().versions) {
      if (!options_.versions.empty() &&
          std::find(options_.versions.begin(), options_.versions.end(), v.version_id) == options_.versions.end()) {
        continue;
      }
      const auto it = options_.label_overrides.find(v.version_id);
      arr.push_back({{"version_id", v.version_id}, {"label", it != options_.label_overrides.end() ? it->second : v.label}});
    }
    return {{"versions", std::move(arr)}};
  }
  if (type == "start") {
    auto config = config_from_json(payload.is_null() ? nlohmann::json::object() : payload);
    if (!options_.versions.empty() &&
        std::find(options_.versions.begin(), options_.versions.end(), config.version_id) == options_.versions.end()) {
      throw Error(ErrorCode::kUnknownVersion, "version " + std::to_string(config.version_id) + " is not offered");
    }
    session_out = manager_.start(config);
    {
      std::lock_guard lock(mu_);
      last_seq_[session_out] = seq;
    }
    return {{"event", manager_.last_event(session_out)}};
  }

  if (session.empty()) throw Error(ErrorCode::kUnknownSession, "message needs a session id");
  manager_.status(session);  // existence check before consuming seq
  check_seq(session, seq);

  if (type == "status") return manager_.status(session);
  if (type == "set_weights") {
    const auto& w = payload.contains("weights") ? payload.at("weights") : payload;
    const auto base = payload.value("replace", false) ? obj::ObjectiveWeights::zeros()
                                                      : obj::weights_from_json(manager_.status(session).at("weights"));
    const auto weights = obj::weights_from_json(w, base);
    manager_.set_weights(session, weights);
    return {{"weights", obj::to_json(weights)}};
  }
  if (type == "run_segment") {
    {
      std::lock_guard lock(mu_);
      pending_seq_[session] = seq;
    }
    auto fut = manager_.run_segment(session);
    if (payload.is_object() && payload.value("wait", false)) return {{"event", fut.get()}};
    return {{"accepted", true}};
  }
  if (type == "candidate_detail") return manager_.candidate_detail(session, payload.at("candidate").get<std::uint64_t>());
  if (type == "export_candidate") {
    std::filesystem::path path = payload.value("path", "");
    const auto id = payload.at("candidate").get<std::uint64_t>();
    if (path.empty()) path = session + "_c" + std::to_string(id) + ".csv";
    if (path.is_relative()) path = options_.export_dir / path;
    return manager_.export_candidate(session, id, path);
  }
  if (type == "stop") {
    const auto log = manager_.stop(session);
    if (options_.on_stop) options_.on_stop(session, log);
    return {{"log", to_json(log)}};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown message type '" + type + "'");
}

nlohmann::json ProtocolDispatcher::handle(const nlohmann::json& request) {
  std::string type = "error";
  std::string session;
  std::uint64_t seq = 0;
  nlohmann::json response;
  try {
    if (!request.is_object()) throw Error(ErrorCode::kInvalidArgument, "message must be a JSON object");
    type = request.at("type").get<std::string>();
    if (request.contains("session") && !request.at("session").is_null()) session = request.at("session").get<std::string>();
    if (!request.contains("seq") || !request.at("seq").is_number_integer() ||
        request.at("seq").get<std::int64_t>() < 0) {
      throw Error(ErrorCode::kInvalidArgument, "message needs a non-negative integer seq");
    }
    seq = request.at("seq").get<std::uint64_t>();
    const auto payload = request.value("payload", nlohmann::json::object());
    std::string session_out = session;
    auto body = dispatch(type, session, seq, payload, session_out);
    response = {{"type", type}, {"session", session_out}, {"seq", seq}, {"ok", true}, {"payload", std::move(body)}};
  } catch (const Error& e) {
    response = {{"type", type}, {"session", session}, {"seq", seq}, {"ok", false},
                {"error", {{"code", to_string(e.code())}, {"message", e.what()}}}};
  } catch (const nlohmann::json::exception& e) {
    response = {{"type", type}, {"session", session}, {"seq", seq}, {"ok", false},
                {"error", {{"code", to_string(ErrorCode::kInvalidArgument)}, {"message", e.what()}}}};
  } catch (const std::exception& e) {
    response = {{"type", type}, {"session", session}, {"seq", seq}, {"ok", false},
                {"error", {{"code", "internal"}, {"message", e.what()}}}};
  }
  return response;
}

std::string ProtocolDispatcher::handle_text(const std::string& request) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(request);
  } catch (const nlohmann::json::exception& e) {
    return nlohmann::json{{"type", "error"}, {"session", ""}, {"seq", 0}, {"ok", false},
                          {"error", {{"code", to_string(ErrorCode::kInvalidArgument)}, {"message", e.what()}}}}
        .dump();
  }
  return handle(parsed).dump();
}

}  // namespace isbst::session
