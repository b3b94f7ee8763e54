#pragma once
// Transport-independent wire protocol.
//
// Request:  {"type": T, "session": id|null, "seq": n, "payload": {...}}
// Response: {"type": T, "session": id, "seq": n, "ok": true, "payload": {...}}
//           {"type": T, "session": id, "seq": n, "ok": false, "error": {"code": C, "message": M}}
// Pushed:   {"type": "event", "session": id, "seq": n, "payload": <event>}
//
// T is one of start, set_weights, run_segment, candidate_detail,
// export_candidate, stop, list_versions, status. seq must increase strictly
// per session. run_segment answers at once and pushes the event when the
// segment finishes, unless the payload asks for {"wait": true}.

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "isbst/session/session.hpp"

namespace isbst::session {

struct ProtocolOptions {
  // Relative export paths resolve here.
  std::filesystem::path export_dir = ".";
  // Replaces version labels in list_versions (blinded evaluation).
  std::map<int, std::string> label_overrides;
  // Versions offered by list_versions; empty = the whole study set.
  std::vector<int> versions;
  // Called with every session's final log when it is stopped.
  std::function<void(const std::string& session, const SessionLog& log)> on_stop;
};

class ProtocolDispatcher {
 public:
  using Push = std::function<void(const nlohmann::json& message)>;

  ProtocolDispatcher(SessionManager& manager, ProtocolOptions options = {});

  // Never throws; failures become error responses.
  nlohmann::json handle(const nlohmann::json& request);
  std::string handle_text(const std::string& request);

  // Receives every pushed event message.
  void on_push(Push push);

 private:
  nlohmann::json dispatch(const std::string& type, const std::string& session, std::uint64_t seq,
                          const nlohmann::json& payload, std::string& session_out);
  void check_seq(const std::string& session, std::uint64_t seq);

  SessionManager& manager_;
  ProtocolOptions options_;
  std::mutex mu_;
  std::map<std::string, std::uint64_t> last_seq_;
  std::map<std::string, std::uint64_t> pending_seq_;  // run_segment seq awaiting its event
  std::mutex push_mu_;
  std::vector<Push> pushes_;
};

}  // namespace isbst::session
