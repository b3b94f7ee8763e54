#include "isbst/session/server.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>

#include <httplib.h>

namespace isbst::session {

struct Server::Impl {
  Impl(SessionManager& m, ProtocolOptions o) : dispatcher(m, std::move(o)) {}

  ProtocolDispatcher dispatcher;
  httplib::Server http;
  std::atomic<bool> stopping{false};

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::string, std::vector<std::string>> events;  // per session, SSE-framed
};

Server::Server(SessionManager& manager, ProtocolOptions options)
    : impl_(std::make_unique<Impl>(manager, std::move(options))) {
  auto* impl = impl_.get();
  impl->dispatcher.on_push([impl](const nlohmann::json& msg) {
    {
      std::lock_guard lock(impl->mu);
      impl->events[msg.at("session").get<std::string>()].push_back("event: event\ndata: " + msg.dump() + "\n\n");
    }
    impl->cv.notify_all();
  });

  impl->http.Post("/api", [impl](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(impl->dispatcher.handle_text(req.body), "application/json");
  });
  impl->http.Options("/api", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
  });
  impl->http.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  impl->http.Get("/events", [impl](const httplib::Request& req, httplib::Response& res) {
    const std::string session = req.get_param_value("session");
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Cache-Control", "no-cache");
    auto offset = std::make_shared<std::size_t>(0);
    res.set_chunked_content_provider("text/event-stream", [impl, session, offset](std::size_t, httplib::DataSink& sink) {
      std::unique_lock lock(impl->mu);
      impl->cv.wait_for(lock, std::chrono::seconds(1), [&] {
        return impl->stopping.load() || impl->events[session].size() > *offset;
      });
      if (impl->stopping) return false;
      auto& queue = impl->events[session];
      if (queue.size() == *offset) {
        lock.unlock();
        const std::string ping = ": keepalive\n\n";
        return sink.write(ping.data(), ping.size());
      }
      std::string chunk;
      for (; *offset < queue.size(); ++*offset) chunk += queue[*offset];
      lock.unlock();
      return sink.write(chunk.data(), chunk.size());
    });
  });
}

Server::~Server() { stop(); }

bool Server::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }

int Server::bind_any(const std::string& host) { return impl_->http.bind_to_any_port(host); }

void Server::serve_bound() { impl_->http.listen_after_bind(); }

void Server::stop() {
  impl_->stopping = true;
  impl_->cv.notify_all();
  impl_->http.stop();
}

}  // namespace isbst::session
