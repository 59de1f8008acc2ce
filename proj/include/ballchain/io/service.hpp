#pragma once

// HTTP + JSON layer over stateless solves and stateful navigation sessions.

#include "ballchain/io/scenario.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace httplib {
class Server;
}

namespace ballchain::service {

struct ApiResponse {
  int status = 200;
  std::string body;
};

struct ServiceOptions {
  std::chrono::seconds session_ttl{30 * 60};
  std::string cors_origin = "*";
};

/// Routes:
///   POST /solve                 scenario JSON -> shapes, energies, convergence
///   GET  /scenes                built-in scene names and geometry
///   POST /sessions              {"scene", ...} -> new session id and initial state
///   POST /sessions/{id}/step    navigation command -> logged state
///   GET  /sessions/{id}         current state (and the log with ?log=true)
///   DELETE /sessions/{id}
/// Errors: 400 invalid body (with a JSON pointer), 404 unknown session or scene, 409 step while
/// another step on the same session is running, 422 singular configuration, 504 iteration budget
/// exhausted.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();

  ApiResponse solve(const std::string& body) const;
  ApiResponse scenes() const;
  ApiResponse create_session(const std::string& body);
  ApiResponse step(const std::string& id, const std::string& body);
  ApiResponse get_session(const std::string& id, bool with_log);
  ApiResponse delete_session(const std::string& id);

  /// Drops sessions idle longer than the TTL; returns how many were removed.
  std::size_t expire_idle();
  std::size_t session_count() const;

  /// Registers all routes (plus CORS preflight) on `server`.
  void bind(httplib::Server& server);

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);

  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

/// Blocks serving on host:port until the process is stopped.
int serve(const std::string& host, int port, const ServiceOptions& options = {});

}  // namespace ballchain::service
