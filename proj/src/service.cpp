#include "ballchain/io/service.hpp"

#include "ballchain/io/output.hpp"
#include "ballchain/io/scene_io.hpp"

#include <httplib.h>

#include <iomanip>
#include <random>
#include <sstream>

namespace ballchain::service {

using io::Json;

namespace {

ApiResponse json_response(int status, const Json& j) { return {status, j.dump()}; }

ApiResponse error_response(int status, const std::string& message, const std::string& pointer = "") {
  Json j{{"error", message}};
  if (!pointer.empty()) j["pointer"] = pointer;
  return json_response(status, j);
}

ApiResponse parse_error_response(const ParseError& e) {
  const std::string what = e.what();
  return error_response(400, what.substr(std::min(what.size(), e.where().size() + 2)), e.where());
}

std::string new_token(std::uint64_t counter) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream id;
  id << std::hex << std::setw(16) << std::setfill('0') << rng() << std::setw(4) << (counter & 0xffff);
  return id.str();
}

}  // namespace

struct Service::Session {
  std::mutex busy;
  NavigationSession navigation;
  std::chrono::steady_clock::time_point last_activity = std::chrono::steady_clock::now();
  std::mutex activity_mutex;

  Session(ChannelScene scene, NavigationSettings settings) : navigation(std::move(scene), std::move(settings)) {}

  void touch() {
    std::lock_guard lock(activity_mutex);
    last_activity = std::chrono::steady_clock::now();
  }
  std::chrono::steady_clock::time_point idle_since() {
    std::lock_guard lock(activity_mutex);
    return last_activity;
  }
};

Service::Service(ServiceOptions options) : options_(std::move(options)) {}
Service::~Service() = default;

ApiResponse Service::solve(const std::string& body) const {
  try {
    const io::Scenario scenario = io::scenario_from_json(io::parse_json_text(body, "body"));
    const auto shapes = io::run_solve(scenario);
    for (const auto& s : shapes) {
      if (!s.converged && s.status == "max iterations") {
        return error_response(504, "iteration budget exhausted before convergence");
      }
    }
    return json_response(200, io::solve_json(scenario, shapes, true));
  } catch (const ParseError& e) {
    return parse_error_response(e);
  } catch (const SingularityError& e) {
    return error_response(422, e.what());
  } catch (const GeometryError& e) {
    return error_response(422, e.what());
  } catch (const std::invalid_argument& e) {
    return error_response(400, e.what());
  }
}

ApiResponse Service::scenes() const {
  Json arr = Json::array();
  for (const std::string& name : builtin_scene_names()) arr.push_back(io::to_json(builtin_scene(name)));
  return json_response(200, Json{{"scenes", arr}});
}

ApiResponse Service::create_session(const std::string& body) {
  expire_idle();
  ChannelScene scene;
  NavigationSettings settings;
  try {
    const Json j = io::parse_json_text(body.empty() ? "{}" : body, "body");
    if (!j.is_object()) throw ParseError("/", "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (key != "scene" && key != "design" && key != "design_overrides" && key != "wall_stiffness_Jpm2" &&
          key != "field_mT" && key != "seed") {
        throw ParseError("/" + key, "unknown key");
      }
    }
    // Reuse the scenario schema for the design and solver fields.
    Json scenario{{"design", j.value("design", std::string("experimental_ball_chain"))}};
    if (j.contains("design_overrides")) scenario["design_overrides"] = j["design_overrides"];
    if (j.contains("seed")) scenario["seed"] = j["seed"];
    Json nav = Json::object();
    if (j.contains("wall_stiffness_Jpm2")) nav["wall_stiffness_Jpm2"] = j["wall_stiffness_Jpm2"];
    if (j.contains("field_mT")) nav["field_mT"] = j["field_mT"];
    scenario["navigation"] = nav;
    const io::Scenario s = io::scenario_from_json(scenario);
    settings = io::navigation_settings(s);

    const Json& sj = j.contains("scene") ? j["scene"] : Json("turn90");
    if (sj.is_string()) {
      try {
        scene = builtin_scene(sj.get<std::string>());
      } catch (const std::invalid_argument& e) {
        return error_response(404, e.what(), "/scene");
      }
    } else {
      scene = io::scene_from_json(sj, "/scene");
    }
  } catch (const ParseError& e) {
    return parse_error_response(e);
  }

  std::shared_ptr<Session> session;
  try {
    session = std::make_shared<Session>(std::move(scene), std::move(settings));
  } catch (const GeometryError& e) {
    return error_response(400, e.what(), "/scene");
  } catch (const std::invalid_argument& e) {
    return error_response(400, e.what());
  }
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = new_token(++counter_);
    sessions_[id] = session;
  }
  Json out{{"id", id}, {"scene", io::to_json(session->navigation.scene())},
           {"state", io::to_json(session->navigation.log().back())}};
  return json_response(201, out);
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ApiResponse Service::step(const std::string& id, const std::string& body) {
  const auto session = find(id);
  if (!session) return error_response(404, "unknown session '" + id + "'");
  std::unique_lock lock(session->busy, std::try_to_lock);
  if (!lock.owns_lock()) return error_response(409, "another step is running on this session");
  session->touch();
  NavCommand command;
  try {
    command = io::command_from_json(io::parse_json_text(body, "body"), "");
  } catch (const ParseError& e) {
    return parse_error_response(e);
  }
  try {
    const NavigationLogEntry& entry = session->navigation.step(command);
    session->touch();
    return json_response(200, io::to_json(entry));
  } catch (const std::invalid_argument& e) {
    return error_response(400, e.what());
  } catch (const SingularityError& e) {
    return error_response(422, e.what());
  }
}

ApiResponse Service::get_session(const std::string& id, bool with_log) {
  const auto session = find(id);
  if (!session) return error_response(404, "unknown session '" + id + "'");
  std::unique_lock lock(session->busy, std::try_to_lock);
  if (!lock.owns_lock()) return error_response(409, "a step is running on this session");
  session->touch();
  const auto& nav = session->navigation;
  Json out{{"id", id}, {"scene", io::to_json(nav.scene())}, {"steps", nav.log().size() - 1},
           {"state", io::to_json(nav.log().back())}};
  if (with_log) {
    Json log = Json::array();
    for (const auto& e : nav.log()) log.push_back(io::to_json(e));
    out["log"] = log;
  }
  return json_response(200, out);
}

ApiResponse Service::delete_session(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (sessions_.erase(id) == 0) return error_response(404, "unknown session '" + id + "'");
  return {204, ""};
}

std::size_t Service::expire_idle() {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(mutex_);
  std::size_t removed = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->idle_since() > options_.session_ttl) {
      it = sessions_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void Service::bind(httplib::Server& server) {
  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    if (!api.body.empty()) res.set_content(api.body, "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/solve", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, solve(req.body));
  });
  server.Get("/scenes", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, scenes()); });
  server.Post("/sessions", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, create_session(req.body));
  });
  server.Post(R"(/sessions/([^/]+)/step)", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, step(req.matches[1], req.body));
  });
  server.Get(R"(/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    const std::string log = req.has_param("log") ? req.get_param_value("log") : "";
    reply(res, get_session(req.matches[1], log == "true" || log == "1"));
  });
  server.Delete(R"(/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, delete_session(req.matches[1]));
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content(Json{{"error", "not found"}}.dump(), "application/json");
  });
}

int serve(const std::string& host, int port, const ServiceOptions& options) {
  Service service(options);
  httplib::Server server;
  service.bind(server);
  if (!server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace ballchain::service
