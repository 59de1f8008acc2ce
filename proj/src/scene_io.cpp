#include "ballchain/io/scene_io.hpp"

#include "ballchain/io/output.hpp"

#include <fstream>
#include <sstream>

namespace ballchain::io {

namespace {

Vec2 vec2_from(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(where, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Json vec2_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(where + "/" + key, "unknown key");
  }
}

}  // namespace

ChannelScene scene_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where.empty() ? "/" : where, "expected a scene object");
  check_keys(j, where,
             {"name", "width_mm", "entry_mm", "axis", "turning_angle_deg", "junction_mm", "opening_mm", "corridors",
              "walls_mm", "branches"});
  ChannelScene s;
  s.name = j.value("name", std::string("custom"));
  if (!j.contains("width_mm") || !j["width_mm"].is_number()) throw ParseError(where + "/width_mm", "expected a number");
  s.width = j["width_mm"].get<double>() * 1e-3;
  if (j.contains("entry_mm")) s.entry = vec2_from(j["entry_mm"], where + "/entry_mm") * 1e-3;
  if (j.contains("axis")) {
    s.axis = vec2_from(j["axis"], where + "/axis");
    if (!(s.axis.norm() > 0)) throw ParseError(where + "/axis", "must be non-zero");
    s.axis.normalize();
  }
  if (j.contains("turning_angle_deg")) s.turning_angle_deg = j["turning_angle_deg"].get<double>();
  if (j.contains("junction_mm")) s.junction = vec2_from(j["junction_mm"], where + "/junction_mm") * 1e-3;
  if (j.contains("opening_mm")) {
    const Vec2 o = vec2_from(j["opening_mm"], where + "/opening_mm") * 1e-3;
    s.opening_begin = o.x();
    s.opening_end = o.y();
  }
  if (j.contains("corridors")) {
    const Json& cs = j["corridors"];
    if (!cs.is_array()) throw ParseError(where + "/corridors", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string at = where + "/corridors/" + std::to_string(i);
      if (!cs[i].is_object()) throw ParseError(at, "expected a corridor object");
      check_keys(cs[i], at, {"name", "from_mm", "to_mm"});
      if (!cs[i].contains("from_mm") || !cs[i].contains("to_mm")) throw ParseError(at, "needs from_mm and to_mm");
      Corridor c{cs[i].value("name", std::string("corridor")), vec2_from(cs[i]["from_mm"], at + "/from_mm") * 1e-3,
                 vec2_from(cs[i]["to_mm"], at + "/to_mm") * 1e-3};
      if ((c.end - c.start).norm() <= 0) throw ParseError(at, "corridor has zero length");
      s.corridors.push_back(std::move(c));
    }
  }
  if (j.contains("walls_mm")) {
    const Json& ws = j["walls_mm"];
    if (!ws.is_array()) throw ParseError(where + "/walls_mm", "expected an array of [x1, y1, x2, y2]");
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const std::string at = where + "/walls_mm/" + std::to_string(i);
      if (!ws[i].is_array() || ws[i].size() != 4) throw ParseError(at, "expected [x1, y1, x2, y2]");
      for (int k = 0; k < 4; ++k) {
        if (!ws[i][k].is_number()) throw ParseError(at + "/" + std::to_string(k), "expected a number");
      }
      s.walls.push_back({Vec2(ws[i][0].get<double>(), ws[i][1].get<double>()) * 1e-3,
                         Vec2(ws[i][2].get<double>(), ws[i][3].get<double>()) * 1e-3});
    }
  } else if (!s.corridors.empty()) {
    s.walls = corridor_walls(s.corridors, s.width, s.entry);
  }
  if (j.contains("branches")) {
    const Json& bs = j["branches"];
    if (!bs.is_array()) throw ParseError(where + "/branches", "expected an array");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const std::string at = where + "/branches/" + std::to_string(i);
      if (!bs[i].is_object()) throw ParseError(at, "expected a branch object");
      check_keys(bs[i], at, {"name", "polygon_mm"});
      if (!bs[i].contains("name") || !bs[i]["name"].is_string()) throw ParseError(at + "/name", "expected a string");
      const Json& poly = bs[i].value("polygon_mm", Json::array());
      if (!poly.is_array() || poly.size() < 3) throw ParseError(at + "/polygon_mm", "expected at least 3 vertices");
      Branch b{bs[i]["name"].get<std::string>(), Polygon2(2, static_cast<Eigen::Index>(poly.size()))};
      for (std::size_t k = 0; k < poly.size(); ++k) {
        b.region.col(static_cast<Eigen::Index>(k)) = vec2_from(poly[k], at + "/polygon_mm/" + std::to_string(k)) * 1e-3;
      }
      s.branches.push_back(std::move(b));
    }
  }
  return s;
}

Json to_json(const ChannelScene& s) {
  Json j;
  j["name"] = s.name;
  j["width_mm"] = s.width * 1e3;
  j["entry_mm"] = vec2_json(s.entry * 1e3);
  j["axis"] = vec2_json(s.axis);
  j["turning_angle_deg"] = s.turning_angle_deg;
  j["junction_mm"] = vec2_json(s.junction * 1e3);
  j["opening_mm"] = Json::array({s.opening_begin * 1e3, s.opening_end * 1e3});
  Json cs = Json::array();
  for (const Corridor& c : s.corridors) {
    cs.push_back({{"name", c.name}, {"from_mm", vec2_json(c.start * 1e3)}, {"to_mm", vec2_json(c.end * 1e3)}});
  }
  j["corridors"] = cs;
  Json ws = Json::array();
  for (const WallSegment& w : s.walls) ws.push_back({w.a.x() * 1e3, w.a.y() * 1e3, w.b.x() * 1e3, w.b.y() * 1e3});
  j["walls_mm"] = ws;
  Json bs = Json::array();
  for (const Branch& b : s.branches) {
    Json poly = Json::array();
    for (Eigen::Index k = 0; k < b.region.cols(); ++k) poly.push_back(vec2_json(b.region.col(k) * 1e3));
    bs.push_back({{"name", b.name}, {"polygon_mm", poly}});
  }
  j["branches"] = bs;
  return j;
}

ChannelScene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read scene file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const Json j = parse_json_text(buf.str(), path.string());
  try {
    return scene_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

ChannelScene resolve_scene(const NavigationSpec& spec, const std::filesystem::path& base_dir) {
  if (spec.scene_file) return load_scene(base_dir / *spec.scene_file);
  return builtin_scene(spec.scene);
}

Json field_state_json(const FieldSource& field) {
  if (const auto* u = std::get_if<UniformField>(&field)) {
    return {{"type", "uniform"},
            {"magnitude_mT", u->B.norm() * 1e3},
            {"angle_deg", rad2deg(std::atan2(u->B.y(), u->B.x()))},
            {"vector_mT", vec3_json(u->B * 1e3)}};
  }
  const auto& d = std::get<Dipole<double>>(field);
  return {{"type", "dipole"}, {"position_mm", vec3_json(d.position * 1e3)}, {"moment_Am2", vec3_json(d.moment)}};
}

Json to_json(const NavigationLogEntry& entry) {
  const NavigationState& st = entry.state;
  const Points p = positions(st.config);
  Json j;
  j["step"] = entry.step;
  j["command"] = entry.command ? to_json(*entry.command) : Json(nullptr);
  j["inserted_length_mm"] = st.inserted_length * 1e3;
  j["balls"] = st.config.n();
  j["field"] = field_state_json(st.field);
  Json pos = Json::array();
  Json dip = Json::array();
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    pos.push_back(vec3_json(Vec3(p.col(i) * 1e3)));
    dip.push_back(vec3_json(Vec3(st.config.dipole_dirs.col(i))));
  }
  j["positions_mm"] = pos;
  j["dipoles"] = dip;
  j["tip_mm"] = vec3_json(Vec3(p.col(p.cols() - 1) * 1e3));
  j["converged"] = st.converged;
  j["jammed"] = st.jammed;
  j["collision"] = st.collision;
  j["max_penetration_mm"] = st.max_penetration * 1e3;
  j["energy_J"] = energy_json(st.energy);
  return j;
}

std::string session_log_jsonl(const std::vector<NavigationLogEntry>& log) {
  std::string out;
  for (const NavigationLogEntry& e : log) out += to_json(e).dump() + "\n";
  return out;
}

NavigationSettings navigation_settings(const Scenario& scenario) {
  NavigationSettings s;
  s.design = design_si(scenario);
  if (scenario.navigation) {
    s.wall_stiffness = scenario.navigation->wall_stiffness_Jpm2;
    s.field_magnitude = scenario.navigation->field_mT * 1e-3;
  }
  s.solver.max_iterations = std::max(s.solver.max_iterations, scenario.solver.max_iterations);
  s.solver.gradient_tolerance = scenario.solver.gradient_tolerance;
  s.solver.memory = scenario.solver.memory;
  s.solver.seed = scenario.seed;
  return s;
}

}  // namespace ballchain::io
