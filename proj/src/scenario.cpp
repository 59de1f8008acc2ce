#include "ballchain/io/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ballchain::io {

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }

// Reads keys of one JSON object and rejects any it did not ask for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParseError(path(), "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const Json& at(const std::string& key) {
    if (!has(key)) throw ParseError(child(where_, key), "missing required key");
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) { return has(key) ? as_number(j_.at(key), key) : fallback; }
  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return as_number(j_.at(key), key);
  }
  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) throw ParseError(child(where_, key), "must be positive");
    return v;
  }
  std::optional<double> opt_positive(const std::string& key) {
    auto v = opt_number(key);
    if (v && !(*v > 0.0)) throw ParseError(child(where_, key), "must be positive");
    return v;
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw ParseError(child(where_, key), "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    auto v = opt_boolean(key);
    return v.value_or(fallback);
  }
  std::optional<bool> opt_boolean(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw ParseError(child(where_, key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    auto v = opt_string(key);
    return v.value_or(fallback);
  }
  std::optional<std::string> opt_string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ParseError(child(where_, key), "expected a string");
    return v.get<std::string>();
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    return as_vec3(j_.at(key), child(where_, key));
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_array()) throw ParseError(child(where_, key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], key + "/" + std::to_string(i)));
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ParseError(child(where_, key), "unknown key");
    }
  }

  std::string path() const { return where_.empty() ? "/" : where_; }
  const std::string& where() const { return where_; }

  static Vec3 as_vec3(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) throw ParseError(where, "expected an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) throw ParseError(where + "/" + std::to_string(i), "expected a number");
      out[i] = v[i].get<double>();
    }
    return out;
  }

 private:
  double as_number(const Json& v, const std::string& key) const {
    if (!v.is_number()) throw ParseError(child(where_, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ParseError(child(where_, key), "must be finite");
    return x;
  }

  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

const char* field_type_name(FieldType t) {
  switch (t) {
    case FieldType::Uniform: return "uniform";
    case FieldType::Magnet: return "magnet";
    case FieldType::Dipole: return "dipole";
  }
  return "uniform";
}

DesignOverrides overrides_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  DesignOverrides o;
  o.ball_diameter_mm = r.opt_positive("ball_diameter_mm");
  o.ball_moment_Am2 = r.opt_positive("ball_moment_Am2");
  o.ball_remanence_T = r.opt_positive("ball_remanence_T");
  o.ball_mass_g = r.opt_positive("ball_mass_g");
  o.skin_outer_diameter_mm = r.opt_positive("skin_outer_diameter_mm");
  o.skin_inner_diameter_mm = r.opt_positive("skin_inner_diameter_mm");
  o.elastic_modulus_kPa = r.opt_positive("elastic_modulus_kPa");
  o.rod_diameter_mm = r.opt_positive("rod_diameter_mm");
  o.max_pitch_mm = r.opt_positive("max_pitch_mm");
  o.tip_magnet_moment_Am2 = r.opt_positive("tip_magnet_moment_Am2");
  o.tip_magnet_length_mm = r.opt_positive("tip_magnet_length_mm");
  o.moment_per_length_Am = r.opt_positive("moment_per_length_Am");
  o.include_skin = r.opt_boolean("include_skin");
  o.clamped_base = r.opt_boolean("clamped_base");
  r.finish();
  return o;
}

Json to_json(const DesignOverrides& o) {
  Json j = Json::object();
  auto put = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  put("ball_diameter_mm", o.ball_diameter_mm);
  put("ball_moment_Am2", o.ball_moment_Am2);
  put("ball_remanence_T", o.ball_remanence_T);
  put("ball_mass_g", o.ball_mass_g);
  put("skin_outer_diameter_mm", o.skin_outer_diameter_mm);
  put("skin_inner_diameter_mm", o.skin_inner_diameter_mm);
  put("elastic_modulus_kPa", o.elastic_modulus_kPa);
  put("rod_diameter_mm", o.rod_diameter_mm);
  put("max_pitch_mm", o.max_pitch_mm);
  put("tip_magnet_moment_Am2", o.tip_magnet_moment_Am2);
  put("tip_magnet_length_mm", o.tip_magnet_length_mm);
  put("moment_per_length_Am", o.moment_per_length_Am);
  put("include_skin", o.include_skin);
  put("clamped_base", o.clamped_base);
  return j;
}

WorkspaceSpec workspace_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  WorkspaceSpec w;
  if (r.has("designs")) {
    const Json& d = j.at("designs");
    if (!d.is_array() || d.empty()) throw ParseError(child(where, "designs"), "expected a non-empty array of names");
    w.designs.clear();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string at = child(where, "designs/" + std::to_string(i));
      if (!d[i].is_string()) throw ParseError(at, "expected a design name");
      const std::string name = d[i].get<std::string>();
      try {
        (void)design_si(name, {});
      } catch (const std::invalid_argument& e) {
        throw ParseError(at, e.what());
      }
      w.designs.push_back(name);
    }
  }
  w.field_mT = r.number("field_mT", w.field_mT);
  w.angle_start_deg = r.number("angle_start_deg", w.angle_start_deg);
  w.angle_stop_deg = r.number("angle_stop_deg", w.angle_stop_deg);
  w.angle_step_deg = r.positive("angle_step_deg", w.angle_step_deg);
  w.length_start_mm = r.positive("length_start_mm", w.length_start_mm);
  w.length_stop_mm = r.positive("length_stop_mm", w.length_stop_mm);
  w.length_step_mm = r.positive("length_step_mm", w.length_step_mm);
  r.finish();
  if (w.angle_stop_deg < w.angle_start_deg) throw ParseError(child(where, "angle_stop_deg"), "below angle_start_deg");
  if (w.length_stop_mm < w.length_start_mm) throw ParseError(child(where, "length_stop_mm"), "below length_start_mm");
  return w;
}

Json to_json(const WorkspaceSpec& w) {
  Json j;
  j["designs"] = w.designs;
  j["field_mT"] = w.field_mT;
  j["angle_start_deg"] = w.angle_start_deg;
  j["angle_stop_deg"] = w.angle_stop_deg;
  j["angle_step_deg"] = w.angle_step_deg;
  j["length_start_mm"] = w.length_start_mm;
  j["length_stop_mm"] = w.length_stop_mm;
  j["length_step_mm"] = w.length_step_mm;
  return j;
}

NavigationSpec navigation_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  NavigationSpec n;
  n.scene = r.string("scene", n.scene);
  n.scene_file = r.opt_string("scene_file");
  n.commands_file = r.opt_string("commands_file");
  n.autopilot_angle_deg = r.opt_number("autopilot_angle_deg");
  n.expect_branch = r.opt_string("expect_branch");
  n.wall_stiffness_Jpm2 = r.positive("wall_stiffness_Jpm2", n.wall_stiffness_Jpm2);
  n.field_mT = r.number("field_mT", n.field_mT);
  r.finish();
  return n;
}

Json to_json(const NavigationSpec& n) {
  Json j;
  j["scene"] = n.scene;
  if (n.scene_file) j["scene_file"] = *n.scene_file;
  if (n.commands_file) j["commands_file"] = *n.commands_file;
  if (n.autopilot_angle_deg) j["autopilot_angle_deg"] = *n.autopilot_angle_deg;
  if (n.expect_branch) j["expect_branch"] = *n.expect_branch;
  j["wall_stiffness_Jpm2"] = n.wall_stiffness_Jpm2;
  j["field_mT"] = n.field_mT;
  return j;
}

}  // namespace

bool Scenario::operator==(const Scenario& o) const {
  return name == o.name && seed == o.seed && design == o.design && overrides == o.overrides && balls == o.balls &&
         length_mm == o.length_mm && base_position_mm == o.base_position_mm && base_tangent == o.base_tangent &&
         field == o.field && gravity == o.gravity && solver == o.solver && sweep == o.sweep &&
         workspace == o.workspace && navigation == o.navigation && svg == o.svg && parallel == o.parallel;
}

FieldSpec field_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  FieldSpec f;
  const std::string type = r.string("type", "uniform");
  if (type == "uniform") {
    f.type = FieldType::Uniform;
    f.magnitude_mT = r.number("magnitude_mT", f.magnitude_mT);
    if (f.magnitude_mT < 0) throw ParseError(child(where, "magnitude_mT"), "must be non-negative");
    f.angle_deg = r.number("angle_deg", f.angle_deg);
    if (r.has("direction")) {
      const Vec3 d = ObjectReader::as_vec3(j.at("direction"), child(where, "direction"));
      if (!(d.norm() > 0)) throw ParseError(child(where, "direction"), "must be non-zero");
      f.direction = d;
    }
  } else if (type == "magnet") {
    f.type = FieldType::Magnet;
    f.psi_deg = r.number("psi_deg", f.psi_deg);
    const long long sign = r.integer("sign", 1);
    if (sign != 1 && sign != -1) throw ParseError(child(where, "sign"), "must be +1 or -1");
    f.sign = static_cast<int>(sign);
    f.v1_mm = r.number("v1_mm", f.v1_mm);
    f.v2_mm = r.number("v2_mm", f.v2_mm);
    f.v3_mm = r.number("v3_mm", f.v3_mm);
  } else if (type == "dipole") {
    f.type = FieldType::Dipole;
    f.position_mm = r.vec3("position_mm", f.position_mm);
    f.moment_Am2 = r.vec3("moment_Am2", f.moment_Am2);
  } else {
    throw ParseError(child(where, "type"), "expected \"uniform\", \"magnet\" or \"dipole\"");
  }
  r.finish();
  return f;
}

Json to_json(const FieldSpec& f) {
  Json j;
  j["type"] = field_type_name(f.type);
  switch (f.type) {
    case FieldType::Uniform:
      j["magnitude_mT"] = f.magnitude_mT;
      j["angle_deg"] = f.angle_deg;
      if (f.direction) j["direction"] = vec_json(*f.direction);
      break;
    case FieldType::Magnet:
      j["psi_deg"] = f.psi_deg;
      j["sign"] = f.sign;
      j["v1_mm"] = f.v1_mm;
      j["v2_mm"] = f.v2_mm;
      j["v3_mm"] = f.v3_mm;
      break;
    case FieldType::Dipole:
      j["position_mm"] = vec_json(f.position_mm);
      j["moment_Am2"] = vec_json(f.moment_Am2);
      break;
  }
  return j;
}

Scenario scenario_from_json(const Json& j) {
  ObjectReader r(j, "");
  Scenario s;
  s.name = r.string("name", s.name);
  if (r.has("seed")) {
    const Json& v = j.at("seed");
    if (!v.is_number_unsigned()) throw ParseError("/seed", "expected a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  const Json& design = r.at("design");
  if (!design.is_string()) throw ParseError("/design", "expected a design name");
  s.design = design.get<std::string>();
  try {
    (void)design_si(s.design, {});
  } catch (const std::invalid_argument& e) {
    throw ParseError("/design", e.what());
  }
  if (r.has("design_overrides")) s.overrides = overrides_from_json(j.at("design_overrides"), "/design_overrides");
  const long long balls = r.integer("balls", s.balls);
  if (balls < 1 || balls > 1000) throw ParseError("/balls", "must lie in [1, 1000]");
  s.balls = static_cast<int>(balls);
  s.length_mm = r.positive("length_mm", s.length_mm);
  s.base_position_mm = r.vec3("base_position_mm", s.base_position_mm);
  s.base_tangent = r.vec3("base_tangent", s.base_tangent);
  if (!(s.base_tangent.norm() > 0)) throw ParseError("/base_tangent", "must be non-zero");
  if (r.has("field")) s.field = field_from_json(j.at("field"), "/field");
  if (r.has("gravity")) {
    ObjectReader g(j.at("gravity"), "/gravity");
    s.gravity.enabled = g.boolean("enabled", s.gravity.enabled);
    s.gravity.g_mps2 = g.number("g_mps2", s.gravity.g_mps2);
    s.gravity.up = g.vec3("up", s.gravity.up);
    if (!(s.gravity.up.norm() > 0)) throw ParseError("/gravity/up", "must be non-zero");
    g.finish();
  }
  if (r.has("solver")) {
    ObjectReader o(j.at("solver"), "/solver");
    const long long iters = o.integer("max_iterations", s.solver.max_iterations);
    if (iters < 1) throw ParseError("/solver/max_iterations", "must be at least 1");
    s.solver.max_iterations = static_cast<int>(iters);
    s.solver.gradient_tolerance = o.positive("gradient_tolerance", s.solver.gradient_tolerance);
    const long long restarts = o.integer("restarts", s.solver.restarts);
    if (restarts < 0) throw ParseError("/solver/restarts", "must be non-negative");
    s.solver.restarts = static_cast<int>(restarts);
    s.solver.restart_perturbation_deg = o.positive("restart_perturbation_deg", s.solver.restart_perturbation_deg);
    const long long memory = o.integer("memory", s.solver.memory);
    if (memory < 1) throw ParseError("/solver/memory", "must be at least 1");
    s.solver.memory = static_cast<int>(memory);
    o.finish();
  }
  if (r.has("sweep")) {
    const Json& sw = j.at("sweep");
    if (!sw.is_array()) throw ParseError("/sweep", "expected an array of field objects");
    for (std::size_t i = 0; i < sw.size(); ++i) s.sweep.push_back(field_from_json(sw[i], "/sweep/" + std::to_string(i)));
  }
  if (r.has("workspace")) s.workspace = workspace_from_json(j.at("workspace"), "/workspace");
  if (r.has("navigation")) s.navigation = navigation_from_json(j.at("navigation"), "/navigation");
  s.svg = r.boolean("svg", s.svg);
  const long long parallel = r.integer("parallel", s.parallel);
  if (parallel < 1) throw ParseError("/parallel", "must be at least 1");
  s.parallel = static_cast<int>(parallel);
  r.finish();

  try {
    design_si(s).validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError("/design_overrides", e.what());
  }
  return s;
}

Json to_json(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["design"] = s.design;
  const Json overrides = to_json(s.overrides);
  if (!overrides.empty()) j["design_overrides"] = overrides;
  j["balls"] = s.balls;
  j["length_mm"] = s.length_mm;
  j["base_position_mm"] = vec_json(s.base_position_mm);
  j["base_tangent"] = vec_json(s.base_tangent);
  j["field"] = to_json(s.field);
  j["gravity"] = {{"enabled", s.gravity.enabled}, {"g_mps2", s.gravity.g_mps2}, {"up", vec_json(s.gravity.up)}};
  j["solver"] = {{"max_iterations", s.solver.max_iterations},
                 {"gradient_tolerance", s.solver.gradient_tolerance},
                 {"restarts", s.solver.restarts},
                 {"restart_perturbation_deg", s.solver.restart_perturbation_deg},
                 {"memory", s.solver.memory}};
  if (!s.sweep.empty()) {
    Json sw = Json::array();
    for (const FieldSpec& f : s.sweep) sw.push_back(to_json(f));
    j["sweep"] = sw;
  }
  if (s.workspace) j["workspace"] = to_json(*s.workspace);
  if (s.navigation) j["navigation"] = to_json(*s.navigation);
  j["svg"] = s.svg;
  j["parallel"] = s.parallel;
  return j;
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(column), "malformed JSON");
  }
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const Json j = parse_json_text(text, source);
  try {
    return scenario_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(source + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), path.string());
  s.base_dir = path.parent_path();
  return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

FieldSource field_si(const FieldSpec& f) {
  switch (f.type) {
    case FieldType::Uniform: {
      const double B = f.magnitude_mT * 1e-3;
      if (f.direction) return UniformField{B * f.direction->normalized()};
      return planar_uniform_field(B, deg2rad(f.angle_deg));
    }
    case FieldType::Magnet:
      return magnet_pose_from_psi(deg2rad(f.psi_deg), {f.v1_mm * 1e-3, f.v2_mm * 1e-3, f.v3_mm * 1e-3}, f.sign);
    case FieldType::Dipole:
      return Dipole<double>{f.position_mm * 1e-3, f.moment_Am2};
  }
  return UniformField{};
}

DesignSpec design_si(const std::string& design, const DesignOverrides& o) {
  DesignSpec d = design == "experimental_ball_chain" ? experimental_ball_chain()
                                                     : design_from_table(design_kind_from_string(design));
  if (o.ball_diameter_mm) d.ball_diameter = *o.ball_diameter_mm * 1e-3;
  if (o.ball_remanence_T) {
    d.ball_remanence = *o.ball_remanence_T;
    d.ball_moment = d.ball_moment_from_remanence();
  }
  if (o.ball_moment_Am2) d.ball_moment = *o.ball_moment_Am2;
  if (o.ball_mass_g) d.ball_mass = *o.ball_mass_g * 1e-3;
  if (o.skin_outer_diameter_mm) d.skin_outer_diameter = *o.skin_outer_diameter_mm * 1e-3;
  if (o.skin_inner_diameter_mm) d.skin_inner_diameter = *o.skin_inner_diameter_mm * 1e-3;
  if (o.elastic_modulus_kPa) d.elastic_modulus = *o.elastic_modulus_kPa * 1e3;
  if (o.rod_diameter_mm) d.rod_diameter = *o.rod_diameter_mm * 1e-3;
  if (o.max_pitch_mm) d.max_pitch = *o.max_pitch_mm * 1e-3;
  if (o.tip_magnet_moment_Am2) d.tip_magnet_moment = *o.tip_magnet_moment_Am2;
  if (o.tip_magnet_length_mm) d.tip_magnet_length = *o.tip_magnet_length_mm * 1e-3;
  if (o.moment_per_length_Am) d.moment_per_length = *o.moment_per_length_Am;
  if (o.include_skin) d.include_skin = *o.include_skin;
  if (o.clamped_base) d.clamped_base = *o.clamped_base;
  return d;
}

DesignSpec design_si(const Scenario& s) { return design_si(s.design, s.overrides); }

GravitySettings gravity_si(const GravitySpec& g) { return {g.enabled, g.g_mps2, g.up.normalized()}; }

SolveOptions solver_si(const Scenario& s) {
  SolveOptions o;
  o.max_iterations = s.solver.max_iterations;
  o.gradient_tolerance = s.solver.gradient_tolerance;
  o.restarts = s.solver.restarts;
  o.restart_perturbation = deg2rad(s.solver.restart_perturbation_deg);
  o.memory = s.solver.memory;
  o.seed = s.seed;
  return o;
}

WorkspaceOptions workspace_si(const WorkspaceSpec& w, const SolverSpec& solver, int parallel) {
  WorkspaceOptions o;
  o.field = w.field_mT * 1e-3;
  o.angles_deg = WorkspaceOptions::grid(w.angle_start_deg, w.angle_stop_deg, w.angle_step_deg);
  o.lengths_mm = WorkspaceOptions::grid(w.length_start_mm, w.length_stop_mm, w.length_step_mm);
  o.parallel = parallel;
  o.solver.gradient_tolerance = solver.gradient_tolerance;
  o.solver.memory = solver.memory;
  return o;
}

NavCommand command_from_json(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  const Json& opj = r.at("op");
  if (!opj.is_string()) throw ParseError(child(where, "op"), "expected a string");
  const std::string op = opj.get<std::string>();
  NavCommand c;
  if (op == "advance" || op == "retract") {
    const double length = r.at("length_mm").is_number() ? r.positive("length_mm", 0.0) * 1e-3 : -1.0;
    if (length < 0) throw ParseError(child(where, "length_mm"), "expected a number");
    c = op == "advance" ? NavCommand::advance(length) : NavCommand::retract(length);
  } else if (op == "set_field") {
    c = NavCommand::set_field(deg2rad(r.number("angle_deg", 0.0)), r.number("magnitude_mT", 40.0) * 1e-3);
    if (c.magnitude < 0) throw ParseError(child(where, "magnitude_mT"), "must be non-negative");
  } else if (op == "set_magnet") {
    MagnetGimbal g;
    g.v1 = r.number("v1_mm", 150.0) * 1e-3;
    g.v2 = r.number("v2_mm", 200.0) * 1e-3;
    g.v3 = r.number("v3_mm", 350.0) * 1e-3;
    const long long sign = r.integer("sign", 1);
    if (sign != 1 && sign != -1) throw ParseError(child(where, "sign"), "must be +1 or -1");
    c = NavCommand::set_magnet(deg2rad(r.number("psi_deg", 0.0)), static_cast<int>(sign), g);
  } else {
    throw ParseError(child(where, "op"), "expected advance, retract, set_field or set_magnet");
  }
  r.finish();
  return c;
}

Json to_json(const NavCommand& c) {
  Json j;
  switch (c.kind) {
    case NavCommand::Kind::Advance:
    case NavCommand::Kind::Retract:
      j["op"] = c.kind == NavCommand::Kind::Advance ? "advance" : "retract";
      j["length_mm"] = c.length * 1e3;
      break;
    case NavCommand::Kind::SetField:
      j["op"] = "set_field";
      j["angle_deg"] = rad2deg(c.angle);
      j["magnitude_mT"] = c.magnitude * 1e3;
      break;
    case NavCommand::Kind::SetMagnet:
      j["op"] = "set_magnet";
      j["psi_deg"] = rad2deg(c.psi);
      j["sign"] = c.sign;
      j["v1_mm"] = c.gimbal.v1 * 1e3;
      j["v2_mm"] = c.gimbal.v2 * 1e3;
      j["v3_mm"] = c.gimbal.v3 * 1e3;
      break;
  }
  return j;
}

std::vector<NavCommand> commands_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where.empty() ? "/" : where, "expected an array of commands");
  std::vector<NavCommand> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(command_from_json(j[i], where + "/" + std::to_string(i)));
  return out;
}

}  // namespace ballchain::io
