#include "ballchain/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ballchain {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 left_normal(const Vec2& t) { return {-t.y(), t.x()}; }

Polygon2 corridor_rectangle(const Corridor& c, double width, double shrink = 0.0) {
  const Vec2 t = (c.end - c.start).normalized();
  const Vec2 nrm = left_normal(t);
  const double h = 0.5 * width - shrink;
  const Vec2 s = c.start + shrink * t;
  const Vec2 e = c.end - shrink * t;
  Polygon2 r(2, 4);
  r.col(0) = s - h * nrm;
  r.col(1) = e - h * nrm;
  r.col(2) = e + h * nrm;
  r.col(3) = s + h * nrm;
  return r;
}

// Parameter interval of a + t (b - a), t in [0, 1], inside the convex CCW polygon.
std::optional<std::pair<double, double>> clip_to_convex(const Vec2& a, const Vec2& b, const Polygon2& poly) {
  double lo = 0.0;
  double hi = 1.0;
  const Vec2 dir = b - a;
  for (Eigen::Index k = 0; k < poly.cols(); ++k) {
    const Vec2 p = poly.col(k);
    const Vec2 q = poly.col((k + 1) % poly.cols());
    const Vec2 edge = q - p;
    // Inside means cross(edge, x - p) >= 0.
    const double num = cross2(edge, a - p);
    const double den = cross2(edge, dir);
    if (std::abs(den) < 1e-18) {
      if (num < 0) return std::nullopt;
      continue;
    }
    const double t = -num / den;
    if (den > 0) lo = std::max(lo, t);
    else hi = std::min(hi, t);
    if (lo >= hi) return std::nullopt;
  }
  return std::make_pair(lo, hi);
}

struct Nearest {
  double distance;
  Vec2 point;
};

Nearest nearest_on_segment(const Vec2& p, const WallSegment& w) {
  const Vec2 ab = w.b - w.a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - w.a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  const Vec2 q = w.a + t * ab;
  return {(p - q).norm(), q};
}

}  // namespace

bool point_in_convex_polygon(const Polygon2& polygon, const Vec2& p) {
  for (Eigen::Index k = 0; k < polygon.cols(); ++k) {
    const Vec2 a = polygon.col(k);
    const Vec2 b = polygon.col((k + 1) % polygon.cols());
    if (cross2(b - a, p - a) < 0) return false;
  }
  return true;
}

std::vector<WallSegment> corridor_walls(const std::vector<Corridor>& corridors, double width, const Vec2& entry) {
  std::vector<WallSegment> walls;
  std::vector<Polygon2> interiors;
  for (const Corridor& c : corridors) interiors.push_back(corridor_rectangle(c, width, 1e-9));

  for (std::size_t ci = 0; ci < corridors.size(); ++ci) {
    const Polygon2 rect = corridor_rectangle(corridors[ci], width);
    for (Eigen::Index k = 0; k < 4; ++k) {
      const Vec2 a = rect.col(k);
      const Vec2 b = rect.col((k + 1) % 4);
      // The start cap through the entry point stays open.
      if (k == 3 && (corridors[ci].start - entry).norm() < 1e-12) continue;
      std::vector<std::pair<double, double>> removed;
      for (std::size_t cj = 0; cj < corridors.size(); ++cj) {
        if (cj == ci) continue;
        if (auto iv = clip_to_convex(a, b, interiors[cj])) removed.push_back(*iv);
      }
      std::sort(removed.begin(), removed.end());
      double cursor = 0.0;
      auto emit = [&](double t0, double t1) {
        if (t1 - t0 > 1e-9) walls.push_back({a + t0 * (b - a), a + t1 * (b - a)});
      };
      for (const auto& [t0, t1] : removed) {
        emit(cursor, t0);
        cursor = std::max(cursor, t1);
      }
      emit(cursor, 1.0);
    }
  }
  return walls;
}

void ChannelScene::validate(double ball_diameter) const {
  if (corridors.empty()) throw GeometryError("scene '" + name + "' has no corridors");
  if (!(width > ball_diameter)) {
    throw GeometryError("scene '" + name + "' channel width " + std::to_string(width * 1e3) +
                        " mm does not exceed the ball diameter " + std::to_string(ball_diameter * 1e3) + " mm");
  }
  if (walls.empty()) throw GeometryError("scene '" + name + "' has no walls");
  if (!inside_corridors(entry)) throw GeometryError("scene '" + name + "' entry lies outside its corridors");
}

const Branch& ChannelScene::branch(std::string_view wanted) const {
  for (const Branch& b : branches) {
    if (b.name == wanted) return b;
  }
  throw std::invalid_argument("scene '" + name + "' has no branch '" + std::string(wanted) + "'");
}

bool ChannelScene::inside_corridors(const Vec2& p) const {
  for (const Corridor& c : corridors) {
    if (point_in_convex_polygon(corridor_rectangle(c, width, -1e-12), p)) return true;
  }
  return false;
}

ChannelScene bifurcation_scene(std::string name, double turning_angle_deg, double width, double junction_distance) {
  if (!(turning_angle_deg > 0.0 && turning_angle_deg < 180.0)) {
    throw std::invalid_argument("turning angle must lie in (0, 180) degrees");
  }
  const double beta = deg2rad(turning_angle_deg);
  const double h = 0.5 * width;
  const double run = 30e-3;

  ChannelScene s;
  s.name = std::move(name);
  s.width = width;
  s.turning_angle_deg = turning_angle_deg;
  s.junction = Vec2(junction_distance, 0.0);

  const Vec2 u(std::cos(beta), std::sin(beta));
  // The side corridor starts just inside the main one so the opening has no sliver wall.
  const Vec2 side_start = s.junction + Vec2(0.0, h - 0.1 * h);
  // Distance along the side corridor beyond which it no longer overlaps the main one.
  const double separation = (h - side_start.y() + h * std::abs(u.x())) / u.y();
  const double side_length = separation + run;

  s.corridors.push_back({"main", s.entry, s.junction + Vec2(run, 0.0)});
  s.corridors.push_back({"side", side_start, side_start + side_length * u});
  s.walls = corridor_walls(s.corridors, width, s.entry);

  // The gap in the main channel's upper wall.
  s.opening_begin = std::numeric_limits<double>::infinity();
  s.opening_end = -s.opening_begin;
  for (const WallSegment& w : s.walls) {
    if (std::abs(w.a.y() - h) > 1e-12 || std::abs(w.b.y() - h) > 1e-12) continue;
    const double lo = std::min(w.a.x(), w.b.x());
    const double hi = std::max(w.a.x(), w.b.x());
    if (lo < 1e-12) s.opening_begin = hi;
    else s.opening_end = lo;
  }

  Corridor side_tail{"side", side_start + separation * u, side_start + side_length * u};
  s.branches.push_back({"side", corridor_rectangle(side_tail, width)});
  Corridor straight_tail{"straight", s.junction + Vec2(2.0 * h, 0.0), s.junction + Vec2(run, 0.0)};
  s.branches.push_back({"straight", corridor_rectangle(straight_tail, width)});
  return s;
}

std::vector<std::string> builtin_scene_names() {
  return {"turn90", "turn120", "turn135", "turn150", "turn165", "straight"};
}

ChannelScene builtin_scene(std::string_view name) {
  if (name == "straight") {
    ChannelScene s;
    s.name = "straight";
    s.junction = Vec2(20e-3, 0.0);
    s.corridors.push_back({"main", s.entry, Vec2(50e-3, 0.0)});
    s.walls = corridor_walls(s.corridors, s.width, s.entry);
    s.branches.push_back({"straight", corridor_rectangle({"straight", Vec2(25e-3, 0.0), Vec2(50e-3, 0.0)}, s.width)});
    return s;
  }
  for (int angle : {90, 120, 135, 150, 165}) {
    if (name == "turn" + std::to_string(angle)) return bifurcation_scene(std::string(name), angle);
  }
  throw std::invalid_argument("unknown scene '" + std::string(name) + "'");
}

double wall_penalty(const Points& positions, const ChannelScene& scene, double ball_radius, double stiffness,
                    Points* gradient) {
  double energy = 0.0;
  for (Eigen::Index i = 0; i < positions.cols(); ++i) {
    const Vec2 p = positions.col(i).head<2>();
    if (scene.inside_corridors(p)) {
      for (const WallSegment& w : scene.walls) {
        const Nearest near = nearest_on_segment(p, w);
        const double depth = ball_radius - near.distance;
        if (depth <= 0.0) continue;
        energy += 0.5 * stiffness * depth * depth;
        if (gradient && near.distance > 0.0) {
          gradient->col(i).head<2>() -= stiffness * depth / near.distance * (p - near.point);
        }
      }
    } else {
      Nearest best{std::numeric_limits<double>::infinity(), p};
      for (const WallSegment& w : scene.walls) {
        const Nearest near = nearest_on_segment(p, w);
        if (near.distance < best.distance) best = near;
      }
      if (!std::isfinite(best.distance)) continue;
      const double depth = ball_radius + best.distance;
      energy += 0.5 * stiffness * depth * depth;
      if (gradient && best.distance > 0.0) {
        gradient->col(i).head<2>() += stiffness * depth / best.distance * (p - best.point);
      }
    }
  }
  return energy;
}

double max_penetration(const Points& positions, const ChannelScene& scene, double ball_radius) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < positions.cols(); ++i) {
    const Vec2 p = positions.col(i).head<2>();
    double nearest = std::numeric_limits<double>::infinity();
    for (const WallSegment& w : scene.walls) nearest = std::min(nearest, nearest_on_segment(p, w).distance);
    const double depth = scene.inside_corridors(p) ? ball_radius - nearest : ball_radius + nearest;
    worst = std::max(worst, depth);
  }
  return worst;
}

SolveOptions NavigationSettings::default_solver() {
  SolveOptions o;
  o.restarts = 0;
  o.initial = InitialGuess::Previous;
  o.max_iterations = 20000;
  return o;
}

NavigationSession::NavigationSession(ChannelScene scene, NavigationSettings settings)
    : scene_(std::move(scene)), settings_(std::move(settings)) {
  settings_.design.validate();
  scene_.validate(settings_.design.ball_diameter);
  if (!(settings_.wall_stiffness > 0.0)) throw std::invalid_argument("wall stiffness must be positive");
  scene_.axis.normalize();
  const double d = settings_.design.ball_diameter;
  current_.inserted_length = d;
  const double heading = std::atan2(scene_.axis.y(), scene_.axis.x());
  current_.field = planar_uniform_field(settings_.field_magnitude, heading);
  const Vec3 base(scene_.entry.x(), scene_.entry.y(), 0.0);
  resolve(ChainConfig::straight(1, d, base, Vec3(scene_.axis.x(), scene_.axis.y(), 0.0)));
  log_.push_back({0, std::nullopt, current_});
}

ChainModel NavigationSession::model() const {
  ChainModel m;
  m.design = settings_.design;
  m.field = current_.field;
  m.gravity.enabled = false;
  const double radius = 0.5 * settings_.design.ball_diameter;
  m.penalty = [scene = scene_, radius, k = settings_.wall_stiffness](const Points& p, Points* g) {
    return wall_penalty(p, scene, radius, k, g);
  };
  return m;
}

void NavigationSession::resolve(ChainConfig seed) {
  const ChainSolveResult r = solve_shape(model(), seed, settings_.solver);
  current_.config = r.config;
  current_.energy = r.energy;
  current_.converged = r.converged;
  current_.jammed = !r.converged;
  const Points p = positions(r.config);
  const double radius = 0.5 * settings_.design.ball_diameter;
  current_.max_penetration = max_penetration(p, scene_, radius);
  current_.collision = false;
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    if (!scene_.inside_corridors(p.col(i).head<2>())) current_.collision = true;
  }
}

Vec3 NavigationSession::tip() const {
  const Points p = positions(current_.config);
  return p.col(p.cols() - 1);
}

const NavigationLogEntry& NavigationSession::step(const NavCommand& command) {
  const double d = settings_.design.ball_diameter;
  const Vec3 axis(scene_.axis.x(), scene_.axis.y(), 0.0);
  const Vec3 entry(scene_.entry.x(), scene_.entry.y(), 0.0);
  ChainConfig seed = current_.config;

  switch (command.kind) {
    case NavCommand::Kind::Advance:
    case NavCommand::Kind::Retract: {
      if (!(command.length > 0.0 && command.length <= d * (1.0 + 1e-12))) {
        throw std::invalid_argument("insertion step must lie in (0, d] = (0, " + std::to_string(d * 1e3) + "] mm");
      }
      const double sign = command.kind == NavCommand::Kind::Advance ? 1.0 : -1.0;
      const double length = current_.inserted_length + sign * command.length;
      if (length < d * (1.0 - 1e-9)) throw std::invalid_argument("cannot retract below one ball");
      const auto n_new = static_cast<Eigen::Index>(std::floor(length / d + 1e-9));
      const Eigen::Index n_old = seed.n();
      if (n_new > n_old) {
        ChainConfig grown = ChainConfig::straight(n_new, d, Vec3::Zero(), axis);
        grown.link_dirs.rightCols(n_old - 1) = seed.link_dirs;
        grown.dipole_dirs.rightCols(n_old) = seed.dipole_dirs;
        grown.dipole_dirs.col(1) = axis;
        seed = grown;
      } else if (n_new < n_old) {
        ChainConfig shrunk = ChainConfig::straight(n_new, d, Vec3::Zero(), axis);
        shrunk.link_dirs = seed.link_dirs.rightCols(n_new - 1);
        shrunk.dipole_dirs.rightCols(n_new - 1) = seed.dipole_dirs.rightCols(n_new - 1);
        seed = shrunk;
      }
      seed.base_position = entry + std::max(0.0, length - static_cast<double>(n_new) * d) * axis;
      current_.inserted_length = length;
      break;
    }
    case NavCommand::Kind::SetField:
      if (!(command.magnitude >= 0.0)) throw std::invalid_argument("field magnitude must be non-negative");
      current_.field = planar_uniform_field(command.magnitude, command.angle);
      break;
    case NavCommand::Kind::SetMagnet:
      current_.field = magnet_pose_from_psi(command.psi, command.gimbal, command.sign);
      break;
  }

  resolve(std::move(seed));
  log_.push_back({log_.size(), command, current_});
  return log_.back();
}

std::vector<NavCommand> autopilot_script(const ChannelScene& scene, const NavigationSettings& settings,
                                         std::optional<double> target_angle_deg,
                                         std::optional<std::string> goal_branch) {
  const double d = settings.design.ball_diameter;
  const double step = 0.25 * d;
  const double target = target_angle_deg.value_or(scene.turning_angle_deg);
  const Vec2 axis = scene.axis.normalized();
  const double to_junction = scene.opening_end > scene.opening_begin
                                 ? std::max(scene.opening_begin + 0.5 * d, scene.opening_end - d)
                                 : (scene.junction - scene.entry).dot(axis);

  std::vector<NavCommand> script;
  script.push_back(NavCommand::set_field(std::atan2(axis.y(), axis.x()), settings.field_magnitude));
  double length = d;
  // The tip (distal ball centre) sits one diameter short of the inserted length.
  while (length - d < to_junction) {
    script.push_back(NavCommand::advance(step));
    length += step;
  }
  const double heading = std::atan2(axis.y(), axis.x());
  const int ramp = static_cast<int>(std::ceil(std::abs(target) / 15.0));
  for (int k = 1; k <= ramp; ++k) {
    script.push_back(NavCommand::set_field(heading + deg2rad(target * k / ramp), settings.field_magnitude));
  }
  const std::string goal = goal_branch.value_or(target == 0.0 ? "straight" : "side");
  double depth = 0.0;
  for (const Branch& b : scene.branches) {
    if (b.name != goal) continue;
    const Vec2 entrance = 0.5 * (b.region.col(0) + b.region.col(b.region.cols() - 1));
    depth = (entrance - scene.junction).norm();
  }
  const double final_length = length + depth + 2.0 * d;
  while (length < final_length) {
    script.push_back(NavCommand::advance(step));
    length += step;
  }
  return script;
}

}  // namespace ballchain
