#pragma once

// Quasi-static insertion of a ball chain into planar bifurcating channels.

#include "ballchain/polygon.hpp"
#include "ballchain/solver.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ballchain {

using Vec2 = Eigen::Vector2d;

struct WallSegment {
  Vec2 a;
  Vec2 b;
};

/// Straight channel piece: the free corridor is the rectangle of the scene width around it.
struct Corridor {
  std::string name;
  Vec2 start;
  Vec2 end;
};

struct Branch {
  std::string name;
  Polygon2 region;  // convex target region; the last and first vertices span its entrance
};

/// Planar channel network in the x-y plane. All lengths in m.
struct ChannelScene {
  std::string name;
  double width = 5e-3;
  Vec2 entry = Vec2::Zero();
  Vec2 axis = Vec2::UnitX();
  double turning_angle_deg = 0.0;
  Vec2 junction = Vec2::Zero();  // where the side branch leaves the main channel
  /// Stretch of the main channel wall (distance along the axis from the entry) that opens
  /// into the side branch.
  double opening_begin = 0.0;
  double opening_end = 0.0;
  std::vector<Corridor> corridors;
  std::vector<WallSegment> walls;
  std::vector<Branch> branches;

  /// Throws GeometryError when the channel is narrower than a ball or has no corridors.
  void validate(double ball_diameter) const;
  const Branch& branch(std::string_view name) const;
  bool inside_corridors(const Vec2& p) const;
};

/// Boundary of the union of corridor rectangles, leaving the entry cap open.
std::vector<WallSegment> corridor_walls(const std::vector<Corridor>& corridors, double width, const Vec2& entry);

/// Bifurcation with a straight continuation and a side branch at `turning_angle_deg`.
ChannelScene bifurcation_scene(std::string name, double turning_angle_deg, double width = 5e-3,
                               double junction_distance = 20e-3);

/// turn90, turn120, turn135, turn150, turn165, and straight.
std::vector<std::string> builtin_scene_names();
ChannelScene builtin_scene(std::string_view name);

bool point_in_convex_polygon(const Polygon2& polygon, const Vec2& p);

/// Soft unilateral wall contact: every ball of radius `ball_radius` penetrating a wall by delta
/// adds stiffness * delta^2 / 2. A centre outside the corridors counts as penetrating its
/// nearest wall by radius + distance. Accumulates dU/dp into `gradient` when non-null.
double wall_penalty(const Points& positions, const ChannelScene& scene, double ball_radius, double stiffness,
                    Points* gradient = nullptr);

/// Largest wall penetration over all balls (m).
double max_penetration(const Points& positions, const ChannelScene& scene, double ball_radius);

struct NavCommand {
  enum class Kind { Advance, Retract, SetField, SetMagnet };
  Kind kind = Kind::Advance;
  double length = 0.0;     // m, advance/retract
  double angle = 0.0;      // rad, planar field direction
  double magnitude = 0.0;  // T
  double psi = 0.0;        // rad, magnet gimbal angle
  int sign = 1;
  MagnetGimbal gimbal;

  static NavCommand advance(double length) {
    NavCommand c;
    c.length = length;
    return c;
  }
  static NavCommand retract(double length) {
    NavCommand c;
    c.kind = Kind::Retract;
    c.length = length;
    return c;
  }
  static NavCommand set_field(double angle, double magnitude) {
    NavCommand c;
    c.kind = Kind::SetField;
    c.angle = angle;
    c.magnitude = magnitude;
    return c;
  }
  static NavCommand set_magnet(double psi, int sign, const MagnetGimbal& gimbal = {}) {
    NavCommand c;
    c.kind = Kind::SetMagnet;
    c.psi = psi;
    c.sign = sign;
    c.gimbal = gimbal;
    return c;
  }
};

struct NavigationSettings {
  DesignSpec design = experimental_ball_chain();
  double wall_stiffness = 1e5;  // J/m^2
  double field_magnitude = 0.04;
  SolveOptions solver = default_solver();

  static SolveOptions default_solver();
};

struct NavigationState {
  double inserted_length = 0.0;  // m
  FieldSource field = UniformField{};
  ChainConfig config;
  EnergyBreakdown energy;
  bool converged = true;
  bool jammed = false;
  bool collision = false;
  double max_penetration = 0.0;
};

struct NavigationLogEntry {
  std::size_t step = 0;
  std::optional<NavCommand> command;  // empty for the initial state
  NavigationState state;
};

/// Single-owner insertion session. Balls emerge at the entry: ball count is floor(length / d)
/// and the clamped proximal ball sits (length - count d) past the entry along the axis.
class NavigationSession {
 public:
  NavigationSession(ChannelScene scene, NavigationSettings settings = {});

  const NavigationLogEntry& step(const NavCommand& command);

  const ChannelScene& scene() const { return scene_; }
  const NavigationSettings& settings() const { return settings_; }
  const NavigationState& state() const { return log_.back().state; }
  const std::vector<NavigationLogEntry>& log() const { return log_; }
  Vec3 tip() const;

 private:
  void resolve(ChainConfig seed);
  ChainModel model() const;

  ChannelScene scene_;
  NavigationSettings settings_;
  std::vector<NavigationLogEntry> log_;
  NavigationState current_;
};

/// Scripted insertion: advance in quarter-ball steps until the tip reaches the junction opening,
/// rotate the field toward `target_angle_deg` (default: the scene's turning angle) in 15 degree
/// steps, then advance until the tip is two balls past the entrance of `goal_branch` (default:
/// "straight" for a zero target angle, otherwise "side").
std::vector<NavCommand> autopilot_script(const ChannelScene& scene, const NavigationSettings& settings,
                                         std::optional<double> target_angle_deg = std::nullopt,
                                         std::optional<std::string> goal_branch = std::nullopt);

}  // namespace ballchain
