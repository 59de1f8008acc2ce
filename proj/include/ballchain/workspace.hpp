#pragma once

// Planar reachable-workspace scans under a rotating uniform field.

#include "ballchain/design.hpp"
#include "ballchain/polygon.hpp"
#include "ballchain/solver.hpp"

#include <string>
#include <vector>

namespace ballchain {

struct WorkspaceOptions {
  double field = 0.04;              // T
  std::vector<double> angles_deg;   // ascending; default 0..180 step 1
  std::vector<double> lengths_mm;   // ascending; default 1..20 step 1
  int parallel = 1;                 // worker threads over lengths
  SolveOptions solver = default_solver();

  static SolveOptions default_solver();
  static std::vector<double> default_angles() { return grid(0.0, 180.0, 1.0); }
  static std::vector<double> default_lengths() { return grid(1.0, 20.0, 1.0); }
  static std::vector<double> grid(double first, double last, double step);
};

struct WorkspaceScan {
  DesignKind kind = DesignKind::BallChain;
  double field = 0.0;  // T
  std::vector<double> angles_deg;
  std::vector<double> lengths_mm;
  /// tips[a][l]: tip position (m) for angle a and length l.
  std::vector<std::vector<Vec3>> tips;
  std::vector<std::vector<bool>> converged;
  /// Boundaries in mm, in the scan plane (x along the base tangent).
  std::vector<Eigen::Vector2d> boundary_a;  // first angle over lengths
  std::vector<Eigen::Vector2d> boundary_b;  // longest length over angles
  std::vector<Eigen::Vector2d> boundary_c;  // last angle over lengths
  double area_mm2 = 0.0;
  double volume_mm3 = 0.0;
  std::vector<std::string> warnings;

  /// Closed region: base, A forward, B, C reversed.
  Polygon2 region() const;
};

/// Tip position of a design at one length under a field at `angle` (rad) in the x-y plane.
/// Ball chains use round(length / d) balls.
Eigen::Index ball_count_for_length(const DesignSpec& design, double length);

WorkspaceScan scan(const DesignSpec& design, const WorkspaceOptions& options);

/// Area (mm^2) of the half disk reachable by an ideal revolute joint at the base.
inline double revolute_reference_area(double max_length_mm) {
  return 0.5 * std::numbers::pi * max_length_mm * max_length_mm;
}

/// Polar angle (deg) of a tip about the base, measured from the base tangent.
inline double polar_angle_deg(const Eigen::Vector2d& tip) { return rad2deg(std::atan2(tip.y(), tip.x())); }

}  // namespace ballchain
