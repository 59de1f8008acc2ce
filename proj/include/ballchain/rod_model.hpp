#pragma once

// Discretized elastic rods: polymer rod with a tip magnet, and a rod doped with magnetic particles.

#include "ballchain/design.hpp"
#include "ballchain/energy.hpp"

namespace ballchain {

/// Clamped rod centreline as a polyline. Every segment tangent is free; for the tip-magnet
/// design the last segment is the rigid magnet.
struct RodConfig {
  Vec3 base_position = Vec3::Zero();
  Vec3 base_tangent = Vec3::UnitX();
  Eigen::VectorXd segment_lengths;
  Directions tangents;  // 3 x segments
  bool tip_magnet = false;
  double pitch = 0.0;  // flexible segment length

  Eigen::Index segments() const { return tangents.cols(); }

  /// Straight rod of total length `length` along the base tangent. Flexible parts are split into
  /// equal segments no longer than `design.max_pitch`. A tip-magnet rod no longer than the
  /// magnet is the clamped magnet alone and has no free directions.
  static RodConfig straight(const DesignSpec& design, double length, const Vec3& base_position,
                            const Vec3& base_tangent);

  Eigen::Index free_direction_count() const { return tip_magnet && pitch == 0.0 ? 0 : segments(); }
};

/// Polyline nodes, segments() + 1 columns.
Points rod_nodes(const RodConfig& rod);

/// Rod distal end, or the tip-magnet centre.
Vec3 rod_tip(const RodConfig& rod);

/// Bending plus magnetic energy (gravity is not modelled for rods). Gradient is with respect to
/// the free tangents in ambient coordinates.
EnergyBreakdown rod_energy(const RodConfig& rod, const DesignSpec& design, const FieldSource& field,
                           Directions* free_gradient = nullptr);

double characteristic_energy(const RodConfig& rod, const DesignSpec& design, const FieldSource& field);

}  // namespace ballchain
