#pragma once

// Contact-preserving ball-chain shape parameterization and total potential energy.

#include "ballchain/design.hpp"
#include "ballchain/energy.hpp"

#include <optional>
#include <vector>

namespace ballchain {

/// Shape of an n-ball chain. Ball 0 sits at `base_position` with its dipole fixed to the base
/// tangent (`dipole_dirs.col(0)`); every other direction is free, giving 4n - 4 scalar parameters.
struct ChainConfig {
  double d = 0.9e-3;
  Vec3 base_position = Vec3::Zero();
  Directions link_dirs;    // 3 x (n - 1), ball i -> ball i + 1
  Directions dipole_dirs;  // 3 x n

  Eigen::Index n() const { return dipole_dirs.cols(); }
  Vec3 base_tangent() const { return dipole_dirs.col(0); }
  Eigen::Index free_direction_count() const { return 2 * (n() - 1); }
  Eigen::Index free_parameter_count() const { return 2 * free_direction_count(); }

  /// Free directions stacked as [link_dirs | dipole_dirs(1..n-1)].
  Directions free_directions() const;
  void set_free_directions(const Directions& free);

  static ChainConfig straight(Eigen::Index n, double d, const Vec3& base_position, const Vec3& base_tangent);
};

/// Ball centres; adjacent centres are exactly `d` apart.
Points positions(const ChainConfig& config);

/// Everything the chain energy depends on besides the shape.
struct ChainModel {
  DesignSpec design;
  FieldSource field = UniformField{};
  GravitySettings gravity;
  PositionPenalty penalty;  // optional, e.g. channel walls
  double magnet_diameter = 0.0;  // > 0 enables the external-magnet proximity diagnostic
};

/// Total potential energy. When `free_gradient` is non-null it receives dU/d(free directions)
/// in ambient coordinates, laid out like `ChainConfig::free_directions()`.
EnergyBreakdown total_energy(const ChainConfig& config, const ChainModel& model,
                             Directions* free_gradient = nullptr);

/// Stiffness (J/m^2) of the penalty that keeps non-adjacent balls from interpenetrating.
double ball_contact_stiffness(const DesignSpec& design, double d);

/// Typical magnitude of the energy terms, used to make tolerances scale-free.
double characteristic_energy(const ChainModel& model, Eigen::Index n);

/// Bend angle at every interior ball.
std::vector<double> joint_angles(const ChainConfig& config);

/// Non-adjacent ball pairs closer than d (1 - 1e-6).
struct OverlapPair {
  Eigen::Index i;
  Eigen::Index j;
  double distance;
};
std::vector<OverlapPair> find_overlaps(const ChainConfig& config);

/// Chain balls closer to the external magnet than its diameter.
std::vector<std::pair<Eigen::Index, double>> magnet_proximity(const ChainConfig& config, const ChainModel& model);

}  // namespace ballchain
