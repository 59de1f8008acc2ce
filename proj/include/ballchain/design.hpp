#pragma once

#include "ballchain/magnetics.hpp"
#include "ballchain/types.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace ballchain {

enum class DesignKind { BallChain, TipMagnet, DistributedParticles };

std::string_view to_string(DesignKind kind);
DesignKind design_kind_from_string(std::string_view name);

/// Geometry and material constants of one steerable-tip design. Lengths in m, moduli in Pa,
/// moments in A m^2 (A m for the per-length moment of the distributed design).
struct DesignSpec {
  DesignKind kind = DesignKind::BallChain;

  // Ball chain.
  double ball_diameter = 0.9e-3;
  double ball_remanence = 1.48;
  double ball_moment = 0.45e-3;
  double ball_mass = 0.0;  // 0 selects the geometric default
  double skin_outer_diameter = 1.0e-3;
  double skin_inner_diameter = 0.9e-3;
  bool include_skin = true;
  bool clamped_base = false;

  // Rods (tip magnet, distributed particles).
  double rod_diameter = 1.0e-3;
  double max_pitch = 0.5e-3;
  double tip_magnet_moment = 0.67e-3;
  double tip_magnet_length = 1.0e-3;
  double tip_magnet_diameter = 0.9e-3;
  double moment_per_length = 0.37;
  double rod_remanence = 0.59;

  double elastic_modulus = 42.7e3;

  double skin_second_moment() const { return annulus_second_moment(skin_outer_diameter, skin_inner_diameter); }
  double rod_second_moment() const { return solid_second_moment(rod_diameter); }
  /// Ball moment implied by remanence and sphere volume.
  double ball_moment_from_remanence() const {
    return moment_from_remanence(ball_remanence, sphere_volume(ball_diameter));
  }
  double effective_ball_mass() const;
  void validate() const;
};

inline constexpr double kNdFeBDensity = 7500.0;

/// The three designs of the comparison study, with the tabulated constants.
DesignSpec design_from_table(DesignKind kind);

/// Ten N42 spheres of 3.175 mm, 0.13 g, 1.32 T used in the bench experiments.
DesignSpec experimental_ball_chain();

/// Cylindrical N52 actuation magnet (76.2 mm x 38.1 mm, 1.48 T).
struct ExternalMagnetSpec {
  double diameter = 76.2e-3;
  double length = 38.1e-3;
  double remanence = 1.48;
  double moment() const { return moment_from_remanence(remanence, cylinder_volume(diameter, length)); }
};

/// Gimbal geometry of the bench experiment (m).
struct MagnetGimbal {
  double v1 = 0.15;
  double v2 = 0.20;
  double v3 = 0.35;
};

/// External magnet dipole for gimbal angle `psi` (rad): centre at
/// (v3 - v1 sin psi, 0, v1 cos psi - v2), moment along `sign` * x.
Dipole<double> magnet_pose_from_psi(double psi, const MagnetGimbal& gimbal, int sign,
                                    const ExternalMagnetSpec& magnet = {});

using FieldSource = std::variant<UniformField, Dipole<double>>;

/// Field at `p` produced by the source.
Vec3 field_at(const FieldSource& source, const Vec3& p);

/// Uniform field in the x-y plane at `angle` (rad) from +x.
inline FieldSource planar_uniform_field(double magnitude, double angle) {
  return UniformField{Vec3(magnitude * std::cos(angle), magnitude * std::sin(angle), 0.0)};
}

struct GravitySettings {
  bool enabled = false;
  double g = kStandardGravity;
  Vec3 up = Vec3::UnitZ();
};

}  // namespace ballchain
