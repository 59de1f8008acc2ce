#include "ballchain/design.hpp"

#include <stdexcept>

namespace ballchain {

std::string_view to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::BallChain: return "ball_chain";
    case DesignKind::TipMagnet: return "tip_magnet";
    case DesignKind::DistributedParticles: return "distributed_particles";
  }
  throw std::logic_error("unknown design kind");
}

DesignKind design_kind_from_string(std::string_view name) {
  if (name == "ball_chain") return DesignKind::BallChain;
  if (name == "tip_magnet") return DesignKind::TipMagnet;
  if (name == "distributed_particles") return DesignKind::DistributedParticles;
  throw std::invalid_argument("unknown design '" + std::string(name) +
                              "' (expected ball_chain, tip_magnet or distributed_particles)");
}

double DesignSpec::effective_ball_mass() const {
  return ball_mass > 0.0 ? ball_mass : kNdFeBDensity * sphere_volume(ball_diameter);
}

void DesignSpec::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("design constant '") + name + "' must be positive");
  };
  positive(elastic_modulus, "elastic_modulus");
  switch (kind) {
    case DesignKind::BallChain:
      positive(ball_diameter, "ball_diameter");
      positive(ball_moment, "ball_moment");
      positive(skin_outer_diameter, "skin_outer_diameter");
      if (!(skin_inner_diameter >= 0.0 && skin_inner_diameter < skin_outer_diameter)) {
        throw std::invalid_argument("skin inner diameter must lie in [0, outer)");
      }
      break;
    case DesignKind::TipMagnet:
      positive(rod_diameter, "rod_diameter");
      positive(max_pitch, "max_pitch");
      positive(tip_magnet_moment, "tip_magnet_moment");
      positive(tip_magnet_length, "tip_magnet_length");
      break;
    case DesignKind::DistributedParticles:
      positive(rod_diameter, "rod_diameter");
      positive(max_pitch, "max_pitch");
      positive(moment_per_length, "moment_per_length");
      break;
  }
}

DesignSpec design_from_table(DesignKind kind) {
  DesignSpec spec;
  spec.kind = kind;
  switch (kind) {
    case DesignKind::BallChain:
      spec.elastic_modulus = 42.7e3;
      break;
    case DesignKind::TipMagnet:
      spec.elastic_modulus = 42.7e3;
      spec.ball_remanence = 1.48;
      break;
    case DesignKind::DistributedParticles:
      spec.elastic_modulus = 128.2e3;
      break;
  }
  return spec;
}

DesignSpec experimental_ball_chain() {
  DesignSpec spec = design_from_table(DesignKind::BallChain);
  spec.ball_diameter = 3.175e-3;
  spec.ball_remanence = 1.32;
  spec.ball_moment = spec.ball_moment_from_remanence();
  spec.ball_mass = 0.13e-3;
  // Thin Ecoflex sleeve over the 3.175 mm spheres.
  spec.skin_inner_diameter = spec.ball_diameter;
  spec.skin_outer_diameter = spec.ball_diameter + 2 * 0.05e-3;
  return spec;
}

Dipole<double> magnet_pose_from_psi(double psi, const MagnetGimbal& gimbal, int sign,
                                    const ExternalMagnetSpec& magnet) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("magnet dipole sign must be +1 or -1");
  Dipole<double> out;
  out.position = Vec3(gimbal.v3 - gimbal.v1 * std::sin(psi), 0.0, gimbal.v1 * std::cos(psi) - gimbal.v2);
  out.moment = static_cast<double>(sign) * magnet.moment() * Vec3::UnitX();
  return out;
}

Vec3 field_at(const FieldSource& source, const Vec3& p) {
  if (const auto* uniform = std::get_if<UniformField>(&source)) return uniform->B;
  const auto& magnet = std::get<Dipole<double>>(source);
  return dipole_field<double>(p - magnet.position, magnet.moment);
}

}  // namespace ballchain
