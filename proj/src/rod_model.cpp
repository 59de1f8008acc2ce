#include "ballchain/rod_model.hpp"

#include "ballchain/magnetics.hpp"
#include "ballchain/mechanics.hpp"

#include <stdexcept>

namespace ballchain {

RodConfig RodConfig::straight(const DesignSpec& design, double length, const Vec3& base_position,
                              const Vec3& base_tangent) {
  if (design.kind == DesignKind::BallChain) throw std::invalid_argument("RodConfig: ball chain is not a rod design");
  if (!(length > 0.0)) throw std::invalid_argument("RodConfig: rod length must be positive");
  RodConfig rod;
  rod.base_position = base_position;
  rod.base_tangent = base_tangent.normalized();
  rod.tip_magnet = design.kind == DesignKind::TipMagnet;

  const double magnet = rod.tip_magnet ? std::min(design.tip_magnet_length, length) : 0.0;
  const double flexible = length - magnet;
  Eigen::Index flex_segments = 0;
  if (flexible > 1e-12) {
    flex_segments = static_cast<Eigen::Index>(std::ceil(flexible / design.max_pitch - 1e-9));
    rod.pitch = flexible / static_cast<double>(flex_segments);
  }
  const Eigen::Index total = flex_segments + (rod.tip_magnet ? 1 : 0);
  rod.segment_lengths = Eigen::VectorXd::Constant(total, rod.pitch);
  if (rod.tip_magnet) rod.segment_lengths(total - 1) = magnet;
  rod.tangents = rod.base_tangent.replicate(1, total);
  return rod;
}

Points rod_nodes(const RodConfig& rod) {
  Points nodes(3, rod.segments() + 1);
  nodes.col(0) = rod.base_position;
  for (Eigen::Index k = 0; k < rod.segments(); ++k) {
    nodes.col(k + 1) = nodes.col(k) + rod.segment_lengths(k) * rod.tangents.col(k);
  }
  return nodes;
}

Vec3 rod_tip(const RodConfig& rod) {
  const Points nodes = rod_nodes(rod);
  const Eigen::Index last = rod.segments();
  if (rod.tip_magnet) return 0.5 * (nodes.col(last - 1) + nodes.col(last));
  return nodes.col(last);
}

EnergyBreakdown rod_energy(const RodConfig& rod, const DesignSpec& design, const FieldSource& field,
                           Directions* free_gradient) {
  if (design.kind == DesignKind::BallChain) {
    throw std::invalid_argument("rod_energy: ball chain designs use total_energy");
  }
  if ((design.kind == DesignKind::TipMagnet) != rod.tip_magnet) {
    throw std::invalid_argument("rod_energy: rod layout does not match the design kind");
  }
  const Eigen::Index segs = rod.segments();
  const Points nodes = rod_nodes(rod);
  const bool want_grad = free_gradient != nullptr;
  Points g_node = Points::Zero(3, segs + 1);
  Directions g_tan = Directions::Zero(3, segs);
  EnergyBreakdown e;

  // Bending: clamp joint at the base plus every joint between consecutive segments.
  if (rod.pitch > 0.0) {
    const double stiffness = design.elastic_modulus * design.rod_second_moment() / rod.pitch;
    auto add_joint = [&](const Vec3& u, const Vec3& v, Eigen::Index iu, Eigen::Index iv) {
      const auto bend = joint_bend<double>(u, v, stiffness);
      e.elastic += bend.energy;
      if (want_grad) {
        if (iu >= 0) g_tan.col(iu) += bend.d_u;
        g_tan.col(iv) += bend.d_v;
      }
    };
    add_joint(rod.base_tangent, rod.tangents.col(0), -1, 0);
    for (Eigen::Index k = 1; k < segs; ++k) add_joint(rod.tangents.col(k - 1), rod.tangents.col(k), k - 1, k);
  }

  // Each magnetic element is a point dipole at its segment midpoint, moment along the tangent.
  auto add_dipole = [&](Eigen::Index k, double magnitude) {
    const Vec3 t = rod.tangents.col(k);
    const Vec3 moment = magnitude * t;
    const Vec3 mid = 0.5 * (nodes.col(k) + nodes.col(k + 1));
    if (const auto* uniform = std::get_if<UniformField>(&field)) {
      e.field -= moment.dot(uniform->B);
      if (want_grad) g_tan.col(k) -= magnitude * uniform->B;
    } else {
      const auto& magnet = std::get<Dipole<double>>(field);
      const auto pair = pair_interaction<double>(Vec3(mid - magnet.position), magnet.moment, moment);
      e.field += pair.energy;
      if (want_grad) {
        g_node.col(k) += pair.d_offset;
        g_tan.col(k) += 0.5 * rod.segment_lengths(k) * pair.d_offset + magnitude * pair.d_mj;
      }
    }
  };
  if (rod.tip_magnet) {
    add_dipole(segs - 1, design.tip_magnet_moment);
  } else {
    for (Eigen::Index k = 0; k < segs; ++k) add_dipole(k, design.moment_per_length * rod.segment_lengths(k));
  }

  e.sum();

  if (want_grad) {
    Vec3 suffix = Vec3::Zero();
    for (Eigen::Index k = segs - 1; k >= 0; --k) {
      suffix += g_node.col(k + 1);
      g_tan.col(k) += rod.segment_lengths(k) * suffix;
    }
    if (rod.free_direction_count() == 0) {
      free_gradient->resize(3, 0);
    } else {
      *free_gradient = g_tan;
    }
  }
  return e;
}

double characteristic_energy(const RodConfig& rod, const DesignSpec& design, const FieldSource& field) {
  const double B = std::holds_alternative<UniformField>(field)
                       ? std::get<UniformField>(field).B.norm()
                       : field_at(field, rod_tip(rod)).norm();
  const double pitch = rod.pitch > 0.0 ? rod.pitch : design.max_pitch;
  double scale = design.elastic_modulus * design.rod_second_moment() / pitch;
  if (rod.tip_magnet) {
    scale += design.tip_magnet_moment * B;
  } else {
    scale += design.moment_per_length * pitch * B;
  }
  return scale;
}

}  // namespace ballchain
