#include "ballchain/chain_model.hpp"

#include "ballchain/magnetics.hpp"
#include "ballchain/mechanics.hpp"

#include <stdexcept>

namespace ballchain {

Directions ChainConfig::free_directions() const {
  const Eigen::Index links = n() - 1;
  Directions free(3, 2 * links);
  if (links > 0) {
    free.leftCols(links) = link_dirs;
    free.rightCols(links) = dipole_dirs.rightCols(links);
  }
  return free;
}

void ChainConfig::set_free_directions(const Directions& free) {
  const Eigen::Index links = n() - 1;
  if (free.cols() != 2 * links) throw std::invalid_argument("set_free_directions: wrong column count");
  if (links == 0) return;
  link_dirs = free.leftCols(links);
  dipole_dirs.rightCols(links) = free.rightCols(links);
}

ChainConfig ChainConfig::straight(Eigen::Index n, double d, const Vec3& base_position, const Vec3& base_tangent) {
  if (n < 1) throw std::invalid_argument("ChainConfig::straight: need at least one ball");
  ChainConfig c;
  c.d = d;
  c.base_position = base_position;
  const Vec3 t = base_tangent.normalized();
  c.link_dirs = t.replicate(1, n - 1);
  c.dipole_dirs = t.replicate(1, n);
  return c;
}

Points positions(const ChainConfig& config) {
  Points p(3, config.n());
  p.col(0) = config.base_position;
  for (Eigen::Index i = 1; i < config.n(); ++i) p.col(i) = p.col(i - 1) + config.d * config.link_dirs.col(i - 1);
  return p;
}

EnergyBreakdown total_energy(const ChainConfig& config, const ChainModel& model, Directions* free_gradient) {
  const Eigen::Index n = config.n();
  const DesignSpec& design = model.design;
  const double moment = design.ball_moment;
  const Points p = positions(config);
  const Points m = moment * config.dipole_dirs;
  const bool want_grad = free_gradient != nullptr;

  Points g_pos = Points::Zero(3, n);
  Points g_mom = Points::Zero(3, n);
  Directions g_link = Directions::Zero(3, std::max<Eigen::Index>(n - 1, 0));

  EnergyBreakdown e;
  const double contact_stiffness = ball_contact_stiffness(design, config.d);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec3 r = p.col(j) - p.col(i);
      if (!(r.norm() >= kDefaultSingularityRadius)) {
        throw SingularityError("coincident balls " + std::to_string(i) + " and " + std::to_string(j));
      }
      const auto pair = pair_interaction<double>(r, m.col(i), m.col(j));
      e.dipole_dipole += pair.energy;
      Vec3 d_offset = pair.d_offset;
      const double dist = r.norm();
      if (j > i + 1 && dist < config.d) {
        const double depth = config.d - dist;
        e.contact += 0.5 * contact_stiffness * depth * depth;
        d_offset -= contact_stiffness * depth / dist * r;
      }
      if (want_grad) {
        g_pos.col(j) += d_offset;
        g_pos.col(i) -= d_offset;
        g_mom.col(i) += pair.d_mi;
        g_mom.col(j) += pair.d_mj;
      }
    }
  }

  if (const auto* uniform = std::get_if<UniformField>(&model.field)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      e.field -= m.col(i).dot(uniform->B);
      if (want_grad) g_mom.col(i) -= uniform->B;
    }
  } else {
    const auto& magnet = std::get<Dipole<double>>(model.field);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto pair = pair_interaction<double>(Vec3(p.col(i) - magnet.position), magnet.moment, m.col(i));
      e.field += pair.energy;
      if (want_grad) {
        g_pos.col(i) += pair.d_offset;
        g_mom.col(i) += pair.d_mj;
      }
    }
  }

  if (design.include_skin) {
    const double stiffness = design.elastic_modulus * design.skin_second_moment() / config.d;
    auto add_joint = [&](const Vec3& u, const Vec3& v, Eigen::Index iu, Eigen::Index iv) {
      const auto bend = joint_bend<double>(u, v, stiffness);
      e.elastic += bend.energy;
      if (want_grad) {
        if (iu >= 0) g_link.col(iu) += bend.d_u;
        g_link.col(iv) += bend.d_v;
      }
    };
    if (design.clamped_base && n > 1) add_joint(config.base_tangent(), config.link_dirs.col(0), -1, 0);
    for (Eigen::Index k = 1; k + 1 < n; ++k) add_joint(config.link_dirs.col(k - 1), config.link_dirs.col(k), k - 1, k);
  }

  if (model.gravity.enabled) {
    const double weight = design.effective_ball_mass() * model.gravity.g;
    const Vec3 up = model.gravity.up.normalized();
    for (Eigen::Index i = 0; i < n; ++i) {
      e.gravity += weight * up.dot(p.col(i));
      if (want_grad) g_pos.col(i) += weight * up;
    }
  }

  if (model.penalty) e.wall = model.penalty(p, want_grad ? &g_pos : nullptr);

  e.sum();

  if (want_grad) {
    const Eigen::Index links = n - 1;
    free_gradient->resize(3, 2 * links);
    // Link j moves every ball after it.
    Vec3 suffix = Vec3::Zero();
    for (Eigen::Index j = links - 1; j >= 0; --j) {
      suffix += g_pos.col(j + 1);
      g_link.col(j) += config.d * suffix;
    }
    if (links > 0) {
      free_gradient->leftCols(links) = g_link;
      free_gradient->rightCols(links) = moment * g_mom.rightCols(links);
    }
  }
  return e;
}

double ball_contact_stiffness(const DesignSpec& design, double d) {
  // Peak dipole attraction between touching balls, 6 (mu0 / 4 pi) m^2 / d^4, held at 1e-4 d.
  const double force = 6.0 * kMu0Over4Pi<double> * design.ball_moment * design.ball_moment / std::pow(d, 4);
  return force / (1e-4 * d);
}

double characteristic_energy(const ChainModel& model, Eigen::Index n) {
  const DesignSpec& design = model.design;
  const double d = design.ball_diameter;
  const double moment = design.ball_moment;
  double scale = 2.0 * kMu0Over4Pi<double> * moment * moment / (d * d * d);
  if (const auto* uniform = std::get_if<UniformField>(&model.field)) {
    scale += moment * uniform->B.norm();
  } else {
    const auto& magnet = std::get<Dipole<double>>(model.field);
    const double dist = std::max(magnet.position.norm(), n * d);
    scale += moment * 2.0 * kMu0Over4Pi<double> * magnet.moment.norm() / std::pow(dist, 3);
  }
  if (design.include_skin) scale += design.elastic_modulus * design.skin_second_moment() / d;
  if (model.gravity.enabled) scale += design.effective_ball_mass() * model.gravity.g * d;
  return scale;
}

std::vector<double> joint_angles(const ChainConfig& config) {
  std::vector<double> out;
  for (Eigen::Index k = 1; k + 1 < config.n(); ++k) {
    const Vec3 u = config.link_dirs.col(k - 1);
    const Vec3 v = config.link_dirs.col(k);
    out.push_back(std::atan2(u.cross(v).norm(), u.dot(v)));
  }
  return out;
}

std::vector<OverlapPair> find_overlaps(const ChainConfig& config) {
  std::vector<OverlapPair> out;
  const Points p = positions(config);
  const double limit = config.d * (1.0 - 1e-6);
  for (Eigen::Index i = 0; i < config.n(); ++i) {
    for (Eigen::Index j = i + 2; j < config.n(); ++j) {
      const double dist = (p.col(j) - p.col(i)).norm();
      if (dist < limit) out.push_back({i, j, dist});
    }
  }
  return out;
}

std::vector<std::pair<Eigen::Index, double>> magnet_proximity(const ChainConfig& config, const ChainModel& model) {
  std::vector<std::pair<Eigen::Index, double>> out;
  const auto* magnet = std::get_if<Dipole<double>>(&model.field);
  if (!magnet || model.magnet_diameter <= 0.0) return out;
  const Points p = positions(config);
  for (Eigen::Index i = 0; i < config.n(); ++i) {
    const double dist = (p.col(i) - magnet->position).norm();
    if (dist <= model.magnet_diameter) out.emplace_back(i, dist);
  }
  return out;
}

}  // namespace ballchain
