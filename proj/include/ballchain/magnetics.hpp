#pragma once

// Point-dipole fields and magnetic potential energies.

#include "ballchain/types.hpp"

#include <optional>
#include <span>
#include <sstream>
#include <vector>

namespace ballchain {

template <typename Scalar = double>
struct Dipole {
  Vector3<Scalar> position = Vector3<Scalar>::Zero();
  Vector3<Scalar> moment = Vector3<Scalar>::Zero();
};

struct UniformField {
  Vec3 B = Vec3::Zero();
};

inline constexpr double kDefaultSingularityRadius = 1e-6;

/// Field at offset `r` from a point dipole of moment `m`.
template <typename Scalar>
Vector3<Scalar> dipole_field(const Vector3<Scalar>& r, const Vector3<Scalar>& m,
                             Scalar r_min = Scalar(kDefaultSingularityRadius)) {
  const Scalar dist = r.norm();
  if (!(dist >= r_min)) {
    std::ostringstream msg;
    msg << "dipole field evaluated at distance " << dist << " m (< " << r_min << " m)";
    throw SingularityError(msg.str());
  }
  const Vector3<Scalar> rhat = r / dist;
  const Scalar scale = kMu0Over4Pi<Scalar> / (dist * dist * dist);
  return scale * (Scalar(3) * rhat * rhat.dot(m) - m);
}

template <typename Scalar>
Scalar dipole_energy(const Vector3<Scalar>& m, const Vector3<Scalar>& B) {
  return -m.dot(B);
}

/// Interaction energy of dipole j at offset r from dipole i, together with its derivatives.
template <typename Scalar>
struct PairInteraction {
  Scalar energy;
  Vector3<Scalar> d_offset;  // dU/dr, where r = p_j - p_i
  Vector3<Scalar> d_mi;
  Vector3<Scalar> d_mj;
};

template <typename Scalar>
PairInteraction<Scalar> pair_interaction(const Vector3<Scalar>& r, const Vector3<Scalar>& mi,
                                         const Vector3<Scalar>& mj,
                                         Scalar r_min = Scalar(kDefaultSingularityRadius)) {
  const Scalar dist2 = r.squaredNorm();
  const Scalar dist = std::sqrt(dist2);
  if (!(dist >= r_min)) {
    std::ostringstream msg;
    msg << "dipole pair at distance " << dist << " m (< " << r_min << " m)";
    throw SingularityError(msg.str());
  }
  const Scalar inv3 = Scalar(1) / (dist2 * dist);
  const Scalar inv5 = inv3 / dist2;
  const Scalar inv7 = inv5 / dist2;
  const Scalar a = mi.dot(r);
  const Scalar b = mj.dot(r);
  const Scalar s = mi.dot(mj);
  const Scalar c = kMu0Over4Pi<Scalar>;
  PairInteraction<Scalar> out;
  out.energy = -c * (Scalar(3) * a * b * inv5 - s * inv3);
  out.d_offset = -c * (Scalar(3) * (b * mi + a * mj + s * r) * inv5 - Scalar(15) * a * b * inv7 * r);
  out.d_mi = -c * (Scalar(3) * b * inv5 * r - inv3 * mj);
  out.d_mj = -c * (Scalar(3) * a * inv5 * r - inv3 * mi);
  return out;
}

/// Mutual energy of a set of dipoles, each unordered pair counted once.
template <typename Scalar>
Scalar chain_pair_energy(std::span<const Dipole<Scalar>> dipoles,
                         Scalar r_min = Scalar(kDefaultSingularityRadius)) {
  Scalar total = Scalar(0);
  for (std::size_t i = 0; i < dipoles.size(); ++i) {
    for (std::size_t j = i + 1; j < dipoles.size(); ++j) {
      const Vector3<Scalar> r = dipoles[j].position - dipoles[i].position;
      if (!(r.norm() >= r_min)) {
        std::ostringstream msg;
        msg << "coincident dipoles " << i << " and " << j;
        throw SingularityError(msg.str());
      }
      total -= dipoles[j].moment.dot(dipole_field(r, dipoles[i].moment, r_min));
    }
  }
  return total;
}

template <typename Scalar>
Scalar chain_pair_energy(const std::vector<Dipole<Scalar>>& dipoles) {
  return chain_pair_energy(std::span<const Dipole<Scalar>>(dipoles));
}

/// Set when a chain dipole lies within one magnet diameter of the external magnet,
/// where the point-dipole model of the magnet degrades.
struct ProximityWarning {
  std::size_t index;
  double distance;
};

/// Energy of chain dipoles in the field of an external magnet modelled as a point dipole.
/// `magnet_diameter` > 0 enables the proximity check, reported through `warnings`.
template <typename Scalar>
Scalar external_magnet_energy(std::span<const Dipole<Scalar>> chain, const Dipole<Scalar>& magnet,
                              Scalar magnet_diameter = Scalar(0),
                              std::vector<ProximityWarning>* warnings = nullptr) {
  Scalar total = Scalar(0);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Vector3<Scalar> r = chain[i].position - magnet.position;
    if (warnings && magnet_diameter > Scalar(0) && r.norm() <= magnet_diameter) {
      warnings->push_back({i, static_cast<double>(r.norm())});
    }
    total -= chain[i].moment.dot(dipole_field(r, magnet.moment));
  }
  return total;
}

template <typename Scalar>
Scalar external_magnet_energy(const std::vector<Dipole<Scalar>>& chain, const Dipole<Scalar>& magnet) {
  return external_magnet_energy(std::span<const Dipole<Scalar>>(chain), magnet);
}

/// Spatial derivative of the dipole field: returns dB/dr applied as (dB/dr)^T v, i.e. the gradient
/// of v . B(r, m) with respect to r. Used for the position dependence of U_e.
template <typename Scalar>
Vector3<Scalar> dipole_field_gradient_dot(const Vector3<Scalar>& r, const Vector3<Scalar>& m,
                                          const Vector3<Scalar>& v) {
  // v . B(r, m) is the (negated) pair energy of v at offset r from m.
  return -pair_interaction<Scalar>(r, m, v).d_offset;
}

}  // namespace ballchain
