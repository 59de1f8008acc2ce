#pragma once

// Skin/rod bending energy over piecewise-constant-curvature segments, and gravity.

#include "ballchain/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace ballchain {

/// Turning angle at `p` between segments (p_prev -> p) and (p -> p_next), in [0, pi].
template <typename Scalar>
Scalar bend_angle(const Vector3<Scalar>& p_prev, const Vector3<Scalar>& p, const Vector3<Scalar>& p_next) {
  const Vector3<Scalar> a = p - p_prev;
  const Vector3<Scalar> b = p_next - p;
  if (a.squaredNorm() == Scalar(0) || b.squaredNorm() == Scalar(0)) {
    throw GeometryError("bend_angle: zero-length segment");
  }
  return std::atan2(b.cross(a).norm(), b.dot(a));
}

/// Radius of the arc spanning a contact-to-contact skin segment of a ball of diameter d.
template <typename Scalar>
Scalar curvature_radius(Scalar theta, Scalar d) {
  if (!(theta < std::numbers::pi_v<Scalar>)) {
    throw GeometryError("curvature_radius: bend angle must be below pi");
  }
  return d / Scalar(2) / std::tan(theta / Scalar(2));
}

/// E I theta / (2 rho), written as (E I / d) theta tan(theta / 2) so that theta = 0 is regular.
template <typename Scalar>
Scalar segment_bend_energy(Scalar theta, Scalar d, Scalar E, Scalar I) {
  return E * I / d * theta * std::tan(theta / Scalar(2));
}

/// Bending energy of the joint between unit directions u (incoming) and v (outgoing), with its
/// tangent-space derivatives. `stiffness` is E I / d.
template <typename Scalar>
struct JointBend {
  Scalar theta;
  Scalar energy;
  Vector3<Scalar> d_u;
  Vector3<Scalar> d_v;
};

template <typename Scalar>
JointBend<Scalar> joint_bend(const Vector3<Scalar>& u, const Vector3<Scalar>& v, Scalar stiffness) {
  const Scalar c = u.dot(v);
  const Scalar s = u.cross(v).norm();
  const Scalar theta = std::atan2(s, c);
  const Scalar half_tan = std::tan(theta / Scalar(2));
  JointBend<Scalar> out;
  out.theta = theta;
  out.energy = stiffness * theta * half_tan;
  // dE/dtheta / sin(theta); the series keeps it finite as theta -> 0.
  Scalar ratio;
  if (theta < Scalar(1e-4)) {
    ratio = stiffness * (Scalar(1) + theta * theta / Scalar(3));
  } else {
    const Scalar dE = stiffness * (half_tan + theta / (Scalar(2) * std::pow(std::cos(theta / Scalar(2)), 2)));
    ratio = dE / std::sin(theta);
  }
  // d theta = -(du . v_perp + dv . u_perp) / sin(theta) for unit u, v.
  out.d_u = -ratio * (v - c * u);
  out.d_v = -ratio * (u - c * v);
  return out;
}

/// Skin strain energy of a chain of balls of diameter d; `bending_stiffness[k]` is E I of the
/// segment around interior point k + 1. Fewer than three points carry no bend and yield 0.
template <typename Scalar>
Scalar total_skin_energy(std::span<const Vector3<Scalar>> points, std::span<const Scalar> bending_stiffness,
                         Scalar d, std::string* diagnostic = nullptr) {
  if (points.size() < 3) {
    if (diagnostic) *diagnostic = "total_skin_energy: fewer than 3 points, no interior segments";
    return Scalar(0);
  }
  if (bending_stiffness.size() + 2 < points.size()) {
    throw std::invalid_argument("total_skin_energy: need one E*I value per interior point");
  }
  Scalar total = Scalar(0);
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const Scalar theta = bend_angle(points[i - 1], points[i], points[i + 1]);
    total += bending_stiffness[i - 1] / d * theta * std::tan(theta / Scalar(2));
  }
  return total;
}

template <typename Scalar = double>
struct MassPoint {
  Scalar mass = Scalar(0);
  Vector3<Scalar> position = Vector3<Scalar>::Zero();
};

/// Potential energy of point masses; increases along `up`.
template <typename Scalar>
Scalar gravity_energy(std::span<const MassPoint<Scalar>> masses, Scalar g_magnitude, const Vector3<Scalar>& up) {
  Scalar total = Scalar(0);
  for (const auto& mp : masses) total += mp.mass * g_magnitude * up.dot(mp.position);
  return total;
}

}  // namespace ballchain
