#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ballchain {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3 = Eigen::Vector3d;

/// Columns are unit vectors; one column per free direction.
using Directions = Eigen::Matrix3Xd;

/// Columns are points in R^3.
using Points = Eigen::Matrix3Xd;

/// mu_0 / (4 pi), exact for mu_0 = 4 pi 1e-7 T m / A.
template <typename Scalar = double>
inline constexpr Scalar kMu0Over4Pi = Scalar(1e-7);

template <typename Scalar = double>
inline constexpr Scalar kMu0 = Scalar(4e-7) * std::numbers::pi_v<Scalar>;

inline constexpr double kStandardGravity = 9.81;

/// Thrown when a field or interaction is evaluated at (or too close to) its source.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown for zero-length segments and other invalid geometry.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown for malformed scenario/scene input; `where` names the offending field or location.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Moment of a uniformly magnetized body: B_r V / mu_0.
inline double moment_from_remanence(double remanence, double volume) {
  return remanence * volume / kMu0<double>;
}

inline double sphere_volume(double diameter) {
  return std::numbers::pi / 6.0 * diameter * diameter * diameter;
}

inline double cylinder_volume(double diameter, double length) {
  return std::numbers::pi / 4.0 * diameter * diameter * length;
}

/// Second moment of area of a solid circular section.
inline double solid_second_moment(double diameter) {
  return std::numbers::pi * std::pow(diameter, 4) / 64.0;
}

/// Second moment of area of an annulus.
inline double annulus_second_moment(double outer, double inner) {
  return std::numbers::pi * (std::pow(outer, 4) - std::pow(inner, 4)) / 64.0;
}

/// Projects each column of `grad` onto the tangent space of the sphere at the matching column of `x`.
inline void project_tangent(const Directions& x, Directions& grad) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    grad.col(j) -= x.col(j).dot(grad.col(j)) * x.col(j);
  }
}

inline void normalize_columns(Directions& x) { x.colwise().normalize(); }

}  // namespace ballchain
