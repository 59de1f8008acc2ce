#include "ballchain/polygon.hpp"

#include "ballchain/types.hpp"

#include <sstream>
#include <vector>

namespace ballchain {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Intersection point of segments pq and rs when their interiors cross.
std::optional<Eigen::Vector2d> segments_cross(const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                                              const Eigen::Vector2d& r, const Eigen::Vector2d& s) {
  const Eigen::Vector2d d1 = q - p;
  const Eigen::Vector2d d2 = s - r;
  const double denom = cross2(d1, d2);
  const double scale = d1.norm() * d2.norm();
  if (std::abs(denom) <= 1e-14 * scale) {
    // Parallel: report collinear overlap of positive length.
    if (std::abs(cross2(r - p, d1)) > 1e-12 * std::max(d1.norm() * (r - p).norm(), 1e-300)) return std::nullopt;
    const double len2 = d1.squaredNorm();
    if (len2 == 0.0) return std::nullopt;
    const double t0 = (r - p).dot(d1) / len2;
    const double t1 = (s - p).dot(d1) / len2;
    const double lo = std::max(0.0, std::min(t0, t1));
    const double hi = std::min(1.0, std::max(t0, t1));
    if (hi - lo > 1e-9) return Eigen::Vector2d(p + 0.5 * (lo + hi) * d1);
    return std::nullopt;
  }
  const double t = cross2(r - p, d2) / denom;
  const double u = cross2(r - p, d1) / denom;
  constexpr double eps = 1e-10;
  if (t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps) return Eigen::Vector2d(p + t * d1);
  return std::nullopt;
}

}  // namespace

Polygon2 remove_duplicate_vertices(const Polygon2& polygon, double tolerance) {
  std::vector<Eigen::Vector2d> kept;
  for (Eigen::Index i = 0; i < polygon.cols(); ++i) {
    const Eigen::Vector2d v = polygon.col(i);
    if (kept.empty() || (v - kept.back()).norm() > tolerance) kept.push_back(v);
  }
  while (kept.size() > 1 && (kept.front() - kept.back()).norm() <= tolerance) kept.pop_back();
  Polygon2 out(2, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
  return out;
}

std::optional<Eigen::Vector2d> find_self_intersection(const Polygon2& polygon_in) {
  const Polygon2 polygon = remove_duplicate_vertices(polygon_in);
  const Eigen::Index n = polygon.cols();
  if (n < 4) return std::nullopt;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d p = polygon.col(i);
    const Eigen::Vector2d q = polygon.col((i + 1) % n);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      const Eigen::Vector2d r = polygon.col(j);
      const Eigen::Vector2d s = polygon.col((j + 1) % n);
      if (auto hit = segments_cross(p, q, r, s)) return hit;
    }
  }
  return std::nullopt;
}

double planar_area(const Polygon2& polygon_in) {
  const Polygon2 polygon = remove_duplicate_vertices(polygon_in);
  const Eigen::Index n = polygon.cols();
  if (n < 3) return 0.0;
  if (auto hit = find_self_intersection(polygon)) {
    std::ostringstream msg;
    msg << "workspace boundary self-intersects at (" << hit->x() << ", " << hit->y() << ")";
    throw GeometryError(msg.str());
  }
  double twice = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) twice += cross2(polygon.col(i), polygon.col((i + 1) % n));
  return std::abs(0.5 * twice);
}

double revolved_volume(const Polygon2& polygon_in) {
  const Polygon2 polygon = remove_duplicate_vertices(polygon_in);
  const Eigen::Index n = polygon.cols();
  if (n < 3) return 0.0;
  const double ymin = polygon.row(1).minCoeff();
  const double span = std::max(polygon.row(1).maxCoeff() - ymin, polygon.row(0).maxCoeff() - polygon.row(0).minCoeff());
  if (ymin < -1e-9 * std::max(span, 1.0)) {
    std::ostringstream msg;
    msg << "region crosses the revolution axis (min y = " << ymin << ")";
    throw GeometryError(msg.str());
  }
  // First moment about the x axis: (1/6) sum (x_i y_{i+1} - x_{i+1} y_i)(y_i + y_{i+1}).
  double moment = 0.0;
  double twice_area = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d a = polygon.col(i);
    const Eigen::Vector2d b = polygon.col((i + 1) % n);
    const double c = cross2(a, b);
    twice_area += c;
    moment += c * (a.y() + b.y());
  }
  moment /= 6.0;
  if (twice_area < 0.0) moment = -moment;
  return 2.0 * std::numbers::pi * moment;
}

}  // namespace ballchain
