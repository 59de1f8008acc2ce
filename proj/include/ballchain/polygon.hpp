#pragma once

// Planar polygon measures for workspace regions.

#include <Eigen/Core>

#include <optional>

namespace ballchain {

using Polygon2 = Eigen::Matrix2Xd;  // vertices as columns, implicitly closed

/// First proper crossing between two non-adjacent edges. Edges that merely share a vertex
/// (pinch points) do not count.
std::optional<Eigen::Vector2d> find_self_intersection(const Polygon2& polygon);

/// Absolute shoelace area. Throws GeometryError naming the crossing point if edges cross.
double planar_area(const Polygon2& polygon);

/// Volume swept by revolving the region about the x axis, 2 pi times its first moment about
/// that axis. The region must lie in y >= 0.
double revolved_volume(const Polygon2& polygon);

/// Drops consecutive (and wrap-around) duplicate vertices.
Polygon2 remove_duplicate_vertices(const Polygon2& polygon, double tolerance = 1e-12);

}  // namespace ballchain
