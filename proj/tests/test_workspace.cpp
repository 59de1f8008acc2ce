#include "ballchain/polygon.hpp"
#include "ballchain/workspace.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace ballchain;

namespace {

Polygon2 half_disk(double radius, double step_deg) {
  const int n = static_cast<int>(std::round(180.0 / step_deg));
  Polygon2 p(2, n + 2);
  p.col(0) = Eigen::Vector2d::Zero();
  for (int k = 0; k <= n; ++k) {
    const double a = deg2rad(k * step_deg);
    p.col(k + 1) = radius * Eigen::Vector2d(std::cos(a), std::sin(a));
  }
  return p;
}

}  // namespace

TEST(Polygon, HalfDiskArea) {
  EXPECT_NEAR(planar_area(half_disk(20.0, 1.0)), 628.3, 0.5);
  EXPECT_NEAR(revolute_reference_area(20.0), 628.3, 0.05);
}

TEST(Polygon, RevolvedHalfDiskIsBall) {
  const double v = revolved_volume(half_disk(1.0, 0.05));
  EXPECT_NEAR(v, 4.0 / 3.0 * std::numbers::pi, 1e-4);
}

TEST(Polygon, AreaIndependentOfOrientationAndStart) {
  Polygon2 square(2, 4);
  square << 0, 2, 2, 0, 0, 0, 3, 3;
  EXPECT_DOUBLE_EQ(planar_area(square), 6.0);
  EXPECT_DOUBLE_EQ(planar_area(square.rowwise().reverse()), 6.0);
}

TEST(Polygon, BowTieIsRejected) {
  Polygon2 bowtie(2, 4);
  bowtie << 0, 1, 1, 0, 0, 1, 0, 1;
  const auto x = find_self_intersection(bowtie);
  ASSERT_TRUE(x.has_value());
  EXPECT_TRUE(x->isApprox(Eigen::Vector2d(0.5, 0.5), 1e-12));
  EXPECT_THROW(planar_area(bowtie), GeometryError);
}

TEST(Polygon, PinchPointIsAllowed) {
  // Two triangles touching at the origin, traversed as one loop.
  Polygon2 pinch(2, 6);
  pinch << 0, 1, 1, 0, -1, -1, 0, 0, 1, 0, 0, -1;
  EXPECT_FALSE(find_self_intersection(pinch).has_value());
  EXPECT_NEAR(planar_area(pinch), 1.0, 1e-15);
}

TEST(Polygon, DuplicateVerticesRemoved) {
  Polygon2 p(2, 5);
  p << 0, 1, 1, 0, 0, 0, 0, 1, 1, 0;
  EXPECT_EQ(remove_duplicate_vertices(p).cols(), 4);
}

TEST(Workspace, BallCountFromLength) {
  const DesignSpec chain = design_from_table(DesignKind::BallChain);
  EXPECT_EQ(ball_count_for_length(chain, 0.9e-3), 1);
  EXPECT_EQ(ball_count_for_length(chain, 1.0e-3), 1);
  EXPECT_EQ(ball_count_for_length(chain, 20e-3), 22);
  EXPECT_EQ(ball_count_for_length(chain, 0.1e-3), 1);
}

TEST(Workspace, CoarseBallChainScanIsBounded) {
  WorkspaceOptions opt;
  opt.angles_deg = WorkspaceOptions::grid(0.0, 180.0, 10.0);
  opt.lengths_mm = WorkspaceOptions::grid(2.0, 10.0, 2.0);
  const WorkspaceScan s = scan(design_from_table(DesignKind::BallChain), opt);
  ASSERT_EQ(s.tips.size(), opt.angles_deg.size());
  ASSERT_EQ(s.tips.front().size(), opt.lengths_mm.size());
  EXPECT_GT(s.area_mm2, 0.0);
  EXPECT_LE(s.area_mm2, revolute_reference_area(10.0));
  EXPECT_NEAR(s.area_mm2, planar_area(s.region()), 1e-9);
  // Aligned field: boundary A is the straight chain along x.
  for (const auto& p : s.boundary_a) EXPECT_LT(std::abs(p.y()), 1e-6);
  EXPECT_EQ(s.boundary_b.size(), opt.angles_deg.size());
}

TEST(Workspace, ParallelScanIsIdentical) {
  WorkspaceOptions opt;
  opt.angles_deg = WorkspaceOptions::grid(0.0, 180.0, 20.0);
  opt.lengths_mm = WorkspaceOptions::grid(1.0, 5.0, 1.0);
  const DesignSpec design = design_from_table(DesignKind::TipMagnet);
  const WorkspaceScan a = scan(design, opt);
  opt.parallel = 3;
  const WorkspaceScan b = scan(design, opt);
  EXPECT_EQ(a.area_mm2, b.area_mm2);
  for (std::size_t i = 0; i < a.tips.size(); ++i)
    for (std::size_t j = 0; j < a.tips[i].size(); ++j) EXPECT_EQ(a.tips[i][j], b.tips[i][j]);
}
