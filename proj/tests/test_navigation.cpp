#include "ballchain/navigation.hpp"

#include <gtest/gtest.h>

using namespace ballchain;

namespace {

ChannelScene straight_scene() { return builtin_scene("straight"); }

}  // namespace

TEST(Scene, BuiltinScenesValidate) {
  const double d = experimental_ball_chain().ball_diameter;
  for (const auto& name : builtin_scene_names()) {
    const ChannelScene s = builtin_scene(name);
    EXPECT_NO_THROW(s.validate(d)) << name;
    EXPECT_FALSE(s.walls.empty()) << name;
  }
  EXPECT_THROW(builtin_scene("no-such-scene"), std::invalid_argument);
}

TEST(Scene, NarrowChannelRejected) {
  const double d = experimental_ball_chain().ball_diameter;
  const ChannelScene s = bifurcation_scene("narrow", 90.0, 0.9 * d);
  EXPECT_THROW(s.validate(d), GeometryError);
  EXPECT_THROW(NavigationSession(s, NavigationSettings{}), GeometryError);
}

TEST(Scene, ConvexPolygonMembership) {
  Polygon2 sq(2, 4);
  sq << 0, 1, 1, 0, 0, 0, 1, 1;
  EXPECT_TRUE(point_in_convex_polygon(sq, Vec2(0.5, 0.5)));
  EXPECT_FALSE(point_in_convex_polygon(sq, Vec2(1.5, 0.5)));
}

TEST(WallPenalty, ZeroInsideAndQuadraticBeyondClearance) {
  const ChannelScene s = straight_scene();
  const double r = 1.5e-3, k = 1e3;
  Points p(3, 1);
  p.col(0) = Vec3(s.entry.x() + 5e-3, s.entry.y(), 0);
  EXPECT_DOUBLE_EQ(wall_penalty(p, s, r, k, nullptr), 0.0);
  // Push the ball so it overlaps one wall by 0.1 mm.
  const double half = 0.5 * s.width;
  p.col(0).y() = s.entry.y() + (half - r + 1e-4);
  EXPECT_NEAR(wall_penalty(p, s, r, k, nullptr), 0.5 * k * 1e-8, 1e-12);
  EXPECT_NEAR(max_penetration(p, s, r), 1e-4, 1e-12);
}

TEST(WallPenalty, GradientMatchesFiniteDifference) {
  const ChannelScene s = builtin_scene("turn120");
  Points p(3, 4);
  p << s.junction.x() - 2e-3, s.junction.x(), s.junction.x() + 1e-3, s.junction.x() + 1.7e-3,
      s.junction.y() + 0.9e-3, s.junction.y() - 0.4e-3, s.junction.y() + 1.1e-3, s.junction.y() + 2.6e-3, 0, 0, 0, 0;
  const double r = 1.5875e-3, k = 1e5;
  Points g = Points::Zero(3, 4);
  wall_penalty(p, s, r, k, &g);
  const double h = 1e-9;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (int c = 0; c < 2; ++c) {
      Points a = p, b = p;
      a(c, j) += h;
      b(c, j) -= h;
      const double fd = (wall_penalty(a, s, r, k, nullptr) - wall_penalty(b, s, r, k, nullptr)) / (2 * h);
      EXPECT_NEAR(g(c, j), fd, 1e-5 * std::max(1e-12, g.norm())) << "ball " << j << " axis " << c;
    }
}

TEST(Session, EmptyCommandListGivesInitialState) {
  NavigationSession session(straight_scene());
  ASSERT_EQ(session.log().size(), 1u);
  EXPECT_FALSE(session.log().front().command.has_value());
  EXPECT_TRUE(session.state().converged);
}

TEST(Session, AdvanceInStraightChannel) {
  NavigationSession session(straight_scene());
  const double d = session.settings().design.ball_diameter;
  const Vec3 tip0 = session.tip();
  for (int k = 0; k < 8; ++k) session.step(NavCommand::advance(0.5 * d));
  const Vec3 tip = session.tip();
  EXPECT_NEAR((tip - tip0).dot(Vec3(session.scene().axis.x(), session.scene().axis.y(), 0)), 4 * d, 0.05 * d);
  EXPECT_FALSE(session.state().jammed);
  EXPECT_LT(session.state().max_penetration, 0.05 * 0.5 * d);
  EXPECT_EQ(session.log().size(), 9u);
}

TEST(Session, RejectsInvalidSteps) {
  NavigationSession session(straight_scene());
  const double d = session.settings().design.ball_diameter;
  EXPECT_THROW(session.step(NavCommand::advance(1.5 * d)), std::invalid_argument);
  EXPECT_THROW(session.step(NavCommand::advance(0.0)), std::invalid_argument);
  EXPECT_THROW(session.step(NavCommand::retract(session.state().inserted_length)), std::invalid_argument);
  EXPECT_EQ(session.log().size(), 1u);
}

TEST(Session, ReplayIsDeterministic) {
  const ChannelScene scene = builtin_scene("turn90");
  const auto script = autopilot_script(scene, NavigationSettings{});
  NavigationSession a(scene), b(scene);
  for (const auto& c : script) {
    a.step(c);
    b.step(c);
  }
  EXPECT_EQ(a.tip(), b.tip());
  EXPECT_EQ(a.state().energy.total, b.state().energy.total);
  const Vec3 tip = a.tip();
  EXPECT_TRUE(point_in_convex_polygon(scene.branch("side").region, Vec2(tip.x(), tip.y())));
}
