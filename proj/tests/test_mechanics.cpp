#include "ballchain/mechanics.hpp"
#include "ballchain/design.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace ballchain;

namespace {
constexpr double d = 0.9e-3;
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST(BendAngle, ReferenceGeometries) {
  EXPECT_DOUBLE_EQ(bend_angle<double>(Vec3(0, 0, 0), Vec3(d, 0, 0), Vec3(2 * d, 0, 0)), 0.0);
  EXPECT_NEAR(bend_angle<double>(Vec3(0, 0, 0), Vec3(d, 0, 0), Vec3(d, d, 0)), kPi / 2, 1e-15);
  const double a = deg2rad(40.0);
  EXPECT_NEAR(bend_angle<double>(Vec3(0, 0, 0), Vec3(d, 0, 0), Vec3(d + d * std::cos(a), d * std::sin(a), 0)), a,
              1e-14);
}

TEST(BendAngle, ReversalSymmetricAndRejectsZeroSegments) {
  const Vec3 a(0.1e-3, 0.2e-3, 0), b(1e-3, 0, 0.3e-3), c(1.5e-3, 0.9e-3, -0.2e-3);
  EXPECT_DOUBLE_EQ(bend_angle(a, b, c), bend_angle(c, b, a));
  EXPECT_THROW(bend_angle(a, a, c), GeometryError);
}

TEST(CurvatureRadius, QuarterTurnAndRoundTrip) {
  EXPECT_NEAR(curvature_radius(kPi / 2, d), 0.45e-3, 1e-18);
  const double rho0 = 2.7e-3;
  EXPECT_NEAR(curvature_radius(2 * std::atan(d / (2 * rho0)), d), rho0, 1e-15);
  EXPECT_GT(curvature_radius(1e-9, d), 1e3);
  EXPECT_THROW(curvature_radius(kPi, d), GeometryError);
}

TEST(SegmentBendEnergy, ReferenceValue) {
  const double I = annulus_second_moment(1.0e-3, 0.9e-3);
  EXPECT_NEAR(I, 1.689e-14, 1e-17);
  EXPECT_NEAR(segment_bend_energy(kPi / 2, d, 42.7e3, 1.689e-14), 1.258e-6, 1e-9);
  EXPECT_DOUBLE_EQ(segment_bend_energy(0.0, d, 42.7e3, I), 0.0);
  EXPECT_NEAR(segment_bend_energy(0.8, d, 42.7e3, 2 * I), 2 * segment_bend_energy(0.8, d, 42.7e3, I), 1e-22);
}

TEST(SegmentBendEnergy, ConsistentWithCurvatureRadiusAndIncreasing) {
  const double EI = 42.7e3 * 1.689e-14;
  double prev = 0.0;
  for (int k = 1; k < 180; ++k) {
    const double theta = deg2rad(k);
    const double e = segment_bend_energy(theta, d, 42.7e3, 1.689e-14);
    EXPECT_NEAR(e * 2 * curvature_radius(theta, d) / EI, theta, 1e-12 * theta);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(TotalSkinEnergy, StraightArcAndKink) {
  const double EI = 42.7e3 * 1.689e-14;
  std::vector<Vec3> straight;
  for (int i = 0; i < 10; ++i) straight.push_back(Vec3(i * d, 0, 0));
  const std::vector<double> stiffness(8, EI);
  EXPECT_DOUBLE_EQ(total_skin_energy<double>(straight, stiffness, d), 0.0);

  // Regular polygon arc: every interior turn is the same angle.
  const double turn = deg2rad(12.0);
  std::vector<Vec3> arc{Vec3::Zero()};
  for (int i = 0; i < 9; ++i) arc.push_back(arc.back() + d * Vec3(std::cos(i * turn), std::sin(i * turn), 0));
  EXPECT_NEAR(total_skin_energy<double>(arc, stiffness, d), 8 * segment_bend_energy(turn, d, 42.7e3, 1.689e-14),
              1e-18);

  std::vector<Vec3> kink{Vec3(0, 0, 0), Vec3(d, 0, 0), Vec3(d, d, 0), Vec3(d, 2 * d, 0)};
  EXPECT_NEAR(total_skin_energy<double>(kink, std::vector<double>(2, EI), d), 1.258e-6, 1e-9);

  std::string diagnostic;
  EXPECT_DOUBLE_EQ(total_skin_energy<double>(std::vector<Vec3>(2, Vec3::Zero()), stiffness, d, &diagnostic), 0.0);
  EXPECT_FALSE(diagnostic.empty());
}

TEST(TotalSkinEnergy, InvariantUnderRigidMotion) {
  std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(d, 0, 0), Vec3(1.5 * d, 0.8 * d, 0.1 * d), Vec3(2 * d, 1.2 * d, 0.9 * d)};
  const std::vector<double> stiffness(2, 7.2e-10);
  const double e = total_skin_energy<double>(pts, stiffness, d);
  const Eigen::Matrix3d R = Eigen::AngleAxisd(1.1, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (auto& p : pts) p = R * p + Vec3(0.3, -0.1, 0.2);
  EXPECT_NEAR(total_skin_energy<double>(pts, stiffness, d), e, 1e-12 * e);
}

TEST(JointBend, GradientMatchesFiniteDifference) {
  const double k = 1e-6;
  const Vec3 u = Vec3(1, 0.2, -0.1).normalized();
  const Vec3 v = Vec3(0.6, 0.7, 0.3).normalized();
  const auto b = joint_bend<double>(u, v, k);
  // Derivative along a tangent direction at u.
  const Vec3 t = (Vec3(0, 0, 1) - u.z() * u).normalized();
  const double h = 1e-6;
  const double fd = (joint_bend<double>(Vec3((u + h * t).normalized()), v, k).energy -
                     joint_bend<double>(Vec3((u - h * t).normalized()), v, k).energy) / (2 * h);
  EXPECT_NEAR(b.d_u.dot(t), fd, 1e-7 * std::abs(fd));
}

TEST(GravityEnergy, ExperimentalBallRaised) {
  const std::vector<MassPoint<double>> low{{0.13e-3, Vec3(0, 0, 0)}};
  const std::vector<MassPoint<double>> high{{0.13e-3, Vec3(0, 0, 0.01)}};
  const double rise = gravity_energy<double>(high, 9.81, Vec3::UnitZ()) - gravity_energy<double>(low, 9.81, Vec3::UnitZ());
  EXPECT_NEAR(rise, 1.275e-5, 1e-8);
  EXPECT_DOUBLE_EQ(gravity_energy<double>(high, 0.0, Vec3::UnitZ()), 0.0);
  const std::vector<MassPoint<double>> sideways{{0.13e-3, Vec3(0.05, -0.02, 0.01)}};
  EXPECT_DOUBLE_EQ(gravity_energy<double>(sideways, 9.81, Vec3::UnitZ()),
                   gravity_energy<double>(high, 9.81, Vec3::UnitZ()));
}
