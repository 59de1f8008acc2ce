#include "ballchain/design.hpp"
#include "ballchain/magnetics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ballchain;

namespace {

// Moment of one 0.9 mm ball of the comparison-study chain, from remanence and volume.
constexpr double kBallMoment = 4.495e-4;

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

}  // namespace

TEST(DipoleField, OnAxisMatchesClosedForm) {
  const Vec3 B = dipole_field<double>(Vec3(0, 0, 0.01), Vec3(0, 0, kBallMoment));
  EXPECT_NEAR(B.z(), 8.99e-5, 1e-8);
  EXPECT_DOUBLE_EQ(B.x(), 0.0);
  EXPECT_DOUBLE_EQ(B.y(), 0.0);
}

TEST(DipoleField, EquatorialIsHalfAxialAndOpposite) {
  const Vec3 m(0, 0, kBallMoment);
  const Vec3 axial = dipole_field<double>(Vec3(0, 0, 0.01), m);
  const Vec3 equatorial = dipole_field<double>(Vec3(0.01, 0, 0), m);
  EXPECT_NEAR(equatorial.z(), -1e-7 * kBallMoment / 1e-6, 1e-18);
  EXPECT_NEAR(axial.norm() / equatorial.norm(), 2.0, 1e-12);
  EXPECT_LT(equatorial.z(), 0.0);
}

TEST(DipoleField, ZeroMomentGivesZeroField) {
  EXPECT_EQ(dipole_field<double>(Vec3(0.003, -0.002, 0.001), Vec3::Zero()), Vec3::Zero());
}

TEST(DipoleField, ThrowsInsideSingularityRadius) {
  EXPECT_THROW(dipole_field<double>(Vec3(1e-7, 0, 0), Vec3::UnitZ()), SingularityError);
  EXPECT_THROW(dipole_field<double>(Vec3(1e-3, 0, 0), Vec3::UnitZ(), 2e-3), SingularityError);
  EXPECT_NO_THROW(dipole_field<double>(Vec3(2e-6, 0, 0), Vec3::UnitZ()));
}

TEST(DipoleField, IsDivergenceFree) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  const Vec3 m(0.1e-3, -0.3e-3, 0.2e-3);
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 r(u(rng), u(rng), u(rng));
    if (r.norm() < 2e-3) r = r.normalized() * 2e-3;
    const double h = 1e-6 * r.norm();
    double div = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = h * Vec3::Unit(k);
      div += (dipole_field<double>(Vec3(r + e), m)(k) - dipole_field<double>(Vec3(r - e), m)(k)) / (2 * h);
    }
    const double scale = dipole_field<double>(r, m).norm() / r.norm();
    EXPECT_LT(std::abs(div), 1e-6 * scale) << "at trial " << trial;
  }
}

TEST(DipoleEnergy, ClosedFormValues) {
  const Vec3 m(0, 0, kBallMoment);
  EXPECT_NEAR(dipole_energy<double>(m, Vec3(0, 0, 0.04)), -1.798e-5, 1e-12);
  EXPECT_NEAR(dipole_energy<double>(m, Vec3(0, 0, -0.04)), 1.798e-5, 1e-12);
  EXPECT_DOUBLE_EQ(dipole_energy<double>(m, Vec3(0.04, 0, 0)), 0.0);
}

TEST(ChainPairEnergy, CoaxialTouchingExperimentalBalls) {
  const double d = 3.175e-3;
  const double m = 1.760e-2;
  std::vector<Dipole<double>> chain{{Vec3::Zero(), Vec3(m, 0, 0)}, {Vec3(d, 0, 0), Vec3(m, 0, 0)}};
  EXPECT_NEAR(chain_pair_energy(chain), -1.936e-3, 1e-6);
  chain[1].moment = -chain[1].moment;
  EXPECT_NEAR(chain_pair_energy(chain), 1.936e-3, 1e-6);
}

TEST(ChainPairEnergy, ThreeCollinearBallsSumPairTerms) {
  const double d = 0.9e-3;
  const Vec3 m(kBallMoment, 0, 0);
  std::vector<Dipole<double>> two{{Vec3::Zero(), m}, {Vec3(d, 0, 0), m}};
  std::vector<Dipole<double>> three{{Vec3::Zero(), m}, {Vec3(d, 0, 0), m}, {Vec3(2 * d, 0, 0), m}};
  const double touching = chain_pair_energy(two);
  EXPECT_NEAR(chain_pair_energy(three), (2.0 + 1.0 / 8.0) * touching, 1e-15 * std::abs(touching));
}

TEST(ChainPairEnergy, CoincidentCentresThrowWithPair) {
  std::vector<Dipole<double>> chain{{Vec3::Zero(), Vec3::UnitX()}, {Vec3(1e-3, 0, 0), Vec3::UnitX()},
                                    {Vec3(1e-3, 0, 0), Vec3::UnitY()}};
  try {
    chain_pair_energy(chain);
    FAIL() << "expected a singularity error";
  } catch (const SingularityError& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(ChainPairEnergy, RigidMotionReversalAndScaling) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5e-3, 5e-3);
  std::vector<Dipole<double>> chain;
  for (int i = 0; i < 6; ++i) chain.push_back({Vec3(u(rng), u(rng), u(rng)), kBallMoment * random_unit(rng)});
  const double U = chain_pair_energy(chain);

  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, random_unit(rng)).toRotationMatrix();
  const Vec3 t(0.01, -0.02, 0.003);
  auto moved = chain;
  for (auto& p : moved) {
    p.position = R * p.position + t;
    p.moment = R * p.moment;
  }
  EXPECT_NEAR(chain_pair_energy(moved), U, 1e-10 * std::abs(U));

  auto reversed = chain;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_NEAR(chain_pair_energy(reversed), U, 1e-12 * std::abs(U));

  auto scaled = chain;
  for (auto& p : scaled) p.position *= 2.0;
  EXPECT_NEAR(chain_pair_energy(scaled), U / 8.0, 1e-12 * std::abs(U));
}

TEST(PairInteraction, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 r = 1e-3 * (Vec3(1, 0, 0) + 0.5 * random_unit(rng));
    const Vec3 mi = random_unit(rng), mj = random_unit(rng);
    const auto p = pair_interaction<double>(r, mi, mj);
    const double h = 1e-9;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k);
      const double fd_r = (pair_interaction<double>(Vec3(r + h * e), mi, mj).energy -
                           pair_interaction<double>(Vec3(r - h * e), mi, mj).energy) / (2 * h);
      EXPECT_NEAR(p.d_offset(k), fd_r, 1e-6 * p.d_offset.norm());
      const double hm = 1e-6;
      const double fd_mi = (pair_interaction<double>(r, Vec3(mi + hm * e), mj).energy -
                            pair_interaction<double>(r, Vec3(mi - hm * e), mj).energy) / (2 * hm);
      EXPECT_NEAR(p.d_mi(k), fd_mi, 1e-6 * p.d_mi.norm());
    }
  }
}

TEST(ExternalMagnet, ExperimentMagnetMoment) {
  EXPECT_NEAR(ExternalMagnetSpec{}.moment(), 204.6, 0.1);
}

TEST(ExternalMagnet, OnAxisBallEnergy) {
  const double me = ExternalMagnetSpec{}.moment();
  const Dipole<double> magnet{Vec3::Zero(), Vec3(me, 0, 0)};
  const double r = 0.2;
  const std::vector<Dipole<double>> ball{{Vec3(r, 0, 0), Vec3(kBallMoment, 0, 0)}};
  const double B = 2e-7 * me / (r * r * r);
  EXPECT_NEAR(B, 5.12e-3, 1e-5);
  EXPECT_NEAR(external_magnet_energy(ball, magnet), -kBallMoment * B, 1e-15);
  EXPECT_DOUBLE_EQ(external_magnet_energy(std::vector<Dipole<double>>{}, magnet), 0.0);
  const std::vector<Dipole<double>> equatorial{{Vec3(0, r, 0), Vec3(0, kBallMoment, 0)}};
  EXPECT_NEAR(external_magnet_energy(equatorial, magnet), 0.0, 1e-20);
}

TEST(ExternalMagnet, GimbalPose) {
  const auto p0 = magnet_pose_from_psi(0.0, MagnetGimbal{}, +1);
  EXPECT_TRUE(p0.position.isApprox(Vec3(0.35, 0, -0.05), 1e-14));
  const auto p90 = magnet_pose_from_psi(deg2rad(90.0), MagnetGimbal{}, -1);
  EXPECT_TRUE(p90.position.isApprox(Vec3(0.20, 0, -0.20), 1e-14));
  EXPECT_LT(p90.moment.x(), 0.0);
  const MagnetGimbal fixed{0.0, 0.2, 0.35};
  EXPECT_EQ(magnet_pose_from_psi(0.3, fixed, 1).position, magnet_pose_from_psi(1.2, fixed, 1).position);
  EXPECT_THROW(magnet_pose_from_psi(0.0, MagnetGimbal{}, 0), std::invalid_argument);
}
