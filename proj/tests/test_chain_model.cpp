#include "ballchain/chain_model.hpp"
#include "ballchain/rod_model.hpp"
#include "ballchain/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ballchain;

namespace {

ChainConfig random_config(Eigen::Index n, std::uint64_t seed, double spread = 0.6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ChainConfig c = ChainConfig::straight(n, 0.9e-3, Vec3::Zero(), Vec3::UnitX());
  Directions free = c.free_directions();
  for (Eigen::Index j = 0; j < free.cols(); ++j) {
    free.col(j) = (free.col(j) + spread * Vec3(g(rng), g(rng), g(rng))).normalized();
  }
  c.set_free_directions(free);
  return c;
}

ChainModel table_model(const FieldSource& field) {
  ChainModel m;
  m.design = design_from_table(DesignKind::BallChain);
  m.field = field;
  return m;
}

}  // namespace

TEST(DesignTable, TabulatedConstants) {
  const DesignSpec chain = design_from_table(DesignKind::BallChain);
  EXPECT_DOUBLE_EQ(chain.ball_moment, 0.45e-3);
  EXPECT_NEAR(chain.ball_moment_from_remanence(), 4.495e-4, 1e-7);
  EXPECT_DOUBLE_EQ(design_from_table(DesignKind::DistributedParticles).elastic_modulus, 128.2e3);
  EXPECT_DOUBLE_EQ(design_from_table(DesignKind::TipMagnet).tip_magnet_moment, 0.67e-3);
  EXPECT_EQ(design_kind_from_string(to_string(DesignKind::TipMagnet)), DesignKind::TipMagnet);
}

TEST(ChainConfig, StraightPositionsAndParameterCount) {
  const ChainConfig c = ChainConfig::straight(10, 0.9e-3, Vec3(1, 2, 3), Vec3::UnitX());
  const Points p = positions(c);
  EXPECT_TRUE(p.col(9).isApprox(Vec3(1 + 8.1e-3, 2, 3), 1e-15));
  EXPECT_EQ(c.free_parameter_count(), 4 * 10 - 4);
}

TEST(ChainConfig, StaircaseAndExactSpacing) {
  ChainConfig c = ChainConfig::straight(5, 1e-3, Vec3::Zero(), Vec3::UnitX());
  for (Eigen::Index i = 0; i < 4; ++i) c.link_dirs.col(i) = i % 2 == 0 ? Vec3::UnitX() : Vec3::UnitY();
  const Points p = positions(c);
  EXPECT_TRUE(p.col(4).isApprox(Vec3(2e-3, 2e-3, 0), 1e-15));
  const ChainConfig r = random_config(8, 5);
  const Points q = positions(r);
  for (Eigen::Index i = 0; i + 1 < q.cols(); ++i) EXPECT_NEAR((q.col(i + 1) - q.col(i)).norm(), 0.9e-3, 1e-18);
}

TEST(TotalEnergy, StraightAlignedChain) {
  const auto model = table_model(planar_uniform_field(0.04, 0.0));
  const ChainConfig c = ChainConfig::straight(10, 0.9e-3, Vec3::Zero(), Vec3::UnitX());
  const EnergyBreakdown e = total_energy(c, model);
  EXPECT_NEAR(e.field, -10 * 0.45e-3 * 0.04, 1e-18);
  EXPECT_DOUBLE_EQ(e.elastic, 0.0);
  EXPECT_NEAR(e.total, e.dipole_dipole + e.field + e.elastic + e.gravity + e.contact + e.wall, 1e-12 * std::abs(e.total));
}

TEST(TotalEnergy, ZeroFieldIsAttractive) {
  const auto model = table_model(UniformField{});
  const EnergyBreakdown e = total_energy(ChainConfig::straight(6, 0.9e-3, Vec3::Zero(), Vec3::UnitY()), model);
  EXPECT_DOUBLE_EQ(e.field, 0.0);
  EXPECT_DOUBLE_EQ(e.elastic, 0.0);
  EXPECT_LT(e.dipole_dipole, 0.0);
}

TEST(TotalEnergy, TermsAreSeparable) {
  const ChainConfig c = random_config(6, 9);
  auto a = table_model(planar_uniform_field(0.04, 0.5));
  auto b = table_model(planar_uniform_field(0.01, 2.0));
  EXPECT_DOUBLE_EQ(total_energy(c, a).dipole_dipole, total_energy(c, b).dipole_dipole);
  auto stiff = a;
  stiff.design.elastic_modulus *= 10;
  EXPECT_DOUBLE_EQ(total_energy(c, a).field, total_energy(c, stiff).field);
}

TEST(TotalEnergy, ReflectionThroughPlaneOfMotion) {
  ChainConfig c = random_config(6, 21);
  c.link_dirs.row(2).setZero();
  c.dipole_dirs.row(2).setZero();
  c.link_dirs.row(2).setConstant(0.1);
  normalize_columns(c.link_dirs);
  ChainConfig mirrored = c;
  mirrored.link_dirs.row(2) *= -1;
  mirrored.dipole_dirs.row(2) *= -1;
  auto model = table_model(planar_uniform_field(0.04, 1.0));
  model.gravity.enabled = true;
  model.gravity.up = Vec3::UnitY();
  EXPECT_NEAR(total_energy(c, model).total, total_energy(mirrored, model).total, 1e-15);
}

TEST(TotalEnergy, GradientMatchesFiniteDifference) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto model = table_model(planar_uniform_field(0.04, 1.2));
    model.gravity.enabled = true;
    model.design.ball_mass = 3e-6;
    const GradientCheck chk = verify_gradient(model, random_config(5, seed));
    EXPECT_LT(chk.max_relative_error, 1e-6) << "seed " << seed;
  }
  // Field from an external dipole magnet.
  auto model = table_model(Dipole<double>{Vec3(0.03, 0.01, 0.0), Vec3(0, 50.0, 0)});
  EXPECT_LT(verify_gradient(model, random_config(4, 4)).max_relative_error, 1e-6);
  // Skin only.
  auto skin = table_model(UniformField{});
  skin.design.ball_moment = 0.0;
  EXPECT_LT(verify_gradient(skin, random_config(5, 8)).max_relative_error, 1e-6);
}

TEST(TotalEnergy, DipoleGradientQuadraticInMoment) {
  const ChainConfig c = random_config(5, 13);
  auto a = table_model(UniformField{});
  a.design.include_skin = false;
  auto b = a;
  b.design.ball_moment *= 2;
  Directions ga, gb;
  total_energy(c, a, &ga);
  total_energy(c, b, &gb);
  EXPECT_NEAR((gb - 4 * ga).norm() / ga.norm(), 0.0, 1e-9);
}

TEST(TotalEnergy, StraightAlignedChainIsStationary) {
  const auto model = table_model(planar_uniform_field(0.04, 0.0));
  Directions g;
  const EnergyBreakdown e = total_energy(ChainConfig::straight(8, 0.9e-3, Vec3::Zero(), Vec3::UnitX()), model, &g);
  const ChainConfig c = ChainConfig::straight(8, 0.9e-3, Vec3::Zero(), Vec3::UnitX());
  Directions tangent = g;
  project_tangent(c.free_directions(), tangent);
  EXPECT_LT(tangent.norm(), 1e-10 * std::abs(e.total));
}

TEST(ContactPenalty, ActiveOnlyForOverlappingNonAdjacentBalls) {
  ChainConfig c = ChainConfig::straight(3, 0.9e-3, Vec3::Zero(), Vec3::UnitX());
  auto model = table_model(UniformField{});
  EXPECT_DOUBLE_EQ(total_energy(c, model).contact, 0.0);
  // Fold the chain back so balls 0 and 2 interpenetrate.
  c.link_dirs.col(1) = Vec3(-std::cos(0.2), std::sin(0.2), 0).normalized();
  EXPECT_GT(total_energy(c, model).contact, 0.0);
  EXPECT_FALSE(find_overlaps(c).empty());
}

TEST(RodEnergy, DistributedStraightRodInAlignedField) {
  const DesignSpec design = design_from_table(DesignKind::DistributedParticles);
  const RodConfig rod = RodConfig::straight(design, 0.020, Vec3::Zero(), Vec3::UnitX());
  const EnergyBreakdown e = rod_energy(rod, design, planar_uniform_field(0.04, 0.0));
  EXPECT_NEAR(e.field, -2.96e-4, 1e-12);
  EXPECT_DOUBLE_EQ(e.elastic, 0.0);
}

TEST(RodEnergy, TipMagnetPerpendicularFieldHasNoFieldEnergy) {
  const DesignSpec design = design_from_table(DesignKind::TipMagnet);
  RodConfig rod = RodConfig::straight(design, 0.005, Vec3::Zero(), Vec3::UnitX());
  for (Eigen::Index k = 0; k + 1 < rod.segments(); ++k) rod.tangents.col(k) = Vec3(1, 0.3 * k, 0.1).normalized();
  rod.tangents.col(rod.segments() - 1) = Vec3::UnitZ();
  EXPECT_NEAR(rod_energy(rod, design, UniformField{Vec3(0.04, 0.0, 0.0)}).field, 0.0, 1e-20);
  EXPECT_LT(verify_gradient(design, UniformField{Vec3(0.01, 0.03, 0.0)}, rod).max_relative_error, 1e-6);
}
