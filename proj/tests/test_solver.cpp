#include "ballchain/solver.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace ballchain;

namespace {

ChainModel experiment_three_balls_oblique() {
  ChainModel m;
  m.design = experimental_ball_chain();
  m.design.include_skin = false;
  m.field = planar_uniform_field(0.04, deg2rad(60.0));
  return m;
}

// Total energy of the planar three-ball chain (skin off) as a function of the two link angles and the two
// free dipole angles, evaluated directly from pair sums.
double planar_energy(const ChainModel& m, const Eigen::Vector4d& a) {
  const double d = m.design.ball_diameter;
  const double mu = m.design.ball_moment;
  const Vec3 B = std::get<UniformField>(m.field).B;
  const auto dir = [](double t) { return Vec3(std::cos(t), std::sin(t), 0.0); };
  const Vec3 p[3] = {Vec3::Zero(), d * dir(a(0)), d * dir(a(0)) + d * dir(a(1))};
  if ((p[2] - p[0]).norm() < d) return std::numeric_limits<double>::infinity();  // balls 0 and 2 overlap
  const Vec3 mm[3] = {mu * Vec3::UnitX(), mu * dir(a(2)), mu * dir(a(3))};
  double U = 0.0;
  for (int i = 0; i < 3; ++i) {
    U -= mm[i].dot(B);
    for (int j = i + 1; j < 3; ++j) {
      const Vec3 r = p[j] - p[i];
      const double r2 = r.squaredNorm(), rn = std::sqrt(r2);
      U -= 1e-7 * (3 * mm[i].dot(r) * mm[j].dot(r) / (r2 * r2 * rn) - mm[i].dot(mm[j]) / (r2 * rn));
    }
  }
  return U;
}

}  // namespace

TEST(Solver, AlignedFieldKeepsChainStraight) {
  ChainModel m;
  m.design = design_from_table(DesignKind::BallChain);
  m.field = planar_uniform_field(0.04, 0.0);
  const auto r = solve_shape(m, 10, SolveOptions{});
  ASSERT_TRUE(r.converged) << r.status;
  for (double theta : joint_angles(r.config)) EXPECT_LT(theta, 1e-6);
}

TEST(Solver, ThreeBallsMatchGridSearch) {
  const ChainModel m = experiment_three_balls_oblique();
  const auto r = solve_shape(m, 3, SolveOptions{});
  ASSERT_TRUE(r.converged) << r.status;

  // Coarse 2-degree grid over all four planar angles, then compass refinement.
  const double step = std::numbers::pi / 90;
  Eigen::Vector4d best;
  double best_u = std::numeric_limits<double>::infinity();
  const int lo = -15, hi = 60;  // -30 .. 120 degrees
  for (int i = lo; i <= hi; ++i)
    for (int j = lo; j <= hi; ++j)
      for (int k = lo; k <= hi; ++k)
        for (int l = lo; l <= hi; ++l) {
          const Eigen::Vector4d a(i * step, j * step, k * step, l * step);
          const double u = planar_energy(m, a);
          if (u < best_u) best_u = u, best = a;
        }
  for (double h = step; h > 1e-10; h *= 0.5) {
    for (bool improved = true; improved;) {
      improved = false;
      for (int c = 0; c < 4; ++c)
        for (double s : {h, -h}) {
          Eigen::Vector4d a = best;
          a(c) += s;
          const double u = planar_energy(m, a);
          if (u < best_u) best_u = u, best = a, improved = true;
        }
    }
  }

  const auto angle = [](const Vec3& v) { return std::atan2(v.y(), v.x()); };
  const Eigen::Vector4d got(angle(r.config.link_dirs.col(0)), angle(r.config.link_dirs.col(1)),
                            angle(r.config.dipole_dirs.col(1)), angle(r.config.dipole_dirs.col(2)));
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(got(c), best(c), deg2rad(0.5)) << "angle " << c;
  EXPECT_NEAR(r.energy.total, best_u, 1e-9 * std::abs(best_u));
}

TEST(Solver, TipMagnetMatchesConstantCurvatureElastica) {
  // A uniform field exerts a pure end moment m x B, so the flexible part is a circular arc whose
  // end angle phi satisfies EI phi / L = m B cos(phi). Bisection on that equation is independent
  // of the energy minimizer.
  const DesignSpec design = design_from_table(DesignKind::TipMagnet);
  const double B = 0.04, length = 0.006, magnet = design.tip_magnet_length, L = length - magnet;
  const double EI = design.elastic_modulus * design.rod_second_moment();
  const double k = design.tip_magnet_moment * B * L / EI;
  double lo = 0.0, hi = std::numbers::pi / 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid - k * std::cos(mid) < 0 ? lo : hi) = mid;
  }
  const double phi = 0.5 * (lo + hi), R = L / phi;
  const Vec3 oracle = Vec3(R * std::sin(phi), R * (1 - std::cos(phi)), 0) +
                      0.5 * magnet * Vec3(std::cos(phi), std::sin(phi), 0);

  const RodConfig initial = RodConfig::straight(design, length, Vec3::Zero(), Vec3::UnitX());
  const auto r = solve_rod_shape(design, planar_uniform_field(B, std::numbers::pi / 2), initial, SolveOptions{});
  ASSERT_TRUE(r.converged) << r.status;
  const Vec3 tip = rod_tip(r.rod);
  EXPECT_LT((tip - oracle).norm(), 0.02 * oracle.norm()) << "solver " << tip.transpose() << " oracle "
                                                         << oracle.transpose();
}

TEST(Solver, EnergyNeverRisesBeyondNoiseAndStaysPlanar) {
  ChainModel m;
  m.design = design_from_table(DesignKind::BallChain);
  m.field = planar_uniform_field(0.04, deg2rad(150.0));
  SolveOptions opt;
  opt.record_history = true;
  opt.restarts = 0;
  const auto r = solve_shape(m, 12, opt);
  ASSERT_TRUE(r.converged) << r.status;
  const double scale = characteristic_energy(m, 12);
  for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
    EXPECT_LE(r.energy_history[k], r.energy_history[k - 1] + opt.energy_noise * (std::abs(r.energy_history[k - 1]) + scale));
  }
  const Points p = positions(r.config);
  EXPECT_LT(p.row(2).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(r.config.dipole_dirs.row(2).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index j = 0; j < r.config.link_dirs.cols(); ++j) EXPECT_NEAR(r.config.link_dirs.col(j).norm(), 1.0, 1e-12);
}

TEST(Solver, ArgminIndependentOfEnergyScale) {
  ChainModel a;
  a.design = design_from_table(DesignKind::BallChain);
  a.design.include_skin = false;
  a.field = planar_uniform_field(0.04, deg2rad(100.0));
  ChainModel b = a;
  b.design.ball_moment *= 3;
  b.field = planar_uniform_field(0.12, deg2rad(100.0));  // every term scales by 9
  SolveOptions opt;
  opt.restarts = 0;
  const auto ra = solve_shape(a, 6, opt), rb = solve_shape(b, 6, opt);
  ASSERT_TRUE(ra.converged && rb.converged);
  EXPECT_LT((positions(ra.config) - positions(rb.config)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Solver, SameSeedIsDeterministic) {
  ChainModel m;
  m.design = design_from_table(DesignKind::BallChain);
  m.field = planar_uniform_field(0.04, std::numbers::pi);  // anti-parallel: symmetric tie
  SolveOptions opt;
  opt.seed = 42;
  const auto a = solve_shape(m, 8, opt), b = solve_shape(m, 8, opt);
  EXPECT_EQ(positions(a.config), positions(b.config));
  EXPECT_EQ(a.energy.total, b.energy.total);
}

TEST(ContinuationSweep, ConstantFieldIsAFixedPoint) {
  ChainModel m;
  m.design = design_from_table(DesignKind::BallChain);
  const std::vector<FieldSource> fields(5, planar_uniform_field(0.04, deg2rad(60.0)));
  SolveOptions opt;
  opt.restarts = 0;
  const auto results = continuation_sweep(m, fields, ChainConfig::straight(8, 0.9e-3, Vec3::Zero(), Vec3::UnitX()), opt);
  ASSERT_EQ(results.size(), 5u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.converged);
    EXPECT_LT((positions(r.config) - positions(results.front().config)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Minimizer, FiniteDifferenceModeAgrees) {
  ChainModel m;
  m.design = design_from_table(DesignKind::BallChain);
  m.field = planar_uniform_field(0.04, deg2rad(70.0));
  SolveOptions analytic;
  analytic.restarts = 0;
  SolveOptions fd = analytic;
  fd.gradient = GradientMode::FiniteDifference;
  fd.gradient_tolerance = 1e-7;
  const auto a = solve_shape(m, 4, analytic), b = solve_shape(m, 4, fd);
  EXPECT_LT((positions(a.config) - positions(b.config)).cwiseAbs().maxCoeff(), 1e-8);
}
