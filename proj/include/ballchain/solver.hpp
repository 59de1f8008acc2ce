#pragma once

// Energy minimization over products of unit spheres (quasi-Newton + backtracking + retraction),
// and the shape solves built on it.

#include "ballchain/chain_model.hpp"
#include "ballchain/rod_model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ballchain {

enum class InitialGuess { Straight, Previous, Explicit };
enum class GradientMode { Analytic, FiniteDifference };

struct SolveOptions {
  int max_iterations = 5000;
  /// Stop when the tangent gradient norm falls below this times the characteristic energy (J/rad).
  double gradient_tolerance = 1e-10;
  /// Relative energy change over `stall_window` accepted iterates that counts as stalled.
  double energy_tolerance = 1e-12;
  int stall_window = 5;
  /// Smallest accepted rotation (rad) before the line search gives up.
  double step_tolerance = 1e-15;
  /// Relative size of floating-point noise in the energy. Steps whose predicted decrease is below
  /// it are accepted on gradient-norm decrease, with an energy rise of at most this much.
  double energy_noise = 1e-14;
  InitialGuess initial = InitialGuess::Straight;
  GradientMode gradient = GradientMode::Analytic;
  /// Extra solves from randomly perturbed starts; the lowest energy wins.
  int restarts = 4;
  double restart_perturbation = 0.2;  // rad
  std::uint64_t seed = 0;
  int memory = 12;
  double max_rotation = 0.5;  // rad per direction per iteration
  bool record_history = false;
};

/// f(x) with its ambient gradient (any normal component is ignored).
using SphereObjective = std::function<double(const Directions& x, Directions* gradient)>;

struct MinimizeResult {
  Directions x;
  double energy = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::string status;
  std::vector<double> energy_history;  // accepted iterates, starting with the initial point
};

/// Minimizes over unit-norm columns. Tolerances in `options` are relative to `energy_scale` (J).
MinimizeResult minimize_on_spheres(const SphereObjective& objective, Directions x0, double energy_scale,
                                   const SolveOptions& options);

/// Three-point central-difference gradient in a local chart of each sphere, returned in
/// ambient coordinates (tangent to x).
Directions finite_difference_gradient(const SphereObjective& objective, const Directions& x, double step = 1e-7);

/// Orthonormal basis of the tangent plane at unit vector u.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& u);

struct ChainSolveResult {
  ChainConfig config;
  EnergyBreakdown energy;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::string status;
  std::vector<OverlapPair> overlaps;
  std::vector<std::pair<Eigen::Index, double>> magnet_proximity;
  std::vector<double> energy_history;
};

/// Local minimizer of the chain energy starting from `initial`.
ChainSolveResult solve_shape(const ChainModel& model, const ChainConfig& initial, const SolveOptions& options);

/// As above from the straight chain along `base_tangent`.
ChainSolveResult solve_shape(const ChainModel& model, Eigen::Index n, const SolveOptions& options,
                             const Vec3& base_position = Vec3::Zero(), const Vec3& base_tangent = Vec3::UnitX());

struct RodSolveResult {
  RodConfig rod;
  EnergyBreakdown energy;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::string status;
  std::vector<double> energy_history;
};

RodSolveResult solve_rod_shape(const DesignSpec& design, const FieldSource& field, const RodConfig& initial,
                               const SolveOptions& options);

/// Solves the chain for each field in order, seeding solve k + 1 with the result of solve k.
/// A non-converged step is flagged and the next one is reseeded from the straight chain.
std::vector<ChainSolveResult> continuation_sweep(const ChainModel& model, std::span<const FieldSource> fields,
                                                 const ChainConfig& initial, const SolveOptions& options);

struct GradientCheck {
  double max_relative_error = 0.0;  // normalized by the largest gradient component
  double max_absolute_error = 0.0;  // J/rad
  double energy = 0.0;
};

/// Analytic gradient against a five-point central difference in each local chart.
GradientCheck verify_gradient(const ChainModel& model, const ChainConfig& config, double step = 1e-7);
GradientCheck verify_gradient(const DesignSpec& design, const FieldSource& field, const RodConfig& rod,
                              double step = 1e-7);
GradientCheck verify_gradient(const SphereObjective& objective, const Directions& x, double energy_scale,
                              double step = 1e-7);

/// Unit normal of the plane containing all `vectors`, when they are coplanar.
std::optional<Vec3> common_plane_normal(std::span<const Vec3> vectors);

}  // namespace ballchain
