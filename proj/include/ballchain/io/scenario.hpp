#pragma once

// Scenario files: JSON with unit-suffixed keys (mm, mT, deg). Values are held here in file units so
// a scenario round-trips exactly; the *_si() builders convert at the boundary.

#include "ballchain/navigation.hpp"
#include "ballchain/workspace.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ballchain::io {

using Json = nlohmann::ordered_json;

struct DesignOverrides {
  std::optional<double> ball_diameter_mm;
  std::optional<double> ball_moment_Am2;
  std::optional<double> ball_remanence_T;
  std::optional<double> ball_mass_g;
  std::optional<double> skin_outer_diameter_mm;
  std::optional<double> skin_inner_diameter_mm;
  std::optional<double> elastic_modulus_kPa;
  std::optional<double> rod_diameter_mm;
  std::optional<double> max_pitch_mm;
  std::optional<double> tip_magnet_moment_Am2;
  std::optional<double> tip_magnet_length_mm;
  std::optional<double> moment_per_length_Am;
  std::optional<bool> include_skin;
  std::optional<bool> clamped_base;

  bool operator==(const DesignOverrides&) const = default;
};

enum class FieldType { Uniform, Magnet, Dipole };

struct FieldSpec {
  FieldType type = FieldType::Uniform;
  // uniform: direction in the x-y plane at angle_deg from +x, or an explicit direction vector
  double magnitude_mT = 40.0;
  double angle_deg = 0.0;
  std::optional<Vec3> direction;
  // magnet: gimbal pose
  double psi_deg = 0.0;
  int sign = 1;
  double v1_mm = 150.0;
  double v2_mm = 200.0;
  double v3_mm = 350.0;
  // dipole: explicit source
  Vec3 position_mm = Vec3::Zero();
  Vec3 moment_Am2 = Vec3::UnitX();

  bool operator==(const FieldSpec&) const = default;
};

struct GravitySpec {
  bool enabled = false;
  double g_mps2 = kStandardGravity;
  Vec3 up = Vec3::UnitZ();
  bool operator==(const GravitySpec&) const = default;
};

struct SolverSpec {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-10;
  int restarts = 4;
  double restart_perturbation_deg = 11.459155902616464;  // 0.2 rad
  int memory = 12;
  bool operator==(const SolverSpec&) const = default;
};

struct WorkspaceSpec {
  std::vector<std::string> designs{"ball_chain", "tip_magnet", "distributed_particles"};
  double field_mT = 40.0;
  double angle_start_deg = 0.0;
  double angle_stop_deg = 180.0;
  double angle_step_deg = 1.0;
  double length_start_mm = 1.0;
  double length_stop_mm = 20.0;
  double length_step_mm = 1.0;
  bool operator==(const WorkspaceSpec&) const = default;
};

struct NavigationSpec {
  std::string scene = "turn90";          // built-in name
  std::optional<std::string> scene_file;  // custom scene, relative to the scenario file
  std::optional<std::string> commands_file;
  std::optional<double> autopilot_angle_deg;  // autopilot target when no command file is given
  std::optional<std::string> expect_branch;
  double wall_stiffness_Jpm2 = 1e5;
  double field_mT = 40.0;
  bool operator==(const NavigationSpec&) const = default;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  std::string design = "ball_chain";  // ball_chain | tip_magnet | distributed_particles | experimental_ball_chain
  DesignOverrides overrides;
  int balls = 10;             // ball chains
  double length_mm = 20.0;    // rods
  Vec3 base_position_mm = Vec3::Zero();
  Vec3 base_tangent = Vec3::UnitX();
  FieldSpec field;
  GravitySpec gravity;
  SolverSpec solver;
  std::vector<FieldSpec> sweep;  // continuation sequence; empty for a single solve
  std::optional<WorkspaceSpec> workspace;
  std::optional<NavigationSpec> navigation;
  bool svg = true;
  int parallel = 1;

  /// Directory of the file the scenario came from, for relative paths (not serialized).
  std::filesystem::path base_dir;

  bool operator==(const Scenario& o) const;
};

/// Throws ParseError naming the JSON pointer of the offending field.
Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& s);

/// Parses text; syntax errors report line and column.
Json parse_json_text(const std::string& text, const std::string& source);
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);
std::string dump(const Json& j);

FieldSource field_si(const FieldSpec& f);
Json to_json(const FieldSpec& f);
FieldSpec field_from_json(const Json& j, const std::string& where);

DesignSpec design_si(const std::string& design, const DesignOverrides& overrides);
DesignSpec design_si(const Scenario& s);
GravitySettings gravity_si(const GravitySpec& g);
SolveOptions solver_si(const Scenario& s);
WorkspaceOptions workspace_si(const WorkspaceSpec& w, const SolverSpec& solver, int parallel);

/// Navigation commands: {"op": "advance"|"retract", "length_mm"}, {"op": "set_field", "angle_deg",
/// "magnitude_mT"}, {"op": "set_magnet", "psi_deg", "sign", "v1_mm", "v2_mm", "v3_mm"}.
NavCommand command_from_json(const Json& j, const std::string& where);
Json to_json(const NavCommand& c);
std::vector<NavCommand> commands_from_json(const Json& j, const std::string& where);

}  // namespace ballchain::io
