#pragma once

// Running scenarios and writing their CSV, JSON, and SVG outputs.

#include "ballchain/io/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ballchain::io {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

Json vec3_json(const Vec3& v);
Json energy_json(const EnergyBreakdown& e);

/// One equilibrium shape, design independent: ball centres or rod nodes with the dipole (or
/// tangent) direction at each.
struct ShapeReport {
  std::string label;
  Points positions;   // m
  Directions dipoles;
  EnergyBreakdown energy;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::string status;
  Json field;
  std::vector<std::string> warnings;
  Vec3 tip() const { return positions.col(positions.cols() - 1); }
};

/// Single solve, or a continuation over `scenario.sweep`.
std::vector<ShapeReport> run_solve(const Scenario& scenario);

std::string shape_csv(const ShapeReport& shape);
Json solve_json(const Scenario& scenario, const std::vector<ShapeReport>& shapes, bool include_shapes);
/// Side view (x against the out-of-axis coordinate with the larger spread).
std::string shape_svg(const std::vector<ShapeReport>& shapes, const std::string& title);

/// Writes shape.csv (shape_NNN.csv for sweeps), energy.json and shape.svg. Returns the paths.
std::vector<std::filesystem::path> write_solve_outputs(const Scenario& scenario, const std::vector<ShapeReport>& shapes,
                                                       const std::filesystem::path& out_dir);

std::vector<WorkspaceScan> run_workspace(const Scenario& scenario);
double max_polar_angle_deg(const std::vector<Eigen::Vector2d>& boundary);
Json workspace_json(const std::vector<WorkspaceScan>& scans);
std::string workspace_summary_csv(const std::vector<WorkspaceScan>& scans);
std::string workspace_svg(const std::vector<WorkspaceScan>& scans);
std::vector<std::filesystem::path> write_workspace_outputs(const std::vector<WorkspaceScan>& scans,
                                                           const std::filesystem::path& out_dir, bool svg);

struct NavigationRun {
  ChannelScene scene;
  std::vector<NavigationLogEntry> log;
  std::optional<std::string> expect_branch;
  bool reached = true;  // tip inside `expect_branch`, or true when none is declared
};

/// Runs `commands`, or the scenario's command file, or the autopilot script for the scene.
NavigationRun run_navigation(const Scenario& scenario, std::optional<std::vector<NavCommand>> commands = {});
std::vector<NavCommand> load_commands(const std::filesystem::path& path);
std::string navigation_svg(const NavigationRun& run);
std::vector<std::filesystem::path> write_navigation_outputs(const NavigationRun& run,
                                                            const std::filesystem::path& out_dir, bool svg);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ballchain::io
