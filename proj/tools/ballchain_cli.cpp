// Command-line front end: solve, workspace, navigate, serve, verify.

#include "acceptance.hpp"

#include "ballchain/io/output.hpp"
#include "ballchain/io/scene_io.hpp"
#include "ballchain/io/service.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ballchain;

namespace {

struct CommonFlags {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> design;
  bool no_skin = false;
  std::optional<int> parallel;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool scenario_required) {
  auto* opt = cmd->add_option("--scenario", f.scenario, "Scenario JSON file");
  if (scenario_required) opt->required();
  opt->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for all solver perturbations (overrides the scenario)");
  cmd->add_option("--design", f.design,
                  "Design: ball_chain, tip_magnet, distributed_particles, experimental_ball_chain");
  cmd->add_flag("--no-skin", f.no_skin, "Drop the elastic skin of ball chains");
  cmd->add_option("--parallel", f.parallel, "Worker threads for sweeps")->check(CLI::PositiveNumber);
}

io::Scenario load(const CommonFlags& f, io::Scenario fallback) {
  io::Scenario s = f.scenario.empty() ? std::move(fallback) : io::load_scenario(f.scenario);
  if (f.seed) s.seed = *f.seed;
  if (f.design) {
    s.design = *f.design;
    (void)io::design_si(s);  // rejects unknown names
  }
  if (f.no_skin) s.overrides.include_skin = false;
  if (f.parallel) s.parallel = *f.parallel;
  return s;
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& p : files) std::cout << "wrote " << p.string() << "\n";
}

int run_solve(const CommonFlags& f) {
  const io::Scenario s = load(f, {});
  const auto shapes = io::run_solve(s);
  report(io::write_solve_outputs(s, shapes, f.out));
  int status = 0;
  for (const auto& shape : shapes) {
    const Vec3 tip = shape.tip() * 1e3;
    std::cout << shape.label << ": " << (shape.converged ? "converged" : "NOT converged (" + shape.status + ")")
              << ", U = " << io::format_number(shape.energy.total) << " J, tip (" << io::format_number(tip.x())
              << ", " << io::format_number(tip.y()) << ", " << io::format_number(tip.z()) << ") mm\n";
    for (const auto& w : shape.warnings) std::cerr << "warning: " << w << "\n";
    if (!shape.converged) status = 3;
  }
  return status;
}

int run_workspace(const CommonFlags& f) {
  io::Scenario fallback;
  fallback.name = "workspace";
  fallback.workspace = io::WorkspaceSpec{};
  io::Scenario s = load(f, fallback);
  if (!s.workspace) s.workspace = io::WorkspaceSpec{};
  if (f.design) s.workspace->designs = {*f.design};
  const auto scans = io::run_workspace(s);
  report(io::write_workspace_outputs(scans, f.out, s.svg));
  std::cout << io::workspace_summary_csv(scans);
  for (const auto& scan : scans) {
    for (const auto& w : scan.warnings) std::cerr << "warning (" << to_string(scan.kind) << "): " << w << "\n";
  }
  return 0;
}

int run_navigate(const CommonFlags& f, const std::string& commands_file, const std::string& emit_commands) {
  io::Scenario fallback;
  fallback.name = "navigation";
  fallback.design = "experimental_ball_chain";
  fallback.navigation = io::NavigationSpec{};
  io::Scenario s = load(f, fallback);
  if (!s.navigation) s.navigation = io::NavigationSpec{};
  if (!emit_commands.empty()) {
    const ChannelScene scene = io::resolve_scene(*s.navigation, s.base_dir);
    io::Json arr = io::Json::array();
    for (const NavCommand& c : autopilot_script(scene, io::navigation_settings(s), s.navigation->autopilot_angle_deg,
                                                   s.navigation->expect_branch)) {
      arr.push_back(io::to_json(c));
    }
    io::write_text_file(emit_commands, io::dump(arr));
    std::cout << "wrote " << emit_commands << "\n";
    return 0;
  }
  std::optional<std::vector<NavCommand>> commands;
  if (!commands_file.empty()) commands = io::load_commands(commands_file);
  const io::NavigationRun run = io::run_navigation(s, commands);
  report(io::write_navigation_outputs(run, f.out, s.svg));
  const auto& last = run.log.back().state;
  int jammed = 0;
  for (const auto& e : run.log) jammed += e.state.jammed;
  std::cout << run.log.size() - 1 << " steps, " << last.config.n() << " balls, " << jammed << " jammed steps, max "
            << "penetration " << io::format_number(last.max_penetration * 1e3) << " mm\n";
  if (run.expect_branch) {
    std::cout << "tip " << (run.reached ? "reached" : "did NOT reach") << " branch '" << *run.expect_branch << "'\n";
    if (!run.reached) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic ball-chain robot simulator"};
  app.require_subcommand(1);

  CommonFlags solve_flags, workspace_flags, navigate_flags;
  auto* solve = app.add_subcommand("solve", "Equilibrium shape for one field or a continuation sweep");
  add_common(solve, solve_flags, true);

  auto* workspace = app.add_subcommand("workspace", "Planar workspace scan (default: the three-design comparison)");
  add_common(workspace, workspace_flags, false);

  auto* navigate = app.add_subcommand("navigate", "Headless insertion through a channel scene");
  add_common(navigate, navigate_flags, false);
  std::string commands_file, emit_commands;
  navigate->add_option("--commands", commands_file, "Command file (JSON array); default: scenario or autopilot")
      ->check(CLI::ExistingFile);
  navigate->add_option("--emit-commands", emit_commands, "Write the autopilot command file and exit");

  auto* serve = app.add_subcommand("serve", "HTTP service for solves and navigation sessions");
  std::string host = "127.0.0.1";
  int port = 8700;
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "Port")->capture_default_str()->check(CLI::Range(1, 65535));

  auto* verify = app.add_subcommand("verify", "Run the gradient, oracle and acceptance checks");
  acceptance::Options verify_options;
  verify->add_option("--seed", verify_options.seed, "Seed for random configurations");
  verify->add_option("--parallel", verify_options.parallel, "Worker threads for the workspace scan")
      ->check(CLI::PositiveNumber);
  verify->add_option("--only", verify_options.only, "Run only the named criteria")
      ->check(CLI::IsMember(acceptance::criterion_names()));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(solve_flags);
    if (*workspace) return run_workspace(workspace_flags);
    if (*navigate) return run_navigate(navigate_flags, commands_file, emit_commands);
    if (*serve) {
      std::cout << "serving on http://" << host << ":" << port << "\n" << std::flush;
      return service::serve(host, port);
    }
    if (*verify) {
      bool ok = true;
      acceptance::run(verify_options, [&](const acceptance::CriterionResult& r) {
        std::cout << acceptance::format_line(r) << std::endl;
        ok = ok && r.passed;
      });
      return ok ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
