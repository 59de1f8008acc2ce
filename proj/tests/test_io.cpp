#include "ballchain/io/output.hpp"
#include "ballchain/io/scenario.hpp"
#include "ballchain/io/scene_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace ballchain;
using namespace ballchain::io;

namespace {

const std::filesystem::path kScenarios = BALLCHAIN_SCENARIO_DIR;

ParseError parse_failure(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for " << text;
  return ParseError("", "");
}

}  // namespace

TEST(Scenario, EveryShippedScenarioRoundTrips) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".json") continue;
    const Scenario s = load_scenario(entry.path());
    const Scenario again = parse_scenario(dump(to_json(s)));
    EXPECT_TRUE(s == again) << entry.path();
    EXPECT_EQ(dump(to_json(s)), dump(to_json(again))) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST(Scenario, UnknownKeyNamesItsLocation) {
  const ParseError e = parse_failure(R"({"design": "ball_chain", "field": {"type": "uniform", "magnitude_T": 0.04}})");
  EXPECT_TRUE(e.where().ends_with(":/field/magnitude_T")) << e.where();
}

TEST(Scenario, DesignIsRequired) {
  const ParseError e = parse_failure(R"({"balls": 4})");
  EXPECT_NE(e.where().find("design"), std::string::npos);
}

TEST(Scenario, SyntaxErrorReportsLineAndColumn) {
  const ParseError e = parse_failure("{\n  \"design\": \"ball_chain\",\n  \"balls\": ,\n}");
  EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
}

TEST(Scenario, UnitsConvertToSi) {
  const Scenario s = parse_scenario(
      R"({"design": "ball_chain", "field": {"type": "uniform", "magnitude_mT": 40, "angle_deg": 90},
          "design_overrides": {"ball_diameter_mm": 1.0}})");
  const Vec3 B = std::get<UniformField>(field_si(s.field)).B;
  EXPECT_NEAR(B.y(), 0.04, 1e-15);
  EXPECT_NEAR(B.x(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(design_si(s).ball_diameter, 1.0e-3);
}

TEST(Commands, RoundTripAndRejectBadOps) {
  const std::vector<NavCommand> cmds{NavCommand::advance(1e-3), NavCommand::retract(0.5e-3),
                                     NavCommand::set_field(deg2rad(45.0), 0.03), NavCommand::set_magnet(0.3, -1)};
  for (const auto& c : cmds) {
    const NavCommand back = command_from_json(to_json(c), "");
    EXPECT_EQ(back.kind, c.kind);
    EXPECT_NEAR(back.length, c.length, 1e-15);
    EXPECT_NEAR(back.angle, c.angle, 1e-15);
    EXPECT_NEAR(back.magnitude, c.magnitude, 1e-15);
    EXPECT_NEAR(back.psi, c.psi, 1e-15);
    EXPECT_EQ(back.sign, c.sign);
  }
  EXPECT_THROW(command_from_json(Json{{"op", "teleport"}}, ""), ParseError);
  EXPECT_THROW(command_from_json(Json{{"op", "set_magnet"}, {"sign", 2}}, ""), ParseError);
}

TEST(SceneIo, BuiltinSceneRoundTrips) {
  const ChannelScene s = builtin_scene("turn135");
  // Scenes are held in metres and written in millimetres, so the round trip is exact only to
  // the last bit of each coordinate.
  const ChannelScene back = scene_from_json(to_json(s));
  ASSERT_EQ(back.walls.size(), s.walls.size());
  ASSERT_EQ(back.corridors.size(), s.corridors.size());
  ASSERT_EQ(back.branches.size(), s.branches.size());
  for (std::size_t k = 0; k < s.walls.size(); ++k) {
    EXPECT_LT((back.walls[k].a - s.walls[k].a).norm(), 1e-15);
    EXPECT_LT((back.walls[k].b - s.walls[k].b).norm(), 1e-15);
  }
  for (std::size_t k = 0; k < s.branches.size(); ++k) {
    EXPECT_EQ(back.branches[k].name, s.branches[k].name);
    EXPECT_LT((back.branches[k].region - s.branches[k].region).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_NEAR(back.turning_angle_deg, s.turning_angle_deg, 1e-12);
  EXPECT_LT((back.junction - s.junction).norm(), 1e-15);
}

TEST(Output, NumbersRoundTripExactly) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
}

TEST(Output, SolveCsvHasOneRowPerBall) {
  const Scenario s = load_scenario(kScenarios / "perpendicular.json");
  const auto shapes = run_solve(s);
  ASSERT_EQ(shapes.size(), 1u);
  EXPECT_TRUE(shapes[0].converged);
  const std::string csv = shape_csv(shapes[0]);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), s.balls + 1);
  const Json j = solve_json(s, shapes, false);
  EXPECT_TRUE(j.contains("shapes"));
  EXPECT_NE(shape_svg(shapes, "t").find("<svg"), std::string::npos);
}

TEST(Output, NavigationPresetReachesBranch) {
  const Scenario s = load_scenario(kScenarios / "navigate_turn90.json");
  const NavigationRun run = run_navigation(s);
  EXPECT_TRUE(run.reached);
  const std::string jsonl = session_log_jsonl(run.log);
  EXPECT_EQ(static_cast<std::size_t>(std::count(jsonl.begin(), jsonl.end(), '\n')), run.log.size());
}
