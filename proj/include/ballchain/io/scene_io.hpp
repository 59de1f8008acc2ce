#pragma once

// Channel scene files and navigation session logs.

#include "ballchain/io/scenario.hpp"

namespace ballchain::io {

/// Scene JSON: {"name", "width_mm", "entry_mm": [x, y], "axis": [x, y], "turning_angle_deg",
/// "junction_mm", "opening_mm": [begin, end], "corridors": [{"name", "from_mm", "to_mm"}],
/// "walls_mm": [[x1, y1, x2, y2], ...], "branches": [{"name", "polygon_mm": [[x, y], ...]}]}.
/// Walls are derived from the corridors when absent. Without corridors only wall proximity is
/// penalized.
ChannelScene scene_from_json(const Json& j, const std::string& where = "");
Json to_json(const ChannelScene& scene);
ChannelScene load_scene(const std::filesystem::path& path);

/// Built-in name, or a scene file when `scene_file` is set.
ChannelScene resolve_scene(const NavigationSpec& spec, const std::filesystem::path& base_dir);

Json field_state_json(const FieldSource& field);
Json to_json(const NavigationLogEntry& entry);
/// One JSON object per line.
std::string session_log_jsonl(const std::vector<NavigationLogEntry>& log);

NavigationSettings navigation_settings(const Scenario& scenario);

}  // namespace ballchain::io
