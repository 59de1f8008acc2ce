#include "ballchain/io/output.hpp"

#include "ballchain/io/scene_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ballchain::io {

std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json energy_json(const EnergyBreakdown& e) {
  return {{"dipole_dipole", e.dipole_dipole}, {"field", e.field},   {"elastic", e.elastic}, {"gravity", e.gravity},
          {"contact", e.contact},             {"wall", e.wall},     {"total", e.total}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

// ---------------------------------------------------------------------------------------------
// SVG plotting

namespace {

struct Series {
  std::vector<Eigen::Vector2d> points;  // mm
  std::string color;
  std::string label;
  bool closed = false;
  double width = 1.5;
  std::string fill = "none";
  bool markers = false;
  double marker_radius = 0.0;  // mm, circles drawn at every point when > 0
};

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string render_plot(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                        const std::string& ylabel) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const Series& s : series) {
    for (const auto& p : s.points) {
      const double r = s.marker_radius;
      if (first) {
        xmin = p.x() - r, xmax = p.x() + r, ymin = p.y() - r, ymax = p.y() + r;
        first = false;
      }
      xmin = std::min(xmin, p.x() - r), xmax = std::max(xmax, p.x() + r);
      ymin = std::min(ymin, p.y() - r), ymax = std::max(ymax, p.y() + r);
    }
  }
  const double pad = 0.05 * std::max({xmax - xmin, ymax - ymin, 1.0});
  xmin -= pad, xmax += pad, ymin -= pad, ymax += pad;
  const double plot_w = 640.0;
  const double scale = plot_w / std::max(xmax - xmin, ymax - ymin);
  const double w = (xmax - xmin) * scale;
  const double h = (ymax - ymin) * scale;
  const double left = 60, top = 40, right = 160, bottom = 50;
  auto X = [&](double x) { return left + (x - xmin) * scale; };
  auto Y = [&](double y) { return top + (ymax - y) * scale; };
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(left + w + right) << "\" height=\""
      << f(top + h + bottom) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << f(left) << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  svg << "<rect x=\"" << f(left) << "\" y=\"" << f(top) << "\" width=\"" << f(w) << "\" height=\"" << f(h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double step = nice_step(std::max(xmax - xmin, ymax - ymin));
  for (double t = std::ceil(xmin / step) * step; t <= xmax; t += step) {
    svg << "<line x1=\"" << f(X(t)) << "\" y1=\"" << f(top + h) << "\" x2=\"" << f(X(t)) << "\" y2=\""
        << f(top + h + 5) << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << f(X(t)) << "\" y=\"" << f(top + h + 18) << "\" text-anchor=\"middle\">" << format_number(t)
        << "</text>\n";
  }
  for (double t = std::ceil(ymin / step) * step; t <= ymax; t += step) {
    svg << "<line x1=\"" << f(left - 5) << "\" y1=\"" << f(Y(t)) << "\" x2=\"" << f(left) << "\" y2=\"" << f(Y(t))
        << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << f(left - 8) << "\" y=\"" << f(Y(t) + 4) << "\" text-anchor=\"end\">" << format_number(t)
        << "</text>\n";
  }
  svg << "<text x=\"" << f(left + w / 2) << "\" y=\"" << f(top + h + 40) << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
  svg << "<text x=\"15\" y=\"" << f(top + h / 2) << "\" transform=\"rotate(-90 15 " << f(top + h / 2)
      << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";

  int legend = 0;
  for (const Series& s : series) {
    if (s.points.empty()) continue;
    svg << "<" << (s.closed ? "polygon" : "polyline") << " fill=\"" << s.fill << "\" stroke=\"" << s.color
        << "\" stroke-width=\"" << f(s.width) << "\" points=\"";
    for (const auto& p : s.points) svg << f(X(p.x())) << "," << f(Y(p.y())) << " ";
    svg << "\"/>\n";
    if (s.marker_radius > 0) {
      for (const auto& p : s.points) {
        svg << "<circle cx=\"" << f(X(p.x())) << "\" cy=\"" << f(Y(p.y())) << "\" r=\"" << f(s.marker_radius * scale)
            << "\" fill=\"none\" stroke=\"" << s.color << "\"/>\n";
      }
    }
    if (!s.label.empty()) {
      const double ly = top + 10 + 16 * legend++;
      svg << "<line x1=\"" << f(left + w + 15) << "\" y1=\"" << f(ly) << "\" x2=\"" << f(left + w + 35) << "\" y2=\""
          << f(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>";
      svg << "<text x=\"" << f(left + w + 40) << "\" y=\"" << f(ly + 4) << "\">" << s.label << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % 10];
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Solve

namespace {

ShapeReport chain_report(const ChainSolveResult& r, const FieldSpec& field) {
  ShapeReport s;
  s.positions = positions(r.config);
  s.dipoles = r.config.dipole_dirs;
  s.energy = r.energy;
  s.converged = r.converged;
  s.iterations = r.iterations;
  s.gradient_norm = r.gradient_norm;
  s.status = r.status;
  s.field = to_json(field);
  for (const OverlapPair& o : r.overlaps) {
    s.warnings.push_back("balls " + std::to_string(o.i) + " and " + std::to_string(o.j) + " overlap (distance " +
                         format_number(o.distance * 1e3) + " mm)");
  }
  for (const auto& [i, dist] : r.magnet_proximity) {
    s.warnings.push_back("ball " + std::to_string(i) + " lies within one magnet diameter of the external magnet (" +
                         format_number(dist * 1e3) + " mm); the dipole model is inaccurate there");
  }
  return s;
}

ShapeReport rod_report(const RodSolveResult& r, const FieldSpec& field) {
  ShapeReport s;
  s.positions = rod_nodes(r.rod);
  s.dipoles.resize(3, s.positions.cols());
  s.dipoles.col(0) = r.rod.base_tangent;
  s.dipoles.rightCols(r.rod.segments()) = r.rod.tangents;
  s.energy = r.energy;
  s.converged = r.converged;
  s.iterations = r.iterations;
  s.gradient_norm = r.gradient_norm;
  s.status = r.status;
  s.field = to_json(field);
  return s;
}

std::string field_label(const FieldSpec& f) {
  switch (f.type) {
    case FieldType::Uniform: return format_number(f.magnitude_mT) + " mT at " + format_number(f.angle_deg) + " deg";
    case FieldType::Magnet:
      return std::string(f.sign > 0 ? "+x" : "-x") + " magnet, psi " + format_number(f.psi_deg) + " deg";
    case FieldType::Dipole: return "dipole source";
  }
  return "";
}

}  // namespace

std::vector<ShapeReport> run_solve(const Scenario& scenario) {
  const DesignSpec design = design_si(scenario);
  design.validate();
  const SolveOptions options = solver_si(scenario);
  const Vec3 base = scenario.base_position_mm * 1e-3;
  const Vec3 tangent = scenario.base_tangent.normalized();
  const std::vector<FieldSpec> fields = scenario.sweep.empty() ? std::vector<FieldSpec>{scenario.field} : scenario.sweep;

  std::vector<ShapeReport> out;
  if (design.kind == DesignKind::BallChain) {
    ChainModel model;
    model.design = design;
    model.gravity = gravity_si(scenario.gravity);
    model.magnet_diameter = ExternalMagnetSpec{}.diameter;
    const ChainConfig initial = ChainConfig::straight(scenario.balls, design.ball_diameter, base, tangent);
    if (scenario.sweep.empty()) {
      model.field = field_si(scenario.field);
      out.push_back(chain_report(solve_shape(model, initial, options), scenario.field));
    } else {
      std::vector<FieldSource> sources;
      for (const FieldSpec& f : fields) sources.push_back(field_si(f));
      const auto results = continuation_sweep(model, sources, initial, options);
      for (std::size_t k = 0; k < results.size(); ++k) out.push_back(chain_report(results[k], fields[k]));
    }
  } else {
    const RodConfig straight = RodConfig::straight(design, scenario.length_mm * 1e-3, base, tangent);
    RodConfig seed = straight;
    SolveOptions opts = options;
    if (!scenario.sweep.empty()) opts.restarts = 0;
    for (const FieldSpec& f : fields) {
      const RodSolveResult r = solve_rod_shape(design, field_si(f), seed, opts);
      out.push_back(rod_report(r, f));
      seed = r.converged ? r.rod : straight;
    }
    if (scenario.gravity.enabled) {
      for (ShapeReport& s : out) s.warnings.push_back("gravity is not modelled for rod designs and was ignored");
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].label = fields.size() == 1 ? field_label(fields[k])
                                      : "step " + std::to_string(k) + ": " + field_label(fields[k]);
    if (!out[k].converged) out[k].warnings.push_back("solve did not converge: " + out[k].status);
  }
  return out;
}

std::string shape_csv(const ShapeReport& shape) {
  std::string csv = "index,x_mm,y_mm,z_mm,dipole_x,dipole_y,dipole_z\n";
  for (Eigen::Index i = 0; i < shape.positions.cols(); ++i) {
    csv += std::to_string(i);
    for (int k = 0; k < 3; ++k) csv += "," + format_number(shape.positions(k, i) * 1e3);
    for (int k = 0; k < 3; ++k) csv += "," + format_number(shape.dipoles(k, i));
    csv += "\n";
  }
  return csv;
}

Json solve_json(const Scenario& scenario, const std::vector<ShapeReport>& shapes, bool include_shapes) {
  Json j;
  j["scenario"] = scenario.name;
  j["design"] = scenario.design;
  j["seed"] = scenario.seed;
  Json arr = Json::array();
  for (const ShapeReport& s : shapes) {
    Json e;
    e["label"] = s.label;
    e["field"] = s.field;
    e["converged"] = s.converged;
    e["status"] = s.status;
    e["iterations"] = s.iterations;
    e["gradient_norm"] = s.gradient_norm;
    e["energy_J"] = energy_json(s.energy);
    e["tip_mm"] = vec3_json(s.tip() * 1e3);
    if (include_shapes) {
      Json pos = Json::array();
      Json dip = Json::array();
      for (Eigen::Index i = 0; i < s.positions.cols(); ++i) {
        pos.push_back(vec3_json(Vec3(s.positions.col(i) * 1e3)));
        dip.push_back(vec3_json(Vec3(s.dipoles.col(i))));
      }
      e["positions_mm"] = pos;
      e["dipoles"] = dip;
    }
    e["warnings"] = s.warnings;
    arr.push_back(e);
  }
  j["shapes"] = arr;
  return j;
}

std::string shape_svg(const std::vector<ShapeReport>& shapes, const std::string& title) {
  double spread_y = 0, spread_z = 0;
  for (const ShapeReport& s : shapes) {
    spread_y = std::max(spread_y, s.positions.row(1).maxCoeff() - s.positions.row(1).minCoeff());
    spread_z = std::max(spread_z, s.positions.row(2).maxCoeff() - s.positions.row(2).minCoeff());
  }
  const int vertical = spread_z >= spread_y ? 2 : 1;
  std::vector<Series> series;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    Series s;
    s.color = palette(k);
    s.label = shapes[k].label;
    for (Eigen::Index i = 0; i < shapes[k].positions.cols(); ++i) {
      s.points.emplace_back(shapes[k].positions(0, i) * 1e3, shapes[k].positions(vertical, i) * 1e3);
    }
    series.push_back(std::move(s));
  }
  return render_plot(series, title, "x (mm)", vertical == 2 ? "z (mm)" : "y (mm)");
}

std::vector<std::filesystem::path> write_solve_outputs(const Scenario& scenario, const std::vector<ShapeReport>& shapes,
                                                       const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "shape_%03zu.csv", k);
    const auto path = out_dir / (shapes.size() == 1 ? std::string("shape.csv") : std::string(name));
    write_text_file(path, shape_csv(shapes[k]));
    written.push_back(path);
  }
  written.push_back(out_dir / "energy.json");
  write_text_file(written.back(), dump(solve_json(scenario, shapes, false)));
  if (scenario.svg) {
    written.push_back(out_dir / "shape.svg");
    write_text_file(written.back(), shape_svg(shapes, scenario.name));
  }
  return written;
}

// ---------------------------------------------------------------------------------------------
// Workspace

std::vector<WorkspaceScan> run_workspace(const Scenario& scenario) {
  const WorkspaceSpec spec = scenario.workspace.value_or(WorkspaceSpec{});
  const WorkspaceOptions options = workspace_si(spec, scenario.solver, scenario.parallel);
  std::vector<WorkspaceScan> scans;
  for (const std::string& name : spec.designs) scans.push_back(scan(design_si(name, scenario.overrides), options));
  return scans;
}

double max_polar_angle_deg(const std::vector<Eigen::Vector2d>& boundary) {
  double best = 0.0;
  for (const auto& p : boundary) best = std::max(best, polar_angle_deg(p));
  return best;
}

namespace {

Json points_json(const std::vector<Eigen::Vector2d>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back(Json::array({p.x(), p.y()}));
  return arr;
}

}  // namespace

Json workspace_json(const std::vector<WorkspaceScan>& scans) {
  Json out = Json::array();
  for (const WorkspaceScan& s : scans) {
    Json j;
    j["design"] = std::string(to_string(s.kind));
    j["field_mT"] = s.field * 1e3;
    j["angles_deg"] = s.angles_deg;
    j["lengths_mm"] = s.lengths_mm;
    Json tips = Json::array();
    Json conv = Json::array();
    for (std::size_t a = 0; a < s.tips.size(); ++a) {
      Json row = Json::array();
      Json crow = Json::array();
      for (std::size_t l = 0; l < s.tips[a].size(); ++l) {
        row.push_back(Json::array({s.tips[a][l].x() * 1e3, s.tips[a][l].y() * 1e3}));
        crow.push_back(static_cast<bool>(s.converged[a][l]));
      }
      tips.push_back(row);
      conv.push_back(crow);
    }
    j["tips_mm"] = tips;
    j["converged"] = conv;
    j["boundary_a_mm"] = points_json(s.boundary_a);
    j["boundary_b_mm"] = points_json(s.boundary_b);
    j["boundary_c_mm"] = points_json(s.boundary_c);
    j["area_mm2"] = s.area_mm2;
    j["volume_mm3"] = s.volume_mm3;
    const double reference = revolute_reference_area(s.lengths_mm.empty() ? 0.0 : s.lengths_mm.back());
    j["reference_area_mm2"] = reference;
    j["area_within_reference"] = s.area_mm2 <= reference;
    j["max_polar_angle_deg"] = max_polar_angle_deg(s.boundary_c);
    j["warnings"] = s.warnings;
    out.push_back(j);
  }
  return out;
}

std::string workspace_summary_csv(const std::vector<WorkspaceScan>& scans) {
  std::string csv = "design,area_mm2,volume_mm3,reference_area_mm2,area_within_reference,max_polar_angle_deg,"
                    "nonconverged_cells\n";
  for (const WorkspaceScan& s : scans) {
    std::size_t bad = 0;
    for (const auto& row : s.converged) bad += static_cast<std::size_t>(std::count(row.begin(), row.end(), false));
    const double reference = revolute_reference_area(s.lengths_mm.empty() ? 0.0 : s.lengths_mm.back());
    csv += std::string(to_string(s.kind)) + "," + format_number(s.area_mm2) + "," + format_number(s.volume_mm3) + "," +
           format_number(reference) + "," + (s.area_mm2 <= reference ? "true" : "false") + "," +
           format_number(max_polar_angle_deg(s.boundary_c)) + "," + std::to_string(bad) + "\n";
  }
  return csv;
}

std::string workspace_svg(const std::vector<WorkspaceScan>& scans) {
  std::vector<Series> series;
  double reach = 0.0;
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const WorkspaceScan& s = scans[k];
    if (!s.lengths_mm.empty()) reach = std::max(reach, s.lengths_mm.back());
    Series region;
    region.color = palette(k);
    region.closed = true;
    region.label = std::string(to_string(s.kind)) + " (" + format_number(std::round(s.area_mm2 * 10) / 10) + " mm2)";
    const Polygon2 poly = s.region();
    for (Eigen::Index i = 0; i < poly.cols(); ++i) region.points.push_back(poly.col(i));
    series.push_back(std::move(region));
  }
  Series disk;
  disk.color = "#999999";
  disk.width = 1.0;
  disk.label = "revolute reference";
  disk.closed = true;
  for (int a = 0; a <= 180; ++a) {
    disk.points.emplace_back(reach * std::cos(deg2rad(a)), reach * std::sin(deg2rad(a)));
  }
  series.push_back(std::move(disk));
  return render_plot(series, "Planar workspace", "x (mm)", "y (mm)");
}

std::vector<std::filesystem::path> write_workspace_outputs(const std::vector<WorkspaceScan>& scans,
                                                           const std::filesystem::path& out_dir, bool svg) {
  std::vector<std::filesystem::path> written{out_dir / "workspace.json", out_dir / "workspace_summary.csv"};
  write_text_file(written[0], dump(workspace_json(scans)));
  write_text_file(written[1], workspace_summary_csv(scans));
  if (svg) {
    written.push_back(out_dir / "workspace.svg");
    write_text_file(written.back(), workspace_svg(scans));
  }
  return written;
}

// ---------------------------------------------------------------------------------------------
// Navigation

std::vector<NavCommand> load_commands(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read command file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const Json j = parse_json_text(buf.str(), path.string());
  try {
    return commands_from_json(j, "");
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

NavigationRun run_navigation(const Scenario& scenario, std::optional<std::vector<NavCommand>> commands) {
  const NavigationSpec spec = scenario.navigation.value_or(NavigationSpec{});
  NavigationRun run;
  run.scene = resolve_scene(spec, scenario.base_dir);
  const NavigationSettings settings = navigation_settings(scenario);
  if (!commands) {
    if (spec.commands_file) commands = load_commands(scenario.base_dir / *spec.commands_file);
    else commands = autopilot_script(run.scene, settings, spec.autopilot_angle_deg, spec.expect_branch);
  }
  NavigationSession session(run.scene, settings);
  for (const NavCommand& c : *commands) session.step(c);
  run.log = session.log();
  run.expect_branch = spec.expect_branch;
  if (run.expect_branch) {
    run.reached = point_in_convex_polygon(run.scene.branch(*run.expect_branch).region, session.tip().head<2>());
  }
  return run;
}

std::string navigation_svg(const NavigationRun& run) {
  std::vector<Series> series;
  for (const Branch& b : run.scene.branches) {
    Series s;
    s.color = "#bbbbbb";
    s.width = 0.5;
    s.closed = true;
    s.fill = "#f2f2f2";
    for (Eigen::Index i = 0; i < b.region.cols(); ++i) s.points.push_back(b.region.col(i) * 1e3);
    series.push_back(std::move(s));
  }
  for (const WallSegment& w : run.scene.walls) {
    Series s;
    s.color = "black";
    s.width = 2.0;
    s.points = {w.a * 1e3, w.b * 1e3};
    series.push_back(std::move(s));
  }
  Series trail;
  trail.color = "#ff7f0e";
  trail.width = 1.0;
  trail.label = "tip path";
  for (const NavigationLogEntry& e : run.log) {
    const Points p = positions(e.state.config);
    trail.points.emplace_back(p(0, p.cols() - 1) * 1e3, p(1, p.cols() - 1) * 1e3);
  }
  series.push_back(std::move(trail));
  if (!run.log.empty()) {
    const NavigationState& st = run.log.back().state;
    const Points p = positions(st.config);
    Series chain;
    chain.color = "#1f77b4";
    chain.label = "final chain";
    chain.marker_radius = 0.5 * st.config.d * 1e3;
    for (Eigen::Index i = 0; i < p.cols(); ++i) chain.points.emplace_back(p(0, i) * 1e3, p(1, i) * 1e3);
    series.push_back(std::move(chain));
  }
  return render_plot(series, "Navigation: " + run.scene.name, "x (mm)", "y (mm)");
}

std::vector<std::filesystem::path> write_navigation_outputs(const NavigationRun& run,
                                                            const std::filesystem::path& out_dir, bool svg) {
  std::vector<std::filesystem::path> written{out_dir / "session.jsonl"};
  write_text_file(written[0], session_log_jsonl(run.log));
  if (svg) {
    written.push_back(out_dir / "navigation.svg");
    write_text_file(written.back(), navigation_svg(run));
  }
  return written;
}

}  // namespace ballchain::io
