#include "ballchain/workspace.hpp"

#include <atomic>
#include <sstream>
#include <thread>

namespace ballchain {

SolveOptions WorkspaceOptions::default_solver() {
  SolveOptions s;
  s.restarts = 0;
  s.max_iterations = 20000;
  return s;
}

std::vector<double> WorkspaceOptions::grid(double first, double last, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(first + static_cast<double>(k) * step);
  return out;
}

Eigen::Index ball_count_for_length(const DesignSpec& design, double length) {
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(length / design.ball_diameter)));
}

Polygon2 WorkspaceScan::region() const {
  std::vector<Eigen::Vector2d> pts;
  pts.emplace_back(0.0, 0.0);
  pts.insert(pts.end(), boundary_a.begin(), boundary_a.end());
  pts.insert(pts.end(), boundary_b.begin(), boundary_b.end());
  pts.insert(pts.end(), boundary_c.rbegin(), boundary_c.rend());
  Polygon2 poly(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) poly.col(static_cast<Eigen::Index>(i)) = pts[i];
  return poly;
}

namespace {

struct RowResult {
  std::vector<Vec3> tips;
  std::vector<bool> converged;
};

RowResult scan_row(const DesignSpec& design, const WorkspaceOptions& options, double length) {
  RowResult row;
  const Vec3 base = Vec3::Zero();
  const Vec3 tangent = Vec3::UnitX();
  if (design.kind == DesignKind::BallChain) {
    ChainModel model;
    model.design = design;
    ChainConfig seed = ChainConfig::straight(ball_count_for_length(design, length), design.ball_diameter, base, tangent);
    const ChainConfig straight = seed;
    for (double angle : options.angles_deg) {
      model.field = planar_uniform_field(options.field, deg2rad(angle));
      const ChainSolveResult r = solve_shape(model, seed, options.solver);
      row.tips.push_back(positions(r.config).rightCols<1>());
      row.converged.push_back(r.converged);
      seed = r.converged ? r.config : straight;
    }
  } else {
    RodConfig seed = RodConfig::straight(design, length, base, tangent);
    const RodConfig straight = seed;
    for (double angle : options.angles_deg) {
      const FieldSource field = planar_uniform_field(options.field, deg2rad(angle));
      const RodSolveResult r = solve_rod_shape(design, field, seed, options.solver);
      row.tips.push_back(rod_tip(r.rod));
      row.converged.push_back(r.converged);
      seed = r.converged ? r.rod : straight;
    }
  }
  return row;
}

Eigen::Vector2d planar_mm(const Vec3& p) { return Eigen::Vector2d(p.x() * 1e3, p.y() * 1e3); }

}  // namespace

WorkspaceScan scan(const DesignSpec& design, const WorkspaceOptions& options_in) {
  WorkspaceOptions options = options_in;
  if (options.angles_deg.empty()) options.angles_deg = WorkspaceOptions::default_angles();
  if (options.lengths_mm.empty()) options.lengths_mm = WorkspaceOptions::default_lengths();
  if (!std::is_sorted(options.angles_deg.begin(), options.angles_deg.end()) ||
      !std::is_sorted(options.lengths_mm.begin(), options.lengths_mm.end())) {
    throw std::invalid_argument("workspace grids must be sorted ascending");
  }
  design.validate();

  WorkspaceScan out;
  out.kind = design.kind;
  out.field = options.field;
  out.angles_deg = options.angles_deg;
  out.lengths_mm = options.lengths_mm;
  const std::size_t na = options.angles_deg.size();
  const std::size_t nl = options.lengths_mm.size();

  std::vector<RowResult> rows(nl);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t l = next++; l < nl; l = next++) rows[l] = scan_row(design, options, options.lengths_mm[l] * 1e-3);
  };
  const int threads = std::max(1, std::min<int>(options.parallel, static_cast<int>(nl)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  out.tips.assign(na, std::vector<Vec3>(nl));
  out.converged.assign(na, std::vector<bool>(nl));
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t a = 0; a < na; ++a) {
      out.tips[a][l] = rows[l].tips[a];
      out.converged[a][l] = rows[l].converged[a];
    }
  }

  auto note_excluded = [&](std::size_t a, std::size_t l) {
    std::ostringstream msg;
    msg << "non-converged cell (angle " << options.angles_deg[a] << " deg, length " << options.lengths_mm[l]
        << " mm) excluded from boundary";
    out.warnings.push_back(msg.str());
  };
  for (std::size_t l = 0; l < nl; ++l) {
    if (out.converged[0][l]) out.boundary_a.push_back(planar_mm(out.tips[0][l])); else note_excluded(0, l);
  }
  for (std::size_t a = 0; a < na; ++a) {
    if (out.converged[a][nl - 1]) out.boundary_b.push_back(planar_mm(out.tips[a][nl - 1])); else note_excluded(a, nl - 1);
  }
  for (std::size_t l = 0; l < nl; ++l) {
    if (out.converged[na - 1][l]) out.boundary_c.push_back(planar_mm(out.tips[na - 1][l])); else note_excluded(na - 1, l);
  }

  if (na < 2) out.warnings.push_back("single-angle grid: workspace region is degenerate");
  const Polygon2 region = out.region();
  out.area_mm2 = planar_area(region);
  out.volume_mm3 = revolved_volume(region);
  return out;
}

}  // namespace ballchain
