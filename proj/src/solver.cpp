#include "ballchain/solver.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace ballchain {

namespace {

double inner(const Directions& a, const Directions& b) { return (a.array() * b.array()).sum(); }

double max_column_norm(const Directions& d) { return d.cols() == 0 ? 0.0 : d.colwise().norm().maxCoeff(); }

struct Sample {
  double f = std::numeric_limits<double>::infinity();
  Directions g;
  bool ok = false;
};

// Trial points that hit a singularity are treated as infinitely expensive.
Sample sample(const SphereObjective& objective, const Directions& x) {
  Sample s;
  try {
    s.f = objective(x, &s.g);
  } catch (const SingularityError&) {
    return s;
  } catch (const GeometryError&) {
    return s;
  }
  s.ok = std::isfinite(s.f) && s.g.allFinite();
  if (s.ok) project_tangent(x, s.g);
  return s;
}

SphereObjective with_fd_gradient(const SphereObjective& objective) {
  return [objective](const Directions& x, Directions* grad) {
    const double f = objective(x, nullptr);
    if (grad) *grad = finite_difference_gradient(objective, x, 1e-7);
    return f;
  };
}

// Random rotation of every column; about `normal` when the problem is planar.
Directions perturb(const Directions& x, double amplitude, std::mt19937_64& rng, const std::optional<Vec3>& normal) {
  std::uniform_real_distribution<double> angle(-amplitude, amplitude);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Directions out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vec3 u = x.col(j);
    Vec3 axis;
    if (normal) {
      axis = *normal;
    } else {
      const auto [e1, e2] = tangent_basis(u);
      const double phi = phase(rng);
      axis = std::cos(phi) * e1 + std::sin(phi) * e2;
    }
    const double a = angle(rng);
    // Rodrigues rotation of u about the axis.
    out.col(j) = u * std::cos(a) + axis.cross(u) * std::sin(a) + axis * axis.dot(u) * (1.0 - std::cos(a));
  }
  normalize_columns(out);
  return out;
}

std::optional<Vec3> chain_plane(const ChainModel& model, const Directions& free, const Vec3& base_tangent,
                                const Vec3& base_position) {
  std::vector<Vec3> vecs;
  vecs.push_back(base_tangent);
  for (Eigen::Index j = 0; j < free.cols(); ++j) vecs.push_back(free.col(j));
  if (const auto* uniform = std::get_if<UniformField>(&model.field)) {
    vecs.push_back(uniform->B);
  } else {
    const auto& magnet = std::get<Dipole<double>>(model.field);
    vecs.push_back(magnet.position - base_position);
    vecs.push_back(magnet.moment);
  }
  if (model.gravity.enabled) vecs.push_back(model.gravity.up);
  return common_plane_normal(vecs);
}

template <typename Result>
void copy_minimize_stats(const MinimizeResult& m, Result& r) {
  r.converged = m.converged;
  r.iterations = m.iterations;
  r.gradient_norm = m.gradient_norm;
  r.status = m.status;
  r.energy_history = m.energy_history;
}

}  // namespace

std::pair<Vec3, Vec3> tangent_basis(const Vec3& u) {
  Eigen::Index k = 0;
  u.cwiseAbs().minCoeff(&k);
  const Vec3 e1 = u.cross(Vec3::Unit(k)).normalized();
  const Vec3 e2 = u.cross(e1);
  return {e1, e2};
}

std::optional<Vec3> common_plane_normal(std::span<const Vec3> vectors) {
  Eigen::MatrixXd stack(static_cast<Eigen::Index>(vectors.size()), 3);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const double nrm = vectors[i].norm();
    const Vec3 unit = nrm > 0.0 ? Vec3(vectors[i] / nrm) : Vec3::Zero();
    stack.row(static_cast<Eigen::Index>(i)) = unit.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() < 3) return std::nullopt;
  if (sv(2) > 1e-12 * std::max(sv(0), 1e-300)) return std::nullopt;
  return Vec3(svd.matrixV().col(2));
}

Directions finite_difference_gradient(const SphereObjective& objective, const Directions& x, double step) {
  Directions grad = Directions::Zero(3, x.cols());
  Directions probe = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vec3 u = x.col(j);
    const auto [e1, e2] = tangent_basis(u);
    for (const Vec3& e : {e1, e2}) {
      probe.col(j) = (u + step * e).normalized();
      const double fp = objective(probe, nullptr);
      probe.col(j) = (u - step * e).normalized();
      const double fm = objective(probe, nullptr);
      grad.col(j) += (fp - fm) / (2.0 * step) * e;
    }
    probe.col(j) = u;
  }
  return grad;
}

MinimizeResult minimize_on_spheres(const SphereObjective& objective_in, Directions x, double energy_scale,
                                   const SolveOptions& options) {
  const SphereObjective objective =
      options.gradient == GradientMode::FiniteDifference ? with_fd_gradient(objective_in) : objective_in;
  MinimizeResult res;
  normalize_columns(x);
  const double gtol = options.gradient_tolerance * energy_scale;

  Sample cur;
  cur.f = objective(x, &cur.g);  // singularities at the start propagate
  project_tangent(x, cur.g);
  res.energy_history.push_back(cur.f);

  std::deque<Directions> s_hist, y_hist;
  std::deque<double> rho_hist;
  double gnorm = cur.g.norm();
  double gnorm_window = gnorm;
  int stalled_windows = 0;
  res.status = "max iterations";

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    gnorm = cur.g.norm();
    if (gnorm <= gtol) {
      res.converged = true;
      res.status = "converged";
      break;
    }

    // L-BFGS two-loop recursion on the stored tangent pairs.
    Directions q = cur.g;
    std::vector<double> alphas(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alphas[i] = rho_hist[i] * inner(s_hist[i], q);
      q -= alphas[i] * y_hist[i];
    }
    if (!s_hist.empty()) q *= inner(s_hist.back(), y_hist.back()) / inner(y_hist.back(), y_hist.back());
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * inner(y_hist[i], q);
      q += (alphas[i] - beta) * s_hist[i];
    }
    Directions dir = -q;
    project_tangent(x, dir);
    double slope = inner(cur.g, dir);
    bool steepest = s_hist.empty();
    if (steepest || !(slope < -1e-10 * gnorm * dir.norm())) {
      dir = -cur.g;
      slope = -gnorm * gnorm;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      steepest = true;
    }

    const double rot = max_column_norm(dir);
    double alpha = steepest ? 0.1 * options.max_rotation / rot : 1.0;
    if (alpha * rot > options.max_rotation) alpha = options.max_rotation / rot;

    // Below `noise` energy differences are rounding; there the gradient norm decides.
    const double noise = options.energy_noise * (std::abs(cur.f) + energy_scale);
    Directions x_new;
    Sample next;
    bool accepted = false;
    while (alpha * rot >= options.step_tolerance) {
      x_new = x + alpha * dir;
      normalize_columns(x_new);
      next = sample(objective, x_new);
      if (next.ok) {
        const bool armijo = next.f <= cur.f + 1e-4 * alpha * slope;
        const bool unresolved = -alpha * slope < noise && next.f <= cur.f + noise && next.g.norm() < gnorm;
        if (armijo || unresolved) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!steepest) {
        // Retry from steepest descent before giving up.
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      res.status = "line search failed";
      break;
    }

    Directions s = x_new - x;
    Directions g_old = cur.g;
    project_tangent(x_new, g_old);
    Directions y = next.g - g_old;
    const double sy = inner(s, y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = std::move(x_new);
    cur = std::move(next);
    res.iterations = iter + 1;
    res.energy_history.push_back(cur.f);

    const auto w = static_cast<std::size_t>(options.stall_window);
    if (res.energy_history.size() > w && res.iterations % options.stall_window == 0) {
      const double f_then = res.energy_history[res.energy_history.size() - 1 - w];
      const double change = std::abs(f_then - cur.f);
      const double g_now = cur.g.norm();
      const bool flat = change <= options.energy_tolerance * std::max(std::abs(cur.f), energy_scale);
      stalled_windows = (flat && g_now >= gnorm_window && g_now > gtol) ? stalled_windows + 1 : 0;
      if (stalled_windows >= 10) {
        res.status = "stalled";
        break;
      }
      gnorm_window = std::min(gnorm_window, g_now);
    }
  }
  gnorm = cur.g.norm();
  if (!res.converged && gnorm <= gtol) {
    res.converged = true;
    res.status = "converged";
  }
  res.x = std::move(x);
  res.energy = cur.f;
  res.gradient_norm = gnorm;
  if (!options.record_history) res.energy_history.clear();
  return res;
}

ChainSolveResult solve_shape(const ChainModel& model, const ChainConfig& initial, const SolveOptions& options) {
  ChainSolveResult out;
  out.config = initial;
  if (initial.n() <= 1) {
    out.energy = total_energy(initial, model);
    out.converged = true;
    out.status = "converged";
    return out;
  }
  const SphereObjective objective = [&model, base = initial](const Directions& x, Directions* grad) {
    ChainConfig c = base;
    c.set_free_directions(x);
    return total_energy(c, model, grad).total;
  };
  const double scale = characteristic_energy(model, initial.n());
  MinimizeResult best = minimize_on_spheres(objective, initial.free_directions(), scale, options);

  if (options.restarts > 0) {
    std::mt19937_64 rng(options.seed);
    const auto normal = chain_plane(model, initial.free_directions(), initial.base_tangent(), initial.base_position);
    for (int k = 0; k < options.restarts; ++k) {
      const Directions start = perturb(initial.free_directions(), options.restart_perturbation, rng, normal);
      MinimizeResult trial;
      try {
        trial = minimize_on_spheres(objective, start, scale, options);
      } catch (const SingularityError&) {
        continue;
      }
      const bool better = (trial.converged && !best.converged) ||
                          (trial.converged == best.converged && trial.energy < best.energy - 1e-12 * scale);
      if (better) best = std::move(trial);
    }
  }

  out.config.set_free_directions(best.x);
  out.energy = total_energy(out.config, model);
  copy_minimize_stats(best, out);
  out.overlaps = find_overlaps(out.config);
  out.magnet_proximity = magnet_proximity(out.config, model);
  return out;
}

ChainSolveResult solve_shape(const ChainModel& model, Eigen::Index n, const SolveOptions& options,
                             const Vec3& base_position, const Vec3& base_tangent) {
  return solve_shape(model, ChainConfig::straight(n, model.design.ball_diameter, base_position, base_tangent), options);
}

RodSolveResult solve_rod_shape(const DesignSpec& design, const FieldSource& field, const RodConfig& initial,
                               const SolveOptions& options) {
  RodSolveResult out;
  out.rod = initial;
  if (initial.free_direction_count() == 0) {
    out.energy = rod_energy(initial, design, field);
    out.converged = true;
    out.status = "converged";
    return out;
  }
  const SphereObjective objective = [&design, &field, base = initial](const Directions& x, Directions* grad) {
    RodConfig r = base;
    r.tangents = x;
    return rod_energy(r, design, field, grad).total;
  };
  const double scale = characteristic_energy(initial, design, field);
  MinimizeResult best = minimize_on_spheres(objective, initial.tangents, scale, options);
  if (options.restarts > 0) {
    std::mt19937_64 rng(options.seed);
    std::vector<Vec3> vecs{initial.base_tangent, field_at(field, rod_tip(initial))};
    for (Eigen::Index j = 0; j < initial.tangents.cols(); ++j) vecs.push_back(initial.tangents.col(j));
    const auto normal = common_plane_normal(vecs);
    for (int k = 0; k < options.restarts; ++k) {
      const Directions start = perturb(initial.tangents, options.restart_perturbation, rng, normal);
      const MinimizeResult trial = minimize_on_spheres(objective, start, scale, options);
      const bool better = (trial.converged && !best.converged) ||
                          (trial.converged == best.converged && trial.energy < best.energy - 1e-12 * scale);
      if (better) best = trial;
    }
  }
  out.rod.tangents = best.x;
  out.energy = rod_energy(out.rod, design, field);
  copy_minimize_stats(best, out);
  return out;
}

std::vector<ChainSolveResult> continuation_sweep(const ChainModel& model, std::span<const FieldSource> fields,
                                                 const ChainConfig& initial, const SolveOptions& options) {
  if (fields.empty()) throw std::invalid_argument("continuation_sweep: empty field sequence");
  SolveOptions opts = options;
  opts.restarts = 0;  // random restarts would hop between equilibrium branches
  const ChainConfig straight =
      ChainConfig::straight(initial.n(), initial.d, initial.base_position, initial.base_tangent());
  std::vector<ChainSolveResult> out;
  out.reserve(fields.size());
  ChainConfig seed = initial;
  for (const FieldSource& field : fields) {
    ChainModel step_model = model;
    step_model.field = field;
    ChainSolveResult r = solve_shape(step_model, seed, opts);
    seed = r.converged ? r.config : straight;
    out.push_back(std::move(r));
  }
  return out;
}

GradientCheck verify_gradient(const SphereObjective& objective, const Directions& x, double energy_scale,
                              double step) {
  GradientCheck check;
  Directions analytic;
  check.energy = objective(x, &analytic);
  Directions probe = x;
  double worst_abs = 0.0;
  double largest = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vec3 u = x.col(j);
    const auto [e1, e2] = tangent_basis(u);
    for (const Vec3& e : {e1, e2}) {
      auto f_at = [&](double h) {
        probe.col(j) = (u + h * e).normalized();
        return objective(probe, nullptr);
      };
      const double fd = (-f_at(2 * step) + 8 * f_at(step) - 8 * f_at(-step) + f_at(-2 * step)) / (12 * step);
      const double an = e.dot(analytic.col(j));
      worst_abs = std::max(worst_abs, std::abs(fd - an));
      largest = std::max({largest, std::abs(fd), std::abs(an)});
    }
    probe.col(j) = u;
  }
  check.max_absolute_error = worst_abs;
  check.max_relative_error = worst_abs / std::max(largest, 1e-300 + 1e-14 * energy_scale);
  return check;
}

GradientCheck verify_gradient(const ChainModel& model, const ChainConfig& config, double step) {
  const SphereObjective objective = [&model, base = config](const Directions& x, Directions* grad) {
    ChainConfig c = base;
    c.set_free_directions(x);
    return total_energy(c, model, grad).total;
  };
  return verify_gradient(objective, config.free_directions(), characteristic_energy(model, config.n()), step);
}

GradientCheck verify_gradient(const DesignSpec& design, const FieldSource& field, const RodConfig& rod, double step) {
  const SphereObjective objective = [&design, &field, base = rod](const Directions& x, Directions* grad) {
    RodConfig r = base;
    r.tangents = x;
    return rod_energy(r, design, field, grad).total;
  };
  return verify_gradient(objective, rod.tangents, characteristic_energy(rod, design, field), step);
}

}  // namespace ballchain
