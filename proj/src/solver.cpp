#include "saem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "saem/energy.hpp"
#include "saem/errors.hpp"
#include "saem/operators.hpp"

namespace saem {

void SolverOptions::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
  if (!(energy_tol >= 0.0)) throw std::invalid_argument("energy_tol must be non-negative");
  if (!(initial_alpha > 0.0)) throw std::invalid_argument("initial_alpha must be positive");
  if (!(0.0 < armijo_c1 && armijo_c1 < wolfe_c2 && wolfe_c2 < 0.5)) {
    throw std::invalid_argument("line search constants must satisfy 0 < c1 < c2 < 1/2");
  }
  if (max_interp_retries < 0) throw std::invalid_argument("max_interp_retries must be non-negative");
}

std::array<VertexId, 2> select_fixed_vertices(const TriMesh& mesh, const SphericalMap& map) {
  const int n = mesh.num_vertices();
  if (n < 3) throw std::invalid_argument("need at least three vertices");
  const Eigen::VectorXd image = face_areas(mesh, map.points());
  const Eigen::VectorXd& domain = mesh.areas();
  std::vector<double> ratio(n);
  for (int v = 0; v < n; ++v) {
    double num = 0.0, den = 0.0;
    for (int t : mesh.ring_faces(VertexId{v})) {
      num += image[t];
      den += domain[t];
    }
    ratio[v] = num / den;
  }
  const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(ratio[a] - mean) < std::abs(ratio[b] - mean); });
  return {VertexId{order[0]}, VertexId{order[1]}};
}

LineSearchResult line_search(const std::function<double(double)>& energy_at, double phi0, double dphi0,
                             double alpha_prev, const SolverOptions& opts) {
  if (!(dphi0 < 0.0)) throw LineSearchError("not a descent direction");
  LineSearchResult r;
  auto eval = [&](double a) {
    ++r.evaluations;
    return energy_at(a);
  };
  auto armijo = [&](double a, double phi) { return std::isfinite(phi) && phi <= phi0 + opts.armijo_c1 * a * dphi0; };

  double sample = alpha_prev > 0.0 ? alpha_prev : opts.initial_alpha;
  double phi_sample = eval(sample);
  double alpha = sample;
  double phi = phi_sample;
  for (int retry = 0; retry <= opts.max_interp_retries; ++retry) {
    const double a = (phi_sample - phi0 - sample * dphi0) / (sample * sample);
    if (!std::isfinite(phi_sample) || !(a > 0.0)) {
      // no interior minimizer: accept the sample if it already decreases enough
      if (armijo(sample, phi_sample)) {
        r.alpha = sample;
        r.energy = phi_sample;
        return r;
      }
      alpha = 0.5 * sample;
    } else {
      alpha = -dphi0 / (2.0 * a);
    }
    phi = eval(alpha);
    if (armijo(alpha, phi)) {
      r.alpha = alpha;
      r.energy = phi;
      return r;
    }
    sample = alpha;
    phi_sample = phi;
  }
  while (alpha >= 1e-16) {
    alpha *= 0.5;
    phi = eval(alpha);
    if (armijo(alpha, phi)) {
      r.alpha = alpha;
      r.energy = phi;
      return r;
    }
  }
  throw LineSearchError("line search failed");
}

WolfeCheck check_wolfe(double phi0, double dphi0, double alpha, const std::function<double(double)>& energy_at,
                       const std::function<double(double)>& slope_at, const SolverOptions& opts) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  WolfeCheck w;
  w.armijo = energy_at(alpha) - phi0 <= opts.armijo_c1 * alpha * dphi0;
  w.curvature = std::abs(slope_at(alpha)) <= opts.wolfe_c2 * std::abs(dphi0);
  return w;
}

namespace {

constexpr double kPoleMargin = 1e-6;

double energy_at_coords(const TriMesh& mesh, const SphericalCoords& coords) {
  const double e = evaluate_energies(mesh, from_spherical(coords)).spherical_authalic;
  return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
}

bool near_pole(const SphericalCoords& coords, const VariableLayout& layout) {
  for (int v : layout.vertex_of_slot) {
    const double t = coords.theta[v];
    if (!(t >= kPoleMargin && t <= std::numbers::pi - kPoleMargin)) return true;
  }
  return false;
}

}  // namespace

SolverResult minimize(const TriMesh& mesh, const SphericalMap& map, const SolverOptions& opts) {
  opts.validate();
  if (map.size() != mesh.num_vertices()) throw std::invalid_argument("map and mesh sizes differ");

  SolverResult result;
  SolverState& st = result.state;
  if (opts.fixed) {
    const auto [a, b] = *opts.fixed;
    if (a == b || a < 0 || b < 0 || a >= mesh.num_vertices() || b >= mesh.num_vertices()) {
      throw std::invalid_argument("fixed vertices must be two distinct valid indices");
    }
    st.fixed = *opts.fixed;
  } else {
    const auto picked = select_fixed_vertices(mesh, map);
    st.fixed = {picked[0].index, picked[1].index};
  }

  PoleAvoidance start = avoid_poles(map, opts.seed);
  Mat3 frame = start.rotation;
  bool rotated = start.rotated;
  int rotation_attempt = 0;

  st.coords = to_spherical(start.map);
  st.coords.fixed = st.fixed;
  const VariableLayout layout(st.coords);

  PreconditionerFactor precond;
  try {
    precond = PreconditionerFactor::build(build_stretch_laplacian(mesh, start.map), st.fixed);
  } catch (const IndefinitePreconditioner&) {
    SparseMatrix identity(layout.num_free(), layout.num_free());
    identity.setIdentity();
    precond = PreconditionerFactor::from_spd(identity);
    st.preconditioner_fallback = true;
  }

  auto evaluate = [&](const SphericalCoords& c) {
    EnergyAndGradient eg = spherical_authalic_with_gradient(mesh, c);
    if (!std::isfinite(eg.energy.spherical_authalic) || !eg.gradient.allFinite()) {
      throw SolverError("non-finite energy or gradient");
    }
    return eg;
  };
  auto record = [&](const EnergyAndGradient& eg, int iteration) {
    TraceRow row;
    row.iteration = iteration;
    row.spherical_authalic = eg.energy.spherical_authalic;
    row.authalic = eg.energy.authalic;
    row.alpha = st.alpha;
    row.beta = st.beta;
    row.grad_inf = eg.gradient.size() > 0 ? eg.gradient.lpNorm<Eigen::Infinity>() : 0.0;
    row.folds = count_foldings(mesh, from_spherical(st.coords));
    st.trace.push_back(row);
  };

  EnergyAndGradient eg;
  try {
    eg = evaluate(st.coords);
  } catch (const GeometryError& e) {
    throw SolverError(std::string("initial map is degenerate: ") + e.what());
  }
  st.gradient = eg.gradient;
  st.preconditioned = precond.solve(st.gradient);
  st.direction = -st.preconditioned;
  st.energies.push_back(eg.energy.spherical_authalic);
  if (opts.record_history) st.gradient_history.push_back(st.gradient);
  record(eg, 0);

  Eigen::VectorXd x = layout.gather(st.coords);
  double alpha_prev = opts.initial_alpha;
  for (int k = 1; k <= opts.max_iters; ++k) {
    double dphi0 = st.direction.dot(st.gradient);
    if (!(dphi0 < 0.0)) {
      st.direction = -st.preconditioned;
      dphi0 = st.direction.dot(st.gradient);
      ++st.descent_restarts;
      if (!(dphi0 < 0.0)) {
        st.converged = true;  // stationary
        break;
      }
    }
    const double phi0 = st.energies.back();
    auto energy_along = [&](double a) {
      SphericalCoords trial = st.coords;
      layout.scatter(x + a * st.direction, trial);
      return energy_at_coords(mesh, trial);
    };
    LineSearchResult ls;
    try {
      ls = line_search(energy_along, phi0, dphi0, alpha_prev, opts);
    } catch (const LineSearchError&) {
      st.line_search_failed = true;
      break;
    }
    st.alpha = ls.alpha;
    alpha_prev = ls.alpha;
    x += ls.alpha * st.direction;
    layout.scatter(x, st.coords);

    try {
      eg = evaluate(st.coords);
    } catch (const GeometryError& e) {
      throw SolverError(std::string("degenerate iterate: ") + e.what());
    }
    if (opts.check_wolfe) {
      ++st.wolfe_checked;
      const bool armijo = eg.energy.spherical_authalic - phi0 <= opts.armijo_c1 * ls.alpha * dphi0;
      const bool curvature = std::abs(eg.gradient.dot(st.direction)) <= opts.wolfe_c2 * std::abs(dphi0);
      if (armijo && curvature) ++st.wolfe_satisfied;
    }

    const double gamma = st.preconditioned.dot(st.gradient);
    st.gradient = eg.gradient;
    st.preconditioned = precond.solve(st.gradient);
    st.beta = st.preconditioned.dot(st.gradient) / gamma;
    st.betas.push_back(st.beta);
    st.direction = -st.preconditioned + st.beta * st.direction;

    if (near_pole(st.coords, layout)) {
      const SphericalMap current = from_spherical(st.coords);
      PoleAvoidance turn;
      do {
        turn.rotation = seeded_rotation(opts.seed ^ 0x9e3779b97f4a7c15ULL, rotation_attempt++);
        turn.map = rotate(current, turn.rotation);
      } while (touches_pole(turn.map, 1e-3) && rotation_attempt < 1000);
      const double before = eg.energy.spherical_authalic;
      st.coords = to_spherical(turn.map);
      st.coords.fixed = st.fixed;
      eg = evaluate(st.coords);
      if (std::abs(eg.energy.spherical_authalic - before) > 1e-10 * std::max(1.0, std::abs(before))) {
        throw SolverError("pole rotation changed the energy");
      }
      frame = turn.rotation * frame;
      rotated = true;
      x = layout.gather(st.coords);
      st.gradient = eg.gradient;
      st.preconditioned = precond.solve(st.gradient);
      st.direction = -st.preconditioned;
      ++st.pole_rotations;
    }

    st.iterations = k;
    st.energies.push_back(eg.energy.spherical_authalic);
    if (opts.record_history) st.gradient_history.push_back(st.gradient);
    record(eg, k);
    if (phi0 - eg.energy.spherical_authalic < opts.energy_tol) {
      st.converged = true;
      break;
    }
  }

  if (st.iterations == 0) {
    result.map = map;
  } else {
    SphericalMap out = from_spherical(st.coords);
    result.map = rotated ? rotate(out, frame.transpose()) : std::move(out);
  }
  return result;
}

}  // namespace saem
