#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "saem/sphere.hpp"

namespace saem {

struct SolverOptions {
  int max_iters = 100;
  double energy_tol = 1e-5;  // stop when E_spherical drops by less than this in one iteration
  double initial_alpha = 0.01;
  double armijo_c1 = 1e-4;
  double wolfe_c2 = 0.4;
  int max_interp_retries = 10;
  bool check_wolfe = false;

  std::uint64_t seed = 0;                   // pole rotations
  std::optional<std::array<int, 2>> fixed;  // overrides select_fixed_vertices
  bool record_history = false;              // keep every gradient in SolverState

  /// Throws std::invalid_argument unless 0 < c1 < c2 < 1/2 and the counts are sane.
  void validate() const;
};

struct TraceRow {
  int iteration = 0;
  double spherical_authalic = 0.0;
  double authalic = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double grad_inf = 0.0;
  int folds = 0;
};

struct SolverState {
  SphericalCoords coords;    // in the solver's rotated frame
  Eigen::VectorXd gradient;  // [theta_free; phi_free]
  Eigen::VectorXd direction;
  Eigen::VectorXd preconditioned;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> energies;  // E_spherical of the input, then of each accepted iterate
  std::vector<double> betas;     // raw ratio of each iteration, before any restart
  std::vector<TraceRow> trace;
  int iterations = 0;
  std::array<int, 2> fixed = {0, 1};

  int descent_restarts = 0;
  int pole_rotations = 0;
  bool preconditioner_fallback = false;  // identity used because the pinned Laplacian was indefinite
  bool line_search_failed = false;
  bool converged = false;
  int wolfe_checked = 0;
  int wolfe_satisfied = 0;

  std::vector<Eigen::VectorXd> gradient_history;  // only with record_history
};

/// The two vertices whose 1-ring area ratio sum|f(t)| / sum|t| is closest to
/// the mean of those ratios over all vertices; lower index first on ties.
std::array<VertexId, 2> select_fixed_vertices(const TriMesh& mesh, const SphericalMap& map);

struct LineSearchResult {
  double alpha = 0.0;
  double energy = 0.0;
  int evaluations = 0;
};

/// Quadratic-interpolation step along a descent direction. Samples phi at
/// alpha_prev, moves to the minimizer of the interpolating parabola and
/// repeats from there until the Armijo condition holds or the retry budget is
/// spent, then halves. Throws LineSearchError when dphi0 >= 0 or alpha underflows.
LineSearchResult line_search(const std::function<double(double)>& energy_at, double phi0, double dphi0,
                             double alpha_prev, const SolverOptions& opts);

struct WolfeCheck {
  bool armijo = false;
  bool curvature = false;
};

/// Strong Wolfe diagnostic; `slope_at` is the directional derivative at alpha.
WolfeCheck check_wolfe(double phi0, double dphi0, double alpha, const std::function<double(double)>& energy_at,
                       const std::function<double(double)>& slope_at, const SolverOptions& opts);

struct SolverResult {
  SphericalMap map;  // in the input frame
  SolverState state;
};

/// Preconditioned nonlinear conjugate gradient on E_spherical in spherical
/// coordinates with two pinned vertices. The preconditioner is the pinned
/// stretch Laplacian of the input map, factored once.
/// Throws SolverError if the energy or gradient becomes non-finite.
SolverResult minimize(const TriMesh& mesh, const SphericalMap& map, const SolverOptions& opts = {});

}  // namespace saem
