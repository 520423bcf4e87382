#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "saem/solver.hpp"
#include "saem/sphere.hpp"

namespace saem {

/// (|f(t)| / |f(M)|) / (|t| / |M|) with the unsigned image area.
/// Throws GeometryError on a zero domain face or zero image area.
double area_ratio(const TriMesh& mesh, const SphericalMap& map, FaceId face);
Eigen::VectorXd area_ratios(const TriMesh& mesh, const SphericalMap& map);

/// Population statistics.
struct RatioStats {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};
RatioStats summarize(const Eigen::VectorXd& values);

struct Histogram {
  std::vector<double> edges;  // bins + 1 values
  std::vector<long> counts;
};

/// Uniform bins over [0, max(2, largest value)]. The last bin is closed.
Histogram make_histogram(const Eigen::VectorXd& values, int bins = 50);

struct SolverSummary {
  bool converged = false;
  bool line_search_failed = false;
  bool preconditioner_fallback = false;
  int descent_restarts = 0;
  int pole_rotations = 0;
  std::array<int, 2> fixed = {0, 1};
  int wolfe_checked = 0;
  int wolfe_satisfied = 0;
};
SolverSummary summarize(const SolverState& state);

struct WarmupSummary {
  int iterations = 0;
  std::vector<double> energies;
  int folds = 0;
};

struct CorrectionSummary {
  int rounds = 0;
  int folds_before = 0;
  int folds_after = 0;
  std::vector<int> folds_per_round;
  int singular_skips = 0;
  int nonconvex_rings = 0;
};

struct MetricsReport {
  double authalic = 0.0;
  double stretch = 0.0;
  double spherical_authalic = 0.0;
  double volume = 0.0;
  RatioStats area_ratio;
  int fold_count = 0;
  int iterations = 0;
  std::optional<double> wall_time;
  Histogram histogram;

  std::optional<WarmupSummary> warmup;
  std::optional<SolverSummary> solver;
  std::optional<CorrectionSummary> correction;
  std::vector<std::string> warnings;
};

MetricsReport build_report(const TriMesh& mesh, const SphericalMap& map, int iterations = 0,
                           std::optional<double> wall_time = std::nullopt, int bins = 50);

/// JSON with a top-level "schema": 1. Undefined values are written as null.
std::string report_json(const MetricsReport& report);
void write_report(const std::filesystem::path& path, const MetricsReport& report);
/// Columns bin_lo, bin_hi, count.
void write_histogram_csv(const std::filesystem::path& path, const Histogram& histogram);
/// Columns iteration, E_spherical, E_A, alpha, beta, grad_inf, folds.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

}  // namespace saem
