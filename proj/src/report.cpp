#include "saem/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "saem/energy.hpp"
#include "saem/errors.hpp"
#include "saem/mesh_io.hpp"

namespace saem {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

double area_ratio(const TriMesh& mesh, const SphericalMap& map, FaceId face) {
  const double domain = mesh.areas()[face.index];
  if (!(domain > 0.0)) throw GeometryError("zero domain area at face " + std::to_string(face.index));
  const double total_image = image_area(mesh, map);
  if (!(total_image > 0.0)) throw GeometryError("image area is zero");
  const auto [i, j, k] = mesh.face(face);
  const double image = triangle_area(map.point(i), map.point(j), map.point(k));
  return std::abs((image / total_image) / (domain / mesh.total_area()));
}

Eigen::VectorXd area_ratios(const TriMesh& mesh, const SphericalMap& map) {
  const Eigen::VectorXd image = face_areas(mesh, map.points());
  const double total_image = image.sum();
  if (!(total_image > 0.0)) throw GeometryError("image area is zero");
  const Eigen::VectorXd& domain = mesh.areas();
  Eigen::VectorXd r(mesh.num_faces());
  for (int t = 0; t < mesh.num_faces(); ++t) {
    r[t] = std::abs((image[t] / total_image) / (domain[t] / mesh.total_area()));
  }
  return r;
}

RatioStats summarize(const Eigen::VectorXd& values) {
  RatioStats s;
  if (values.size() == 0) return s;
  s.mean = values.mean();
  s.sd = std::sqrt((values.array() - s.mean).square().sum() / static_cast<double>(values.size()));
  s.min = values.minCoeff();
  s.max = values.maxCoeff();
  return s;
}

Histogram make_histogram(const Eigen::VectorXd& values, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  const double hi = std::max(2.0, values.size() > 0 ? values.maxCoeff() : 0.0);
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = hi * b / bins;
  h.counts.assign(bins, 0);
  for (double v : values) {
    const int b = std::clamp(static_cast<int>(std::floor(v / hi * bins)), 0, bins - 1);
    ++h.counts[b];
  }
  return h;
}

SolverSummary summarize(const SolverState& state) {
  SolverSummary s;
  s.converged = state.converged;
  s.line_search_failed = state.line_search_failed;
  s.preconditioner_fallback = state.preconditioner_fallback;
  s.descent_restarts = state.descent_restarts;
  s.pole_rotations = state.pole_rotations;
  s.fixed = state.fixed;
  s.wolfe_checked = state.wolfe_checked;
  s.wolfe_satisfied = state.wolfe_satisfied;
  return s;
}

MetricsReport build_report(const TriMesh& mesh, const SphericalMap& map, int iterations,
                           std::optional<double> wall_time, int bins) {
  MetricsReport r;
  const EnergyBreakdown e = evaluate_energies(mesh, map);
  r.authalic = e.authalic;
  r.stretch = e.stretch;
  r.spherical_authalic = e.spherical_authalic;
  r.volume = e.volume;
  const Eigen::VectorXd ratios = area_ratios(mesh, map);
  r.area_ratio = summarize(ratios);
  r.histogram = make_histogram(ratios, bins);
  r.fold_count = count_foldings(mesh, map);
  r.iterations = iterations;
  r.wall_time = wall_time;
  return r;
}

std::string report_json(const MetricsReport& r) {
  json j;
  j["schema"] = 1;
  j["E_A"] = number(r.authalic);
  j["E_S"] = number(r.stretch);
  j["E_spherical"] = number(r.spherical_authalic);
  j["volume"] = number(r.volume);
  j["area_ratio"] = {{"mean", number(r.area_ratio.mean)},
                     {"sd", number(r.area_ratio.sd)},
                     {"min", number(r.area_ratio.min)},
                     {"max", number(r.area_ratio.max)}};
  j["fold_count"] = r.fold_count;
  j["iterations"] = r.iterations;
  j["wall_time"] = r.wall_time ? number(*r.wall_time) : json(nullptr);
  j["histogram"] = {{"edges", r.histogram.edges}, {"counts", r.histogram.counts}};
  if (r.warmup) {
    json energies = json::array();
    for (double e : r.warmup->energies) energies.push_back(number(e));
    j["warmup"] = {{"iterations", r.warmup->iterations}, {"energies", energies}, {"folds", r.warmup->folds}};
  }
  if (r.solver) {
    const SolverSummary& s = *r.solver;
    j["solver"] = {{"converged", s.converged},
                   {"line_search_failed", s.line_search_failed},
                   {"preconditioner_fallback", s.preconditioner_fallback},
                   {"descent_restarts", s.descent_restarts},
                   {"pole_rotations", s.pole_rotations},
                   {"fixed", s.fixed}};
    if (s.wolfe_checked > 0) j["solver"]["wolfe"] = {{"checked", s.wolfe_checked}, {"satisfied", s.wolfe_satisfied}};
  }
  if (r.correction) {
    const CorrectionSummary& c = *r.correction;
    j["correction"] = {{"rounds", c.rounds},
                       {"folds_before", c.folds_before},
                       {"folds_after", c.folds_after},
                       {"folds_per_round", c.folds_per_round},
                       {"singular_skips", c.singular_skips},
                       {"nonconvex_rings", c.nonconvex_rings}};
  }
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const MetricsReport& report) {
  std::ofstream out = open_output(path);
  out << report_json(report);
  finish(out, path);
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
  std::ofstream out = open_output(path);
  out << "bin_lo,bin_hi,count\n";
  for (size_t b = 0; b < h.counts.size(); ++b) {
    out << format_coordinate(h.edges[b]) << ',' << format_coordinate(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
  }
  finish(out, path);
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  std::ofstream out = open_output(path);
  out << "iteration,E_spherical,E_A,alpha,beta,grad_inf,folds\n";
  for (const TraceRow& r : trace) {
    out << r.iteration << ',' << format_coordinate(r.spherical_authalic) << ',' << format_coordinate(r.authalic) << ','
        << format_coordinate(r.alpha) << ',' << format_coordinate(r.beta) << ',' << format_coordinate(r.grad_inf)
        << ',' << r.folds << '\n';
  }
  finish(out, path);
}

}  // namespace saem
