#include "saem/initializer.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "saem/correction.hpp"
#include "saem/energy.hpp"
#include "saem/errors.hpp"
#include "saem/operators.hpp"

namespace saem {

namespace {

int nearest_vertex_to_centroid(const TriMesh& mesh) {
  const Vec3 centroid = mesh.vertices().colwise().mean().transpose();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double d = (mesh.vertex(VertexId{v}) - centroid).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

// Breadth-first search on the dual graph from the faces around `source`;
// returns the face with the largest hop count, lowest id on ties.
FaceId farthest_face(const TriMesh& mesh, int source) {
  const int m = mesh.num_faces();
  std::vector<std::array<int, 2>> edge_faces(mesh.num_edges(), {-1, -1});
  for (int t = 0; t < m; ++t) {
    for (int c = 0; c < 3; ++c) {
      auto& slot = edge_faces[mesh.face_edge(FaceId{t}, c)];
      slot[slot[0] < 0 ? 0 : 1] = t;
    }
  }
  std::vector<int> dist(m, -1);
  std::deque<int> queue;
  for (int t : mesh.ring_faces(VertexId{source})) {
    dist[t] = 0;
    queue.push_back(t);
  }
  while (!queue.empty()) {
    const int t = queue.front();
    queue.pop_front();
    for (int c = 0; c < 3; ++c) {
      const auto& pair = edge_faces[mesh.face_edge(FaceId{t}, c)];
      const int other = pair[0] == t ? pair[1] : pair[0];
      if (dist[other] < 0) {
        dist[other] = dist[t] + 1;
        queue.push_back(other);
      }
    }
  }
  return FaceId{static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin())};
}

// Planar mean-value embedding of the mesh minus `cut`, the cut vertices
// pinned counter-clockwise in the order i, k, j (the disk's boundary order).
Eigen::MatrixX2d tutte_embedding(const TriMesh& mesh, FaceId cut) {
  const int n = mesh.num_vertices();
  const auto tri = mesh.face(cut);
  const std::array<int, 3> boundary = {tri[0], tri[2], tri[1]};
  std::vector<int> slot(n, -1);
  Eigen::MatrixX2d planar = Eigen::MatrixX2d::Zero(n, 2);
  for (int b = 0; b < 3; ++b) {
    const double angle = 2.0 * std::numbers::pi * b / 3.0;
    planar.row(boundary[b]) << std::cos(angle), std::sin(angle);
    slot[boundary[b]] = -2;
  }
  int k = 0;
  for (int v = 0; v < n; ++v) {
    if (slot[v] != -2) slot[v] = k++;
  }

  const SparseMatrix laplacian = build_mean_value_laplacian(mesh, mesh.vertices()).matrix;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(k, 2);
  for (int col = 0; col < laplacian.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(laplacian, col); it; ++it) {
      const int r = slot[it.row()];
      if (r < 0) continue;
      const int c = slot[it.col()];
      if (c >= 0) {
        triplets.emplace_back(r, c, it.value());
      } else {
        rhs.row(r) -= it.value() * planar.row(it.col());
      }
    }
  }
  SparseMatrix interior(k, k);
  interior.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(interior);
  if (lu.info() != Eigen::Success) throw GeometryError("singular Tutte system");
  const Eigen::MatrixX2d x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw GeometryError("singular Tutte system");
  for (int v = 0; v < n; ++v) {
    if (slot[v] >= 0) planar.row(v) = x.row(slot[v]);
  }
  return planar;
}

// Radius below which half of the domain area lies, measuring each face at
// the mean radius of its corners.
double median_radius(const TriMesh& mesh, const Eigen::MatrixX2d& planar) {
  const FaceIndices& f = mesh.faces();
  std::vector<std::pair<double, double>> samples;
  samples.reserve(f.rows());
  for (int t = 0; t < f.rows(); ++t) {
    const double r = (planar.row(f(t, 0)).norm() + planar.row(f(t, 1)).norm() + planar.row(f(t, 2)).norm()) / 3.0;
    samples.emplace_back(r, mesh.areas()[t]);
  }
  std::sort(samples.begin(), samples.end());
  double acc = 0.0;
  for (const auto& [r, a] : samples) {
    acc += a;
    if (acc >= 0.5 * mesh.total_area()) return r;
  }
  return samples.back().first;
}

// Inverse stereographic projection from the north pole.
Vec3 from_south_chart(double x, double y) {
  const double r2 = x * x + y * y;
  return Vec3(2.0 * x, 2.0 * y, r2 - 1.0) / (1.0 + r2);
}

// Inverse stereographic projection from the south pole.
Vec3 from_north_chart(double x, double y) {
  const double r2 = x * x + y * y;
  return Vec3(2.0 * x, 2.0 * y, 1.0 - r2) / (1.0 + r2);
}

// One hemisphere solve. `north` selects the chart projected from the south
// pole. Returns false (map untouched) if the half-step has nothing to do or
// the solve fails.
bool half_step(const TriMesh& mesh, Points& p, bool north) {
  const int n = mesh.num_vertices();
  Eigen::MatrixX2d chart(n, 2);
  std::vector<int> slot(n, -1);
  int k = 0;
  for (int v = 0; v < n; ++v) {
    const double denom = north ? 1.0 + p(v, 2) : 1.0 - p(v, 2);
    chart(v, 0) = p(v, 0) / denom;
    chart(v, 1) = p(v, 1) / denom;
    if (denom > 0.0 && chart.row(v).squaredNorm() <= 1.0) slot[v] = k++;
  }
  if (k == 0 || k == n) return false;

  const SparseMatrix laplacian = build_stretch_laplacian(mesh, p).matrix;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(k, 2);
  for (int col = 0; col < laplacian.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(laplacian, col); it; ++it) {
      const int r = slot[it.row()];
      if (r < 0) continue;
      const int c = slot[it.col()];
      if (c >= 0) {
        triplets.emplace_back(r, c, it.value());
      } else {
        rhs.row(r) -= it.value() * chart.row(it.col());
      }
    }
  }
  SparseMatrix interior(k, k);
  interior.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(interior);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::MatrixX2d x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) return false;
  for (int v = 0; v < n; ++v) {
    if (slot[v] < 0) continue;
    const int s = slot[v];
    p.row(v) = (north ? from_north_chart(x(s, 0), x(s, 1)) : from_south_chart(x(s, 0), x(s, 1))).transpose();
  }
  return true;
}

double energy_or_nan(const TriMesh& mesh, const SphericalMap& map) {
  try {
    return evaluate_energies(mesh, map).spherical_authalic;
  } catch (const GeometryError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SphericalMap initial_spherical_map(const TriMesh& mesh, const InitOptions& opts) {
  const FaceId cut = farthest_face(mesh, nearest_vertex_to_centroid(mesh));
  Eigen::MatrixX2d planar = tutte_embedding(mesh, cut);

  // Away from the cut the embedding is a constant offset plus a small
  // dipole; the median position estimates the offset.
  const auto tri = mesh.face(cut);
  std::vector<double> xs, ys;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (v == tri[0] || v == tri[1] || v == tri[2]) continue;
    xs.push_back(planar(v, 0));
    ys.push_back(planar(v, 1));
  }
  const size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  std::nth_element(ys.begin(), ys.begin() + mid, ys.end());
  planar.col(0).array() -= xs[mid];
  planar.col(1).array() -= ys[mid];
  const double r = median_radius(mesh, planar);
  if (!(r > 0.0)) throw GeometryError("singular Tutte system");

  // Inverse projection from the south pole keeps the orientation and sends
  // the cut face to the south pole. The scale is picked on a log grid around
  // the median radius: fewest folds first, then lowest E_spherical.
  auto wrap = [&](double scale) {
    Points p(mesh.num_vertices(), 3);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      p.row(v) = from_north_chart(scale * planar(v, 0), scale * planar(v, 1)).transpose();
    }
    return SphericalMap::normalized(p);
  };
  SphericalMap map;
  int best_folds = std::numeric_limits<int>::max();
  double best_energy = std::numeric_limits<double>::infinity();
  for (int step = -24; step <= 24; ++step) {
    SphericalMap candidate = wrap(std::exp(0.25 * step) / r);
    const int folds = count_foldings(mesh, candidate);
    const EnergyBreakdown e = evaluate_energies(mesh, candidate);
    const double energy = e.volume > 0.0 && std::isfinite(e.spherical_authalic)
                              ? e.spherical_authalic
                              : std::numeric_limits<double>::infinity();
    if (folds < best_folds || (folds == best_folds && energy < best_energy)) {
      best_folds = folds;
      best_energy = energy;
      map = std::move(candidate);
    }
  }
  if (best_folds > 0) {
    map = correct_foldings(mesh, map).map;
    if (count_foldings(mesh, map) > 0) throw GeometryError("initialization not bijective");
  }
  return avoid_poles(map, opts.seed).map;
}

WarmupResult fixed_point_warmup(const TriMesh& mesh, const SphericalMap& map, const InitOptions& opts) {
  if (opts.warmup_max_iters < 0) throw std::invalid_argument("warmup_max_iters must be non-negative");
  WarmupResult result;
  result.map = map;
  double best = energy_or_nan(mesh, map);
  result.energies.push_back(best);
  for (int it = 0; it < opts.warmup_max_iters && std::isfinite(best); ++it) {
    Points p = result.map.points();
    bool moved = false;
    try {
      moved = half_step(mesh, p, false);
      moved = half_step(mesh, p, true) || moved;
    } catch (const GeometryError&) {
      break;
    }
    if (!moved) break;
    SphericalMap next = SphericalMap::normalized(p);
    const double e = energy_or_nan(mesh, next);
    if (!(e <= best)) {
      result.stopped_on_increase = true;
      break;
    }
    best = e;
    result.map = std::move(next);
    result.energies.push_back(e);
    ++result.iterations;
  }
  result.folds = count_foldings(mesh, result.map);
  return result;
}

}  // namespace saem
