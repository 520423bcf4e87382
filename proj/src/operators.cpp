#include "saem/operators.hpp"

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/SparseExtra>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "saem/errors.hpp"

namespace saem {

namespace {

using Triplet = Eigen::Triplet<double>;

// Assembles a Laplacian from per-edge weights, w_lo_hi for row lo / column hi and
// w_hi_lo for the transposed entry. Entries are emitted in sorted edge order.
SparseMatrix assemble(const TriMesh& mesh, const std::vector<double>& w_lo_hi, const std::vector<double>& w_hi_lo) {
  const int n = mesh.num_vertices();
  const auto& edges = mesh.edges();
  std::vector<Triplet> triplets;
  triplets.reserve(2 * edges.size() + static_cast<size_t>(n));
  std::vector<double> diagonal(n, 0.0);
  for (size_t e = 0; e < edges.size(); ++e) {
    const auto [lo, hi] = edges[e];
    triplets.emplace_back(lo, hi, w_lo_hi[e]);
    triplets.emplace_back(hi, lo, w_hi_lo[e]);
    diagonal[lo] -= w_lo_hi[e];
    diagonal[hi] -= w_hi_lo[e];
  }
  for (int v = 0; v < n; ++v) triplets.emplace_back(v, v, diagonal[v]);
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

double stretch_factor(const TriMesh& mesh, const SphericalMap& map, FaceId face) {
  const auto [i, j, k] = mesh.face(face);
  const double image = triangle_area(map.point(i), map.point(j), map.point(k));
  if (!(image > 0.0)) throw GeometryError("degenerate image face " + std::to_string(face.index));
  return face_area(mesh, face) / image;
}

LaplacianMatrix build_stretch_laplacian(const TriMesh& mesh, const Points& image) {
  const FaceIndices& faces = mesh.faces();
  const Eigen::VectorXd domain_areas = face_areas(mesh, mesh.vertices());
  std::vector<double> weight(mesh.num_edges(), 0.0);
  for (int t = 0; t < faces.rows(); ++t) {
    const Vec3 p[3] = {image.row(faces(t, 0)), image.row(faces(t, 1)), image.row(faces(t, 2))};
    const double twice_area = (p[1] - p[0]).cross(p[2] - p[0]).norm();
    if (!(twice_area > 0.0)) throw GeometryError("degenerate image face " + std::to_string(t));
    // 1 / stretch factor
    const double inv_sigma = 0.5 * twice_area / domain_areas[t];
    for (int c = 0; c < 3; ++c) {
      const Vec3 u = p[(c + 1) % 3] - p[c];
      const Vec3 v = p[(c + 2) % 3] - p[c];
      const double cot = u.dot(v) / twice_area;
      weight[mesh.face_edge(FaceId{t}, c)] -= 0.5 * cot * inv_sigma;
    }
  }
  return {assemble(mesh, weight, weight), LaplacianKind::Stretch};
}

LaplacianMatrix build_stretch_laplacian(const TriMesh& mesh, const SphericalMap& map) {
  return build_stretch_laplacian(mesh, map.points());
}

LaplacianMatrix build_mean_value_laplacian(const TriMesh& mesh, const Points& image) {
  const FaceIndices& faces = mesh.faces();
  const auto& edges = mesh.edges();
  std::vector<double> w_lo_hi(edges.size(), 0.0), w_hi_lo(edges.size(), 0.0);
  auto add = [&](int edge, int row, double w) {
    if (edges[edge].first == row) {
      w_lo_hi[edge] -= w;
    } else {
      w_hi_lo[edge] -= w;
    }
  };
  for (int t = 0; t < faces.rows(); ++t) {
    for (int c = 0; c < 3; ++c) {
      const int i = faces(t, c), j = faces(t, (c + 1) % 3), k = faces(t, (c + 2) % 3);
      const Vec3 u = image.row(j) - image.row(i);
      const Vec3 v = image.row(k) - image.row(i);
      const double lu = u.norm(), lv = v.norm();
      if (!(lu > 0.0) || !(lv > 0.0)) throw GeometryError("zero-length image edge in face " + std::to_string(t));
      // tan(gamma / 2) = sin(gamma) / (1 + cos(gamma))
      const double tan_half = u.cross(v).norm() / (lu * lv + u.dot(v));
      // corner c is opposite edge c; edge (i, j) is opposite corner c + 2, (i, k) opposite c + 1
      add(mesh.face_edge(FaceId{t}, (c + 2) % 3), i, tan_half / lu);
      add(mesh.face_edge(FaceId{t}, (c + 1) % 3), i, tan_half / lv);
    }
  }
  return {assemble(mesh, w_lo_hi, w_hi_lo), LaplacianKind::MeanValue};
}

LaplacianMatrix build_mean_value_laplacian(const TriMesh& mesh, const SphericalMap& map) {
  return build_mean_value_laplacian(mesh, map.points());
}

struct PreconditionerFactor::Impl {
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

PreconditionerFactor PreconditionerFactor::from_spd(const SparseMatrix& matrix) {
  auto impl = std::make_shared<Impl>();
  impl->llt.compute(matrix);
  if (impl->llt.info() != Eigen::Success) {
    throw IndefinitePreconditioner("Cholesky factorization failed: matrix is not positive definite");
  }
  PreconditionerFactor factor;
  factor.block_size_ = static_cast<int>(matrix.rows());
  factor.impl_ = std::move(impl);
  return factor;
}

PreconditionerFactor PreconditionerFactor::build(const LaplacianMatrix& laplacian, std::array<int, 2> fixed) {
  if (laplacian.kind != LaplacianKind::Stretch) {
    throw std::invalid_argument("preconditioner requires the stretch Laplacian");
  }
  const int n = laplacian.size();
  if (fixed[0] == fixed[1] || fixed[0] < 0 || fixed[1] < 0 || fixed[0] >= n || fixed[1] >= n) {
    throw std::invalid_argument("pinned vertices must be two distinct valid indices");
  }
  std::vector<int> slot(n, -1);
  int k = 0;
  for (int v = 0; v < n; ++v) {
    if (v != fixed[0] && v != fixed[1]) slot[v] = k++;
  }
  std::vector<Triplet> triplets;
  triplets.reserve(laplacian.matrix.nonZeros());
  for (int col = 0; col < laplacian.matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(laplacian.matrix, col); it; ++it) {
      const int r = slot[it.row()], c = slot[it.col()];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix sub(k, k);
  sub.setFromTriplets(triplets.begin(), triplets.end());
  return from_spd(sub);
}

Eigen::VectorXd PreconditionerFactor::solve_block(const Eigen::VectorXd& b) const {
  if (b.size() != block_size_) throw std::invalid_argument("preconditioner block size mismatch");
  return impl_->llt.solve(b);
}

Eigen::VectorXd PreconditionerFactor::solve(const Eigen::VectorXd& stacked) const {
  if (stacked.size() != 2 * block_size_) throw std::invalid_argument("preconditioner size mismatch");
  Eigen::VectorXd x(stacked.size());
  x.head(block_size_) = impl_->llt.solve(stacked.head(block_size_));
  x.tail(block_size_) = impl_->llt.solve(stacked.tail(block_size_));
  return x;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& matrix) {
  if (!Eigen::saveMarket(matrix, path.string())) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace saem
