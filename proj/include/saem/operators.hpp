#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <filesystem>
#include <memory>

#include "saem/sphere.hpp"

namespace saem {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class LaplacianKind { Stretch, MeanValue };

/// Weighted graph Laplacian on the mesh adjacency with zero row sums.
/// The stretch kind is symmetric; the mean-value kind generally is not.
struct LaplacianMatrix {
  SparseMatrix matrix;
  LaplacianKind kind = LaplacianKind::Stretch;

  int size() const { return static_cast<int>(matrix.rows()); }
};

/// Domain face area over image face area. Throws GeometryError if the image face is degenerate.
double stretch_factor(const TriMesh& mesh, const SphericalMap& map, FaceId face);

/// Stretch-weighted cotangent Laplacian. The off-diagonal entry of an edge is
///   -1/2 * sum over its two faces of cot(opposite image angle) / stretch factor,
/// with angles measured on the flat image triangles. Then
///   1/2 * sum_s f^s' L f^s == sum_faces |f(face)|^2 / |face|.
/// Throws GeometryError on a degenerate image face.
LaplacianMatrix build_stretch_laplacian(const TriMesh& mesh, const Points& image);
LaplacianMatrix build_stretch_laplacian(const TriMesh& mesh, const SphericalMap& map);

/// Mean-value Laplacian: entry (i, j) is -sum over the faces on edge ij of
/// tan(angle at i / 2) / |f_i - f_j|. Off-diagonals are strictly negative.
/// Throws GeometryError on a zero-length image edge.
LaplacianMatrix build_mean_value_laplacian(const TriMesh& mesh, const Points& image);
LaplacianMatrix build_mean_value_laplacian(const TriMesh& mesh, const SphericalMap& map);

/// Cholesky factor (fill-reducing AMD ordering) of a stretch Laplacian with two
/// pinned rows/columns removed, applied as the block preconditioner I_2 (x) L.
/// Immutable and cheap to copy.
class PreconditionerFactor {
 public:
  /// Throws IndefinitePreconditioner if the pinned submatrix is not positive definite,
  /// std::invalid_argument if the pinned vertices coincide or the Laplacian is not the stretch kind.
  static PreconditionerFactor build(const LaplacianMatrix& laplacian, std::array<int, 2> fixed);
  /// Factors an SPD matrix directly (no pinning).
  static PreconditionerFactor from_spd(const SparseMatrix& matrix);

  int block_size() const { return block_size_; }
  /// Solves (I_2 (x) L) x = b for b of length 2 * block_size().
  Eigen::VectorXd solve(const Eigen::VectorXd& stacked) const;
  /// Solves L x = b for one block.
  Eigen::VectorXd solve_block(const Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  int block_size_ = 0;
};

/// Matrix Market coordinate dump for debugging. Throws IoError on failure.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& matrix);

}  // namespace saem
