#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <vector>

#include "saem/operators.hpp"

namespace saem {

struct CorrectionOptions {
  int max_rounds = 100;
};

using RowMajorSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct UnfoldResult {
  std::array<Vec3, 3> points;  // new unit positions of the face's vertices, in face order
  bool convex_ring = false;    // projected boundary of the face's 1-ring is convex
};

/// Re-solves the three vertices of a folded face as mean-value combinations of
/// their tangent-plane projected neighbors, then puts them back on the sphere.
/// The tangent plane touches the sphere at the normalized face centre.
/// `mean_value` is the mean-value Laplacian in row-major form.
/// Throws GeometryError if the 3x3 system is singular or the face is antipodal.
UnfoldResult unfold_one(const TriMesh& mesh, const SphericalMap& map, const RowMajorSparse& mean_value, FaceId face);

struct CorrectionResult {
  SphericalMap map;
  int rounds = 0;
  int initial_folds = 0;
  int remaining_folds = 0;
  std::vector<int> folds_per_round;  // count at the start of each round, then the final count
  int singular_skips = 0;
  int nonconvex_rings = 0;
};

/// Repeats rounds of local unfolding until no face is folded or the round
/// budget is spent. Each round rebuilds the mean-value Laplacian once, then
/// processes the folds found at the start of the round in ascending order,
/// in place. Faces already unfolded by an earlier solve in the round are skipped.
CorrectionResult correct_foldings(const TriMesh& mesh, const SphericalMap& map, const CorrectionOptions& opts = {});

}  // namespace saem
