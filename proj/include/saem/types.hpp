#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <compare>

namespace saem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// n x 3 matrix of points, one per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;
/// m x 3 matrix of vertex indices, one oriented triangle per row.
using FaceIndices = Eigen::Matrix<int, Eigen::Dynamic, 3>;

struct VertexId {
  int index = 0;
  auto operator<=>(const VertexId&) const = default;
};

struct FaceId {
  int index = 0;
  auto operator<=>(const FaceId&) const = default;
};

}  // namespace saem
