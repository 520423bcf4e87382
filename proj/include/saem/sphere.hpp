#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "saem/mesh.hpp"

namespace saem {

/// Per-vertex image on the unit sphere, stored as the n x 3 matrix whose
/// columns are the three coordinate functions.
///
/// Unit norm is the expected state but is not enforced on construction so
/// maps read from disk keep their exact values; see max_norm_error().
class SphericalMap {
 public:
  SphericalMap() = default;
  explicit SphericalMap(Points points) : points_(std::move(points)) {}

  /// Rows rescaled to unit length. Throws GeometryError on a zero row.
  static SphericalMap normalized(const Points& points);

  int size() const { return static_cast<int>(points_.rows()); }
  const Points& points() const { return points_; }
  Vec3 point(int i) const { return points_.row(i).transpose(); }
  void set_point(int i, const Vec3& p) { points_.row(i) = p.transpose(); }

  /// max_i | ||f_i|| - 1 |
  double max_norm_error() const;

  bool operator==(const SphericalMap& other) const { return points_ == other.points_; }

 private:
  Points points_;
};

/// Colatitude theta in [0, pi] and longitude phi in (-pi, pi] per vertex.
/// `fixed` names the two vertices excluded from the optimization vector.
struct SphericalCoords {
  Eigen::VectorXd theta;
  Eigen::VectorXd phi;
  std::optional<std::array<int, 2>> fixed;

  int size() const { return static_cast<int>(theta.size()); }
};

/// Maps vertices to positions in the free-variable vector [theta_free; phi_free].
struct VariableLayout {
  std::vector<int> slot_of_vertex;  // -1 for pinned vertices
  std::vector<int> vertex_of_slot;

  explicit VariableLayout(const SphericalCoords& coords);
  int num_free() const { return static_cast<int>(vertex_of_slot.size()); }

  Eigen::VectorXd gather(const SphericalCoords& coords) const;
  /// Overwrites the free entries of `coords`; pinned entries are left untouched.
  void scatter(const Eigen::VectorXd& free, SphericalCoords& coords) const;
};

SphericalCoords to_spherical(const SphericalMap& map);
SphericalMap from_spherical(const SphericalCoords& coords);

/// Signed volume of the tetrahedron [o, a, b, c].
inline double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a.dot(b.cross(c)) / 6.0;
}

/// Faces whose image tetrahedron has non-positive signed volume, ascending.
std::vector<FaceId> detect_foldings(const TriMesh& mesh, const SphericalMap& map);
int count_foldings(const TriMesh& mesh, const SphericalMap& map);

/// Unit tangent-plane normal at the centre of an image face. Throws GeometryError
/// if the mean of the three points is shorter than 1e-8 (antipodal face).
Vec3 face_center_normal(const Vec3& a, const Vec3& b, const Vec3& c);

/// Orthogonal projection of every row onto the plane through `normal` with
/// normal `normal`. `normal` must be unit length.
Points tangent_project(const Points& points, const Vec3& normal);
Vec3 tangent_project(const Vec3& point, const Vec3& normal);

SphericalMap rotate(const SphericalMap& map, const Mat3& rotation);

/// Deterministic pseudo-random rotation for (seed, attempt).
Mat3 seeded_rotation(std::uint64_t seed, int attempt);

/// True if any vertex is within `angle` radians of either pole.
bool touches_pole(const SphericalMap& map, double angle);

struct PoleAvoidance {
  SphericalMap map;
  Mat3 rotation = Mat3::Identity();  // map = rotation * input
  bool rotated = false;
};

/// Rotates the map with seeded rotations until no vertex is within `angle` of
/// a pole. Identity if the input is already clear.
PoleAvoidance avoid_poles(const SphericalMap& map, std::uint64_t seed, double angle = 1e-3);

/// Piecewise-affine extension of a spherical map to a point on a domain face.
Vec3 barycentric_map(const TriMesh& mesh, const SphericalMap& map, FaceId face, const Vec3& point);

}  // namespace saem
