#pragma once

#include <array>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "saem/types.hpp"

namespace saem {

/// Undirected edge with first < second.
struct Edge {
  int first = 0;
  int second = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Closed, consistently oriented genus-zero triangle mesh.
///
/// Construction validates every invariant and throws MeshError naming the
/// first one violated:
///   - face indices are valid and pairwise distinct, every vertex is used;
///   - every undirected edge is shared by exactly two faces with opposite
///     directed orientation;
///   - every vertex has a single fan of incident faces (manifold vertex);
///   - n - |E| + m == 2;
///   - every face has strictly positive area.
///
/// The object is immutable. Topology is shared between copies, so
/// `with_vertices` is cheap.
class TriMesh {
 public:
  TriMesh(Points vertices, FaceIndices faces);

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_faces() const { return static_cast<int>(topo_->faces.rows()); }
  int num_edges() const { return static_cast<int>(topo_->edges.size()); }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

  const Points& vertices() const { return vertices_; }
  const FaceIndices& faces() const { return topo_->faces; }
  Vec3 vertex(VertexId v) const { return vertices_.row(v.index).transpose(); }
  std::array<int, 3> face(FaceId f) const {
    return {topo_->faces(f.index, 0), topo_->faces(f.index, 1), topo_->faces(f.index, 2)};
  }

  /// Sorted lexicographically.
  const std::vector<Edge>& edges() const { return topo_->edges; }
  /// Index into edges() of the edge opposite corner c of face f
  /// (corner 0 -> edge (v1, v2), and so on).
  int face_edge(FaceId f, int corner) const { return topo_->face_edges[3 * f.index + corner]; }

  /// Cyclically ordered neighbors of v. neighbor k and k+1 span ring_faces()[k].
  std::span<const int> ring_neighbors(VertexId v) const;
  /// Incident faces of v in the same cyclic order as ring_neighbors().
  std::span<const int> ring_faces(VertexId v) const;

  /// Faces whose three vertices are all adjacent to one common vertex outside the face.
  /// Such faces have no interior vertex of their own; reported, never repaired.
  const std::vector<FaceId>& flagged_faces() const { return topo_->flagged_faces; }

  /// Domain face areas, computed once at construction.
  const Eigen::VectorXd& areas() const { return areas_; }
  double total_area() const { return total_area_; }

  /// Same connectivity, new positions. Re-checks face areas only.
  TriMesh with_vertices(Points vertices) const;

 private:
  struct Topology {
    FaceIndices faces;
    std::vector<Edge> edges;
    std::vector<int> face_edges;
    std::vector<int> ring_offsets;
    std::vector<int> ring_vertices;
    std::vector<int> ring_face_ids;
    std::vector<FaceId> flagged_faces;
  };

  TriMesh(Points vertices, std::shared_ptr<const Topology> topo);
  static std::shared_ptr<const Topology> build_topology(int num_vertices, FaceIndices faces);
  void compute_areas();

  Points vertices_;
  Eigen::VectorXd areas_;
  double total_area_ = 0.0;
  std::shared_ptr<const Topology> topo_;
};

/// Area of a triangle given by its corners.
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Half the norm of the cross product of two edge vectors.
/// Degenerate faces give 0.
double face_area(const TriMesh& mesh, FaceId face);

/// Per-face areas of a point set laid out on the mesh connectivity.
Eigen::VectorXd face_areas(const TriMesh& mesh, const Points& positions);

/// Uniformly rescales the mesh so its total area is 4*pi.
/// Throws GeometryError if the area is not positive.
TriMesh normalize_area(const TriMesh& mesh);

struct OneRing {
  std::vector<VertexId> neighbors;
  std::vector<FaceId> faces;
};

OneRing one_ring(const TriMesh& mesh, VertexId v);

/// Piecewise-affine extension of a vertex map to a point on a face, using
/// barycentric coordinates of `point` in the domain face. Throws GeometryError
/// if the point is off the face plane or outside the face.
Vec3 barycentric_map(const TriMesh& mesh, const Points& image, FaceId face, const Vec3& point);

}  // namespace saem
