#include "saem/mesh.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "saem/errors.hpp"

namespace saem {

namespace {

struct DirectedEdge {
  int lo, hi;
  bool forward;  // lo -> hi in the face
  int face;
  int corner;
  bool operator<(const DirectedEdge& o) const {
    if (lo != o.lo) return lo < o.lo;
    if (hi != o.hi) return hi < o.hi;
    return face < o.face;
  }
};

std::string edge_name(int a, int b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

TriMesh::TriMesh(Points vertices, FaceIndices faces)
    : vertices_(std::move(vertices)),
      topo_(build_topology(static_cast<int>(vertices_.rows()), std::move(faces))) {
  if (!vertices_.allFinite()) throw MeshError("non-finite vertex coordinate");
  compute_areas();
}

TriMesh::TriMesh(Points vertices, std::shared_ptr<const Topology> topo)
    : vertices_(std::move(vertices)), topo_(std::move(topo)) {
  if (vertices_.rows() != static_cast<Eigen::Index>(topo_->ring_offsets.size()) - 1) {
    throw MeshError("vertex count does not match connectivity");
  }
  if (!vertices_.allFinite()) throw MeshError("non-finite vertex coordinate");
  compute_areas();
}

TriMesh TriMesh::with_vertices(Points vertices) const { return TriMesh(std::move(vertices), topo_); }

std::shared_ptr<const TriMesh::Topology> TriMesh::build_topology(int n, FaceIndices faces) {
  auto topo = std::make_shared<Topology>();
  const int m = static_cast<int>(faces.rows());
  if (n == 0 || m == 0) throw MeshError("empty mesh");

  std::vector<int> valence(n, 0);
  for (int f = 0; f < m; ++f) {
    const int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
    for (int v : {a, b, c}) {
      if (v < 0 || v >= n) {
        throw MeshError("face " + std::to_string(f) + " references invalid vertex " + std::to_string(v));
      }
    }
    if (a == b || b == c || a == c) {
      throw MeshError("face " + std::to_string(f) + " has repeated vertex indices");
    }
    ++valence[a];
    ++valence[b];
    ++valence[c];
  }
  for (int v = 0; v < n; ++v) {
    if (valence[v] == 0) throw MeshError("unreferenced vertex " + std::to_string(v));
  }

  // Edge manifoldness and orientation consistency.
  std::vector<DirectedEdge> half;
  half.reserve(3 * static_cast<size_t>(m));
  for (int f = 0; f < m; ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = faces(f, (c + 1) % 3);
      const int b = faces(f, (c + 2) % 3);
      half.push_back({std::min(a, b), std::max(a, b), a < b, f, c});
    }
  }
  std::sort(half.begin(), half.end());
  topo->face_edges.assign(3 * static_cast<size_t>(m), -1);
  for (size_t i = 0; i < half.size();) {
    size_t j = i;
    while (j < half.size() && half[j].lo == half[i].lo && half[j].hi == half[i].hi) ++j;
    const size_t count = j - i;
    if (count == 1) {
      throw MeshError("boundary edge " + edge_name(half[i].lo, half[i].hi) + ": mesh is not closed");
    }
    if (count > 2) throw MeshError("non-manifold edge " + edge_name(half[i].lo, half[i].hi));
    if (half[i].forward == half[i + 1].forward) {
      throw MeshError("inconsistent orientation at edge " + edge_name(half[i].lo, half[i].hi));
    }
    const int id = static_cast<int>(topo->edges.size());
    topo->edges.push_back({half[i].lo, half[i].hi});
    for (size_t k = i; k < j; ++k) topo->face_edges[3 * half[k].face + half[k].corner] = id;
    i = j;
  }

  const int chi = n - static_cast<int>(topo->edges.size()) + m;
  if (chi != 2) {
    throw MeshError("Euler characteristic " + std::to_string(chi) + " ≠ 2");
  }

  // Cyclic one-rings. In face (v, x, y) the successor of x around v is y.
  topo->ring_offsets.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) topo->ring_offsets[v + 1] = topo->ring_offsets[v] + valence[v];
  std::vector<int> incident(topo->ring_offsets.back());
  {
    std::vector<int> fill(topo->ring_offsets.begin(), topo->ring_offsets.end() - 1);
    for (int f = 0; f < m; ++f) {
      for (int c = 0; c < 3; ++c) incident[fill[faces(f, c)]++] = f;
    }
  }
  topo->ring_vertices.resize(incident.size());
  topo->ring_face_ids.resize(incident.size());
  for (int v = 0; v < n; ++v) {
    const int begin = topo->ring_offsets[v];
    const int k = valence[v];
    // (x, y, face) triples for faces around v
    std::vector<std::array<int, 3>> wedges(k);
    for (int t = 0; t < k; ++t) {
      const int f = incident[begin + t];
      int c = 0;
      while (faces(f, c) != v) ++c;
      wedges[t] = {faces(f, (c + 1) % 3), faces(f, (c + 2) % 3), f};
    }
    std::vector<char> used(k, 0);
    int current = 0;
    for (int step = 0; step < k; ++step) {
      used[current] = 1;
      topo->ring_vertices[begin + step] = wedges[current][0];
      topo->ring_face_ids[begin + step] = wedges[current][2];
      const int next_x = wedges[current][1];
      int next = -1;
      for (int t = 0; t < k; ++t) {
        if (wedges[t][0] == next_x) {
          next = t;
          break;
        }
      }
      if (step + 1 < k) {
        if (next < 0 || used[next]) throw MeshError("non-manifold vertex " + std::to_string(v));
        current = next;
      } else if (next != 0) {
        throw MeshError("non-manifold vertex " + std::to_string(v));
      }
    }
  }

  // Faces whose corners share a common outside neighbor.
  std::vector<std::vector<int>> sorted_nbrs(n);
  for (int v = 0; v < n; ++v) {
    sorted_nbrs[v].assign(topo->ring_vertices.begin() + topo->ring_offsets[v],
                          topo->ring_vertices.begin() + topo->ring_offsets[v + 1]);
    std::sort(sorted_nbrs[v].begin(), sorted_nbrs[v].end());
  }
  for (int f = 0; f < m; ++f) {
    const int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
    std::vector<int> ab;
    std::set_intersection(sorted_nbrs[a].begin(), sorted_nbrs[a].end(), sorted_nbrs[b].begin(),
                          sorted_nbrs[b].end(), std::back_inserter(ab));
    for (int w : ab) {
      if (w == c) continue;
      if (std::binary_search(sorted_nbrs[c].begin(), sorted_nbrs[c].end(), w)) {
        topo->flagged_faces.push_back(FaceId{f});
        break;
      }
    }
  }

  topo->faces = std::move(faces);
  return topo;
}

void TriMesh::compute_areas() {
  areas_ = saem::face_areas(*this, vertices_);
  for (int t = 0; t < areas_.size(); ++t) {
    if (!(areas_[t] > 0.0)) throw MeshError("degenerate face " + std::to_string(t) + " has zero area");
  }
  total_area_ = areas_.sum();
}

std::span<const int> TriMesh::ring_neighbors(VertexId v) const {
  const int b = topo_->ring_offsets[v.index];
  const int e = topo_->ring_offsets[v.index + 1];
  return {topo_->ring_vertices.data() + b, static_cast<size_t>(e - b)};
}

std::span<const int> TriMesh::ring_faces(VertexId v) const {
  const int b = topo_->ring_offsets[v.index];
  const int e = topo_->ring_offsets[v.index + 1];
  return {topo_->ring_face_ids.data() + b, static_cast<size_t>(e - b)};
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double face_area(const TriMesh& mesh, FaceId face) {
  const auto [i, j, k] = mesh.face(face);
  return triangle_area(mesh.vertex({i}), mesh.vertex({j}), mesh.vertex({k}));
}

Eigen::VectorXd face_areas(const TriMesh& mesh, const Points& positions) {
  const FaceIndices& f = mesh.faces();
  Eigen::VectorXd areas(f.rows());
  for (int t = 0; t < f.rows(); ++t) {
    areas[t] = triangle_area(positions.row(f(t, 0)), positions.row(f(t, 1)), positions.row(f(t, 2)));
  }
  return areas;
}

TriMesh normalize_area(const TriMesh& mesh) {
  const double area = mesh.total_area();
  if (!(area > 0.0) || !std::isfinite(area)) throw GeometryError("mesh has no positive total area");
  const double scale = std::sqrt(4.0 * std::numbers::pi / area);
  return mesh.with_vertices(mesh.vertices() * scale);
}

OneRing one_ring(const TriMesh& mesh, VertexId v) {
  OneRing ring;
  for (int u : mesh.ring_neighbors(v)) ring.neighbors.push_back(VertexId{u});
  for (int f : mesh.ring_faces(v)) ring.faces.push_back(FaceId{f});
  return ring;
}

Vec3 barycentric_map(const TriMesh& mesh, const Points& image, FaceId face, const Vec3& point) {
  const auto [i, j, k] = mesh.face(face);
  const Vec3 vi = mesh.vertex({i}), vj = mesh.vertex({j}), vk = mesh.vertex({k});
  const Vec3 normal = (vj - vi).cross(vk - vi);
  const double twice_area = normal.norm();
  const Vec3 unit = normal / twice_area;
  const double diameter = std::max({(vj - vi).norm(), (vk - vj).norm(), (vi - vk).norm()});

  if (std::abs((point - vi).dot(unit)) > 1e-9 * diameter) {
    throw GeometryError("point is not on the plane of face " + std::to_string(face.index));
  }
  // Signed sub-areas relative to the face normal; they sum to the face area.
  const double wi = (vj - point).cross(vk - point).dot(unit);
  const double wj = (vk - point).cross(vi - point).dot(unit);
  const double wk = (vi - point).cross(vj - point).dot(unit);
  const double tol = 1e-9 * diameter * diameter;
  if (wi < -tol || wj < -tol || wk < -tol) {
    throw GeometryError("point lies outside face " + std::to_string(face.index));
  }
  // Normalizing by the sum keeps vertices exact: (1, 0, 0) reproduces f_i bit for bit.
  const double sum = wi + wj + wk;
  return (wi / sum) * image.row(i).transpose() + (wj / sum) * image.row(j).transpose() +
         (wk / sum) * image.row(k).transpose();
}

}  // namespace saem
