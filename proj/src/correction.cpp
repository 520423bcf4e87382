#include "saem/correction.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <map>
#include <stdexcept>

#include "saem/errors.hpp"

namespace saem {

namespace {

bool is_folded(const TriMesh& mesh, const SphericalMap& map, FaceId face) {
  const auto [i, j, k] = mesh.face(face);
  return signed_tet_volume(map.point(i), map.point(j), map.point(k)) <= 0.0;
}

// Boundary loop of the union of faces touching the given vertices, checked for
// convexity after projection onto the plane with the given normal.
bool ring_is_convex(const TriMesh& mesh, const SphericalMap& map, const std::array<int, 3>& verts, const Vec3& normal) {
  std::vector<int> faces;
  for (int v : verts) {
    for (int f : mesh.ring_faces(VertexId{v})) faces.push_back(f);
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());

  std::map<std::pair<int, int>, int> directed;
  for (int f : faces) {
    const auto tri = mesh.face(FaceId{f});
    for (int c = 0; c < 3; ++c) ++directed[{tri[c], tri[(c + 1) % 3]}];
  }
  std::map<int, int> next;
  for (const auto& [edge, count] : directed) {
    if (directed.count({edge.second, edge.first}) == 0) {
      if (next.count(edge.first) != 0) return false;  // pinched boundary
      next[edge.first] = edge.second;
    }
  }
  if (next.size() < 3) return false;
  std::vector<int> loop;
  int v = next.begin()->first;
  for (size_t step = 0; step < next.size(); ++step) {
    loop.push_back(v);
    auto it = next.find(v);
    if (it == next.end()) return false;
    v = it->second;
  }
  if (v != loop.front()) return false;

  const size_t k = loop.size();
  for (size_t a = 0; a < k; ++a) {
    const Vec3 p0 = tangent_project(map.point(loop[a]), normal);
    const Vec3 p1 = tangent_project(map.point(loop[(a + 1) % k]), normal);
    const Vec3 p2 = tangent_project(map.point(loop[(a + 2) % k]), normal);
    if ((p1 - p0).cross(p2 - p1).dot(normal) < 0.0) return false;
  }
  return true;
}

}  // namespace

UnfoldResult unfold_one(const TriMesh& mesh, const SphericalMap& map, const RowMajorSparse& mean_value, FaceId face) {
  const std::array<int, 3> tri = mesh.face(face);
  const Vec3 normal = face_center_normal(map.point(tri[0]), map.point(tri[1]), map.point(tri[2]));

  Mat3 a = Mat3::Zero();
  Mat3 rhs = Mat3::Zero();  // row r: right-hand side for vertex tri[r], columns are coordinates
  for (int r = 0; r < 3; ++r) {
    for (RowMajorSparse::InnerIterator it(mean_value, tri[r]); it; ++it) {
      const int col = static_cast<int>(it.col());
      const auto pos = std::find(tri.begin(), tri.end(), col);
      if (pos != tri.end()) {
        a(r, pos - tri.begin()) += it.value();
      } else {
        rhs.row(r) -= it.value() * tangent_project(map.point(col), normal).transpose();
      }
    }
  }
  const Eigen::PartialPivLU<Mat3> lu(a);
  const Mat3& packed = lu.matrixLU();
  const double scale = a.cwiseAbs().maxCoeff();
  for (int d = 0; d < 3; ++d) {
    if (!(std::abs(packed(d, d)) > 1e-14 * scale)) {
      throw GeometryError("singular unfolding system for face " + std::to_string(face.index));
    }
  }
  const Mat3 solved = lu.solve(rhs);

  UnfoldResult out;
  for (int r = 0; r < 3; ++r) {
    const Vec3 p = solved.row(r).transpose();
    const double norm = p.norm();
    if (!(norm > 0.0)) throw GeometryError("unfolded point at the origin");
    out.points[r] = p / norm;
  }
  out.convex_ring = ring_is_convex(mesh, map, tri, normal);
  return out;
}

CorrectionResult correct_foldings(const TriMesh& mesh, const SphericalMap& map, const CorrectionOptions& opts) {
  if (opts.max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
  CorrectionResult result;
  result.map = map;
  std::vector<FaceId> folds = detect_foldings(mesh, result.map);
  result.initial_folds = static_cast<int>(folds.size());
  while (!folds.empty() && result.rounds < opts.max_rounds) {
    result.folds_per_round.push_back(static_cast<int>(folds.size()));
    const RowMajorSparse laplacian = build_mean_value_laplacian(mesh, result.map).matrix;
    for (FaceId face : folds) {
      if (!is_folded(mesh, result.map, face)) continue;
      try {
        const UnfoldResult u = unfold_one(mesh, result.map, laplacian, face);
        const auto tri = mesh.face(face);
        for (int r = 0; r < 3; ++r) result.map.set_point(tri[r], u.points[r]);
        if (!u.convex_ring) ++result.nonconvex_rings;
      } catch (const GeometryError&) {
        ++result.singular_skips;
      }
    }
    ++result.rounds;
    folds = detect_foldings(mesh, result.map);
  }
  result.remaining_folds = static_cast<int>(folds.size());
  result.folds_per_round.push_back(result.remaining_folds);
  return result;
}

}  // namespace saem
