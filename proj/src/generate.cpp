#include "saem/generate.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace saem {

namespace {

TriMesh build(const std::vector<Vec3>& verts, const std::vector<std::array<int, 3>>& faces) {
  Points v(static_cast<Eigen::Index>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = verts[i];
  FaceIndices f(static_cast<Eigen::Index>(faces.size()), 3);
  for (size_t i = 0; i < faces.size(); ++i) {
    f.row(static_cast<Eigen::Index>(i)) << faces[i][0], faces[i][1], faces[i][2];
  }
  return TriMesh(std::move(v), std::move(f));
}

void icosahedron_data(std::vector<Vec3>& verts, std::vector<std::array<int, 3>>& faces) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  verts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
           {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
           {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
}

void subdivide(std::vector<Vec3>& verts, std::vector<std::array<int, 3>>& faces) {
  std::unordered_map<long long, int> midpoint;
  auto mid = [&](int a, int b) {
    const long long key = static_cast<long long>(std::min(a, b)) * (1LL << 32) + std::max(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(verts.size());
    verts.push_back((verts[a] + verts[b]).normalized());
    midpoint.emplace(key, id);
    return id;
  };
  std::vector<std::array<int, 3>> refined;
  refined.reserve(4 * faces.size());
  for (const auto& f : faces) {
    const int ab = mid(f[0], f[1]);
    const int bc = mid(f[1], f[2]);
    const int ca = mid(f[2], f[0]);
    refined.push_back({f[0], ab, ca});
    refined.push_back({f[1], bc, ab});
    refined.push_back({f[2], ca, bc});
    refined.push_back({ab, bc, ca});
  }
  faces = std::move(refined);
}

void icosphere_data(int level, std::vector<Vec3>& verts, std::vector<std::array<int, 3>>& faces) {
  if (level < 0 || level > 7) throw std::invalid_argument("icosphere level must be in [0, 7]");
  icosahedron_data(verts, faces);
  for (int l = 0; l < level; ++l) subdivide(verts, faces);
}

// Smooth field bounded by 1 in absolute value.
double bump(const Vec3& p) {
  return 0.5 * std::sin(4.0 * p.x() + 1.0) + 0.5 * std::cos(3.0 * p.y()) * std::sin(5.0 * p.z() + 0.5);
}

}  // namespace

TriMesh octahedron() {
  return build({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}},
               {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
}

TriMesh icosahedron() { return icosphere(0); }

TriMesh icosphere(int level) {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  icosphere_data(level, verts, faces);
  return build(verts, faces);
}

TriMesh ellipsoid(int level, const Vec3& axes) {
  if (!(axes.minCoeff() > 0.0)) throw std::invalid_argument("ellipsoid axes must be positive");
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  icosphere_data(level, verts, faces);
  for (auto& v : verts) v = v.cwiseProduct(axes);
  return build(verts, faces);
}

TriMesh bumpy_sphere(int level, double amplitude) {
  if (!(amplitude >= 0.0 && amplitude < 1.0)) throw std::invalid_argument("amplitude must be in [0, 1)");
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  icosphere_data(level, verts, faces);
  for (auto& v : verts) v *= 1.0 + amplitude * bump(v);
  return build(verts, faces);
}

}  // namespace saem
