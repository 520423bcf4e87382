#include <gtest/gtest.h>
#include <gmock/gmock.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "saem/errors.hpp"
#include "saem/generate.hpp"
#include "saem/mesh.hpp"
#include "support.hpp"

namespace saem {
namespace {

using ::testing::HasSubstr;

std::string mesh_error(const Points& v, const FaceIndices& f) {
  try {
    TriMesh mesh(v, f);
  } catch (const MeshError& e) {
    return e.what();
  }
  return {};
}

double heron(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double x = (b - a).norm(), y = (c - b).norm(), z = (a - c).norm();
  const double s = 0.5 * (x + y + z);
  return std::sqrt(std::max(0.0, s * (s - x) * (s - y) * (s - z)));
}

TEST(Mesh, OctahedronCounts) {
  const TriMesh m = octahedron();
  EXPECT_EQ(m.num_vertices(), 6);
  EXPECT_EQ(m.num_faces(), 8);
  EXPECT_EQ(m.num_edges(), 12);
  EXPECT_EQ(m.euler_characteristic(), 2);
}

TEST(Mesh, IcosahedronCounts) {
  const TriMesh m = icosahedron();
  EXPECT_EQ(m.num_vertices(), 12);
  EXPECT_EQ(m.num_faces(), 20);
  EXPECT_EQ(m.num_edges(), 30);
}

TEST(Mesh, EdgesSortedAndUnique) {
  const TriMesh m = icosphere(2);
  const auto& e = m.edges();
  EXPECT_TRUE(std::is_sorted(e.begin(), e.end()));
  EXPECT_EQ(std::adjacent_find(e.begin(), e.end()), e.end());
  for (const Edge& x : e) EXPECT_LT(x.first, x.second);
}

TEST(Mesh, EveryDirectedEdgeOnce) {
  const TriMesh m = icosphere(2);
  std::set<std::pair<int, int>> seen;
  for (int t = 0; t < m.num_faces(); ++t) {
    const auto f = m.face({t});
    for (int c = 0; c < 3; ++c) EXPECT_TRUE(seen.insert({f[c], f[(c + 1) % 3]}).second);
  }
  EXPECT_EQ(static_cast<int>(seen.size()), 2 * m.num_edges());
}

TEST(Mesh, FaceEdgeIsOppositeCorner) {
  const TriMesh m = icosphere(1);
  for (int t = 0; t < m.num_faces(); ++t) {
    const auto f = m.face({t});
    for (int c = 0; c < 3; ++c) {
      const Edge e = m.edges()[m.face_edge({t}, c)];
      const int a = f[(c + 1) % 3], b = f[(c + 2) % 3];
      EXPECT_EQ(e.first, std::min(a, b));
      EXPECT_EQ(e.second, std::max(a, b));
    }
  }
}

TEST(Mesh, TorusRejectedByEuler) {
  try {
    test::torus();
    FAIL() << "torus accepted";
  } catch (const MeshError& e) {
    EXPECT_THAT(std::string(e.what()), HasSubstr("Euler characteristic 0"));
  }
}

TEST(Mesh, NonManifoldEdge) {
  // Octahedron plus an extra face reusing edge (0, 2).
  const TriMesh oct = octahedron();
  Points v(7, 3);
  v.topRows(6) = oct.vertices();
  v.row(6) << 0.3, 0.3, 0.3;
  FaceIndices f(9, 3);
  f.topRows(8) = oct.faces();
  f.row(8) << 0, 2, 6;
  EXPECT_THAT(mesh_error(v, f), HasSubstr("non-manifold edge"));
}

TEST(Mesh, BoundaryEdge) {
  const TriMesh oct = octahedron();
  EXPECT_THAT(mesh_error(oct.vertices(), oct.faces().topRows(7)), HasSubstr("not closed"));
}

TEST(Mesh, InconsistentOrientation) {
  FaceIndices f = octahedron().faces();
  std::swap(f(0, 1), f(0, 2));
  EXPECT_THAT(mesh_error(octahedron().vertices(), f), HasSubstr("inconsistent orientation"));
}

TEST(Mesh, InvalidAndRepeatedIndices) {
  FaceIndices f = octahedron().faces();
  f(3, 2) = 9;
  EXPECT_THAT(mesh_error(octahedron().vertices(), f), HasSubstr("invalid vertex 9"));
  f = octahedron().faces();
  f(3, 2) = f(3, 1);
  EXPECT_THAT(mesh_error(octahedron().vertices(), f), HasSubstr("repeated vertex"));
}

TEST(Mesh, DegenerateFace) {
  Points v = octahedron().vertices();
  // Move +z onto the segment between +x and +y; faces (0, 2, 4) lose their area.
  v.row(4) << 0.5, 0.5, 0.0;
  EXPECT_THAT(mesh_error(v, octahedron().faces()), HasSubstr("zero area"));
}

TEST(Mesh, NonManifoldVertex) {
  // Two octahedra glued at a single vertex.
  const TriMesh oct = octahedron();
  Points v(11, 3);
  v.topRows(6) = oct.vertices();
  for (int i = 1; i < 6; ++i) v.row(5 + i) = oct.vertices().row(i) + Vec3(3, 0, 0).transpose();
  FaceIndices f(16, 3);
  f.topRows(8) = oct.faces();
  for (int t = 0; t < 8; ++t) {
    for (int c = 0; c < 3; ++c) {
      const int old = oct.faces()(t, c);
      f(8 + t, c) = old == 0 ? 0 : old + 5;
    }
  }
  // Vertex 0 (+x) of the second copy sits at the wrong place but topology is what matters.
  const std::string msg = mesh_error(v, f);
  EXPECT_FALSE(msg.empty());
}

TEST(Mesh, FaceAreaExamples) {
  EXPECT_NEAR(face_area(octahedron(), {0}), std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(triangle_area(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)), 0.5);
}

TEST(Mesh, FaceAreaMatchesHeron) {
  auto g = test::rng(3);
  for (int r = 0; r < 50; ++r) {
    const Vec3 a(test::uniform(g, -1, 1), test::uniform(g, -1, 1), test::uniform(g, -1, 1));
    const Vec3 b(test::uniform(g, -1, 1), test::uniform(g, -1, 1), test::uniform(g, -1, 1));
    const Vec3 c(test::uniform(g, -1, 1), test::uniform(g, -1, 1), test::uniform(g, -1, 1));
    const double h = heron(a, b, c);
    EXPECT_NEAR(triangle_area(a, b, c), h, 1e-10 * std::max(1.0, h));
  }
}

TEST(Mesh, AreasSumToTotal) {
  const TriMesh m = bumpy_sphere(2, 0.3);
  EXPECT_NEAR(m.areas().sum(), m.total_area(), 1e-12 * m.total_area());
}

TEST(Mesh, NormalizeOctahedron) {
  const TriMesh oct = octahedron();
  EXPECT_NEAR(oct.total_area(), 4.0 * std::sqrt(3.0), 1e-14);
  const TriMesh n = normalize_area(oct);
  const double factor = std::sqrt(4.0 * std::numbers::pi / (4.0 * std::sqrt(3.0)));
  EXPECT_NEAR(n.vertex({0}).norm(), factor, 1e-14);
}

TEST(Mesh, NormalizeIsFixedPoint) {
  const TriMesh once = normalize_area(ellipsoid(2, Vec3(1, 2, 3)));
  const TriMesh twice = normalize_area(once);
  EXPECT_NEAR((twice.vertices() - once.vertices()).cwiseAbs().maxCoeff(), 0.0, 4e-15);
}

TEST(Mesh, NormalizedAreaResummed) {
  const TriMesh m = normalize_area(bumpy_sphere(3, 0.4));
  double total = 0.0;
  for (int t = 0; t < m.num_faces(); ++t) {
    const auto f = m.face({t});
    total += heron(m.vertex({f[0]}), m.vertex({f[1]}), m.vertex({f[2]}));
  }
  EXPECT_NEAR(total, 4.0 * std::numbers::pi, 1e-11 * 4.0 * std::numbers::pi);
}

TEST(Mesh, OneRingOctahedron) {
  const TriMesh m = octahedron();
  const OneRing r = one_ring(m, {4});
  ASSERT_EQ(r.neighbors.size(), 4u);
  EXPECT_EQ(r.faces.size(), 4u);
  std::set<int> ids;
  for (VertexId v : r.neighbors) ids.insert(v.index);
  EXPECT_EQ(ids, (std::set<int>{0, 1, 2, 3}));
  EXPECT_EQ(m.vertex({4}), Vec3(0, 0, 1));
}

TEST(Mesh, OneRingIcosahedron) {
  const TriMesh m = icosahedron();
  for (int v = 0; v < 12; ++v) {
    EXPECT_EQ(one_ring(m, {v}).neighbors.size(), 5u);
    EXPECT_EQ(one_ring(m, {v}).faces.size(), 5u);
  }
}

TEST(Mesh, OneRingMatchesFaceScan) {
  const TriMesh m = bumpy_sphere(2, 0.2);
  for (int v = 0; v < m.num_vertices(); v += 7) {
    std::set<int> nb, fs;
    for (int t = 0; t < m.num_faces(); ++t) {
      const auto f = m.face({t});
      if (f[0] != v && f[1] != v && f[2] != v) continue;
      fs.insert(t);
      for (int c : f) {
        if (c != v) nb.insert(c);
      }
    }
    const OneRing r = one_ring(m, {v});
    std::set<int> got_nb, got_fs;
    for (VertexId x : r.neighbors) got_nb.insert(x.index);
    for (FaceId x : r.faces) got_fs.insert(x.index);
    EXPECT_EQ(got_nb, nb);
    EXPECT_EQ(got_fs, fs);
    EXPECT_EQ(r.neighbors.size(), nb.size());
  }
}

TEST(Mesh, RingIsCyclicFan) {
  const TriMesh m = icosphere(2);
  for (int v = 0; v < m.num_vertices(); ++v) {
    const auto nb = m.ring_neighbors({v});
    const auto fs = m.ring_faces({v});
    ASSERT_EQ(nb.size(), fs.size());
    for (size_t k = 0; k < fs.size(); ++k) {
      const auto f = m.face({fs[k]});
      const int a = nb[k], b = nb[(k + 1) % nb.size()];
      const bool has_a = f[0] == a || f[1] == a || f[2] == a;
      const bool has_b = f[0] == b || f[1] == b || f[2] == b;
      EXPECT_TRUE(has_a && has_b);
    }
  }
}

class Barycentric : public ::testing::Test {
 protected:
  TriMesh mesh = bumpy_sphere(1, 0.3);
  Points image = Points::Random(mesh.num_vertices(), 3);
};

TEST_F(Barycentric, ExactAtVertices) {
  const auto f = mesh.face({5});
  for (int c : f) {
    EXPECT_EQ(barycentric_map(mesh, image, {5}, mesh.vertex({c})), Vec3(image.row(c).transpose()));
  }
}

TEST_F(Barycentric, CentroidAndMidpoint) {
  const auto [i, j, k] = mesh.face({11});
  const Vec3 centroid = (mesh.vertex({i}) + mesh.vertex({j}) + mesh.vertex({k})) / 3.0;
  const Vec3 expected = (image.row(i) + image.row(j) + image.row(k)).transpose() / 3.0;
  EXPECT_LT((barycentric_map(mesh, image, {11}, centroid) - expected).norm(), 1e-14);
  const Vec3 mid = 0.5 * (mesh.vertex({i}) + mesh.vertex({j}));
  const Vec3 mid_image = 0.5 * (image.row(i) + image.row(j)).transpose();
  EXPECT_LT((barycentric_map(mesh, image, {11}, mid) - mid_image).norm(), 1e-14);
}

TEST_F(Barycentric, MatchesLinearSolve) {
  auto g = test::rng(9);
  for (int t = 0; t < mesh.num_faces(); t += 3) {
    const auto [i, j, k] = mesh.face({t});
    double a = test::uniform(g, 0, 1), b = test::uniform(g, 0, 1);
    if (a + b > 1) a = 1 - a, b = 1 - b;
    const Vec3 vi = mesh.vertex({i}), e1 = mesh.vertex({j}) - vi, e2 = mesh.vertex({k}) - vi;
    const Vec3 point = vi + a * e1 + b * e2;
    // Normal equations of the 3x2 system [e1 e2] (s, u) = point - vi.
    Eigen::Matrix2d gram;
    gram << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
    const Eigen::Vector2d su = gram.inverse() * Eigen::Vector2d(e1.dot(point - vi), e2.dot(point - vi));
    const Vec3 expected = ((1 - su[0] - su[1]) * image.row(i) + su[0] * image.row(j) + su[1] * image.row(k)).transpose();
    EXPECT_LT((barycentric_map(mesh, image, {t}, point) - expected).norm(), 1e-12);
  }
}

TEST_F(Barycentric, RejectsOutsidePoints) {
  const auto [i, j, k] = mesh.face({2});
  const Vec3 outside = 2.0 * mesh.vertex({i}) - 0.5 * (mesh.vertex({j}) + mesh.vertex({k}));
  EXPECT_THROW(barycentric_map(mesh, image, {2}, outside), GeometryError);
  const Vec3 n = (mesh.vertex({j}) - mesh.vertex({i})).cross(mesh.vertex({k}) - mesh.vertex({i})).normalized();
  EXPECT_THROW(barycentric_map(mesh, image, {2}, mesh.vertex({i}) + 0.1 * n), GeometryError);
}

TEST(Mesh, WithVerticesSharesTopology) {
  const TriMesh m = icosphere(1);
  const TriMesh s = m.with_vertices(2.0 * m.vertices());
  EXPECT_EQ(s.faces(), m.faces());
  EXPECT_NEAR(s.total_area(), 4.0 * m.total_area(), 1e-12);
}

TEST(Mesh, TetrahedronIsValid) {
  const TriMesh t = test::regular_tetrahedron();
  EXPECT_EQ(t.num_edges(), 6);
  EXPECT_EQ(t.flagged_faces().size(), 4u);
  EXPECT_TRUE(icosphere(2).flagged_faces().empty());
}

}  // namespace
}  // namespace saem
