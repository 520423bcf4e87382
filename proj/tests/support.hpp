#pragma once

#include <filesystem>
#include <queue>
#include <vector>
#include <random>
#include <string>

#include "saem/generate.hpp"
#include "saem/mesh.hpp"
#include "saem/sphere.hpp"

namespace saem::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Unit icosphere map with every vertex moved randomly by up to `amplitude`
/// (relative to the coarsest edge length) and renormalized. Fold-free is not
/// guaranteed; callers check.
inline SphericalMap jittered_sphere(const TriMesh& sphere, std::mt19937_64& g, double amplitude) {
  Points p = sphere.vertices();
  for (int i = 0; i < p.rows(); ++i) {
    for (int d = 0; d < 3; ++d) p(i, d) += uniform(g, -amplitude, amplitude);
  }
  return SphericalMap::normalized(p);
}

/// Fold-free random map on the given mesh, shrinking the jitter until no face flips.
inline SphericalMap random_fold_free_map(const TriMesh& sphere, std::mt19937_64& g, double amplitude) {
  for (;;) {
    SphericalMap m = jittered_sphere(sphere, g, amplitude);
    if (count_foldings(sphere, m) == 0) return m;
    amplitude *= 0.7;
  }
}

/// Torus with `rings` x `sides` quads split into triangles, outward orientation.
inline TriMesh torus(int rings = 8, int sides = 6, double major = 2.0, double minor = 0.7) {
  Points v(rings * sides, 3);
  FaceIndices f(2 * rings * sides, 3);
  const double two_pi = 6.283185307179586;
  for (int i = 0; i < rings; ++i) {
    const double u = two_pi * i / rings;
    for (int j = 0; j < sides; ++j) {
      const double w = two_pi * j / sides;
      v.row(i * sides + j) << (major + minor * std::cos(w)) * std::cos(u), (major + minor * std::cos(w)) * std::sin(u),
          minor * std::sin(w);
    }
  }
  int t = 0;
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < sides; ++j) {
      const int a = i * sides + j, b = ((i + 1) % rings) * sides + j;
      const int c = ((i + 1) % rings) * sides + (j + 1) % sides, d = i * sides + (j + 1) % sides;
      f.row(t++) << a, b, c;
      f.row(t++) << a, c, d;
    }
  }
  return TriMesh(v, f);
}

inline TriMesh regular_tetrahedron() {
  Points v(4, 3);
  v << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  FaceIndices f(4, 3);
  f << 0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2;
  return TriMesh(v, f);
}

/// Moves v just across the edge of its first ring face that is opposite v,
/// folding exactly that face when the ring is well shaped.
inline void push_across_edge(const TriMesh& mesh, SphericalMap& map, int v, double depth = 0.05) {
  const auto ring = mesh.ring_neighbors(VertexId{v});
  const Vec3 a = map.point(ring[0]), b = map.point(ring[1]);
  const Vec3 mid = 0.5 * (a + b);
  const Vec3 centre = (a + b + map.point(v)) / 3.0;
  map.set_point(v, (mid + depth * (mid - centre)).normalized());
}

/// Greedy vertex set with pairwise graph distance greater than `gap`, in index order.
inline std::vector<int> separated_vertices(const TriMesh& mesh, int count, int gap = 3) {
  std::vector<char> blocked(mesh.num_vertices(), 0);
  std::vector<int> out;
  for (int v = 0; v < mesh.num_vertices() && static_cast<int>(out.size()) < count; ++v) {
    if (blocked[v]) continue;
    out.push_back(v);
    std::vector<int> dist(mesh.num_vertices(), -1);
    std::queue<int> q;
    q.push(v);
    dist[v] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      blocked[u] = 1;
      if (dist[u] == gap) continue;
      for (int w : mesh.ring_neighbors(VertexId{u})) {
        if (dist[w] < 0) dist[w] = dist[u] + 1, q.push(w);
      }
    }
  }
  return out;
}

/// `map` with one face folded next to each of `count` well separated vertices.
inline SphericalMap fold_fixture(const TriMesh& mesh, const SphericalMap& map, int count) {
  SphericalMap out = map;
  for (int v : separated_vertices(mesh, count)) push_across_edge(mesh, out, v);
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("saem_test_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace saem::test
