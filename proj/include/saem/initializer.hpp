#pragma once

#include <cstdint>
#include <vector>

#include "saem/sphere.hpp"

namespace saem {

struct InitOptions {
  int warmup_max_iters = 15;
  std::uint64_t seed = 0;  // pole-avoidance rotation
};

/// Fold-free spherical seed. One face far from the centre of the mesh is cut
/// out, the remaining disk gets a mean-value Tutte embedding with the three
/// cut vertices pinned to an equilateral triangle, and the plane is wrapped
/// onto the sphere by inverse stereographic projection, the cut face ending
/// up around the south pole. The result is finally rotated off the poles.
///
/// Throws GeometryError("initialization not bijective") if folds survive a
/// correction pass over the wrapped embedding.
SphericalMap initial_spherical_map(const TriMesh& mesh, const InitOptions& opts = {});

struct WarmupResult {
  SphericalMap map;
  int iterations = 0;           // accepted full iterations
  std::vector<double> energies;  // input energy, then one entry per accepted iteration
  int folds = 0;
  bool stopped_on_increase = false;
};

/// Alternating hemisphere fixed-point sweeps. The south half-step projects
/// stereographically from the north pole, keeps vertices outside the unit
/// disk fixed and solves the stretch Laplacian of the current map for the
/// rest; the north half-step does the same from the south pole. Stops after
/// `warmup_max_iters` iterations or before the first one that raises E_spherical.
WarmupResult fixed_point_warmup(const TriMesh& mesh, const SphericalMap& map, const InitOptions& opts = {});

}  // namespace saem
