#pragma once

#include "saem/mesh.hpp"

namespace saem {

/// Regular octahedron with vertices at +-e_i, outward oriented.
TriMesh octahedron();

/// Regular icosahedron inscribed in the unit sphere, outward oriented.
TriMesh icosahedron();

/// Icosahedron refined `level` times by 1:4 midpoint subdivision, vertices
/// pushed to the unit sphere. 10 * 4^level + 2 vertices, 20 * 4^level faces.
/// Throws std::invalid_argument for level outside [0, 7].
TriMesh icosphere(int level);

/// Icosphere with coordinates scaled by the semi-axes.
TriMesh ellipsoid(int level, const Vec3& axes);

/// Star-shaped sphere with radius 1 + amplitude * b(x), |b| <= 1 a fixed smooth bump field.
/// Requires 0 <= amplitude < 1.
TriMesh bumpy_sphere(int level, double amplitude);

}  // namespace saem
