#pragma once

#include "saem/sphere.hpp"

namespace saem {

/// All scalar quantities of a (mesh, map) pair from one pass over the faces.
struct EnergyBreakdown {
  double stretch = 0.0;             // E_S = sum |f(t)|^2 / |t|
  double authalic = 0.0;            // E_A
  double spherical_authalic = 0.0;  // E_A with |f(M)| replaced by 3 * volume
  double volume = 0.0;              // signed sum of origin tetrahedra
  double image_area = 0.0;          // unsigned
  double domain_area = 0.0;
  double max_image_edge = 0.0;
};

/// Authalic terms are NaN when their denominator vanishes.
EnergyBreakdown evaluate_energies(const TriMesh& mesh, const SphericalMap& map);

double stretch_energy(const TriMesh& mesh, const SphericalMap& map);
double volume_measure(const TriMesh& mesh, const SphericalMap& map);
double image_area(const TriMesh& mesh, const SphericalMap& map);

/// (|M| / |f(M)|) E_S - |f(M)|. Throws GeometryError if the image area is zero.
double authalic_energy(const TriMesh& mesh, const SphericalMap& map);

/// (|M| / (3V)) E_S - 3V. Throws GeometryError if |V| < 1e-12.
double spherical_authalic_energy(const TriMesh& mesh, const SphericalMap& map);
/// Same from precomputed parts; no error checking.
inline double spherical_authalic_from(double domain_area, double stretch, double volume) {
  return domain_area / (3.0 * volume) * stretch - 3.0 * volume;
}

/// Gap |E_spherical - E_A| against the a-priori bound
///   (1 + E_S |M| / (3 V |f(M)|)) |f(M)| (1 - sqrt(1 - eps^2)),
/// eps the longest image edge. The bound is +inf (vacuous) when eps >= 1.
struct ApproximationBound {
  double gap = 0.0;
  double bound = 0.0;
  bool vacuous = false;
};
ApproximationBound approximation_bound(const TriMesh& mesh, const SphericalMap& map);

/// d E_S / d f, one row per vertex. Equals 2 L_S f.
Points grad_stretch_energy(const TriMesh& mesh, const Points& image);
/// d V / d f, one row per vertex.
Points grad_volume(const TriMesh& mesh, const Points& image);

struct SphericalGradient {
  Eigen::VectorXd theta;
  Eigen::VectorXd phi;
};

/// Chain rule from a Cartesian per-vertex gradient to (theta, phi), all vertices.
SphericalGradient to_spherical_gradient(const Points& cartesian, const SphericalCoords& coords);

/// Gradient of the volume measure with respect to every vertex's (theta, phi).
SphericalGradient grad_volume_spherical(const TriMesh& mesh, const SphericalCoords& coords);

/// Gradient of E_spherical with respect to the free variables [theta_free; phi_free]
/// (see VariableLayout). Throws GeometryError if |V| < 1e-12.
Eigen::VectorXd grad_spherical_authalic(const TriMesh& mesh, const SphericalCoords& coords);

/// Energy and gradient together, sharing the coordinate conversion.
struct EnergyAndGradient {
  EnergyBreakdown energy;
  Eigen::VectorXd gradient;
};
EnergyAndGradient spherical_authalic_with_gradient(const TriMesh& mesh, const SphericalCoords& coords);

}  // namespace saem
