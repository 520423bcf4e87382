#include "saem/energy.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "saem/errors.hpp"
#include "saem/parallel.hpp"

namespace saem {

namespace {

constexpr int kChunk = 4096;

struct FaceSums {
  double stretch = 0.0;
  double volume = 0.0;
  double image_area = 0.0;
  double max_edge = 0.0;
};

FaceSums face_sums(const TriMesh& mesh, const Points& p) {
  const FaceIndices& f = mesh.faces();
  const Eigen::VectorXd& domain = mesh.areas();
  const int m = mesh.num_faces();
  std::vector<FaceSums> partial(num_chunks(m, kChunk));
  for_each_chunk(m, kChunk, [&](int chunk, int begin, int end) {
    FaceSums s;
    for (int t = begin; t < end; ++t) {
      const Vec3 a = p.row(f(t, 0)), b = p.row(f(t, 1)), c = p.row(f(t, 2));
      const double area = 0.5 * (b - a).cross(c - a).norm();
      s.stretch += area * area / domain[t];
      s.volume += signed_tet_volume(a, b, c);
      s.image_area += area;
      s.max_edge = std::max({s.max_edge, (b - a).norm(), (c - b).norm(), (a - c).norm()});
    }
    partial[chunk] = s;
  });
  FaceSums total;
  for (const auto& s : partial) {
    total.stretch += s.stretch;
    total.volume += s.volume;
    total.image_area += s.image_area;
    total.max_edge = std::max(total.max_edge, s.max_edge);
  }
  return total;
}

EnergyBreakdown breakdown(const TriMesh& mesh, const Points& p) {
  const FaceSums s = face_sums(mesh, p);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EnergyBreakdown e;
  e.stretch = s.stretch;
  e.volume = s.volume;
  e.image_area = s.image_area;
  e.domain_area = mesh.total_area();
  e.max_image_edge = s.max_edge;
  e.authalic = s.image_area > 0.0 ? e.domain_area / s.image_area * s.stretch - s.image_area : nan;
  e.spherical_authalic = std::abs(s.volume) >= 1e-12 ? spherical_authalic_from(e.domain_area, s.stretch, s.volume) : nan;
  return e;
}

}  // namespace

EnergyBreakdown evaluate_energies(const TriMesh& mesh, const SphericalMap& map) {
  return breakdown(mesh, map.points());
}

double stretch_energy(const TriMesh& mesh, const SphericalMap& map) {
  return face_sums(mesh, map.points()).stretch;
}

double volume_measure(const TriMesh& mesh, const SphericalMap& map) {
  return face_sums(mesh, map.points()).volume;
}

double image_area(const TriMesh& mesh, const SphericalMap& map) {
  return face_sums(mesh, map.points()).image_area;
}

double authalic_energy(const TriMesh& mesh, const SphericalMap& map) {
  const FaceSums s = face_sums(mesh, map.points());
  if (!(s.image_area > 0.0)) throw GeometryError("image area is zero");
  return mesh.total_area() / s.image_area * s.stretch - s.image_area;
}

double spherical_authalic_energy(const TriMesh& mesh, const SphericalMap& map) {
  const FaceSums s = face_sums(mesh, map.points());
  if (std::abs(s.volume) < 1e-12) throw GeometryError("collapsed image: volume measure is zero");
  return spherical_authalic_from(mesh.total_area(), s.stretch, s.volume);
}

ApproximationBound approximation_bound(const TriMesh& mesh, const SphericalMap& map) {
  const EnergyBreakdown e = evaluate_energies(mesh, map);
  ApproximationBound b;
  b.gap = std::abs(e.spherical_authalic - e.authalic);
  const double eps = e.max_image_edge;
  if (eps >= 1.0) {
    b.bound = std::numeric_limits<double>::infinity();
    b.vacuous = true;
    return b;
  }
  const double factor = 1.0 + e.stretch * e.domain_area / (3.0 * e.volume * e.image_area);
  b.bound = factor * e.image_area * (1.0 - std::sqrt(1.0 - eps * eps));
  return b;
}

Points grad_stretch_energy(const TriMesh& mesh, const Points& p) {
  const FaceIndices& f = mesh.faces();
  const Eigen::VectorXd& domain = mesh.areas();
  Points g = Points::Zero(p.rows(), 3);
  for (int t = 0; t < f.rows(); ++t) {
    const int i = f(t, 0), j = f(t, 1), k = f(t, 2);
    const Vec3 a = p.row(i), b = p.row(j), c = p.row(k);
    // d(A^2 / |t|)/d a = (1 / (2|t|)) N x (c - b), N the unnormalized image normal
    const Vec3 n = (b - a).cross(c - a) / (2.0 * domain[t]);
    g.row(i) += n.cross(c - b);
    g.row(j) += n.cross(a - c);
    g.row(k) += n.cross(b - a);
  }
  return g;
}

Points grad_volume(const TriMesh& mesh, const Points& p) {
  const FaceIndices& f = mesh.faces();
  Points g = Points::Zero(p.rows(), 3);
  for (int t = 0; t < f.rows(); ++t) {
    const int i = f(t, 0), j = f(t, 1), k = f(t, 2);
    const Vec3 a = p.row(i), b = p.row(j), c = p.row(k);
    g.row(i) += b.cross(c) / 6.0;
    g.row(j) += c.cross(a) / 6.0;
    g.row(k) += a.cross(b) / 6.0;
  }
  return g;
}

SphericalGradient to_spherical_gradient(const Points& g, const SphericalCoords& coords) {
  const int n = coords.size();
  SphericalGradient out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    const double st = std::sin(coords.theta[i]), ct = std::cos(coords.theta[i]);
    const double sp = std::sin(coords.phi[i]), cp = std::cos(coords.phi[i]);
    out.theta[i] = g(i, 0) * ct * cp + g(i, 1) * ct * sp - g(i, 2) * st;
    out.phi[i] = -g(i, 0) * st * sp + g(i, 1) * st * cp;
  }
  return out;
}

SphericalGradient grad_volume_spherical(const TriMesh& mesh, const SphericalCoords& coords) {
  return to_spherical_gradient(grad_volume(mesh, from_spherical(coords).points()), coords);
}

EnergyAndGradient spherical_authalic_with_gradient(const TriMesh& mesh, const SphericalCoords& coords) {
  const Points p = from_spherical(coords).points();
  EnergyAndGradient out;
  out.energy = breakdown(mesh, p);
  const double vol = out.energy.volume;
  if (std::abs(vol) < 1e-12) throw GeometryError("collapsed image: volume measure is zero");
  const double area = out.energy.domain_area;
  const double es = out.energy.stretch;
  const Points cartesian = (area / (3.0 * vol)) * grad_stretch_energy(mesh, p) -
                           (3.0 + area * es / (3.0 * vol * vol)) * grad_volume(mesh, p);
  const SphericalGradient full = to_spherical_gradient(cartesian, coords);
  const VariableLayout layout(coords);
  const int k = layout.num_free();
  out.gradient.resize(2 * k);
  for (int s = 0; s < k; ++s) {
    out.gradient[s] = full.theta[layout.vertex_of_slot[s]];
    out.gradient[k + s] = full.phi[layout.vertex_of_slot[s]];
  }
  return out;
}

Eigen::VectorXd grad_spherical_authalic(const TriMesh& mesh, const SphericalCoords& coords) {
  return spherical_authalic_with_gradient(mesh, coords).gradient;
}

}  // namespace saem
