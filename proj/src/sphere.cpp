#include "saem/sphere.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "saem/errors.hpp"

namespace saem {

SphericalMap SphericalMap::normalized(const Points& points) {
  Points out(points.rows(), 3);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double norm = points.row(i).norm();
    if (!(norm > 0.0)) throw GeometryError("cannot normalize zero point " + std::to_string(i));
    out.row(i) = points.row(i) / norm;
  }
  return SphericalMap(std::move(out));
}

double SphericalMap::max_norm_error() const {
  double err = 0.0;
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    err = std::max(err, std::abs(points_.row(i).norm() - 1.0));
  }
  return err;
}

VariableLayout::VariableLayout(const SphericalCoords& coords) : slot_of_vertex(coords.size(), -1) {
  for (int v = 0; v < coords.size(); ++v) {
    if (coords.fixed && ((*coords.fixed)[0] == v || (*coords.fixed)[1] == v)) continue;
    slot_of_vertex[v] = static_cast<int>(vertex_of_slot.size());
    vertex_of_slot.push_back(v);
  }
}

Eigen::VectorXd VariableLayout::gather(const SphericalCoords& coords) const {
  const int k = num_free();
  Eigen::VectorXd x(2 * k);
  for (int s = 0; s < k; ++s) {
    x[s] = coords.theta[vertex_of_slot[s]];
    x[k + s] = coords.phi[vertex_of_slot[s]];
  }
  return x;
}

void VariableLayout::scatter(const Eigen::VectorXd& free, SphericalCoords& coords) const {
  const int k = num_free();
  for (int s = 0; s < k; ++s) {
    coords.theta[vertex_of_slot[s]] = free[s];
    coords.phi[vertex_of_slot[s]] = free[k + s];
  }
}

SphericalCoords to_spherical(const SphericalMap& map) {
  SphericalCoords c;
  const Points& p = map.points();
  c.theta.resize(p.rows());
  c.phi.resize(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    c.theta[i] = std::acos(std::clamp(p(i, 2), -1.0, 1.0));
    c.phi[i] = std::atan2(p(i, 1), p(i, 0));
    // atan2 returns -pi for (-0, -x); the canonical range is (-pi, pi]
    if (c.phi[i] == -std::numbers::pi) c.phi[i] = std::numbers::pi;
  }
  return c;
}

SphericalMap from_spherical(const SphericalCoords& coords) {
  Points p(coords.size(), 3);
  for (int i = 0; i < coords.size(); ++i) {
    const double st = std::sin(coords.theta[i]);
    p(i, 0) = st * std::cos(coords.phi[i]);
    p(i, 1) = st * std::sin(coords.phi[i]);
    p(i, 2) = std::cos(coords.theta[i]);
  }
  return SphericalMap(std::move(p));
}

std::vector<FaceId> detect_foldings(const TriMesh& mesh, const SphericalMap& map) {
  std::vector<FaceId> folded;
  const FaceIndices& f = mesh.faces();
  const Points& p = map.points();
  for (int t = 0; t < f.rows(); ++t) {
    if (signed_tet_volume(p.row(f(t, 0)), p.row(f(t, 1)), p.row(f(t, 2))) <= 0.0) {
      folded.push_back(FaceId{t});
    }
  }
  return folded;
}

int count_foldings(const TriMesh& mesh, const SphericalMap& map) {
  return static_cast<int>(detect_foldings(mesh, map).size());
}

Vec3 face_center_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 center = (a + b + c) / 3.0;
  const double norm = center.norm();
  if (norm < 1e-8) throw GeometryError("degenerate antipodal face: centre has near-zero norm");
  return center / norm;
}

Vec3 tangent_project(const Vec3& point, const Vec3& normal) {
  const Vec3 h = point - normal;
  return h - h.dot(normal) * normal + normal;
}

Points tangent_project(const Points& points, const Vec3& normal) {
  Points out(points.rows(), 3);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.row(i) = tangent_project(Vec3(points.row(i).transpose()), normal).transpose();
  }
  return out;
}

SphericalMap rotate(const SphericalMap& map, const Mat3& rotation) {
  return SphericalMap(map.points() * rotation.transpose());
}

Mat3 seeded_rotation(std::uint64_t seed, int attempt) {
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt + 1)));
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  // Uniform random unit quaternion (Shoemake).
  const double u1 = uniform(), u2 = uniform(), u3 = uniform();
  const double two_pi = 2.0 * std::numbers::pi;
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  Eigen::Quaterniond q(b * std::cos(two_pi * u3), a * std::sin(two_pi * u2), a * std::cos(two_pi * u2),
                       b * std::sin(two_pi * u3));
  return q.normalized().toRotationMatrix();
}

bool touches_pole(const SphericalMap& map, double angle) {
  const double limit = std::cos(angle);
  const Points& p = map.points();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (std::abs(p(i, 2)) / p.row(i).norm() >= limit) return true;
  }
  return false;
}

PoleAvoidance avoid_poles(const SphericalMap& map, std::uint64_t seed, double angle) {
  PoleAvoidance result{map, Mat3::Identity(), false};
  if (!touches_pole(map, angle)) return result;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Mat3 r = seeded_rotation(seed, attempt);
    SphericalMap rotated = rotate(map, r);
    if (!touches_pole(rotated, angle)) return {std::move(rotated), r, true};
  }
  throw GeometryError("no pole-free rotation found");
}

Vec3 barycentric_map(const TriMesh& mesh, const SphericalMap& map, FaceId face, const Vec3& point) {
  return barycentric_map(mesh, map.points(), face, point);
}

}  // namespace saem
