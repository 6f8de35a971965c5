#pragma once

#include <memory>
#include <vector>

#include "lnt/geometry.hpp"

namespace lnt {

// One real spherical-harmonic term of a radial support function.
struct Harmonic {
  int l = 0;
  int m = 0;
  double coeff = 0.0;
};

// Boundary point cloud with outward unit normals and first-order
// surface-measure weights.
struct BoundarySample {
  std::vector<Point3> points;
  std::vector<Vec3> normals;
  std::vector<double> weights;
};

// Interior quadrature rule; weights include the volume element.
struct VolumeQuadrature {
  std::vector<Point3> nodes;
  std::vector<double> weights;
};

// Bounded C^2 domain: a ball, or a star-shaped body given by a radial
// support function rho(theta, phi) expanded in real spherical harmonics.
class Domain {
 public:
  static Domain ball(const Point3& center, double radius);
  static Domain star(const Point3& center, std::vector<Harmonic> harmonics);

  bool is_ball() const;
  const Point3& center() const;
  // Radius of a ball domain; throws std::domain_error for star domains.
  double ball_radius() const;

  bool contains(const Point3& x) const;
  // Distance to the boundary; requires x inside the domain.
  double dist_to_boundary(const Point3& x) const;
  double diameter() const;
  double volume() const;
  // Largest distance from the center to the boundary.
  double bounding_radius() const;

  // Distance along dir (unit or not; only the direction matters) from an
  // interior point to the first boundary crossing.
  double ray_exit(const Point3& from, const Vec3& dir) const;

  // n >= 12 quasi-uniform boundary points (Fibonacci directions).
  BoundarySample boundary_sample(int n) const;

  // Rule resolving an interior peak at the given length scale; level >= 0
  // trades nodes for accuracy. Requires the peak inside the domain.
  VolumeQuadrature volume_quadrature(const Point3& peak, double scale,
                                     int level) const;

  static constexpr int kDefaultQuadLevel = 2;

 private:
  Domain() = default;

  // Support function and its angular partials; valid for star domains.
  double rho(double theta, double phi) const;
  void rho_jet(double theta, double phi, double& r, double& r_theta,
               double& r_phi) const;
  Point3 surface_point(double theta, double phi) const;

  bool is_ball_ = true;
  Point3 center_{};
  double radius_ = 1.0;
  std::vector<Harmonic> harmonics_;
  int max_degree_ = 0;

  double min_rho_ = 1.0;
  double max_rho_ = 1.0;
  double diameter_ = 2.0;
  double volume_ = 0.0;
  // Dense direction/value table used to seed boundary-distance descent.
  std::vector<Vec3> seed_dirs_;
  std::vector<double> seed_rho_;
  std::vector<std::pair<double, double>> seed_angles_;
};

// Quasi-uniform unit directions (spherical Fibonacci lattice).
std::vector<Vec3> fibonacci_directions(int n);

}  // namespace lnt
