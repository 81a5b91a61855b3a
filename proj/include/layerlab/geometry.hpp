#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "layerlab/interp.hpp"

namespace layerlab {

struct Point {
  double x = 0.0, y = 0.0;
};

// Smooth closed boundary curve in the plane, parametrized by theta in
// [0, 2pi), counterclockwise. Curvature follows the inward-tube convention
//   kappa(y) := d/dt det J_Phi(y, 0),  Phi(y, t) = y + t nu(y),
// under which a disk of radius R has kappa = -1/R (inward shells shrink).
// In 2D the normalized tubular Jacobian is exactly omega(y,t) = 1 + t kappa.
class BoundaryGeometry {
 public:
  enum class Kind { Circle, Ellipse, Sampled };

  static BoundaryGeometry circle(double radius);
  static BoundaryGeometry ellipse(double p, double q);
  // Closed curve through the samples (theta assumed uniform over [0, 2pi)),
  // periodic monotone interpolation of the coordinates.
  static BoundaryGeometry from_samples(const std::vector<Point>& pts);

  Kind kind() const { return kind_; }
  double radius() const { return p_; }
  double semi_axis_p() const { return p_; }
  double semi_axis_q() const { return q_; }

  Point point(double theta) const;
  Point tangent(double theta) const;        // dy/dtheta, unnormalized
  Point inward_normal(double theta) const;  // unit
  double speed(double theta) const;         // |dy/dtheta|
  double curvature(double theta) const;     // inward-tube convention

  // omega(y, t) = det J_Phi normalized by arclength; 1 + t*kappa in closed
  // form, validated against a finite-difference Jacobian in the tests.
  double tubular_jacobian(double theta, double t) const;

  // Finite-difference determinant of the tubular map, for cross-checks.
  double tubular_jacobian_fd(double theta, double t) const;

  // Largest inward offset with a nonvanishing Jacobian and sampled
  // non-self-intersection, shrunk by 10%.
  double max_tubular_radius() const;
  bool tube_admissible(double delta) const;

  double perimeter() const;

  // Nearest boundary point: returns the parameter and the (positive inside)
  // distance. Newton on the stationarity condition with dense-scan seeding.
  struct Projection {
    double theta = 0.0;
    double dist = 0.0;
  };
  Projection project(Point x) const;

  BoundaryGeometry() = default;  // unit circle

 private:
  Kind kind_ = Kind::Circle;
  double p_ = 1.0, q_ = 1.0;
  mutable double delta_max_cache_ = -1.0;
  // Sampled representation (periodic cubic through uniform samples).
  std::vector<Point> samples_;
  Point sampled_eval(double theta, int deriv) const;
};

// Arclength quadrature of f over the boundary, relative error ~1e-10 for
// smooth integrands (trapezoid with doubling; spectral for periodic f).
double boundary_integral(const BoundaryGeometry& geom,
                         const std::function<double(double)>& f);

}  // namespace layerlab
