#include "layerlab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace layerlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double theta) {
  theta = std::fmod(theta, kTwoPi);
  return theta < 0 ? theta + kTwoPi : theta;
}
}  // namespace

BoundaryGeometry BoundaryGeometry::circle(double radius) {
  if (!(radius > 0)) throw std::invalid_argument("circle: radius > 0");
  BoundaryGeometry g;
  g.kind_ = Kind::Circle;
  g.p_ = g.q_ = radius;
  return g;
}

BoundaryGeometry BoundaryGeometry::ellipse(double p, double q) {
  if (!(p > 0) || !(q > 0)) throw std::invalid_argument("ellipse: p, q > 0");
  BoundaryGeometry g;
  g.kind_ = Kind::Ellipse;
  g.p_ = p;
  g.q_ = q;
  return g;
}

BoundaryGeometry BoundaryGeometry::from_samples(const std::vector<Point>& pts) {
  if (pts.size() < 8)
    throw std::invalid_argument("from_samples: need >= 8 samples");
  BoundaryGeometry g;
  g.kind_ = Kind::Sampled;
  g.samples_ = pts;
  return g;
}

Point BoundaryGeometry::sampled_eval(double theta, int deriv) const {
  // Periodic cubic through uniform samples, evaluated by 4-point Lagrange on
  // the local stencil. Adequate for the smooth closed test curves.
  const int n = int(samples_.size());
  const double h = kTwoPi / n;
  const double s = wrap(theta) / h;
  const int i1 = int(std::floor(s));
  const double u = s - i1;
  auto at = [&](int k) {
    int i = ((i1 + k) % n + n) % n;
    return samples_[i];
  };
  // Lagrange basis on nodes -1, 0, 1, 2.
  double w[4], dw[4];
  w[0] = -u * (u - 1) * (u - 2) / 6.0;
  w[1] = (u + 1) * (u - 1) * (u - 2) / 2.0;
  w[2] = -(u + 1) * u * (u - 2) / 2.0;
  w[3] = (u + 1) * u * (u - 1) / 6.0;
  dw[0] = -(3 * u * u - 6 * u + 2) / 6.0;
  dw[1] = (3 * u * u - 4 * u - 1) / 2.0;
  dw[2] = -(3 * u * u - 2 * u - 2) / 2.0;
  dw[3] = (3 * u * u - 1) / 6.0;
  Point r{0, 0};
  for (int k = 0; k < 4; ++k) {
    const Point p = at(k - 1);
    const double c = deriv == 0 ? w[k] : dw[k] / h;
    r.x += c * p.x;
    r.y += c * p.y;
  }
  return r;
}

Point BoundaryGeometry::point(double theta) const {
  switch (kind_) {
    case Kind::Circle:
    case Kind::Ellipse:
      return {p_ * std::cos(theta), q_ * std::sin(theta)};
    case Kind::Sampled:
      return sampled_eval(theta, 0);
  }
  return {};
}

Point BoundaryGeometry::tangent(double theta) const {
  switch (kind_) {
    case Kind::Circle:
    case Kind::Ellipse:
      return {-p_ * std::sin(theta), q_ * std::cos(theta)};
    case Kind::Sampled:
      return sampled_eval(theta, 1);
  }
  return {};
}

double BoundaryGeometry::speed(double theta) const {
  const Point t = tangent(theta);
  return std::hypot(t.x, t.y);
}

Point BoundaryGeometry::inward_normal(double theta) const {
  // Counterclockwise parametrization: rotating the unit tangent by +90
  // degrees points into the domain.
  const Point t = tangent(theta);
  const double n = std::hypot(t.x, t.y);
  return {-t.y / n, t.x / n};
}

double BoundaryGeometry::curvature(double theta) const {
  if (kind_ == Kind::Circle) return -1.0 / p_;
  double d1x, d1y, d2x, d2y;
  if (kind_ == Kind::Ellipse) {
    d1x = -p_ * std::sin(theta);
    d1y = q_ * std::cos(theta);
    d2x = -p_ * std::cos(theta);
    d2y = -q_ * std::sin(theta);
  } else {
    const double h = 1e-5;
    const Point tp = sampled_eval(theta + h, 1);
    const Point tm = sampled_eval(theta - h, 1);
    const Point t0 = sampled_eval(theta, 1);
    d1x = t0.x;
    d1y = t0.y;
    d2x = (tp.x - tm.x) / (2 * h);
    d2y = (tp.y - tm.y) / (2 * h);
  }
  const double sp = std::hypot(d1x, d1y);
  const double signed_curv = (d1x * d2y - d1y * d2x) / (sp * sp * sp);
  // Standard CCW curvature is positive for convex domains; the inward-tube
  // convention flips the sign.
  return -signed_curv;
}

double BoundaryGeometry::tubular_jacobian(double theta, double t) const {
  if (t < 0 || !tube_admissible(t))
    throw std::invalid_argument("tubular_jacobian: t outside [0, delta_max)");
  return 1.0 + t * curvature(theta);
}

double BoundaryGeometry::tubular_jacobian_fd(double theta, double t) const {
  const double h_th = 1e-6, h_t = 1e-6;
  auto phi = [this](double th, double tt) {
    const Point y = point(th);
    const Point nu = inward_normal(th);
    return Point{y.x + tt * nu.x, y.y + tt * nu.y};
  };
  const Point pth1 = phi(theta + h_th, t), pth0 = phi(theta - h_th, t);
  const Point pt1 = phi(theta, t + h_t), pt0 = phi(theta, t - h_t);
  const double axx = (pth1.x - pth0.x) / (2 * h_th);
  const double ayx = (pth1.y - pth0.y) / (2 * h_th);
  const double axt = (pt1.x - pt0.x) / (2 * h_t);
  const double ayt = (pt1.y - pt0.y) / (2 * h_t);
  return (axx * ayt - ayx * axt) / speed(theta);
}

double BoundaryGeometry::max_tubular_radius() const {
  if (delta_max_cache_ >= 0.0) return delta_max_cache_;
  // Jacobian bound: 1 + t*kappa > 0 needs t < 1/max(-kappa).
  double worst = 0.0;
  const int n = 4096;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst, -curvature(kTwoPi * i / n));
  double djac = worst > 0 ? 1.0 / worst : std::numeric_limits<double>::max();

  // Sampled non-self-intersection: distinct fibers must not collide.
  const int m = 256;
  std::vector<Point> ys(m);
  std::vector<Point> nus(m);
  for (int i = 0; i < m; ++i) {
    ys[i] = point(kTwoPi * i / m);
    nus[i] = inward_normal(kTwoPi * i / m);
  }
  double dinj = djac;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double dx = ys[i].x - ys[j].x, dy = ys[i].y - ys[j].y;
      const double dist = std::hypot(dx, dy);
      const double cosang = nus[i].x * nus[j].x + nus[i].y * nus[j].y;
      // Fibers pointing toward each other meet at half the separation.
      if (cosang < 0) dinj = std::min(dinj, 0.5 * dist / std::sqrt(0.5 * (1 - cosang)));
    }
  }
  delta_max_cache_ = 0.9 * std::min(djac, dinj);
  return delta_max_cache_;
}

bool BoundaryGeometry::tube_admissible(double delta) const {
  return delta <= max_tubular_radius();
}

double BoundaryGeometry::perimeter() const {
  return boundary_integral(*this, [](double) { return 1.0; });
}

BoundaryGeometry::Projection BoundaryGeometry::project(Point x) const {
  if (kind_ == Kind::Circle) {
    const double r = std::hypot(x.x, x.y);
    return {std::atan2(x.y, x.x), p_ - r};
  }
  // Dense scan then Newton on d/dtheta |y(theta) - x|^2 = 0.
  const int n = 512;
  double best = 0.0, best_d2 = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) {
    const double th = kTwoPi * i / n;
    const Point y = point(th);
    const double d2 = (y.x - x.x) * (y.x - x.x) + (y.y - x.y) * (y.y - x.y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = th;
    }
  }
  double th = best;
  for (int it = 0; it < 60; ++it) {
    const Point y = point(th), tg = tangent(th);
    const double h = 1e-6;
    const Point tgp = tangent(th + h), tgm = tangent(th - h);
    const double gx = y.x - x.x, gy = y.y - x.y;
    const double f = gx * tg.x + gy * tg.y;
    const double df = tg.x * tg.x + tg.y * tg.y +
                      gx * (tgp.x - tgm.x) / (2 * h) +
                      gy * (tgp.y - tgm.y) / (2 * h);
    if (df == 0) break;
    const double step = f / df;
    th -= step;
    if (std::abs(step) < 1e-14) break;
  }
  const Point y = point(th);
  const double dist = std::hypot(y.x - x.x, y.y - x.y);
  // Positive distance inside the domain (x on the inward side of y).
  const Point nu = inward_normal(th);
  const double sgn = (x.x - y.x) * nu.x + (x.y - y.y) * nu.y >= 0 ? 1.0 : -1.0;
  return {wrap(th), sgn * dist};
}

double boundary_integral(const BoundaryGeometry& geom,
                         const std::function<double(double)>& f) {
  // Periodic trapezoid with doubling: spectral accuracy for smooth data.
  auto rule = [&](int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double th = kTwoPi * i / n;
      s += f(th) * geom.speed(th);
    }
    return s * kTwoPi / n;
  };
  double prev = rule(64);
  for (int n = 128; n <= 1 << 20; n *= 2) {
    const double cur = rule(n);
    if (std::abs(cur - prev) <= 1e-11 * std::max(1.0, std::abs(cur)))
      return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace layerlab
