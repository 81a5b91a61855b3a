#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "layerlab/geometry.hpp"

using namespace layerlab;

namespace {
constexpr double kPi = std::numbers::pi;

// Gauss-Kummer series for the ellipse perimeter: an oracle independent of
// the arclength quadrature.
double ellipse_perimeter_series(double p, double q) {
  const double h = (p - q) * (p - q) / ((p + q) * (p + q));
  double term = 1.0, sum = 1.0;  // binom(1/2, n)^2 h^n
  for (int n = 1; n < 200; ++n) {
    const double binom_factor = (1.5 / n - 1.0);  // binom(1/2,n)/binom(1/2,n-1)
    term *= binom_factor * binom_factor * h;
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return kPi * (p + q) * sum;
}
}  // namespace

TEST_CASE("circle tubular jacobian closed form") {
  auto g = BoundaryGeometry::circle(1.0);
  CHECK(g.tubular_jacobian(0.3, 0.3) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(g.tubular_jacobian(1.1, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (double th : {0.0, 0.7, 2.0, 4.5})
    for (double t : {0.0, 0.2, 0.5})
      CHECK(g.tubular_jacobian(th, t) ==
            doctest::Approx(1.0 - t).epsilon(1e-14));
  CHECK_THROWS_AS(g.tubular_jacobian(0.0, 0.95), std::invalid_argument);
}

TEST_CASE("curvature sign convention: disks are negative") {
  auto g1 = BoundaryGeometry::circle(1.0);
  auto g2 = BoundaryGeometry::circle(2.0);
  for (double th : {0.0, 1.0, 3.0}) {
    CHECK(g1.curvature(th) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g2.curvature(th) == doctest::Approx(-0.5).epsilon(1e-12));
  }
}

TEST_CASE("omega(y,0)=1 and FD derivative recovers curvature") {
  auto ge = BoundaryGeometry::ellipse(2.0, 1.0);
  for (double th : {0.0, 0.4, 1.3, 2.2, 4.0, 5.9}) {
    CHECK(ge.tubular_jacobian(th, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // The FD quotient of the implemented tubular map recovers kappa within a
    // first-order envelope (omega is affine in t in 2D, so the residual is
    // the map's own FD floor).
    const double k = ge.curvature(th);
    for (double h : {1e-2, 1e-3, 1e-4}) {
      const double fd = (ge.tubular_jacobian_fd(th, h) -
                         ge.tubular_jacobian_fd(th, 0.0)) / h;
      CHECK(std::abs(fd - k) <= 1.0 * h + 1e-4);
    }
    // Closed form vs FD determinant away from t=0.
    CHECK(ge.tubular_jacobian_fd(th, 0.1) ==
          doctest::Approx(ge.tubular_jacobian(th, 0.1)).epsilon(1e-5));
  }
  // Ellipse curvature magnitude at the axis endpoints: p/q^2 and q/p^2.
  CHECK(ge.curvature(0.0) == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(ge.curvature(kPi / 2) == doctest::Approx(-0.25).epsilon(1e-10));
}

TEST_CASE("max tubular radius") {
  auto g = BoundaryGeometry::circle(1.0);
  const double dmax = g.max_tubular_radius();
  CHECK(dmax <= 0.9 + 1e-12);
  CHECK(dmax > 0.5);
  CHECK_FALSE(g.tube_admissible(0.95));
  CHECK(g.tube_admissible(0.5));

  auto ge = BoundaryGeometry::ellipse(2.0, 1.0);
  // Governed by the tightest curvature point: 1/max(-kappa) = q^2/p = 0.5.
  CHECK(ge.max_tubular_radius() == doctest::Approx(0.45).epsilon(0.05));
}

TEST_CASE("injectivity of the half-radius tube on samples") {
  auto ge = BoundaryGeometry::ellipse(2.0, 1.0);
  const double delta = 0.5 * ge.max_tubular_radius();
  const int m = 64;
  double min_sep = 1e9;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      for (double ti : {0.25 * delta, delta}) {
        for (double tj : {0.5 * delta, delta}) {
          const double thi = 2 * kPi * i / m, thj = 2 * kPi * j / m;
          const Point yi = ge.point(thi), yj = ge.point(thj);
          const Point ni = ge.inward_normal(thi), nj = ge.inward_normal(thj);
          const double dx = (yi.x + ti * ni.x) - (yj.x + tj * nj.x);
          const double dy = (yi.y + ti * ni.y) - (yj.y + tj * nj.y);
          min_sep = std::min(min_sep, std::hypot(dx, dy));
        }
      }
    }
  }
  CHECK(min_sep > 0.0);
}

TEST_CASE("boundary integrals") {
  auto g = BoundaryGeometry::circle(1.0);
  CHECK(boundary_integral(g, [](double) { return 1.0; }) ==
        doctest::Approx(2 * kPi).epsilon(1e-10));
  CHECK(boundary_integral(g, [](double th) {
          return std::cos(th) * std::cos(th);
        }) == doctest::Approx(kPi).epsilon(1e-10));

  auto ge = BoundaryGeometry::ellipse(2.0, 1.0);
  const double per = ge.perimeter();
  CHECK(per == doctest::Approx(9.688448220547675).epsilon(1e-9));
  CHECK(per == doctest::Approx(ellipse_perimeter_series(2.0, 1.0)).epsilon(1e-10));
}

TEST_CASE("projection onto circle and ellipse") {
  auto g = BoundaryGeometry::circle(1.0);
  auto pr = g.project({0.5, 0.0});
  CHECK(pr.dist == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pr.theta == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  auto ge = BoundaryGeometry::ellipse(2.0, 1.0);
  // (1.2, 0) lies inside the evolute, so the nearest boundary point is
  // off-axis: minimizing (2cos t - 1.2)^2 + sin^2 t gives cos t = 0.8 and
  // squared distance 0.52.
  auto pe = ge.project({1.2, 0.0});
  CHECK(pe.dist == doctest::Approx(std::sqrt(0.52)).epsilon(1e-6));
  auto pe2 = ge.project({0.0, 0.4});
  CHECK(pe2.dist == doctest::Approx(0.6).epsilon(1e-6));
  // Projection of a boundary point is zero distance.
  auto pe3 = ge.project(ge.point(0.77));
  CHECK(std::abs(pe3.dist) < 1e-9);
}

TEST_CASE("sampled closed curve approximates its analytic source") {
  std::vector<Point> pts;
  const int n = 256;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * kPi * i / n;
    pts.push_back({2.0 * std::cos(th), std::sin(th)});
  }
  auto gs = BoundaryGeometry::from_samples(pts);
  auto ge = BoundaryGeometry::ellipse(2.0, 1.0);
  for (double th : {0.3, 1.0, 2.5, 5.0}) {
    CHECK(gs.point(th).x == doctest::Approx(ge.point(th).x).epsilon(1e-7));
    CHECK(gs.point(th).y == doctest::Approx(ge.point(th).y).epsilon(1e-7));
    CHECK(gs.curvature(th) == doctest::Approx(ge.curvature(th)).epsilon(1e-3));
  }
  CHECK(gs.perimeter() == doctest::Approx(ge.perimeter()).epsilon(1e-6));
}

TEST_CASE("flat-boundary limit has vanishing curvature") {
  // A huge circle stands in for the straight segment: kappa -> 0.
  auto g = BoundaryGeometry::circle(1e8);
  CHECK(std::abs(g.curvature(0.0)) <= 1e-8);
}
