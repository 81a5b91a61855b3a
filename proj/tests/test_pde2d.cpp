#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "layerlab/pde2d.hpp"

using namespace layerlab;

namespace {
struct Fixture {
  PotentialSpec spec = PotentialSpec::quartic(-1.0, 1.0);
  WellConstants wc = compute_well_constants(spec);
  BoundaryGeometry disk = BoundaryGeometry::circle(1.0);
};
}  // namespace

TEST_CASE("g = b solves trivially with zero energy") {
  Fixture f;
  auto data = DirichletData::constant(1.0);
  SolveInfo2D info;
  auto field = minimize_f_epsilon(f.spec, f.disk, data, 0.05, {}, &info);
  CHECK(info.flow_steps <= 1);
  for (double v : field.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(energy_f(f.spec, field) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(f2_epsilon(f.spec, field, data) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("disk boundary layer: center value, trace, max principle") {
  Fixture f;
  auto data = DirichletData::constant(0.2);
  SolveInfo2D info;
  auto field = minimize_f_epsilon(f.spec, f.disk, data, 0.02, {}, &info);
  INFO("flow=" << info.flow_steps << " newton=" << info.newton_iterations
               << " res=" << info.residual << " " << info.note);
  CHECK(info.newton_converged);

  // Exact boundary trace.
  for (int j = 0; j < field.nt(); ++j)
    CHECK(field.at(field.nr() - 1, j) == doctest::Approx(0.2).epsilon(1e-14));
  // Deep interior pinned at b far beyond 1e-6.
  for (int j = 0; j < field.nt(); ++j)
    CHECK(field.at(0, j) > 1.0 - 1e-6);

  auto mp = check_maximum_principle(f.spec, field);
  CHECK(mp.pass);

  // Theta-independence for symmetric data.
  double asym = 0.0;
  for (int i = 0; i < field.nr(); ++i) {
    double mn = 1e300, mx = -1e300;
    for (int j = 0; j < field.nt(); ++j) {
      mn = std::min(mn, field.at(i, j));
      mx = std::max(mx, field.at(i, j));
    }
    asym = std::max(asym, mx - mn);
  }
  CHECK(asym <= 1e-8);

  // Corrupted field violates the maximum principle.
  auto bad = field;
  for (auto& v : bad.u) v += 0.1;
  CHECK_FALSE(check_maximum_principle(f.spec, bad).pass);
}

TEST_CASE("exponential decay fit and level-set confinement") {
  Fixture f;
  auto data = DirichletData::constant(0.2);
  const double eps = 0.04;
  auto field = minimize_f_epsilon(f.spec, f.disk, data, eps, {});

  auto decay = check_exponential_decay(f.spec, field, 0.1);
  CHECK(decay.pass);
  CHECK_FALSE(decay.floor_case);
  // Slope within a factor 2 of the linearization rate at the well.
  const double mu = decay_rate_mu(f.spec, 1.0 - f.wc.beta_minus);
  CHECK(decay.mu_fit >= 0.5 * mu);
  CHECK(decay.mu_fit <= 8.0 * mu);

  auto ls = check_level_set_confinement(field, 0.5,
                                        5 * eps * std::abs(std::log(eps)));
  CHECK(ls.pass);

  // u == b is the floor case.
  auto flat = field;
  std::fill(flat.u.begin(), flat.u.end(), 1.0);
  auto d2 = check_exponential_decay(f.spec, flat, 0.1);
  CHECK(d2.pass);
  CHECK(d2.floor_case);
}

TEST_CASE("gradient bound is eps-stable") {
  Fixture f;
  auto data = DirichletData::constant(0.2);
  double prev = -1.0;
  for (double eps : {0.08, 0.04}) {
    auto field = minimize_f_epsilon(f.spec, f.disk, data, eps, {});
    auto rep = check_gradient_bound(field);
    CHECK(rep.eps_max_grad_global > 0.1);
    CHECK(rep.eps_max_grad_global < 3.0);
    CHECK(rep.eps_max_grad_interior <= rep.eps_max_grad_global + 1e-12);
    if (prev > 0)
      CHECK(rep.eps_max_grad_global ==
            doctest::Approx(prev).epsilon(0.5));
    prev = rep.eps_max_grad_global;
  }
}

TEST_CASE("radial reduction oracle on the disk") {
  Fixture f;
  GridSpec2D gs;
  auto rep = radial_reduction_oracle(f.spec, 1.0, 0.2, 0.02, gs);
  INFO("f2d=" << rep.f_2d << " f1d=" << rep.f_1d << " gap=" << rep.rel_gap);
  CHECK(rep.rel_gap <= 0.005);

  // g = b: both energies vanish.
  auto data = DirichletData::constant(1.0);
  auto field = minimize_f_epsilon(f.spec, f.disk, data, 0.02, gs);
  CHECK(energy_f(f.spec, field) <= 1e-14);
}

TEST_CASE("F2 values approach the curvature-weighted coefficient") {
  // The discrete energy carries an eps-linear error at fixed h/eps, so each
  // rung pairs the working grid with its bisection and Richardson-
  // extrapolates the energy in h before dividing by eps^2.
  Fixture f;
  auto data = DirichletData::constant(0.2);
  const double c2 = second_order_coefficient(f.spec, f.wc, 0.2);
  const double target = -2.0 * std::numbers::pi * c2;  // kappa = -1
  const double c1 = boundary_integral(f.disk, [&](double th) {
    return geodesic_distance(f.spec, f.spec.b, data.g(th));
  });
  GridSpec2D gs;
  double err_prev = 1e300;
  for (double eps : {0.08, 0.04, 0.02}) {
    auto rho = radial_nodes(f.disk, eps, gs);
    auto fh = minimize_on_nodes(f.spec, f.disk, data, eps, rho, gs.n_theta);
    auto fh2 = minimize_on_nodes(f.spec, f.disk, data, eps,
                                 bisect_nodes(rho), gs.n_theta * 2, nullptr,
                                 &fh);
    const double Fx =
        (4.0 * energy_f(f.spec, fh2) - energy_f(f.spec, fh)) / 3.0;
    const double f2 = (Fx / eps - c1) / eps;
    const double err = std::abs(f2 - target);
    INFO("eps=" << eps << " f2=" << f2 << " target=" << target);
    CHECK(err < err_prev);
    err_prev = err;
  }
  CHECK(err_prev <= 0.05 * std::abs(target));
}

TEST_CASE("ellipse solve runs and respects the trace") {
  Fixture f;
  auto geom = BoundaryGeometry::ellipse(2.0, 1.0);
  auto data = DirichletData::constant(0.2);
  GridSpec2D gs;
  gs.n_theta = 64;
  SolveInfo2D info;
  auto field = minimize_f_epsilon(f.spec, geom, data, 0.04, gs, &info);
  for (int j = 0; j < field.nt(); ++j)
    CHECK(field.at(field.nr() - 1, j) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(check_maximum_principle(f.spec, field).pass);
  auto ls = check_level_set_confinement(field, 0.5, 0.4);
  CHECK(ls.pass);
}

TEST_CASE("sampled geometry rejected") {
  Fixture f;
  std::vector<Point> pts;
  for (int i = 0; i < 32; ++i) {
    const double th = 2 * std::numbers::pi * i / 32;
    pts.push_back({std::cos(th), std::sin(th)});
  }
  auto geom = BoundaryGeometry::from_samples(pts);
  CHECK_THROWS_AS(minimize_f_epsilon(f.spec, geom,
                                     DirichletData::constant(0.2), 0.05, {}),
                  std::invalid_argument);
}
