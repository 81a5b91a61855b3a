#include "layerlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "layerlab/quadrature.hpp"

namespace layerlab {

namespace {

// Dormand-Prince 5(4) coefficients.
struct Dopri {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// State: (z, I) with z' = W^{1/2}(z), I' = 2 W(z) t. The quadrature
// accumulates with the same step control as the profile itself.
struct ProfileOde {
  const PotentialSpec& spec;
  double rhs_z(double z) const { return std::sqrt(std::max(0.0, spec.w(z))); }
  double rhs_i(double z, double t) const { return 2.0 * spec.w(z) * t; }
};

}  // namespace

double TransitionProfile::eval(double time) const {
  if (t.empty()) return alpha;
  if (time <= t.front()) return z.front();
  if (time >= t.back()) {
    // Analytic extension beyond the integration window: decay the remaining
    // gap at the certified exponential rate instead of flat-lining samples.
    const double gap = std::max(0.0, b_value - z.back());
    return b_value - gap * std::exp(-sigma * (time - t.back()));
  }
  return interp(time);
}

TransitionProfile solve_profile(const PotentialSpec& spec,
                                const WellConstants& wc, double alpha,
                                double t_max, double tol) {
  if (!(alpha > spec.a && alpha < spec.b))
    throw std::invalid_argument("solve_profile: alpha in (a,b)");
  if (!(tol <= 1e-8) || !(tol > 0))
    throw std::invalid_argument("solve_profile: tol in (0, 1e-8]");

  ProfileOde ode{spec};
  TransitionProfile prof;
  prof.alpha = alpha;
  prof.sigma = wc.sigma;
  prof.alpha_minus = wc.alpha_minus;
  prof.b_value = spec.b;
  prof.sandwich_applicable = alpha >= wc.alpha_minus;

  double t = 0.0, z = alpha;
  double h = std::min(0.01, t_max);
  prof.t.push_back(t);
  prof.z.push_back(z);

  auto f = [&ode](double zz) { return ode.rhs_z(zz); };
  while (t < t_max) {
    if (t + h > t_max) h = t_max - t;
    const double k1 = f(z);
    const double k2 = f(z + h * Dopri::a21 * k1);
    const double k3 = f(z + h * (Dopri::a31 * k1 + Dopri::a32 * k2));
    const double k4 =
        f(z + h * (Dopri::a41 * k1 + Dopri::a42 * k2 + Dopri::a43 * k3));
    const double k5 = f(z + h * (Dopri::a51 * k1 + Dopri::a52 * k2 +
                                 Dopri::a53 * k3 + Dopri::a54 * k4));
    const double k6 =
        f(z + h * (Dopri::a61 * k1 + Dopri::a62 * k2 + Dopri::a63 * k3 +
                   Dopri::a64 * k4 + Dopri::a65 * k5));
    const double z5 = z + h * (Dopri::b1 * k1 + Dopri::b3 * k3 +
                               Dopri::b4 * k4 + Dopri::b5 * k5 +
                               Dopri::b6 * k6);
    const double k7 = f(z5);
    const double err = std::abs(h * (Dopri::e1 * k1 + Dopri::e3 * k3 +
                                     Dopri::e4 * k4 + Dopri::e5 * k5 +
                                     Dopri::e6 * k6 + Dopri::e7 * k7));
    // Proportional local-error budget keeps the accumulated error below tol.
    const double step_tol = 0.5 * tol * h / t_max;
    if (err <= step_tol) {
      t += h;
      z = std::min(z5, spec.b);
      prof.t.push_back(t);
      prof.z.push_back(z);
    }
    const double fac =
        0.9 * std::pow(step_tol / std::max(err, 1e-300), 0.2);
    h *= std::clamp(fac, 0.2, 5.0);
    if (h < 1e-14 * std::max(1.0, t))
      throw std::runtime_error(
          "solve_profile: step-size collapse at t=" + std::to_string(t) +
          " (tolerance too tight near the well)");
  }

  std::vector<double> slopes(prof.z.size());
  for (size_t i = 0; i < prof.z.size(); ++i) slopes[i] = f(prof.z[i]);
  // Saturated tail samples (z pinned at b to machine precision) collapse to
  // duplicate abscissa-value pairs; drop non-increasing z duplicates for the
  // interpolant but keep them in the raw sample arrays.
  std::vector<double> ti, zi, di;
  for (size_t i = 0; i < prof.t.size(); ++i) {
    if (!ti.empty() && !(prof.t[i] > ti.back())) continue;
    ti.push_back(prof.t[i]);
    zi.push_back(prof.z[i]);
    di.push_back(slopes[i]);
  }
  prof.interp = CubicHermite(ti, zi, di);

  // Independent route: t(r) by incremental quadrature along the samples.
  // Agreement is measured in z units (time differences scale by the
  // ill-conditioned dt/dz = W^{-1/2} near b, so a raw time comparison would
  // amplify machine-level z errors). Saturated tail samples are skipped.
  double t_quad = 0.0;
  double worst = 0.0;
  for (size_t i = 1; i < prof.t.size(); ++i) {
    const double z0 = prof.z[i - 1], z1 = prof.z[i];
    if (spec.b - z1 < 1e-9 * (spec.b - spec.a)) break;
    if (z1 > z0) {
      t_quad += integrate(
          [&spec](double r) { return 1.0 / std::sqrt(spec.w(r)); }, z0, z1,
          1e-13);
    }
    worst = std::max(worst, std::abs(t_quad - prof.t[i]) *
                                std::sqrt(std::max(0.0, spec.w(z1))));
  }
  if (worst > 10.0 * tol)
    throw std::runtime_error(
        "solve_profile: ODE and quadrature time maps disagree by " +
        std::to_string(worst));
  return prof;
}

DecayBoundReport verify_decay_bounds(const TransitionProfile& profile,
                                     const PotentialSpec& spec) {
  if (!(profile.alpha >= profile.alpha_minus))
    throw std::invalid_argument(
        "verify_decay_bounds: requires alpha >= alpha_minus");
  DecayBoundReport rep;
  rep.min_upper_margin = std::numeric_limits<double>::infinity();
  rep.min_lower_margin = std::numeric_limits<double>::infinity();
  const double sigma = profile.sigma;
  const double slack = 1e-12;
  for (size_t i = 0; i < profile.t.size(); ++i) {
    const double t = profile.t[i];
    const double gap = spec.b - profile.z[i];
    const double lower = (spec.b - profile.alpha) * std::exp(-t / sigma);
    const double upper = (spec.b - spec.a) * std::exp(-sigma * t);
    const double um = upper - gap, lm = gap - lower;
    if (um < rep.min_upper_margin) rep.min_upper_margin = um;
    if (lm < rep.min_lower_margin) {
      rep.min_lower_margin = lm;
      rep.worst_t = t;
    }
    if (um < -slack || lm < -slack) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

CubicHermite time_map(const PotentialSpec& spec, double alpha,
                      double r_cut_gap) {
  const double b = spec.b;
  const double span = b - alpha;
  if (!(span > 0)) throw std::invalid_argument("time_map: alpha < b required");
  // Geometric refinement toward b down to a gap of r_cut_gap * (b-a).
  const double gap_end = r_cut_gap * (spec.b - spec.a);
  const double ratio = 0.995;
  std::vector<double> r{alpha};
  for (double gap = span * ratio; gap > gap_end; gap *= ratio)
    r.push_back(b - gap);
  std::vector<double> tv(r.size(), 0.0), dv(r.size());
  auto integrand = [&spec](double rho) { return 1.0 / std::sqrt(spec.w(rho)); };
  for (size_t i = 1; i < r.size(); ++i)
    tv[i] = tv[i - 1] + integrate(integrand, r[i - 1], r[i], 1e-14);
  for (size_t i = 0; i < r.size(); ++i) dv[i] = integrand(r[i]);
  return CubicHermite(r, tv, dv);
}

RouteValues second_order_coefficient_routes(const PotentialSpec& spec,
                                            const WellConstants& wc,
                                            double alpha, double tol) {
  if (!(alpha > spec.a && alpha <= spec.b))
    throw std::invalid_argument("second_order_coefficient: alpha in (a,b]");
  RouteValues rv;
  if (alpha == spec.b) return rv;  // constant-b profile, vanishing integrand

  const double sigma = wc.sigma;
  const double span = spec.b - spec.a;

  // Route A: augmented adaptive integration of I' = 2 W(z) t along the
  // profile, stopping once the analytic tail bound
  //   tail(T) <= sigma^-2 (b - z(T))^2 (2 sigma T + 1) / (2 sigma^2)
  // certifies the remainder below tol/4.
  double t = 0.0, z = alpha, integral = 0.0;
  double h = 0.01;
  ProfileOde ode{spec};
  auto fz = [&ode](double zz) { return ode.rhs_z(zz); };
  auto fi = [&ode](double zz, double tt) { return ode.rhs_i(zz, tt); };
  const double t_hard_cap = 2000.0;
  while (t < t_hard_cap) {
    const double gap = spec.b - z;
    const double tail = gap * gap * (2.0 * sigma * t + 1.0) /
                        (2.0 * sigma * sigma * sigma * sigma);
    // The exponential tail bound needs z past the comparison threshold.
    if (z >= wc.alpha_minus && t > 0.0 && tail <= 0.25 * tol) break;
    const double k1z = fz(z), k1i = fi(z, t);
    const double k2z = fz(z + h * Dopri::a21 * k1z);
    const double z3 = z + h * (Dopri::a31 * k1z + Dopri::a32 * k2z);
    const double k3z = fz(z3), k3i = fi(z3, t + Dopri::c3 * h);
    const double z4 =
        z + h * (Dopri::a41 * k1z + Dopri::a42 * k2z + Dopri::a43 * k3z);
    const double k4z = fz(z4), k4i = fi(z4, t + Dopri::c4 * h);
    const double z5s = z + h * (Dopri::a51 * k1z + Dopri::a52 * k2z +
                                Dopri::a53 * k3z + Dopri::a54 * k4z);
    const double k5z = fz(z5s), k5i = fi(z5s, t + Dopri::c5 * h);
    const double z6 =
        z + h * (Dopri::a61 * k1z + Dopri::a62 * k2z + Dopri::a63 * k3z +
                 Dopri::a64 * k4z + Dopri::a65 * k5z);
    const double k6z = fz(z6), k6i = fi(z6, t + h);
    const double zn = z + h * (Dopri::b1 * k1z + Dopri::b3 * k3z +
                               Dopri::b4 * k4z + Dopri::b5 * k5z +
                               Dopri::b6 * k6z);
    const double in = integral + h * (Dopri::b1 * k1i + Dopri::b3 * k3i +
                                      Dopri::b4 * k4i + Dopri::b5 * k5i +
                                      Dopri::b6 * k6i);
    const double k7z = fz(zn), k7i = fi(zn, t + h);
    const double errz = std::abs(
        h * (Dopri::e1 * k1z + Dopri::e3 * k3z + Dopri::e4 * k4z +
             Dopri::e5 * k5z + Dopri::e6 * k6z + Dopri::e7 * k7z));
    const double erri = std::abs(
        h * (Dopri::e1 * k1i + Dopri::e3 * k3i + Dopri::e4 * k4i +
             Dopri::e5 * k5i + Dopri::e6 * k6i + Dopri::e7 * k7i));
    const double err = std::max(errz, erri);
    const double step_tol = 0.02 * tol * h / 100.0;
    if (err <= step_tol) {
      t += h;
      z = std::min(zn, spec.b);
      integral = in;
    }
    h *= std::clamp(0.9 * std::pow(step_tol / std::max(err, 1e-300), 0.2),
                    0.2, 5.0);
    if (h < 1e-14 * std::max(1.0, t))
      throw std::runtime_error("second_order_coefficient: step-size collapse");
  }
  rv.route_a = integral;

  // Route B: int_alpha^b 2 W^{1/2}(r) t(r) dr against the quadrature-built
  // time map, independent of the ODE solve. The integrand behaves like
  // (b-r) log(b-r) near b, so the cut at gap 1e-12 leaves a remainder of
  // order gap^2 |log gap|, far below tol.
  (void)span;
  const CubicHermite tm = time_map(spec, alpha, 1e-12);
  const double r_cut = tm.back_x();
  rv.route_b = integrate(
      [&spec, &tm](double r) {
        return 2.0 * std::sqrt(spec.w(r)) * tm(r);
      },
      alpha, r_cut, 0.05 * tol);

  rv.discrepancy = std::abs(rv.route_a - rv.route_b);
  if (rv.discrepancy > 10.0 * tol)
    throw std::runtime_error(
        "second_order_coefficient: dual-route self-check failed, |A-B|=" +
        std::to_string(rv.discrepancy));
  return rv;
}

double second_order_coefficient(const PotentialSpec& spec,
                                const WellConstants& wc, double alpha,
                                double tol) {
  return second_order_coefficient_routes(spec, wc, alpha, tol).route_b;
}

double RegularizedProfile::eval_psi(double r) const {
  if (degenerate) return 0.0;
  return psi(std::clamp(r, alpha_eps, psi.back_x()));
}

double RegularizedProfile::invert(double time) const {
  if (degenerate) return alpha_eps;
  if (time <= 0.0) return alpha_eps;
  if (time >= t_eps) return psi.back_x();
  return psi.inverse(time);
}

RegularizedProfile regularized_psi(const PotentialSpec& spec, double alpha_eps,
                                   double delta_eps, double eps) {
  if (!(delta_eps > 0.0))
    throw std::invalid_argument("regularized_psi: delta_eps > 0 required");
  if (!(eps > 0.0)) throw std::invalid_argument("regularized_psi: eps > 0");
  if (!(alpha_eps <= spec.b))
    throw std::invalid_argument("regularized_psi: alpha_eps <= b");

  RegularizedProfile rp;
  rp.eps = eps;
  rp.delta_eps = delta_eps;
  rp.alpha_eps = alpha_eps;
  const double span = spec.b - alpha_eps;
  if (span <= 0.0) {
    rp.degenerate = true;
    rp.t_eps = 0.0;
    rp.c0_fitted = 0.0;
    return rp;
  }

  auto integrand = [&spec, delta_eps, eps](double s) {
    return eps / std::sqrt(delta_eps + spec.w(s));
  };
  // Node layout: resolve both the sqrt(delta) core near b and the smooth
  // interior. Geometric refinement toward b down to delta-dependent gaps.
  const double gap_floor = std::min(1e-3 * std::sqrt(delta_eps), 1e-6 * span);
  const double ratio = 0.97;
  std::vector<double> r{alpha_eps};
  for (double gap = span * ratio; gap > gap_floor; gap *= ratio)
    r.push_back(spec.b - gap);
  r.push_back(spec.b);
  std::vector<double> pv(r.size(), 0.0), dv(r.size());
  for (size_t i = 1; i < r.size(); ++i)
    pv[i] = pv[i - 1] + integrate(integrand, r[i - 1], r[i], 1e-14);
  for (size_t i = 0; i < r.size(); ++i) dv[i] = integrand(r[i]);
  rp.psi = CubicHermite(r, pv, dv);
  rp.t_eps = pv.back();
  const double logd = std::abs(std::log(delta_eps));
  rp.c0_fitted = logd > 0 ? rp.t_eps / (eps * logd) : 0.0;
  return rp;
}

bool LogBoundReport::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

LogBoundReport check_log_asymptotics(const PotentialSpec& spec,
                                     const WellConstants& wc,
                                     const std::vector<double>& deltas,
                                     double alpha, double beta) {
  const double sigma = wc.sigma;
  if (!(wc.alpha_minus <= alpha && alpha <= beta && beta <= spec.b))
    throw std::invalid_argument(
        "check_log_asymptotics: alpha_minus <= alpha <= beta <= b");
  LogBoundReport rep;
  for (double delta : deltas) {
    if (!(delta > 0.0 && delta <= 1.0 / sigma))
      throw std::invalid_argument(
          "check_log_asymptotics: delta in (0, 1/sigma]");
    LogBoundRow row;
    row.delta = delta;
    row.integral =
        beta > alpha
            ? integrate(
                  [&spec, delta](double s) {
                    return 1.0 / std::sqrt(delta + spec.w(s));
                  },
                  alpha, beta, 1e-12)
            : 0.0;
    const double ba = spec.b - alpha, bb = spec.b - beta;
    row.lower = -0.5 * sigma * std::log(sigma * sigma * delta) +
                sigma * std::log(ba) -
                sigma * std::log(1.0 + 2.0 * bb / (sigma * std::sqrt(delta)));
    const double r_up = std::min(delta / (sigma * sigma), 1.0);
    row.upper = -0.5 / sigma * std::log(r_up) +
                (1.0 / sigma) * std::log(1.0 + 2.0 * (spec.b - spec.a));
    if (beta == alpha) {
      // Degenerate interval: the integral is 0; only the lower bound is
      // meaningful and must be nonpositive.
      row.pass = row.lower <= 1e-12;
    } else {
      row.pass = row.lower <= row.integral + 1e-10 &&
                 row.integral <= row.upper + 1e-10;
    }
    row.ratio = row.integral / (0.5 * sigma * std::abs(std::log(delta)));
    rep.rows.push_back(row);
  }
  return rep;
}

DifferenceBoundReport check_difference_bound(const PotentialSpec& spec,
                                             const std::vector<double>& deltas,
                                             double alpha_eps,
                                             double beta_eps) {
  if (!(spec.a <= alpha_eps && alpha_eps <= beta_eps && beta_eps <= spec.b))
    throw std::invalid_argument(
        "check_difference_bound: a <= alpha_eps <= beta_eps <= b");
  DifferenceBoundReport rep;
  for (double delta : deltas) {
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("check_difference_bound: delta in (0,1)");
    double v = 0.0;
    if (beta_eps > alpha_eps) {
      v = integrate_with_breaks(
          [&spec, delta](double s) {
            const double w = spec.w(s);
            const double sw = std::sqrt(w);
            const double sdw = std::sqrt(delta + w);
            return 2.0 / (sdw + sw) - 1.0 / sdw;
          },
          alpha_eps, beta_eps, {spec.a, spec.b}, 1e-12);
    }
    rep.deltas.push_back(delta);
    rep.values.push_back(v);
    rep.sup = std::max(rep.sup, v);
  }
  // Non-divergence heuristic: the smallest-delta value must not exceed a
  // modest multiple of the values seen at larger delta.
  if (!rep.values.empty()) {
    double head_max = 0.0;
    const size_t half = rep.values.size() / 2;
    for (size_t i = 0; i <= half && i < rep.values.size(); ++i)
      head_max = std::max(head_max, std::abs(rep.values[i]));
    rep.bounded =
        std::abs(rep.values.back()) <= 3.0 * head_max + 1e-9;
  }
  return rep;
}

}  // namespace layerlab
