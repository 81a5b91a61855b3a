#include "layerlab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "layerlab/quadrature.hpp"

namespace layerlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double DeltaSchedule::delta(double eps) const {
  switch (kind) {
    case Kind::Power:
      return std::pow(eps, m);
    case Kind::Log: {
      const double l = std::abs(std::log(eps));
      return eps / std::pow(std::max(l, 1e-3), m);
    }
    case Kind::Linear:
      return eps;
  }
  return eps;
}

bool DeltaSchedule::second_order_conforming() const {
  return (kind == Kind::Power || kind == Kind::Log) && m >= 2.0;
}

namespace {

// Tabulated time map between two values at fixed (eps, delta):
//   time(r) = int_{from}^{r} eps (delta + W)^{-1/2}  (oriented).
// The r grid refines geometrically toward both ends (wells sit at ends in
// every use below).
CubicHermite tabulate_psi(const PotentialSpec& spec, double from, double to,
                          double delta, double eps) {
  const double lo = std::min(from, to), hi = std::max(from, to);
  const double span = hi - lo;
  const double ratio = 0.995;
  const double floor_gap =
      std::max(1e-3 * std::sqrt(delta), 1e-12 * std::max(span, 1.0));
  // Two-sided geometric mesh: offsets from each endpoint shrink to
  // floor_gap, so the grid is finest where delta + W bottoms out and
  // coarsest at the midpoint.
  std::vector<double> off;  // descending from span/2
  for (double g = 0.5 * span * ratio; g > floor_gap; g *= ratio)
    off.push_back(g);
  std::vector<double> r{lo};
  for (size_t i = off.size(); i-- > 0;) r.push_back(lo + off[i]);
  r.push_back(lo + 0.5 * span);
  for (size_t i = 0; i < off.size(); ++i) r.push_back(hi - off[i]);
  r.push_back(hi);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end(),
                      [span](double x, double y) {
                        return std::abs(x - y) < 1e-15 * std::max(span, 1.0);
                      }),
          r.end());

  auto integrand = [&spec, delta, eps](double s) {
    return eps / std::sqrt(delta + spec.w(s));
  };
  std::vector<double> tv(r.size(), 0.0), dv(r.size());
  for (size_t i = 1; i < r.size(); ++i)
    tv[i] = tv[i - 1] + integrate(integrand, r[i - 1], r[i], 1e-14);
  for (size_t i = 0; i < r.size(); ++i) dv[i] = integrand(r[i]);
  if (from > to) {
    // Oriented decreasing: time grows as r decreases.
    const double total = tv.back();
    for (auto& t : tv) t = total - t;
    for (auto& d : dv) d = -d;
  }
  return CubicHermite(r, tv, dv);
}

}  // namespace

double RecoveryCandidate1D::value(double t) const {
  if (degenerate) return alpha_eps;
  if (t <= 0.0) return alpha_eps;
  if (t >= t_eps) return beta_eps;
  return psi.inverse(t);
}

std::vector<double> RecoveryCandidate1D::sample(
    const std::vector<double>& grid) const {
  std::vector<double> out(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) out[i] = value(grid[i]);
  return out;
}

double RecoveryCandidate1D::ode_residual_sup(const PotentialSpec& spec,
                                             int probes) const {
  if (degenerate || t_eps <= 0.0) return 0.0;
  double worst = 0.0;
  const double h = std::min(1e-3 * eps, 1e-3 * t_eps);
  for (int i = 1; i < probes; ++i) {
    const double t = t_eps * i / probes;
    if (t < 3 * h || t > t_eps - 3 * h) continue;
    // 4th-order central difference.
    const double d = (-value(t + 2 * h) + 8 * value(t + h) - 8 * value(t - h) +
                      value(t - 2 * h)) /
                     (12 * h);
    const double rhs = sign * std::sqrt(delta + spec.w(value(t)));
    worst = std::max(worst, std::abs(eps * d - rhs));
  }
  return worst;
}

RecoveryCandidate1D build_recovery_1d(const PotentialSpec& spec,
                                      const WeightedProblem1D& pb,
                                      const DeltaSchedule& schedule) {
  if (!schedule.second_order_conforming())
    throw std::invalid_argument(
        "build_recovery_1d: schedule must be power/log with m >= 2");
  RecoveryCandidate1D c;
  c.eps = pb.eps;
  c.delta = schedule.delta(pb.eps);
  c.alpha_eps = pb.alpha_eps;
  c.beta_eps = pb.beta_eps;
  c.sign = pb.beta_eps >= pb.alpha_eps ? +1 : -1;
  if (pb.alpha_eps == pb.beta_eps) {
    c.degenerate = true;
    c.t_eps = 0.0;
    return c;
  }
  c.psi = tabulate_psi(spec, pb.alpha_eps, pb.beta_eps, c.delta, pb.eps);
  c.t_eps = c.sign > 0 ? c.psi.y().back() : c.psi.y().front();
  if (c.t_eps > pb.weight.T)
    throw std::invalid_argument(
        "build_recovery_1d: layer width exceeds the interval at this eps");
  return c;
}

LimsupReport evaluate_limsup_bound(const PotentialSpec& spec,
                                   const RecoveryCandidate1D& cand,
                                   const WeightedProblem1D& pb,
                                   const std::vector<double>& l_grid) {
  LimsupReport rep;
  const double eps = pb.eps, delta = cand.delta;
  const double lo = std::min(cand.alpha_eps, cand.beta_eps);
  const double hi = std::max(cand.alpha_eps, cand.beta_eps);

  // Exact change of variables on the transition window:
  //   int_0^{T_eps} (W + eps^2 v'^2) omega dt
  //     = int (2W + delta) (delta + W)^{-1/2} omega(time(r)) eps dr.
  auto omega_at = [&pb, &cand](double r) {
    const double t = std::clamp(cand.psi(r), 0.0, pb.weight.T);
    return pb.weight.omega(t);
  };
  double e_layer = 0.0;
  if (!cand.degenerate) {
    e_layer = integrate(
        [&spec, &omega_at, delta, eps](double r) {
          const double w = spec.w(r);
          return (2.0 * w + delta) / std::sqrt(delta + w) * eps *
                 omega_at(r);
        },
        lo, hi, 1e-13);
  }
  // Constant tail on [T_eps, T].
  const double tail_w = spec.w(cand.beta_eps);
  const double tail =
      tail_w * integrate([&pb](double t) { return pb.weight.omega(t); },
                         std::min(cand.t_eps, pb.weight.T), pb.weight.T,
                         1e-13);
  const double g = e_layer + tail;
  const double min_g1 =
      geodesic_distance(spec, pb.alpha, spec.b) * pb.weight.omega(0.0);
  rep.g2 = (g / eps - min_g1) / eps;

  const double dw0 = pb.weight.domega(0.0);
  for (double l : l_grid) {
    LimsupReport::Row row;
    row.l = l;
    const double r_at_l = cand.value(eps * l);
    double lead = 0.0;
    if (!cand.degenerate && std::abs(r_at_l - cand.alpha_eps) > 0) {
      lead = integrate(
                 [&spec, &cand, eps](double r) {
                   const double w = spec.w(r);
                   return 2.0 * w * (cand.psi(r) / eps) /
                          std::sqrt(cand.delta + w) * eps;
                 },
                 std::min(cand.alpha_eps, r_at_l),
                 std::max(cand.alpha_eps, r_at_l), 1e-13) /
             eps;
    }
    // Plus the constant-tail piece of the rescaled integral up to l.
    if (eps * l > cand.t_eps) {
      const double s0 = cand.t_eps / eps;
      lead += tail_w * (l * l - s0 * s0);
    }
    row.leading = dw0 * lead;
    row.residual = rep.g2 - row.leading;
    rep.rows.push_back(row);
  }
  return rep;
}

MultiTransitionResult multi_transition_recovery(
    const PotentialSpec& spec, const std::vector<double>& jump_times,
    bool start_at_b, const WeightedProblem1D& pb,
    const DeltaSchedule& schedule) {
  const double T = pb.weight.T;
  for (size_t i = 0; i < jump_times.size(); ++i) {
    if (!(jump_times[i] > 0 && jump_times[i] < T))
      throw std::invalid_argument("multi_transition: jumps inside (0,T)");
    if (i > 0 && !(jump_times[i] > jump_times[i - 1]))
      throw std::invalid_argument("multi_transition: jumps increasing");
  }
  const double delta = schedule.delta(pb.eps);
  const double eps = pb.eps;

  // Interior transition a -> b and the two boundary transitions.
  const CubicHermite psi_int = tabulate_psi(spec, spec.a, spec.b, delta, eps);
  const double t_int = psi_int.y().back();
  const double phase0 = start_at_b ? spec.b : spec.a;
  const bool even = jump_times.size() % 2 == 0;
  const double phase_T = even ? phase0
                              : (start_at_b ? spec.a : spec.b);

  double t_bar = 0.0;
  CubicHermite psi_bar;
  const bool has_bar = std::abs(pb.alpha_eps - phase0) > 0;
  if (has_bar) {
    psi_bar = tabulate_psi(spec, pb.alpha_eps, phase0, delta, eps);
    t_bar = std::max(psi_bar.y().front(), psi_bar.y().back());
  }
  double t_hat = 0.0;
  CubicHermite psi_hat;
  const bool has_hat = std::abs(pb.beta_eps - phase_T) > 0;
  if (has_hat) {
    psi_hat = tabulate_psi(spec, phase_T, pb.beta_eps, delta, eps);
    t_hat = std::max(psi_hat.y().front(), psi_hat.y().back());
  }

  // Non-overlap of the actual layer widths.
  MultiTransitionResult out;
  out.min_gap = std::numeric_limits<double>::infinity();
  if (!jump_times.empty()) {
    out.min_gap = std::min(out.min_gap, jump_times.front() - t_bar - t_int);
    for (size_t i = 1; i < jump_times.size(); ++i)
      out.min_gap =
          std::min(out.min_gap, jump_times[i] - jump_times[i - 1] - t_int);
    out.min_gap =
        std::min(out.min_gap, T - jump_times.back() - t_hat - t_int);
  } else {
    out.min_gap = T - t_bar - t_hat;
  }
  if (!(out.min_gap > 0)) {
    std::ostringstream os;
    os << "multi_transition: layers overlap at eps=" << eps
       << " (interior width " << t_int << ", boundary widths " << t_bar << ", "
       << t_hat << ")";
    throw std::invalid_argument(os.str());
  }

  // Signed distance to the jump set, positive on b-phase intervals.
  auto signed_dist = [&](double t) {
    if (jump_times.empty())
      return start_at_b ? std::numeric_limits<double>::max()
                        : -std::numeric_limits<double>::max();
    double best = std::numeric_limits<double>::max();
    for (double j : jump_times) best = std::min(best, std::abs(t - j));
    // Phase at t: count jumps passed.
    size_t passed = 0;
    for (double j : jump_times)
      if (t >= j) ++passed;
    const bool in_b = (passed % 2 == 0) == start_at_b;
    return in_b ? best : -best;
  };
  auto phi_int = [&](double s) {
    if (s <= 0) return spec.a;
    if (s >= t_int) return spec.b;
    return psi_int.inverse(s);
  };
  auto eval = [&](double t) {
    if (has_bar && t <= t_bar) {
      // Oriented inverse: time grows along the transition.
      return psi_bar.inverse(t);
    }
    if (has_hat && t >= T - t_hat) return psi_hat.inverse(t - (T - t_hat));
    return phi_int(signed_dist(t));
  };

  // Sample grid: fine inside every layer, coarse elsewhere.
  std::vector<double> nodes{0.0, T};
  auto add_window = [&](double lo, double hi) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, T);
    const int m = 400;
    for (int i = 0; i <= m; ++i) nodes.push_back(lo + (hi - lo) * i / m);
  };
  if (has_bar) add_window(0.0, 1.5 * t_bar);
  if (has_hat) add_window(T - 1.5 * t_hat, T);
  for (double j : jump_times) add_window(j - 0.5 * t_int, j + 1.5 * t_int);
  const int coarse = 800;
  for (int i = 0; i <= coarse; ++i) nodes.push_back(T * i / coarse);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [T](double x, double y) {
                            return std::abs(x - y) < 1e-14 * T;
                          }),
              nodes.end());

  out.grid = nodes;
  out.values.resize(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) out.values[i] = eval(nodes[i]);
  out.values.front() = pb.alpha_eps;
  out.values.back() = pb.beta_eps;

  out.g1 = discrete_energy(spec, pb, out.grid, out.values) / eps;
  const double cw = compute_cw(spec);
  double limit = geodesic_distance(spec, pb.alpha, phase0) *
                 pb.weight.omega(0.0);
  for (double j : jump_times) limit += cw * pb.weight.omega(j);
  limit += geodesic_distance(spec, phase_T, pb.beta) * pb.weight.omega(T);
  out.g1_limit = limit;
  return out;
}

double RecoveryField2D::value(double theta, double dist) const {
  if (fibers.empty()) return 0.0;
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0) theta += kTwoPi;
  const double pos = theta / kTwoPi * double(fibers.size());
  size_t j = size_t(std::llround(pos)) % fibers.size();
  if (dist >= delta_tube) return fibers[j].beta_eps;
  return fibers[j].value(dist);
}

RecoveryField2D build_recovery_2d(const PotentialSpec& spec,
                                  const BoundaryGeometry& geom,
                                  const std::function<double(double)>& g_eps,
                                  const std::function<double(double)>& dg_eps,
                                  double eps, const DeltaSchedule& schedule,
                                  double delta_tube, int n_theta) {
  if (!geom.tube_admissible(delta_tube))
    throw std::invalid_argument("build_recovery_2d: tube not admissible");
  RecoveryField2D field;
  field.delta_tube = delta_tube;
  const double delta_reg = schedule.delta(eps);

  double f2 = 0.0, tang = 0.0;
  double h_total = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    const double th = kTwoPi * j / n_theta;
    WeightedProblem1D pb;
    const double kappa = geom.curvature(th);
    pb.weight = Weight::affine(delta_tube, kappa);
    pb.eps = eps;
    pb.alpha_eps = g_eps(th);
    pb.beta_eps = spec.b;
    pb.alpha = g_eps(th);
    pb.beta = spec.b;
    auto fiber = build_recovery_1d(spec, pb, schedule);
    if (fiber.t_eps > delta_tube) {
      std::ostringstream os;
      os << "build_recovery_2d: layer width " << fiber.t_eps
         << " exceeds the tube " << delta_tube << " at eps=" << eps;
      throw std::invalid_argument(os.str());
    }
    field.t_eps_max = std::max(field.t_eps_max, fiber.t_eps);

    auto rep = evaluate_limsup_bound(spec, fiber, pb, {});
    const double sp = geom.speed(th);
    const double dh = sp * kTwoPi / n_theta;
    f2 += rep.g2 * dh;

    // Tangential contribution: |grad_tau v|^2 = (delta+W(v))/(delta+W(g))
    // |dg/dtau|^2 inside the layer.
    const double dg_tau = dg_eps(th) / sp;
    if (dg_tau != 0.0 && !fiber.degenerate) {
      const double denom = delta_reg + spec.w(pb.alpha_eps);
      const double line = integrate(
          [&](double r) {
            const double w = spec.w(r);
            const double t = std::clamp(fiber.psi(r), 0.0, delta_tube);
            return (delta_reg + w) / denom * pb.weight.omega(t) * eps /
                   std::sqrt(delta_reg + w);
          },
          std::min(pb.alpha_eps, spec.b), std::max(pb.alpha_eps, spec.b),
          1e-12);
      tang += dg_tau * dg_tau * line * dh;
    }

    field.thetas.push_back(th);
    field.fibers.push_back(std::move(fiber));
    h_total += dh;
  }
  field.f2 = f2;
  field.tangential_term = tang;
  (void)h_total;
  return field;
}

}  // namespace layerlab
