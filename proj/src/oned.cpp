#include "layerlab/oned.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "layerlab/interp.hpp"

namespace layerlab {

Weight Weight::affine(double T, double kappa) {
  Weight w;
  w.T = T;
  w.omega = [kappa](double t) { return 1.0 + kappa * t; };
  w.domega = [kappa](double) { return kappa; };
  w.omega0 = std::max(0.0, -kappa * T);
  return w;
}

Weight Weight::constant(double T, double value) {
  Weight w;
  w.T = T;
  w.omega = [value](double) { return value; };
  w.domega = [](double) { return 0.0; };
  w.omega0 = 0.0;
  return w;
}

double Weight::drop(int grid) const {
  const double w0 = omega(0.0);
  double mn = w0;
  for (int i = 1; i <= grid; ++i) mn = std::min(mn, omega(T * i / grid));
  return std::max(0.0, w0 - mn);
}

std::vector<double> make_graded_grid(double T, double eps,
                                     const GridSpec1D& gs) {
  if (!(T > 0) || !(eps > 0)) throw std::invalid_argument("grid: T, eps > 0");
  const double h0 = eps / gs.nodes_per_eps;
  const double h_max = std::max(h0, T * gs.h_max_frac);
  const double layer = std::min(gs.layer_widths * eps, 0.5 * T);

  // Offsets from one endpoint to the midpoint: uniform fine zone, then
  // geometric coarsening capped at h_max.
  std::vector<double> off{0.0};
  double h = h0;
  while (off.back() < 0.5 * T) {
    double t = off.back() + (off.back() < layer ? h0 : h);
    if (off.back() >= layer) h = std::min(h * gs.growth, h_max);
    if (t > 0.5 * T - 0.25 * h0) t = 0.5 * T;
    off.push_back(t);
  }
  std::vector<double> grid;
  grid.reserve(2 * off.size());
  for (double t : off) grid.push_back(t);
  for (size_t i = off.size() - 1; i-- > 0;) grid.push_back(T - off[i]);
  // Deduplicate the midpoint.
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [T](double x, double y) {
                           return std::abs(x - y) < 1e-14 * T;
                         }),
             grid.end());
  return grid;
}

double discrete_energy(const PotentialSpec& spec, const WeightedProblem1D& pb,
                       const std::vector<double>& grid,
                       const std::vector<double>& values) {
  const double e2 = pb.eps * pb.eps;
  double sum = 0.0;
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const double w0 = pb.weight.omega(grid[i]);
    const double w1 = pb.weight.omega(grid[i + 1]);
    const double dv = (values[i + 1] - values[i]) / h;
    sum += h * (0.5 * (spec.w(values[i]) * w0 + spec.w(values[i + 1]) * w1) +
                e2 * dv * dv * 0.5 * (w0 + w1));
  }
  return sum;
}

EnergyBreakdown energy_g(const PotentialSpec& spec, const Solution1D& sol,
                         const WeightedProblem1D& pb) {
  EnergyBreakdown eb;
  eb.g = discrete_energy(spec, pb, sol.grid, sol.values);
  eb.g1 = eb.g / pb.eps;
  eb.min_g1_theory =
      geodesic_distance(spec, pb.alpha, spec.b) * pb.weight.omega(0.0);
  eb.g2 = (eb.g1 - eb.min_g1_theory) / pb.eps;
  int in_layer = 0;
  for (double t : sol.grid)
    if (t <= pb.eps) ++in_layer;
  eb.underresolved = in_layer < 20;
  eb.bc_mismatch =
      std::abs(sol.values.front() - pb.alpha_eps) > 1e-12 ||
      (!pb.natural_right_bc &&
       std::abs(sol.values.back() - pb.beta_eps) > 1e-12);
  return eb;
}

namespace {

// Gradient of the discrete energy wrt nodal values (Dirichlet rows skipped
// by the caller). h-bar weighted, i.e. this is the weak-form residual.
void energy_gradient(const PotentialSpec& spec, const WeightedProblem1D& pb,
                     const std::vector<double>& t, const std::vector<double>& v,
                     std::vector<double>& grad) {
  const size_t n = t.size();
  const double e2 = pb.eps * pb.eps;
  grad.assign(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) {
    const double h = t[i + 1] - t[i];
    const double w0 = pb.weight.omega(t[i]);
    const double w1 = pb.weight.omega(t[i + 1]);
    const double wbar = 0.5 * (w0 + w1);
    const double dv = (v[i + 1] - v[i]) / h;
    grad[i] += 0.5 * h * spec.dw(v[i]) * w0 - 2.0 * e2 * wbar * dv;
    grad[i + 1] += 0.5 * h * spec.dw(v[i + 1]) * w1 + 2.0 * e2 * wbar * dv;
  }
}

struct Tridiag {
  std::vector<double> lo, di, up;  // subdiagonal, diagonal, superdiagonal
};

void energy_hessian(const PotentialSpec& spec, const WeightedProblem1D& pb,
                    const std::vector<double>& t, const std::vector<double>& v,
                    Tridiag& H) {
  const size_t n = t.size();
  const double e2 = pb.eps * pb.eps;
  H.lo.assign(n, 0.0);
  H.di.assign(n, 0.0);
  H.up.assign(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) {
    const double h = t[i + 1] - t[i];
    const double w0 = pb.weight.omega(t[i]);
    const double w1 = pb.weight.omega(t[i + 1]);
    const double wbar = 0.5 * (w0 + w1);
    H.di[i] += 0.5 * h * spec.ddw(v[i]) * w0 + 2.0 * e2 * wbar / h;
    H.di[i + 1] += 0.5 * h * spec.ddw(v[i + 1]) * w1 + 2.0 * e2 * wbar / h;
    H.up[i] += -2.0 * e2 * wbar / h;
    H.lo[i + 1] += -2.0 * e2 * wbar / h;
  }
}

// Thomas solve restricted to rows [lo, hi]; rows outside are identity.
void tridiag_solve(Tridiag H, std::vector<double> rhs, size_t lo, size_t hi,
                   std::vector<double>& x) {
  const size_t n = rhs.size();
  x.assign(n, 0.0);
  if (hi < lo) return;
  for (size_t i = lo + 1; i <= hi; ++i) {
    const double m = H.lo[i] / H.di[i - 1];
    H.di[i] -= m * H.up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  x[hi] = rhs[hi] / H.di[hi];
  for (size_t i = hi; i-- > lo;) x[i] = (rhs[i] - H.up[i] * x[i + 1]) / H.di[i];
}

double residual_sup(const std::vector<double>& grad,
                    const std::vector<double>& t, size_t lo, size_t hi) {
  double r = 0.0;
  for (size_t i = lo; i <= hi; ++i) {
    const double hbar =
        0.5 * ((i + 1 < t.size() ? t[i + 1] - t[i] : 0.0) +
               (i > 0 ? t[i] - t[i - 1] : 0.0));
    r = std::max(r, std::abs(grad[i]) / hbar);
  }
  return r;
}

}  // namespace

Solution1D minimize_bvp(const PotentialSpec& spec,
                        const WeightedProblem1D& pb, const GridSpec1D& gs,
                        const std::vector<double>* warm_start,
                        const std::vector<std::vector<double>>* candidates) {
  return minimize_bvp_on_grid(spec, pb,
                              make_graded_grid(pb.weight.T, pb.eps, gs),
                              warm_start, candidates);
}

Solution1D minimize_bvp_on_grid(
    const PotentialSpec& spec, const WeightedProblem1D& pb,
    std::vector<double> grid, const std::vector<double>* warm_start,
    const std::vector<std::vector<double>>* candidates) {
  if (pb.eps < 1e-4)
    throw std::invalid_argument("minimize_bvp: eps below the 1e-4 solver floor");
  if (!pb.natural_right_bc) {
    const int ng = 1024;
    for (int i = 0; i <= ng; ++i)
      if (!(pb.weight.omega(pb.weight.T * i / ng) > 0))
        throw std::invalid_argument("minimize_bvp: weight must be positive");
  }

  Solution1D sol;
  sol.grid = std::move(grid);
  sol.eps = pb.eps;
  const size_t n = sol.grid.size();
  const size_t lo = 1;
  const size_t hi = pb.natural_right_bc ? n - 1 : n - 2;

  auto clamp_bc = [&](std::vector<double>& v) {
    for (auto& x : v) x = std::clamp(x, spec.a, spec.b);
    v.front() = pb.alpha_eps;
    if (!pb.natural_right_bc) v.back() = pb.beta_eps;
  };

  // Assemble the basin list: warm start, user candidates, constant b.
  std::vector<std::vector<double>> starts;
  if (warm_start) {
    if (warm_start->size() != n)
      throw std::invalid_argument("minimize_bvp: warm start size mismatch");
    starts.push_back(*warm_start);
  }
  if (candidates)
    for (const auto& c : *candidates) {
      if (c.size() != n)
        throw std::invalid_argument("minimize_bvp: candidate size mismatch");
      starts.push_back(c);
    }
  starts.emplace_back(n, spec.b);
  if (!warm_start && !candidates) {
    // Linear fallback between the boundary data.
    std::vector<double> lin(n);
    for (size_t i = 0; i < n; ++i) {
      const double s = sol.grid[i] / pb.weight.T;
      lin[i] = pb.alpha_eps * (1 - s) + pb.beta_eps * s;
    }
    starts.insert(starts.begin(), lin);
  }
  for (auto& s : starts) clamp_bc(s);

  const double res_accept = 1e-10;
  std::vector<double> grad, step;
  Tridiag H;

  auto newton_from = [&](std::vector<double> v, Solution1D& out) {
    clamp_bc(v);
    energy_gradient(spec, pb, sol.grid, v, grad);
    double res = residual_sup(grad, sol.grid, lo, hi);
    int it = 0;
    for (; it < 200 && res > res_accept; ++it) {
      energy_hessian(spec, pb, sol.grid, v, H);
      std::vector<double> rhs = grad;
      for (auto& r : rhs) r = -r;
      tridiag_solve(H, rhs, lo, hi, step);
      double damping = 1.0;
      bool improved = false;
      for (int half = 0; half < 40; ++half) {
        std::vector<double> trial = v;
        for (size_t i = lo; i <= hi; ++i) trial[i] += damping * step[i];
        clamp_bc(trial);
        energy_gradient(spec, pb, sol.grid, trial, grad);
        const double tr = residual_sup(grad, sol.grid, lo, hi);
        if (tr < res || tr < res_accept) {
          v = std::move(trial);
          res = tr;
          improved = true;
          break;
        }
        damping *= 0.5;
      }
      if (!improved) break;
    }
    out.values = std::move(v);
    out.residual_norm = res;
    out.newton_iterations = it;
    return res <= res_accept;
  };

  bool have = false;
  Solution1D best;
  for (const auto& s0 : starts) {
    Solution1D cur = sol;
    if (!newton_from(s0, cur)) {
      ++sol.restarts;
      continue;
    }
    const double e = discrete_energy(spec, pb, sol.grid, cur.values);
    if (!have ||
        e < discrete_energy(spec, pb, sol.grid, best.values) - 1e-14) {
      best = cur;
      have = true;
    }
  }
  if (!have) {
    std::ostringstream os;
    os << "minimize_bvp: Newton diverged from every start (eps=" << pb.eps
       << ", n=" << n << ")";
    throw std::runtime_error(os.str());
  }
  best.grid = sol.grid;
  best.eps = pb.eps;
  best.accepted = true;
  best.restarts = sol.restarts;

  // Global-minimum heuristic: the accepted iterate must not lose to any
  // supplied candidate on the same grid.
  if (candidates) {
    const double e_best = discrete_energy(spec, pb, best.grid, best.values);
    for (const auto& c : *candidates) {
      auto cc = c;
      clamp_bc(cc);
      if (discrete_energy(spec, pb, best.grid, cc) < e_best - 1e-9) {
        best.accepted = false;
        best.note = "candidate basin beats the Newton iterate";
      }
    }
  }
  return best;
}

double JumpCandidate::value_at(double t, double a, double b) const {
  double v = v0;
  for (double j : jumps) {
    if (t < j) break;
    v = (v == a) ? b : a;
  }
  return v;
}

double first_order_energy(const PotentialSpec& spec, const JumpCandidate& cand,
                          const Weight& weight, double alpha, double beta) {
  const double cw = compute_cw(spec);
  double e = 0.0;
  for (double tj : cand.jumps) e += cw * weight.omega(tj);
  const double v0 = cand.value_at(0.0, spec.a, spec.b);
  const double vT = cand.value_at(weight.T, spec.a, spec.b);
  e += geodesic_distance(spec, v0, alpha) * weight.omega(0.0);
  e += geodesic_distance(spec, vT, beta) * weight.omega(weight.T);
  return e;
}

BruteForceResult brute_force_g1_minimizer(const PotentialSpec& spec,
                                          const Weight& weight, double alpha,
                                          double beta, int max_jumps,
                                          int grid_nodes) {
  if (max_jumps > 3)
    throw std::invalid_argument("brute_force_g1_minimizer: max_jumps <= 3");
  if (grid_nodes > 400)
    throw std::invalid_argument("brute_force_g1_minimizer: grid <= 400 nodes");

  const double cw = compute_cw(spec);
  const double w0 = weight.omega(0.0), wT = weight.omega(weight.T);
  std::vector<double> tj(grid_nodes - 1), wj(grid_nodes - 1);
  for (int i = 1; i < grid_nodes; ++i) {
    tj[i - 1] = weight.T * i / grid_nodes;
    wj[i - 1] = weight.omega(tj[i - 1]);
  }
  const double da_alpha = geodesic_distance(spec, spec.a, alpha);
  const double db_alpha = geodesic_distance(spec, spec.b, alpha);
  const double da_beta = geodesic_distance(spec, spec.a, beta);
  const double db_beta = geodesic_distance(spec, spec.b, beta);

  BruteForceResult out;
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  auto consider = [&](double v, double v0, std::vector<double> jumps) {
    if (v < best) {
      second = best;
      best = v;
      out.argmin.v0 = v0;
      out.argmin.jumps = std::move(jumps);
    } else if (v < second) {
      second = v;
    }
  };

  const int m = grid_nodes - 1;
  for (int start_b = 0; start_b <= 1; ++start_b) {
    const double v0 = start_b ? spec.b : spec.a;
    const double bc0 = start_b ? db_alpha : da_alpha;
    // 0 jumps: trace value at T equals the starting phase.
    consider(bc0 * w0 + (start_b ? db_beta : da_beta) * wT, v0, {});
    if (max_jumps >= 1) {
      for (int i = 0; i < m; ++i) {
        const bool end_b = !start_b;
        const double v = bc0 * w0 + cw * wj[i] +
                         (end_b ? db_beta : da_beta) * wT;
        consider(v, v0, {tj[i]});
      }
    }
    if (max_jumps >= 2) {
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
          const bool end_b = start_b;
          const double v = bc0 * w0 + cw * (wj[i] + wj[j]) +
                           (end_b ? db_beta : da_beta) * wT;
          consider(v, v0, {tj[i], tj[j]});
        }
      }
    }
    if (max_jumps >= 3) {
      for (int i = 0; i < m; ++i) {
        const double ci = cw * wj[i];
        for (int j = i + 1; j < m; ++j) {
          const double cj = ci + cw * wj[j];
          for (int k = j + 1; k < m; ++k) {
            const bool end_b = !start_b;
            const double v = bc0 * w0 + cj + cw * wj[k] +
                             (end_b ? db_beta : da_beta) * wT;
            consider(v, v0, {tj[i], tj[j], tj[k]});
          }
        }
      }
    }
  }
  out.value = best;
  out.margin = second - best;

  // Sufficient condition for constant b to win: the weight drop below
  // omega(0) stays under (1/2) (C_W - d_W(alpha,b)) / C_W * omega(0),
  // with beta = b.
  const double drop = weight.drop();
  const bool beta_is_b = std::abs(beta - spec.b) < 1e-12;
  out.regime_holds =
      beta_is_b && drop < 0.5 * (cw - db_alpha) / cw * w0;
  out.constant_b_wins =
      out.argmin.jumps.empty() && out.argmin.v0 == spec.b;
  if (out.regime_holds && !out.constant_b_wins)
    throw std::runtime_error(
        "brute_force_g1_minimizer: constant b lost inside its regime");
  return out;
}

bool MinimizerDiagnostics::all_pass() const {
  for (const auto& i : items)
    if (!i.pass) return false;
  return true;
}

const DiagnosticItem* MinimizerDiagnostics::find(
    const std::string& name) const {
  for (const auto& i : items)
    if (i.name == name) return &i;
  return nullptr;
}

namespace {

std::vector<double> centered_derivative(const std::vector<double>& t,
                                        const std::vector<double>& v) {
  const size_t n = t.size();
  std::vector<double> d(n, 0.0);
  for (size_t i = 1; i + 1 < n; ++i)
    d[i] = (v[i + 1] - v[i - 1]) / (t[i + 1] - t[i - 1]);
  if (n >= 2) {
    d[0] = (v[1] - v[0]) / (t[1] - t[0]);
    d[n - 1] = (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
  }
  return d;
}

}  // namespace

double fit_tau0(const PotentialSpec& spec, const WellConstants& wc,
                const Solution1D& sol) {
  const auto dv = centered_derivative(sol.grid, sol.values);
  const double e2 = sol.eps * sol.eps;
  const double s2 = wc.sigma * wc.sigma;
  const double sqe = std::sqrt(sol.eps);
  double tau = 0.5;
  for (size_t i = 1; i + 1 < sol.grid.size(); ++i) {
    const double v = sol.values[i];
    const double dv2 = e2 * dv[i] * dv[i];
    if (v >= wc.alpha_minus) {
      const double gap = spec.b - v;
      const bool ok = 0.5 * s2 * gap * gap <= dv2 + 1e-14 &&
                      dv2 <= 1.5 / s2 * gap * gap + 1e-14;
      if (!ok) tau = std::max(tau, gap / sqe);
    }
    if (v <= wc.beta_minus) {
      const double gap = v - spec.a;
      const bool ok = 0.5 * s2 * gap * gap <= dv2 + 1e-14 &&
                      dv2 <= 1.5 / s2 * gap * gap + 1e-14;
      if (!ok) tau = std::max(tau, gap / sqe);
    }
  }
  return 1.1 * tau;
}

MinimizerDiagnostics check_minimizer_properties(const PotentialSpec& spec,
                                                const WellConstants& wc,
                                                const Solution1D& sol,
                                                const WeightedProblem1D& pb,
                                                int k, double tau0) {
  if (!sol.accepted)
    throw std::invalid_argument(
        "check_minimizer_properties: solution not accepted");
  MinimizerDiagnostics diag;
  const auto& t = sol.grid;
  const auto& v = sol.values;
  const size_t n = t.size();
  const double eps = sol.eps;
  if (tau0 <= 0.0) tau0 = fit_tau0(spec, wc, sol);

  // (i) bounds; interior strictness is meaningful only up to the machine
  // saturation of the exponential tail (v rounds to b there), so equality
  // within an ulp-scale band counts as saturated, not as a violation.
  {
    bool bounds = true;
    for (size_t i = 0; i < n; ++i)
      if (v[i] < spec.a - 1e-12 || v[i] > spec.b + 1e-12) bounds = false;
    diag.items.push_back({"bounds", bounds, 0.0, ""});
  }

  const auto dv = centered_derivative(t, v);

  // (ii) scaled gradient bound.
  {
    double m = 0.0;
    for (double d : dv) m = std::max(m, std::abs(d));
    diag.eps_max_dv = eps * m;
    diag.items.push_back({"gradient_bound", true, diag.eps_max_dv,
                          "fitted constant, ladder judges stability"});
  }

  // (iii) barrier decay on maximal near-b bands.
  {
    const double rho = spec.b - wc.beta_minus;
    const double mu = decay_rate_mu(spec, rho);
    const double band_hi = pb.beta_eps - std::pow(eps, k);
    bool decay_ok = true;
    double max_diam = 0.0;
    size_t i = 0;
    while (i < n) {
      if (!(v[i] >= wc.beta_minus && v[i] <= band_hi)) {
        ++i;
        continue;
      }
      size_t j = i;
      while (j + 1 < n && v[j + 1] >= wc.beta_minus && v[j + 1] <= band_hi)
        ++j;
      const double p = t[i], q = t[j];
      max_diam = std::max(max_diam, q - p);
      for (size_t m2 = i; m2 <= j; ++m2) {
        const double bound =
            (spec.b - v[i]) * std::exp(-mu * (t[m2] - p) / eps) +
            (spec.b - v[j]) * std::exp(-mu * (q - t[m2]) / eps);
        if (spec.b - v[m2] > bound + 1e-9) decay_ok = false;
      }
      i = j + 1;
    }
    diag.max_layer_diam = max_diam;
    const double cap = eps * std::abs(std::log(eps));
    std::ostringstream os;
    os << "max diam / (eps |log eps|) = " << (cap > 0 ? max_diam / cap : 0.0);
    diag.items.push_back({"barrier_decay", decay_ok, max_diam, os.str()});
  }

  // (iv) equipartition bands away from tau0 sqrt(eps) collars.
  {
    const double s2 = wc.sigma * wc.sigma;
    const double collar = tau0 * std::sqrt(eps);
    bool bands_ok = true;
    double worst = 0.0;
    for (size_t i2 = 1; i2 + 1 < n; ++i2) {
      const double dv2 = eps * eps * dv[i2] * dv[i2];
      if (v[i2] >= wc.alpha_minus && v[i2] <= spec.b - collar) {
        const double gap = spec.b - v[i2];
        if (!(0.5 * s2 * gap * gap <= dv2 + 1e-12 &&
              dv2 <= 1.5 / s2 * gap * gap + 1e-12)) {
          bands_ok = false;
          worst = std::max(worst, gap);
        }
      }
      if (v[i2] >= spec.a + collar && v[i2] <= wc.beta_minus) {
        const double gap = v[i2] - spec.a;
        if (!(0.5 * s2 * gap * gap <= dv2 + 1e-12 &&
              dv2 <= 1.5 / s2 * gap * gap + 1e-12)) {
          bands_ok = false;
          worst = std::max(worst, gap);
        }
      }
    }
    std::ostringstream os;
    os << "tau0=" << tau0;
    if (!bands_ok) os << " worst offending gap " << worst;
    diag.items.push_back({"equipartition", bands_ok, tau0, os.str()});
  }

  // (v) transition times.
  {
    const double band_hi = pb.beta_eps - std::pow(eps, k);
    double r_eps = 0.0, t_eps = 0.0;
    bool found_r = v[0] >= wc.beta_minus, found_t = v[0] >= band_hi;
    for (size_t i2 = 0; i2 < n && !(found_r && found_t); ++i2) {
      if (!found_r && v[i2] >= wc.beta_minus) {
        r_eps = t[i2];
        found_r = true;
      }
      if (!found_t && v[i2] >= band_hi) {
        t_eps = t[i2];
        found_t = true;
      }
    }
    diag.r_eps = found_r ? r_eps : pb.weight.T;
    diag.t_eps = found_t ? t_eps : pb.weight.T;
    bool tail_ok = true;
    if (found_t) {
      const double floor_v = spec.b - tau0 * std::sqrt(eps);
      for (size_t i2 = 0; i2 < n; ++i2)
        if (t[i2] >= diag.t_eps && v[i2] < floor_v - 1e-12) tail_ok = false;
    }
    std::ostringstream os;
    os << "R/eps=" << diag.r_eps / eps
       << " T/(eps|log eps|)=" << diag.t_eps / (eps * std::abs(std::log(eps)));
    diag.items.push_back({"transition_times", found_r && found_t && tail_ok,
                          diag.t_eps, os.str()});
  }

  return diag;
}

RescaledProfileReport rescaled_profile(const Solution1D& sol,
                                       const TransitionProfile& z, double l) {
  RescaledProfileReport rep;
  const double l_max = sol.grid.back() / sol.eps;
  if (l > l_max) {
    rep.clipped = true;
    l = l_max;
  }
  auto interp = CubicHermite::monotone(sol.grid, sol.values);
  const int m = 400;
  for (int i = 0; i <= m; ++i) {
    const double s = l * i / m;
    const double w = interp(s * sol.eps);
    rep.s.push_back(s);
    rep.w.push_back(w);
    rep.sup_distance =
        std::max(rep.sup_distance, std::abs(w - z.eval(s)));
  }
  return rep;
}

std::vector<double> resample_solution(const Solution1D& sol,
                                      const std::vector<double>& grid) {
  auto interp = CubicHermite::monotone(sol.grid, sol.values);
  std::vector<double> out(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) out[i] = interp(grid[i]);
  return out;
}

double second_order_value(const PotentialSpec& spec, const Solution1D& sol,
                          const WeightedProblem1D& pb) {
  const double cw = compute_cw(spec);
  const double dab = geodesic_distance(spec, pb.alpha, spec.b);
  const double w0 = pb.weight.omega(0.0);
  if (!(std::abs(pb.beta - spec.b) < 1e-12) ||
      !(pb.weight.drop() < 0.5 * (cw - dab) / cw * w0))
    throw std::invalid_argument(
        "second_order_value: first-order normalization regime violated");
  return energy_g(spec, sol, pb).g2;
}

}  // namespace layerlab
