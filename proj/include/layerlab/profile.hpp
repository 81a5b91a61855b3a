#pragma once

#include <vector>

#include "layerlab/interp.hpp"
#include "layerlab/potential.hpp"

namespace layerlab {

// Heteroclinic transition profile: z' = W^{1/2}(z), z(0) = alpha, sampled on
// the adaptive integrator's accepted steps and interpolated with exact
// slopes. Beyond the integration window eval() returns the analytic
// upper-decay extension toward b rather than extrapolated samples.
struct TransitionProfile {
  double alpha = 0.0;
  double sigma = 0.0;      // comparison constant used by the decay sandwich
  double alpha_minus = 0.0;
  double b_value = 0.0;    // right well
  std::vector<double> t;
  std::vector<double> z;
  bool sandwich_applicable = false;  // alpha >= alpha_minus

  double eval(double time) const;
  double t_max() const { return t.empty() ? 0.0 : t.back(); }

  CubicHermite interp;  // t -> z with exact slopes W^{1/2}(z)
};

// Integrates the profile ODE with embedded RK45 step control at absolute
// tolerance tol (<= 1e-8), then cross-checks every accepted sample against
// the independent time map t(r) = int_alpha^r W^{-1/2} computed by
// quadrature; the two must agree to 10*tol. Throws on step-size collapse,
// reporting the last good time.
TransitionProfile solve_profile(const PotentialSpec& spec,
                                const WellConstants& wc, double alpha,
                                double t_max, double tol);

// Second-order coefficient c2(alpha) = int_0^inf 2 W^{1/2}(z) z' s ds,
// computed along the solved profile (route A, with an analytically certified
// exponential tail) and by the change of variables
// int_alpha^b 2 W^{1/2}(r) t(r) dr (route B, quadrature time map).
// Hard failure if the routes disagree beyond 10*tol; returns route B.
double second_order_coefficient(const PotentialSpec& spec,
                                const WellConstants& wc, double alpha,
                                double tol = 1e-9);

struct RouteValues {
  double route_a = 0.0;
  double route_b = 0.0;
  double discrepancy = 0.0;
};
RouteValues second_order_coefficient_routes(const PotentialSpec& spec,
                                            const WellConstants& wc,
                                            double alpha, double tol = 1e-9);

struct DecayBoundReport {
  bool pass = false;
  int violations = 0;
  double min_upper_margin = 0.0;  // min over samples of upper bound - (b-z)
  double min_lower_margin = 0.0;  // min over samples of (b-z) - lower bound
  double worst_t = 0.0;
};

// Two-sided exponential sandwich
//   (b-alpha) e^{-t/sigma} <= b - z(t) <= (b-a) e^{-sigma t}
// asserted at every stored sample. Requires alpha >= alpha_minus.
DecayBoundReport verify_decay_bounds(const TransitionProfile& profile,
                                     const PotentialSpec& spec);

// Regularized time map Psi(r) = int_{alpha_eps}^{r} eps (delta + W)^{-1/2},
// tabulated on a grid geometrically refined toward b, with
// T_eps = Psi(b) and the fitted constant c0 = T_eps / (eps |log delta|).
struct RegularizedProfile {
  double eps = 0.0;
  double delta_eps = 0.0;
  double alpha_eps = 0.0;
  double t_eps = 0.0;
  double c0_fitted = 0.0;
  CubicHermite psi;      // r -> Psi(r), strictly increasing
  bool degenerate = false;  // alpha_eps == b

  double eval_psi(double r) const;
  double invert(double time) const;  // v_eps(t), clamped to [alpha_eps, b]
};

RegularizedProfile regularized_psi(const PotentialSpec& spec, double alpha_eps,
                                   double delta_eps, double eps);

struct LogBoundRow {
  double delta = 0.0;
  double integral = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double ratio = 0.0;  // integral / ((sigma/2) |log delta|)
  bool pass = false;
};
struct LogBoundReport {
  std::vector<LogBoundRow> rows;
  bool all_pass() const;
};

// Log-asymptotics of int_alpha^beta (delta + W)^{-1/2}: the quadratic
// comparison near b gives
//   -(sigma/2) log(sigma^2 delta) + sigma log(b-alpha)
//       - sigma log(1 + 2 (b-beta)/(sigma delta^{1/2}))
//   <= I(delta) <=
//   -(1/(2 sigma)) log(min(delta/sigma^2, 1)) + (1/sigma) log(1 + 2(b-a)).
// Valid for alpha_minus <= alpha <= beta <= b and 0 < delta <= 1/sigma.
LogBoundReport check_log_asymptotics(const PotentialSpec& spec,
                                     const WellConstants& wc,
                                     const std::vector<double>& deltas,
                                     double alpha, double beta);

struct DifferenceBoundReport {
  std::vector<double> deltas;
  std::vector<double> values;
  double sup = 0.0;
  bool bounded = false;  // no growth trend as delta -> 0
};

// delta-uniform bound on
//   int [ 2/((delta+W)^{1/2} + W^{1/2}) - 1/(delta+W)^{1/2} ].
DifferenceBoundReport check_difference_bound(const PotentialSpec& spec,
                                             const std::vector<double>& deltas,
                                             double alpha_eps,
                                             double beta_eps);

// Quadrature time map t(r) = int_alpha^r W^{-1/2}(rho) drho tabulated on a
// grid geometrically refined toward b (exposed for the recovery module's
// cross-checks).
CubicHermite time_map(const PotentialSpec& spec, double alpha,
                      double r_cut_gap = 1e-12);

}  // namespace layerlab
