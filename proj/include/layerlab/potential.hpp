#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace layerlab {

// Double-well potential with wells a < b, an interior saddle c of W', and
// smooth first/second derivatives. The builtin quartic
// W(s) = lambda (s-a)^2 (s-b)^2 is the default everywhere because it admits
// closed-form cross-checks.
struct PotentialSpec {
  double a = -1.0;
  double b = 1.0;
  std::function<double(double)> w;
  std::function<double(double)> dw;
  std::function<double(double)> ddw;
  std::string description;

  static PotentialSpec quartic(double a, double b, double lambda = 1.0);
  static PotentialSpec custom(double a, double b,
                              std::function<double(double)> w,
                              std::function<double(double)> dw,
                              std::function<double(double)> ddw,
                              std::string description = "custom");
};

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  std::string detail;  // witnessing grid point on failure
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  double saddle = std::numeric_limits<double>::quiet_NaN();
  bool all_pass() const;
};

// Grid validation of the structural hypotheses: two nondegenerate zeros of W,
// W' with sign pattern (+ on (a,c), - on (c,b)), W'' signs at a, b, c, and
// W' -> +-inf sampled at +-10(b-a) offsets. grid_size >= 1000.
HypothesisReport validate_hypotheses(const PotentialSpec& spec,
                                     int grid_size = 2000);

// Saddle of W' in (a,b): the sign change of W' located by bisection.
double find_saddle(const PotentialSpec& spec);

// Geodesic distance d_W(r,s) = 2|int_r^s W^{1/2}|, finite only when one
// endpoint is a well; otherwise returns +infinity (the definition's
// sentinel). Arguments must lie in [a-1, b+1].
double geodesic_distance(const PotentialSpec& spec, double r, double s);

// C_W = d_W(a, b).
double compute_cw(const PotentialSpec& spec);

// Largest sigma in (0,1] (bisection to 1e-6) such that
//   sigma^2 (b-s)^2 <= W(s) <= sigma^-2 (b-s)^2   on [alpha_minus, b+1]
//   sigma^2 (s-a)^2 <= W(s) <= sigma^-2 (s-a)^2   on [a-1, beta_minus]
// certified on a dense grid (1e4 points per unit). Throws if no
// sigma > 1e-8 exists.
double compute_sigma(const PotentialSpec& spec, double alpha_minus,
                     double beta_minus);

// Balanced value: unique root of phi(alpha) = d_W(a,alpha) - d_W(alpha,b),
// bisection until |phi| <= 1e-10.
double compute_alpha_bar(const PotentialSpec& spec);

// Sufficient condition for the constant b to be the unique first-order
// minimizer: g_min > alpha_bar (strict).
bool check_b_unique_minimizer(const PotentialSpec& spec, double g_min);

// Linearization rate at the right well:
//   mu_rho^2 = (1/2) inf_{b-rho <= s < b} (W'(b) - W'(s)) / (b - s),
// for 0 < rho < b - c. The comparison argument needs the infimum of the
// quotient; positivity follows from W''(b) > 0. Throws if the infimum is
// nonpositive or rho is out of range.
double decay_rate_mu(const PotentialSpec& spec, double rho);

struct WellConstants {
  double sigma = 0.0;
  double cw = 0.0;
  double alpha_bar = 0.0;
  double alpha_minus = 0.0;
  double beta_minus = 0.0;
  double saddle = 0.0;
};

// Bundles the derived constants with the default separation thresholds
// alpha_minus = a + (b-a)/4, beta_minus = b - (b-a)/4.
WellConstants compute_well_constants(const PotentialSpec& spec);
WellConstants compute_well_constants(const PotentialSpec& spec,
                                     double alpha_minus, double beta_minus);

}  // namespace layerlab
