#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "layerlab/potential.hpp"
#include "layerlab/profile.hpp"

namespace layerlab {

// Weight on [0, T]; the prototype is the tubular Jacobian 1 + t*kappa.
// min omega > 0 is required for Dirichlet problems; the natural-endpoint
// variant (radial reduction) tolerates omega(T) = 0.
struct Weight {
  double T = 1.0;
  std::function<double(double)> omega;
  std::function<double(double)> domega;
  double holder_d = 1.0;  // declared C^{1,d} regularity of omega
  double omega0 = 0.0;    // admissible drop below omega(0), see drop()

  static Weight affine(double T, double kappa);  // 1 + kappa t
  static Weight constant(double T, double value = 1.0);

  // Measured drop omega(0) - min_(0,T] omega on a dense grid.
  double drop(int grid = 4096) const;
};

struct WeightedProblem1D {
  Weight weight;
  double eps = 0.01;
  double alpha_eps = 0.0, beta_eps = 1.0;  // Dirichlet data
  double alpha = 0.0, beta = 1.0;          // limits
  double gamma = 1.5;                      // |alpha_eps-alpha| <= A0 eps^gamma
  double A0 = 1.0, B0 = 1.0;
  bool natural_right_bc = false;  // free endpoint at t = T (radial oracle)
};

struct GridSpec1D {
  int nodes_per_eps = 64;      // uniform spacing eps/nodes_per_eps in layers
  double layer_widths = 8.0;   // uniform zone [0, layer_widths*eps]
  double growth = 1.12;        // geometric coarsening ratio
  double h_max_frac = 1.0 / 48;  // interior spacing cap, fraction of T
};

// Graded grid clustering at both endpoints; >= 30 nodes in [0, 5 eps] for
// the defaults.
std::vector<double> make_graded_grid(double T, double eps,
                                     const GridSpec1D& gs);

struct Solution1D {
  std::vector<double> grid;
  std::vector<double> values;
  double eps = 0.0;
  double residual_norm = 0.0;  // sup norm of the discrete EL residual
  bool accepted = false;
  int newton_iterations = 0;
  int restarts = 0;
  std::string note;
};

struct EnergyBreakdown {
  double g = 0.0;            // integral of (W(v) + eps^2 v'^2) omega
  double g1 = 0.0;           // g / eps
  double g2 = 0.0;           // (g1 - min_g1_theory) / eps
  double min_g1_theory = 0.0;  // d_W(alpha, b) * omega(0)
  bool underresolved = false;
  bool bc_mismatch = false;  // trace differs from the problem's data
};

// Trapezoid-in-W, midpoint-in-gradient quadrature on the solution grid; the
// same discrete energy whose gradient the Newton solver drives to zero.
EnergyBreakdown energy_g(const PotentialSpec& spec, const Solution1D& sol,
                         const WeightedProblem1D& problem);

// Discrete energy of arbitrary nodal values on a grid (used to compare
// candidates on equal footing).
double discrete_energy(const PotentialSpec& spec, const WeightedProblem1D& pb,
                       const std::vector<double>& grid,
                       const std::vector<double>& values);

// Damped Newton on the discrete Euler-Lagrange system
//   2 eps^2 (v' omega)' = W'(v) omega
// with Dirichlet data (or a natural right endpoint). Solver floor
// eps >= 1e-4. Candidates (sampled on the same grid) act as alternative
// basins: if one beats the converged iterate's energy, Newton restarts from
// it. Throws on Newton divergence after all restarts.
Solution1D minimize_bvp(
    const PotentialSpec& spec, const WeightedProblem1D& problem,
    const GridSpec1D& gs,
    const std::vector<double>* warm_start = nullptr,
    const std::vector<std::vector<double>>* candidates = nullptr);

// Same solver on a caller-supplied grid (mesh-refinement studies).
Solution1D minimize_bvp_on_grid(
    const PotentialSpec& spec, const WeightedProblem1D& problem,
    std::vector<double> grid,
    const std::vector<double>* warm_start = nullptr,
    const std::vector<std::vector<double>>* candidates = nullptr);

// {a,b}-valued candidate: starts at v0, flips at each jump time.
struct JumpCandidate {
  double v0 = 0.0;
  std::vector<double> jumps;
  double value_at(double t, double a, double b) const;
};

// Sharp-interface first-order energy
//   C_W Sum omega(t_k) + d_W(v(0),alpha) omega(0) + d_W(v(T),beta) omega(T).
double first_order_energy(const PotentialSpec& spec, const JumpCandidate& cand,
                          const Weight& weight, double alpha, double beta);

struct BruteForceResult {
  JumpCandidate argmin;
  double value = 0.0;
  double margin = 0.0;  // runner-up value minus argmin value
  bool constant_b_wins = false;
  bool regime_holds = false;  // weight-drop smallness sufficient condition
};

// Exhaustive enumeration of candidates with at most max_jumps jumps on a
// uniform interior grid. When the weight-drop regime holds, asserts the
// argmin is the constant b (throws otherwise).
BruteForceResult brute_force_g1_minimizer(const PotentialSpec& spec,
                                          const Weight& weight, double alpha,
                                          double beta, int max_jumps,
                                          int grid_nodes);

struct DiagnosticItem {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct MinimizerDiagnostics {
  std::vector<DiagnosticItem> items;
  double eps_max_dv = 0.0;       // eps * max |v'|
  double max_layer_diam = 0.0;   // largest barrier-band interval
  double r_eps = 0.0;            // first time v reaches beta_minus
  double t_eps = 0.0;            // first time v reaches beta_eps - eps^k
  bool all_pass() const;
  const DiagnosticItem* find(const std::string& name) const;
};

// Fits the equipartition threshold tau0 on a solved problem: smallest value
// (with 10% headroom, floored at 0.5) for which the two-sided bands hold
// wherever they are claimed.
double fit_tau0(const PotentialSpec& spec, const WellConstants& wc,
                const Solution1D& sol);

// The five minimizer diagnostics: bounds with interior strictness, gradient
// bound, barrier decay on the near-b bands with diam O(eps |log eps|),
// two-sided equipartition bands, and transition-time bounds.
MinimizerDiagnostics check_minimizer_properties(const PotentialSpec& spec,
                                                const WellConstants& wc,
                                                const Solution1D& sol,
                                                const WeightedProblem1D& pb,
                                                int k = 2, double tau0 = 0.0);

struct RescaledProfileReport {
  std::vector<double> s;
  std::vector<double> w;  // v(eps s)
  double sup_distance = 0.0;
  bool clipped = false;  // l exceeded T/eps
};

// w_eps(s) = v(eps s) on [0, l], compared in sup norm against the solved
// transition profile z_alpha.
RescaledProfileReport rescaled_profile(const Solution1D& sol,
                                       const TransitionProfile& z, double l);

// Nodal values of a solution re-sampled onto another grid (monotone cubic).
std::vector<double> resample_solution(const Solution1D& sol,
                                      const std::vector<double>& grid);

// G2 of an accepted solution; refuses when the weight-drop regime required
// for the first-order normalization fails.
double second_order_value(const PotentialSpec& spec, const Solution1D& sol,
                          const WeightedProblem1D& pb);

}  // namespace layerlab
