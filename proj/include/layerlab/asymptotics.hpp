#pragma once

#include <string>
#include <vector>

#include "layerlab/geometry.hpp"
#include "layerlab/oned.hpp"
#include "layerlab/pde2d.hpp"
#include "layerlab/potential.hpp"
#include "layerlab/recovery.hpp"

namespace layerlab {

struct EpsilonLadder {
  std::vector<double> eps;  // strictly decreasing

  static EpsilonLadder standard_2d();  // {0.08, 0.04, 0.02, 0.01, 0.005}
  static EpsilonLadder standard_1d();  // {0.04, 0.02, 0.01, 0.005, 0.002}
  void validate(size_t min_entries = 4) const;
};

// First-order coefficient: boundary integral of d_W(b, g). Refuses when the
// datum dips to alpha_bar or below (the constant-b normalization would be
// wrong).
double theory_c1(const PotentialSpec& spec, const BoundaryGeometry& geom,
                 const DirichletData& data);

// Second-order coefficient: boundary integral of kappa(y) c2(g(y)).
double theory_c2(const PotentialSpec& spec, const WellConstants& wc,
                 const BoundaryGeometry& geom, const DirichletData& data);

struct CoefficientFit {
  // Primary route: (F - eps c1_theory)/eps^2, Richardson-extrapolated with a
  // fitted correction order p.
  double c2_hat = 0.0;
  double c2_uncertainty = 0.0;
  double c1_hat = 0.0;
  double c1_uncertainty = 0.0;
  double p_fit = 0.0;
  bool pre_asymptotic = false;
  // Secondary route: unconstrained least squares against (eps, eps^2).
  double c1_ls = 0.0, c2_ls = 0.0;
  double c1_ls_unc = 0.0, c2_ls_unc = 0.0;
  bool consistent = false;
};

CoefficientFit extract_coefficients(const std::vector<double>& eps,
                                    const std::vector<double>& energies,
                                    double c1_theory);

struct LadderRow2D {
  double eps = 0.0;
  double F = 0.0;         // working-grid energy
  double F_refined = 0.0; // bisected-grid energy
  double F_extrap = 0.0;  // mesh-Richardson value used for extraction
  double f2 = 0.0;
  double f2_recovery = 0.0;
  double radial_gap = -1.0;  // radial oracle, disk with constant data only
  bool max_principle = false;
  bool decay_pass = false;
  bool decay_floor = false;
  double decay_mu = 0.0;
  double eps_max_grad = 0.0;
  bool levelset_pass = false;
  SolveInfo2D solve;
};

struct ExpansionReport {
  double c1_theory = 0.0;
  double c2_theory = 0.0;
  CoefficientFit fit;
  std::vector<LadderRow2D> rows;
  bool regime_ok = false;
  bool pass = false;
  std::vector<std::string> failures;

  std::string table() const;  // human-readable convergence table
};

struct ExpansionOptions {
  double c1_rel_tol = 0.01;
  double c2_rel_tol = 0.10;
  double radial_gap_tol = 0.005;
  double mu_drift_tol = 0.25;   // relative spread of fitted decay rates
  double grad_drift_tol = 2.0;  // max/min of eps*max|grad u|
  double level_lambda = 0.5;
  int jobs = 1;
  GridSpec2D grid;
};

// The headline verification: solves the ladder (each rung on a grid and its
// bisection), runs every field diagnostic, extracts coefficients, and
// applies the acceptance thresholds.
ExpansionReport verify_expansion(const PotentialSpec& spec,
                                 const WellConstants& wc,
                                 const BoundaryGeometry& geom,
                                 const DirichletData& data,
                                 const EpsilonLadder& ladder,
                                 const ExpansionOptions& opt = {});

struct OneDLadderRow {
  double eps = 0.0;
  double g = 0.0, g1 = 0.0, g2 = 0.0;
  double g2_extrap = 0.0;
  double g2_recovery = 0.0;
  double residual = 0.0;
  bool checks_passed = false;
  bool sandwich_ok = false;  // recovery above minimizer on the same grid
};

struct OneDLadderResult {
  std::vector<OneDLadderRow> rows;
  double g2_limit_estimate = 0.0;  // Richardson over the rung values
  double target = 0.0;             // omega'(0) c2(alpha)
  double rel_error = 0.0;
  bool regime_ok = false;
  bool pass = false;
};

// Second-order 1D ladder: continuation-in-eps warm starts, per-rung mesh
// Richardson, recovery-candidate squeeze, and extrapolation against the
// profile coefficient.
OneDLadderResult run_oned_ladder(const PotentialSpec& spec,
                                 const WellConstants& wc, double T,
                                 double kappa, double alpha, double gamma,
                                 const EpsilonLadder& ladder,
                                 const GridSpec1D& gs = {},
                                 const DeltaSchedule& schedule =
                                     DeltaSchedule::power(2.0),
                                 double rel_tol = 0.05);

}  // namespace layerlab
