#pragma once

#include <vector>

#include "layerlab/geometry.hpp"
#include "layerlab/oned.hpp"
#include "layerlab/potential.hpp"
#include "layerlab/profile.hpp"

namespace layerlab {

// Regularization schedule delta_eps.
struct DeltaSchedule {
  enum class Kind { Power, Log, Linear };
  Kind kind = Kind::Power;
  double m = 2.0;

  double delta(double eps) const;
  // Remainder-clean second-order recovery needs power/log with m >= 2.
  bool second_order_conforming() const;
  static DeltaSchedule power(double m = 2.0) { return {Kind::Power, m}; }
  static DeltaSchedule log(double m = 2.0) { return {Kind::Log, m}; }
  static DeltaSchedule linear() { return {Kind::Linear, 1.0}; }
};

// Explicit near-minimizer: inverse of the regularized time map glued to the
// constant beta_eps after T_eps. Monotone between the boundary data.
struct RecoveryCandidate1D {
  double eps = 0.0;
  double delta = 0.0;
  double t_eps = 0.0;
  double alpha_eps = 0.0, beta_eps = 0.0;
  int sign = +1;  // +1 increasing branch, -1 decreasing
  CubicHermite psi;  // r -> time, monotone in the transition direction
  bool degenerate = false;

  double value(double t) const;
  std::vector<double> sample(const std::vector<double>& grid) const;
  // sup over [0, T_eps] of |eps v' -+ (delta + W(v))^{1/2}| with v' by
  // high-order finite differences of value().
  double ode_residual_sup(const PotentialSpec& spec, int probes = 200) const;
};

RecoveryCandidate1D build_recovery_1d(const PotentialSpec& spec,
                                      const WeightedProblem1D& problem,
                                      const DeltaSchedule& schedule);

struct LimsupReport {
  double g2 = 0.0;  // second-order energy of the candidate
  struct Row {
    double l = 0.0;
    double leading = 0.0;   // omega'(0) int_0^l 2 W(p_eps) t dt
    double residual = 0.0;  // g2 - leading
  };
  std::vector<Row> rows;
};

// Evaluates the candidate's G2 and the l-resolved leading term; the caller
// fits the residual envelope across the ladder.
LimsupReport evaluate_limsup_bound(const PotentialSpec& spec,
                                   const RecoveryCandidate1D& cand,
                                   const WeightedProblem1D& problem,
                                   const std::vector<double>& l_grid);

struct MultiTransitionResult {
  std::vector<double> grid;
  std::vector<double> values;
  double g1 = 0.0;           // measured first-order energy
  double g1_limit = 0.0;     // sharp-interface formula
  double min_gap = 0.0;      // smallest separation between layer supports
};

// Assembles the multi-transition candidate: boundary piece alpha_eps ->
// starting phase, interior transitions riding the signed distance to the
// jump set, boundary piece at T. Throws if layers overlap at this eps.
MultiTransitionResult multi_transition_recovery(
    const PotentialSpec& spec, const std::vector<double>& jump_times,
    bool start_at_b, const WeightedProblem1D& problem,
    const DeltaSchedule& schedule);

// Fiber-wise 2D recovery on the tubular grid: u(y, t) = v_eps^y(t) with
// alpha_eps = g_eps(y), constant b past the layer; carries the measured
// tangential-energy term.
struct RecoveryField2D {
  std::vector<double> thetas;
  std::vector<RecoveryCandidate1D> fibers;
  double delta_tube = 0.0;
  double t_eps_max = 0.0;
  double tangential_term = 0.0;  // int |grad_tau g|^2-weighted layer energy
  double f2 = 0.0;               // second-order energy of the field

  double value(double theta, double dist) const;  // nearest-fiber evaluation
};

RecoveryField2D build_recovery_2d(const PotentialSpec& spec,
                                  const BoundaryGeometry& geom,
                                  const std::function<double(double)>& g_eps,
                                  const std::function<double(double)>& dg_eps,
                                  double eps, const DeltaSchedule& schedule,
                                  double delta_tube, int n_theta = 128);

}  // namespace layerlab
