#pragma once

// Fully constrained evolution of (gamma, phi) in (t, r). The wave
// equations in first-order form read
//
//   dX/dt     = e^{alpha-beta} Pi_X
//   dPhi_X/dt = d/dr (e^{alpha-beta} Pi_X)
//   dPi_X/dt  = (1/r) d/dr (r e^{alpha-beta} Phi_X) - e^{alpha+beta} S_X
//
// with S_gamma = -(m^2/2) e^{-2gamma} phi^2 and S_phi = m^2 e^{-2gamma} phi.
// The gauge is re-solved from the Hamiltonian constraint (integrating
// factor in e^{-2beta}) and alpha_r = beta_r - m^2 r e^{2beta-2gamma} phi^2
// at every Runge-Kutta stage; the momentum constraint and the second-order
// Einstein equation are kept as convergence monitors.

#include <functional>

#include "ekg/initial_data.hpp"
#include "ekg/state.hpp"

namespace ekg {

struct StateDerivs {
  std::vector<double> gamma, phi, pi_gamma, pi_phi, gamma_r, phi_r;
  void resize(std::size_t n);
};

struct EvolveOptions {
  double t_end = 0.0;
  double courant = 0.5;
  int snapshot_every = 16;  // steps between stored snapshots
  double r_diag = -1.0;     // conservation control radius; default r_max - t_end
  std::function<void(const CauchyState&, int step)> on_snapshot;
};

class CauchyEvolver {
 public:
  CauchyEvolver(RadialGrid grid, double mass);

  const RadialGrid& grid() const { return grid_; }
  double mass() const { return mass_; }

  // Builds the first-order state from an initial data set and solves the gauge.
  CauchyState make_state(const InitialDataSet& data) const;

  // Recomputes (alpha, beta) from the matter variables on the slice.
  void solve_gauge(CauchyState& s) const;

  // Time derivatives of the six matter variables; gauge must be solved.
  void rhs(const CauchyState& s, StateDerivs& out) const;

  // dt = courant * h / max_r e^{alpha-beta}.
  double cfl_dt(const CauchyState& s, double courant) const;

  // One classical RK4 step with the gauge re-solved at every stage and
  // axis parity re-imposed. Throws NumericalError on NaN/Inf.
  void step(CauchyState& s, double dt) const;

  // Repeated stepping with snapshot recording; stops early on numerical
  // failure or gauge singularity, recording the reason in the trajectory.
  Trajectory evolve(const InitialDataSet& data, const EvolveOptions& opt) const;

 private:
  RadialGrid grid_;
  double mass_;
};

// Residual of the momentum constraint beta_t = 2 r gamma_t gamma_r + r phi_t phi_r,
// with beta_t from a centered difference of re-solved gauges on a snapshot triplet
// (uniformly spaced in time).
ScalarField momentum_constraint_residual(const CauchyState& prev, const CauchyState& mid,
                                         const CauchyState& next, const RadialGrid& g);

// Residual of the redundant second-order Einstein equation
//   e^{-2beta} a_rr - e^{-2alpha} b_tt + e^{-2beta} a_r(a_r-b_r)
//     + e^{-2alpha} b_t(a_t-b_t)
//   = -(m^2/2) e^{-2gamma} phi^2 + e^{-2alpha}(gamma_t^2 + phi_t^2/2)
//     - e^{-2beta}(gamma_r^2 + phi_r^2/2)
// on a uniformly spaced snapshot triplet.
ScalarField eq213_residual(const CauchyState& prev, const CauchyState& mid,
                           const CauchyState& next, const RadialGrid& g);

}  // namespace ekg
