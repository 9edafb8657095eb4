#pragma once

// Evolution state and trajectory containers. The matter sector is evolved
// in first-order form with the densitized momenta
//
//   Pi_X  = e^{beta-alpha} dX/dt,   Phi_X = dX/dr,   X in {gamma, phi},
//
// which removes the explicit alpha_t, beta_t coefficients from the wave
// equations and makes the Hamiltonian constraint independent of alpha.
// The gauge pair (alpha, beta) is re-solved from the constraints at every
// stage, never evolved.

#include <string>
#include <vector>

#include "ekg/grid.hpp"

namespace ekg {

struct CauchyState {
  double t = 0.0;
  double mass = 0.0;
  ScalarField gamma, phi;        // even wave fields
  ScalarField pi_gamma, pi_phi;  // even densitized time derivatives
  ScalarField gamma_r, phi_r;    // odd radial derivatives (reduction variables)
  ScalarField alpha, beta;       // even gauge, alpha(0) = beta(0) = 0

  int n_nodes() const { return static_cast<int>(gamma.size()); }
};

struct Trajectory {
  RadialGrid grid;
  double mass = 0.0;
  double courant = 0.5;

  std::vector<CauchyState> snapshots;  // stored at cadence + final time
  std::vector<int> snapshot_steps;

  std::vector<double> step_times;  // size n_steps + 1
  std::vector<double> dts;         // size n_steps

  // e^{alpha - beta} on the grid at every step time (characteristic speed,
  // consumed by the null-chart transport and the ray-tracing oracles).
  std::vector<std::vector<double>> speed_history;

  // Causally clean conservation record: boundary of the diagnostic ball.
  int r_diag_index = 0;
  std::vector<double> boundary_flux;     // 2 pi (r e^alpha mhat)(r_diag) per step time
  std::vector<double> conserved_energy;  // E(t, r_diag) + accumulated flux, per step time

  std::string stop_reason;  // empty when the run completed

  double t_end() const { return step_times.empty() ? 0.0 : step_times.back(); }
  bool completed() const { return stop_reason.empty(); }
  double snapshot_dt() const {
    return snapshots.size() > 1 ? snapshots[1].t - snapshots[0].t : 0.0;
  }
};

}  // namespace ekg
