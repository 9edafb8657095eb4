#pragma once

// Energies, fluxes, bound certificates and consistency monitors:
//
//   E(t)    = 2 pi int_0^rmax  e r e^beta dr          (total slice energy)
//   E(t,r)  = 2 pi int_0^r     e r' e^beta dr'        (coordinate ball)
//   E^O(t)  = masked ball integral inside a cone J^-(O)
//   Flux    = -2 pi int (e - mhat) e^alpha r_b(t) dt  (ingoing cone boundary)
//
// plus the beta-energy identity e^beta (1 - E(t,r)/2pi) = 1, the
// divergence monitor -d_t(r e^beta e) + d_r(r e^alpha mhat), the null
// flux bounds with constants assembled from measured frame bounds, the
// gamma >= -1 floor and the small-cone gradient monitor.

#include <string>
#include <vector>

#include "ekg/chart.hpp"
#include "ekg/densities.hpp"
#include "ekg/state.hpp"

namespace ekg {

// ---- slice-level diagnostics -------------------------------------------

double total_energy(const CauchyState& s, const RadialGrid& g);

// Cumulative profile E(t, r_i); odd in r by construction of the integral.
ScalarField ball_energy_profile(const CauchyState& s, const RadialGrid& g);

double ball_energy(const CauchyState& s, const RadialGrid& g, double r);

// max over causally clean nodes (r + t <= r_max) of |e^beta (1 - E/2pi) - 1|.
double beta_identity_residual(const CauchyState& s, const RadialGrid& g);

// -d_t(r e^beta e) + d_r(r e^alpha mhat) on a uniform snapshot triplet.
ScalarField divergence_PT(const CauchyState& prev, const CauchyState& mid,
                          const CauchyState& next, const RadialGrid& g);

struct Metric4D {
  ScalarField g_tt, g_rr, g_thth, g_33;  // diagonal 4D components on the slice
};
Metric4D reconstruct_4d_metric(const CauchyState& s, const RadialGrid& g);

// ---- run-level reports ---------------------------------------------------

struct MetricBounds {
  double beta_min = 0, beta_max = 0, alpha_min = 0, alpha_max = 0;
  double beta_inf0 = 0;        // -ln(1 - E(0)/2pi)
  double beta_inf_drift = 0;   // max_t |beta(t, r_diag) - beta(0, r_diag)|
  double beta_bound_excess = 0;  // max_t,r (beta - beta_inf0) over causal nodes
  bool ok = true;              // 0 <= beta <= beta_inf0 + 1e-8 held everywhere causal
};
MetricBounds metric_bounds_report(const Trajectory& traj);

struct ChartBounds {
  double F_min = 0, F_max = 0, G_min = 0, G_max = 0, lam_min = 0, lam_max = 0;
  // entry order: tv, tu, rv, ru, vt, vr, ut, ur
  double jac_lo[8] = {0}, jac_hi[8] = {0};
  double r_over_R_min = 0, r_over_R_max = 0;
  double t_over_T_min = 0, t_over_T_max = 0;  // cone charts only
};
ChartBounds chart_bounds_report(const NullChart& chart, const Trajectory& traj);

struct GammaFloor {
  double gamma_min = 0;
  double shifted_min = 0;  // min over r > 0 of r^{1/2} (gamma + 1)
  bool ok = true;          // gamma_min >= -1 - 1e-6 and shifted_min > 0
};
GammaFloor gamma_floor(const Trajectory& traj);

// ---- cone energetics -------------------------------------------------------

// E^O at snapshot index j (0 for slices past the apex).
double cone_energy(const Trajectory& traj, const ConeRegion& reg, std::size_t snap);

// Flux(P_T) between snapshot times tau = times[j_tau], s = times[j_s];
// nonpositive up to discretization.
double flux_PT(const Trajectory& traj, const ConeRegion& reg, std::size_t j_tau,
               std::size_t j_s);

struct ConeEnergetics {
  std::vector<double> times, energy;      // E^O per snapshot up to the apex
  double max_monotonicity_violation = 0;  // max_j (E^O(t_{j+1}) - E^O(t_j))_+
  double max_stokes_error = 0;            // max_j |E^O(t_j) - E^O(0) - Flux(0, t_j)|
};
ConeEnergetics cone_energetics(const Trajectory& traj, const ConeRegion& reg);

// ---- null flux bounds (slab T0 <= T <= T1) --------------------------------

struct FluxBoundsReport {
  double E0 = 0;                 // total initial energy
  double kappa_u = 0, kappa_v = 0;  // assembled constants for u- and v-lines
  std::vector<double> u_line_flux, v_line_flux;
  double worst_ratio = 0;  // max flux / (kappa E0)
  int violations = 0;
};
FluxBoundsReport null_flux_bounds(const Trajectory& traj, const NullChart& chart, double T0,
                                  double T1, int n_lines = 8);

// ---- cone (T,R) energy ------------------------------------------------------

struct ConeTREnergy {
  double value = 0;      // E~^O(T0)
  double kappa = 0;      // 1 / min_pt C(F, G, lambda)
  double bound = 0;      // kappa * E(0)
  int n_points = 0;
  bool ok = true;
};
ConeTREnergy cone_TR_energy(const Trajectory& traj, const NullChart& cone_chart,
                            const ConeRegion& reg, double T0);

// ---- small-cone gradient monitor -------------------------------------------

struct ConeMonitor {
  double scale = 0;
  double M = 0;      // boundary-data sup on the cone base
  double X = 0;      // sup over the cone of |gamma_v| + |phi_v|
  double X_u = 0;    // u-counterpart
  double ratio = 0;  // max(X, X_u) / M
  int n_cone = 0, n_base = 0;
};
ConeMonitor cone_gradient_monitor(const Trajectory& traj, const NullChart& chart, double T_c,
                                  double R_c, double scale);

// ---- energy time series ------------------------------------------------------

struct EnergySeries {
  std::vector<double> t, E_total, E_cone, gamma_min, beta_max, alpha_min, alpha_max;
};
EnergySeries energy_series(const Trajectory& traj, const ConeRegion* reg = nullptr);

}  // namespace ekg
