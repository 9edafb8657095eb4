#pragma once

// Null coordinate construction on top of an evolved trajectory.
//
// Global chart: u is advected outward and v inward by the transport pair
//   u_t + e^{alpha-beta} u_r = 0,   v_t - e^{alpha-beta} v_r = 0,
// with u = -r, v = r at t = 0 and u = v on the axis. Both are stepped
// with the trajectory's own dt by Heun + second-order upwind stencils;
// under r -> -r the pair swaps, so the axis ghost of u is v and vice
// versa. v has no ingoing data on a finite grid: the outer node is fed by
// the frozen-exterior characteristic value and every node whose ingoing
// characteristic would exit through r_max is masked invalid (the
// conservative mask r + t <= r_max is exact since e^{alpha-beta} <= 1).
//
// Cone chart (apex t_O on the axis): v~ = t* along the ingoing ray that
// reaches the axis at t*, assigned by tracing rays backward from axis
// points; u~ starts from u~ = -v~ on the initial slice and is advected
// outward with axis value u~(t,0) = t.
//
// The frame scalars come from the Jacobian columns,
//   F = alpha + ln(2 dt/dv),  G = alpha + ln(2 dt/du),  2 lambda = F + G,
// with the r-column variants F' = beta + ln(2 dr/dv), G' = beta + ln(-2 dr/du)
// kept as an independent consistency check.

#include <cstdint>

#include "ekg/state.hpp"

namespace ekg {

struct NullChart {
  bool cone = false;
  double t_apex = 0.0;  // cone charts: latest axis time with a traced ray

  std::vector<double> times;  // snapshot times
  std::vector<int> snapshot_steps;
  int n_nodes = 0;
  double h = 0.0, r_max = 0.0;

  // [snapshot][node]
  std::vector<std::vector<double>> u, v;
  std::vector<std::vector<uint8_t>> valid;

  // Jacobian J^{-1} entries (derivatives of (u,v) over (t,r)) and J entries
  // (derivatives of (t,r) over (u,v)); filled by compute_jacobian.
  bool has_jacobian = false;
  std::vector<std::vector<double>> ut, ur, vt, vr;
  std::vector<std::vector<double>> tu, tv, ru, rv;

  // Frame scalars; filled by compute_FG. F_alt/G_alt are the r-column variants.
  bool has_fg = false;
  std::vector<std::vector<double>> F, G, lam, F_alt, G_alt;

  std::size_t n_snapshots() const { return times.size(); }
};

// Solves the global chart transport over the whole trajectory, storing
// rows at snapshot times. Throws ChartError when the transport CFL
// number exceeds 1.
NullChart solve_chart(const Trajectory& traj);

// Grid derivatives of (u,v), per-point inversion. Throws ChartError on a
// degenerate Jacobian (|det| < 1e-12) at a valid point.
void compute_jacobian(NullChart& chart, const Trajectory& traj);

// F, G, lambda and the r-column cross-check; throws ChartError if a
// logarithm argument is non-positive at a valid point.
void compute_FG(NullChart& chart, const Trajectory& traj);

struct TransportResiduals {
  // residuals of 2 dG/dv = e^F r e^beta (e + m - f) and
  // 2 dF/du = -e^G r e^beta (e - m - f) at interior snapshots
  std::vector<int> snapshot_index;
  std::vector<std::vector<double>> res_G, res_F;
  double max_res_G = 0.0, max_res_F = 0.0;  // over valid causal points
};

TransportResiduals transport_residuals(const NullChart& chart, const Trajectory& traj);

// Cone chart with apex on the axis at t = t_apex (must lie in the span).
NullChart solve_cone_chart(const Trajectory& traj, double t_apex);

struct ConeRegion {
  double t_apex = 0.0;
  // boundary r_b of J^-(O) at every trajectory step time (0 past the apex)
  std::vector<double> boundary_r;
  // Sigma_t^O node masks per snapshot
  std::vector<std::vector<uint8_t>> sigma;
};

// Region masks {v~ <= t_O} and the traced apex ray. t_O must not exceed
// the chart's apex.
ConeRegion cone_region(const NullChart& cone_chart, const Trajectory& traj, double t_O);

// Ingoing characteristic traced backward in time from (t_start, r_start),
// dr/dt = -e^{alpha-beta}; returns r at step times 0..k (k = last step
// time <= t_start), reading speeds from the trajectory history.
std::vector<double> trace_ingoing_back(const Trajectory& traj, double t_start, double r_start);

}  // namespace ekg
