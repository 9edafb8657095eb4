#pragma once

// Characteristic evolution of the system in null form on a (u,v) lattice
// bounded away from the axis, seeded from a Cauchy trajectory through the
// null chart and used for cross-validation. Evolution equations:
//
//   r_uv   = (m^2/4) r e^{2lam-2gamma} phi^2
//   lam_uv = -gamma_u gamma_v - phi_u phi_v / 2 + (m^2/8) e^{2lam-2gamma} phi^2
//   2 r gamma_uv + r_u gamma_v + r_v gamma_u =  (m^2/4) r e^{2lam-2gamma} phi^2
//   2 r phi_uv   + r_u phi_v   + r_v phi_u   = -(m^2/2) r e^{2lam-2gamma} phi
//
// solved cell by cell with a second-order diamond scheme (all coefficients
// at the cell center, fixed-point sweeps for the implicit corner). The
// Raychaudhuri pair d_u(e^{-2lam} d_u r) = -e^{-2lam} r (2 gamma_u^2 + phi_u^2)
// and its v-counterpart are never used to step; they are certification
// residuals.

#include <string>

#include "ekg/chart.hpp"
#include "ekg/state.hpp"

namespace ekg {

struct DoubleNullParams {
  double u_min = 0, u_max = 0;
  double v_min = 0, v_max = 0;
  int n_u = 64;  // cells along u; v uses the same spacing
};

struct DoubleNullState {
  DoubleNullParams p;
  double mass = 0;
  double k = 0;      // lattice spacing (same in u and v)
  int nu = 0, nv = 0;  // node counts
  // row-major [i_u * nv + j_v]
  std::vector<double> r, lam, gamma, phi;
  bool evolved = false;
  std::string stop_reason;  // set when trapped-region formation halted the run

  double at(const std::vector<double>& f, int i, int j) const { return f[i * nv + j]; }
  double u_of(int i) const { return p.u_min + i * k; }
  double v_of(int j) const { return p.v_min + j * k; }
};

// Interpolates r, lam, gamma, phi from Cauchy snapshots onto the seed rays
// u = u_min and v = v_min (through the chart). Throws ConfigError when the
// rays leave the chart's valid region or touch the axis.
DoubleNullState seed_from_cauchy(const Trajectory& traj, const NullChart& chart,
                                 const DoubleNullParams& p);

// Future corner of one null cell from its three known corners; fixed-point
// sweeps until the corner moves < 1e-10 (at most 8 passes, else
// NumericalError).
void box_step(DoubleNullState& s, int i, int j);

// Marches the full diamond; sets stop_reason instead of throwing when
// r_u < 0 < r_v fails (trapped region).
void evolve_diamond(DoubleNullState& s);

struct RaychaudhuriResiduals {
  double max_u = 0, max_v = 0;          // interior residual maxima
  std::vector<double> res_u, res_v;     // row-major interior fields
};
RaychaudhuriResiduals raychaudhuri_residuals(const DoubleNullState& s);

// Residual maxima of the (T,R)-form equations evaluated on the lattice via
// d_T = d_u + d_v, d_R = d_v - d_u (interior nodes).
struct TRFormResiduals {
  double max_constraint = 0;  // first-order equations
  double max_wave = 0;        // wave equations for gamma, phi and lam
};
TRFormResiduals tr_form_residuals(const DoubleNullState& s);

struct CauchyComparison {
  double sup_gamma = 0, sup_phi = 0, sup_r = 0, sup_lam = 0;
  int n_points = 0;
};
// Sup-norm differences over the overlap between the lattice and the
// trajectory snapshots (lattice fields interpolated at snapshot points).
CauchyComparison compare_with_cauchy(const DoubleNullState& s, const Trajectory& traj,
                                     const NullChart& chart);

}  // namespace ekg
