#include "ekg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ekg {

namespace {

// integrand of the slice energy: e r e^beta
std::vector<double> energy_integrand(const CauchyState& s, const RadialGrid& g) {
  MatterDensities d = densities(s);
  std::vector<double> w(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) w[i] = d.e[i] * g.r[i] * std::exp(s.beta[i]);
  return w;
}

// trapezoid of nodal samples up to radius rb (partial last cell linear).
double trapz_to(const std::vector<double>& w, const RadialGrid& g, double rb) {
  if (rb <= 0.0) return 0.0;
  rb = std::min(rb, g.r_max);
  const int k = std::min(static_cast<int>(rb / g.h), g.n_cells - 1);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += 0.5 * g.h * (w[i] + w[i + 1]);
  const double frac = rb - g.r[k];
  if (frac > 0.0) {
    const double wk = w[k] + (w[k + 1] - w[k]) * (frac / g.h);
    acc += 0.5 * frac * (w[k] + wk);
  }
  return acc;
}

double lerp_field(const std::vector<double>& f, const RadialGrid& g, double r) {
  if (r <= 0.0) return f.front();
  const double x = r / g.h;
  const int n = static_cast<int>(f.size()) - 1;
  if (x >= n) return f.back();
  const int i = static_cast<int>(x);
  const double w = x - i;
  return (1.0 - w) * f[i] + w * f[i + 1];
}

}  // namespace

double total_energy(const CauchyState& s, const RadialGrid& g) {
  const std::vector<double> w = energy_integrand(s, g);
  return 2.0 * M_PI * trapz_to(w, g, g.r_max);
}

ScalarField ball_energy_profile(const CauchyState& s, const RadialGrid& g) {
  const std::vector<double> w = energy_integrand(s, g);
  ScalarField out = make_field(g, Parity::odd);
  stencil::cumtrapz(w.data(), g.n_nodes(), g.h, out.v.data());
  for (double& x : out.v) x *= 2.0 * M_PI;
  return out;
}

double ball_energy(const CauchyState& s, const RadialGrid& g, double r) {
  const std::vector<double> w = energy_integrand(s, g);
  return 2.0 * M_PI * trapz_to(w, g, r);
}

double beta_identity_residual(const CauchyState& s, const RadialGrid& g) {
  const ScalarField prof = ball_energy_profile(s, g);
  double worst = 0.0;
  for (int i = 0; i < g.n_nodes(); ++i) {
    if (g.r[i] + s.t > g.r_max + 1e-9) break;
    const double res = std::exp(s.beta[i]) * (1.0 - prof[i] / (2.0 * M_PI)) - 1.0;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

ScalarField divergence_PT(const CauchyState& prev, const CauchyState& mid,
                          const CauchyState& next, const RadialGrid& g) {
  const double dt2 = next.t - prev.t;
  const int n = g.n_nodes();
  MatterDensities dp = densities(prev), dm = densities(mid), dn = densities(next);
  ScalarField gmid(n, Parity::odd);
  for (int i = 0; i < n; ++i) gmid[i] = g.r[i] * std::exp(mid.alpha[i]) * dm.m_hat[i];
  ScalarField dg = d_r(gmid, g);

  ScalarField res = make_field(g, Parity::even);
  for (int i = 0; i < n; ++i) {
    const double ft_next = dn.e[i] * g.r[i] * std::exp(next.beta[i]);
    const double ft_prev = dp.e[i] * g.r[i] * std::exp(prev.beta[i]);
    res[i] = -(ft_next - ft_prev) / dt2 + dg[i];
  }
  return res;
}

Metric4D reconstruct_4d_metric(const CauchyState& s, const RadialGrid& g) {
  Metric4D m;
  const int n = g.n_nodes();
  m.g_tt = ScalarField(n, Parity::even);
  m.g_rr = ScalarField(n, Parity::even);
  m.g_thth = ScalarField(n, Parity::even);
  m.g_33 = ScalarField(n, Parity::even);
  for (int i = 0; i < n; ++i) {
    const double e2g = std::exp(-2.0 * s.gamma[i]);
    m.g_tt[i] = -e2g * std::exp(2.0 * s.alpha[i]);
    m.g_rr[i] = e2g * std::exp(2.0 * s.beta[i]);
    m.g_thth[i] = e2g * g.r[i] * g.r[i];
    m.g_33[i] = std::exp(2.0 * s.gamma[i]);
  }
  return m;
}

MetricBounds metric_bounds_report(const Trajectory& traj) {
  MetricBounds b;
  const RadialGrid& g = traj.grid;
  // E(0) in its constraint-slaved form 2pi(1 - e^{-beta}); with it,
  // beta_inf0 = -ln(1 - E(0)/2pi) collapses to beta(0, r_max) exactly.
  b.beta_inf0 = traj.snapshots.front().beta.v.back();
  b.beta_min = b.alpha_min = std::numeric_limits<double>::infinity();
  b.beta_max = b.alpha_max = -std::numeric_limits<double>::infinity();
  const int jd = traj.r_diag_index;
  const double beta_d0 = traj.snapshots.front().beta[jd];
  for (const CauchyState& s : traj.snapshots) {
    for (int i = 0; i < g.n_nodes(); ++i) {
      if (g.r[i] + s.t > g.r_max + 1e-9) break;
      b.beta_min = std::min(b.beta_min, s.beta[i]);
      b.beta_max = std::max(b.beta_max, s.beta[i]);
      b.alpha_min = std::min(b.alpha_min, s.alpha[i]);
      b.alpha_max = std::max(b.alpha_max, s.alpha[i]);
      b.beta_bound_excess = std::max(b.beta_bound_excess, s.beta[i] - b.beta_inf0);
    }
    b.beta_inf_drift = std::max(b.beta_inf_drift, std::abs(s.beta[jd] - beta_d0));
  }
  b.ok = b.beta_min >= -1e-12 && b.beta_bound_excess <= 1e-8 && std::isfinite(b.alpha_min) &&
         std::isfinite(b.alpha_max);
  return b;
}

ChartBounds chart_bounds_report(const NullChart& chart, const Trajectory& traj) {
  ChartBounds b;
  const double inf = std::numeric_limits<double>::infinity();
  b.F_min = b.G_min = b.lam_min = b.r_over_R_min = b.t_over_T_min = inf;
  b.F_max = b.G_max = b.lam_max = b.r_over_R_max = b.t_over_T_max = -inf;
  for (int k = 0; k < 8; ++k) {
    b.jac_lo[k] = inf;
    b.jac_hi[k] = -inf;
  }
  const double h = chart.h;
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[j][i]) continue;
      b.F_min = std::min(b.F_min, chart.F[j][i]);
      b.F_max = std::max(b.F_max, chart.F[j][i]);
      b.G_min = std::min(b.G_min, chart.G[j][i]);
      b.G_max = std::max(b.G_max, chart.G[j][i]);
      b.lam_min = std::min(b.lam_min, chart.lam[j][i]);
      b.lam_max = std::max(b.lam_max, chart.lam[j][i]);
      const double entries[8] = {chart.tv[j][i], chart.tu[j][i], chart.rv[j][i],
                                 chart.ru[j][i], chart.vt[j][i], chart.vr[j][i],
                                 chart.ut[j][i], chart.ur[j][i]};
      for (int k = 0; k < 8; ++k) {
        b.jac_lo[k] = std::min(b.jac_lo[k], entries[k]);
        b.jac_hi[k] = std::max(b.jac_hi[k], entries[k]);
      }
      const double R = 0.5 * (chart.v[j][i] - chart.u[j][i]);
      if (R > 4.0 * h) {
        const double ratio = traj.grid.r[i] / R;
        b.r_over_R_min = std::min(b.r_over_R_min, ratio);
        b.r_over_R_max = std::max(b.r_over_R_max, ratio);
      }
      if (chart.cone) {
        const double T = 0.5 * (chart.v[j][i] + chart.u[j][i]);
        if (T > 4.0 * h && chart.times[j] > 0.0) {
          const double ratio = chart.times[j] / T;
          b.t_over_T_min = std::min(b.t_over_T_min, ratio);
          b.t_over_T_max = std::max(b.t_over_T_max, ratio);
        }
      }
    }
  }
  return b;
}

GammaFloor gamma_floor(const Trajectory& traj) {
  GammaFloor f;
  f.gamma_min = std::numeric_limits<double>::infinity();
  f.shifted_min = std::numeric_limits<double>::infinity();
  const RadialGrid& g = traj.grid;
  for (const CauchyState& s : traj.snapshots) {
    for (int i = 0; i < g.n_nodes(); ++i) {
      if (g.r[i] + s.t > g.r_max + 1e-9) break;
      f.gamma_min = std::min(f.gamma_min, s.gamma[i]);
      if (i > 0)
        f.shifted_min =
            std::min(f.shifted_min, std::sqrt(g.r[i]) * (s.gamma[i] + 1.0));
    }
  }
  f.ok = f.gamma_min >= -1.0 - 1e-6 && f.shifted_min > 0.0;
  return f;
}

double cone_energy(const Trajectory& traj, const ConeRegion& reg, std::size_t snap) {
  const CauchyState& s = traj.snapshots[snap];
  if (s.t > reg.t_apex + 1e-12) return 0.0;
  const int step = traj.snapshot_steps[snap];
  const double rb = reg.boundary_r[step];
  const std::vector<double> w = energy_integrand(s, traj.grid);
  return 2.0 * M_PI * trapz_to(w, traj.grid, rb);
}

double flux_PT(const Trajectory& traj, const ConeRegion& reg, std::size_t j_tau,
               std::size_t j_s) {
  // trapezoid along the cone boundary over snapshot times in [tau, s]
  double acc = 0.0;
  double prev_t = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (std::size_t j = j_tau; j <= j_s; ++j) {
    const CauchyState& s = traj.snapshots[j];
    if (s.t > reg.t_apex + 1e-12) break;
    const int step = traj.snapshot_steps[j];
    const double rb = reg.boundary_r[step];
    MatterDensities d = densities(s);
    std::vector<double> integrand(traj.grid.n_nodes());
    for (int i = 0; i < traj.grid.n_nodes(); ++i)
      integrand[i] = (d.e[i] - d.m_hat[i]) * std::exp(s.alpha[i]) * traj.grid.r[i];
    const double f = lerp_field(integrand, traj.grid, rb);
    if (have_prev) acc += 0.5 * (s.t - prev_t) * (prev_f + f);
    prev_t = s.t;
    prev_f = f;
    have_prev = true;
  }
  return -2.0 * M_PI * acc;
}

ConeEnergetics cone_energetics(const Trajectory& traj, const ConeRegion& reg) {
  ConeEnergetics ce;
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    if (traj.snapshots[j].t > reg.t_apex + 1e-12) break;
    ce.times.push_back(traj.snapshots[j].t);
    ce.energy.push_back(cone_energy(traj, reg, j));
  }
  for (std::size_t j = 0; j + 1 < ce.energy.size(); ++j)
    ce.max_monotonicity_violation =
        std::max(ce.max_monotonicity_violation, ce.energy[j + 1] - ce.energy[j]);
  for (std::size_t j = 1; j < ce.energy.size(); ++j) {
    const double flux = flux_PT(traj, reg, 0, j);
    ce.max_stokes_error =
        std::max(ce.max_stokes_error, std::abs(ce.energy[j] - ce.energy[0] - flux));
  }
  return ce;
}

namespace {

// Everything needed pointwise along chart contours.
struct PointSample {
  double r, u, v, F, G, lam;
  double gamma_u, gamma_v, phi_u, phi_v, f_pot;
};

PointSample sample_point(const Trajectory& traj, const NullChart& chart, std::size_t j,
                         double r) {
  const RadialGrid& g = traj.grid;
  const CauchyState& s = traj.snapshots[j];
  auto lf = [&](const std::vector<double>& f) { return lerp_field(f, g, r); };
  PointSample p;
  p.r = r;
  p.u = lf(chart.u[j]);
  p.v = lf(chart.v[j]);
  p.F = lf(chart.F[j]);
  p.G = lf(chart.G[j]);
  p.lam = lf(chart.lam[j]);
  const double alpha = lf(s.alpha.v), beta = lf(s.beta.v);
  const double c = std::exp(alpha - beta);
  const double gt = c * lf(s.pi_gamma.v), pt = c * lf(s.pi_phi.v);
  const double gr = lf(s.gamma_r.v), pr = lf(s.phi_r.v);
  const double tu = lf(chart.tu[j]), tv = lf(chart.tv[j]);
  const double ru = lf(chart.ru[j]), rv = lf(chart.rv[j]);
  p.gamma_u = tu * gt + ru * gr;
  p.gamma_v = tv * gt + rv * gr;
  p.phi_u = tu * pt + ru * pr;
  p.phi_v = tv * pt + rv * pr;
  const double m2 = s.mass * s.mass;
  const double phi = lf(s.phi.v), gamma = lf(s.gamma.v);
  p.f_pot = m2 * std::exp(-2.0 * gamma) * phi * phi;
  return p;
}

// radius where a monotone chart row crosses the level. Returns -1 outside.
double crossing_radius(const std::vector<double>& row, const RadialGrid& g, double level,
                       bool increasing) {
  const int n = static_cast<int>(row.size());
  for (int i = 0; i + 1 < n; ++i) {
    const double a = row[i], b = row[i + 1];
    const bool hit = increasing ? (a <= level && level < b) : (b < level && level <= a);
    if (hit) return g.r[i] + g.h * (level - a) / (b - a);
  }
  return -1.0;
}

}  // namespace

FluxBoundsReport null_flux_bounds(const Trajectory& traj, const NullChart& chart, double T0,
                                  double T1, int n_lines) {
  FluxBoundsReport rep;
  rep.E0 = total_energy(traj.snapshots.front(), traj.grid);

  // measured F, G bounds restricted to the slab
  double Fmin = std::numeric_limits<double>::infinity(), Fmax = -Fmin;
  double Gmin = Fmin, Gmax = -Fmin;
  double vmin = Fmin, vmax = -Fmin, umin = Fmin, umax = -Fmin;
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[j][i]) continue;
      const double T = 0.5 * (chart.u[j][i] + chart.v[j][i]);
      if (T < T0 - 1e-12 || T > T1 + 1e-12) continue;
      Fmin = std::min(Fmin, chart.F[j][i]);
      Fmax = std::max(Fmax, chart.F[j][i]);
      Gmin = std::min(Gmin, chart.G[j][i]);
      Gmax = std::max(Gmax, chart.G[j][i]);
      vmin = std::min(vmin, chart.v[j][i]);
      vmax = std::max(vmax, chart.v[j][i]);
      umin = std::min(umin, chart.u[j][i]);
      umax = std::max(umax, chart.u[j][i]);
    }
  }
  if (!std::isfinite(Fmin) || !std::isfinite(Gmin)) return rep;  // empty slab

  // kappa from the proof chain: int e^{-F}(e-m) r e^{2lam} du <= E0/pi and
  // e - m = 4 e^{-2G} gamma_u^2 + 2 e^{-2G} phi_u^2 + f/2.
  rep.kappa_u = 1.0 / (M_PI * std::min(2.0 * std::exp(-Gmax), 0.5 * std::exp(Gmin)));
  rep.kappa_v = 1.0 / (M_PI * std::min(2.0 * std::exp(-Fmax), 0.5 * std::exp(Fmin)));

  auto integrate_line = [&](double level, bool is_v_level) {
    // collect contour points over snapshot rows
    std::vector<double> coord, integ;
    for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
      const auto& row = is_v_level ? chart.v[j] : chart.u[j];
      const double rc = crossing_radius(row, traj.grid, level, is_v_level);
      if (rc < 0.0) continue;
      const int ic = std::min(static_cast<int>(rc / traj.grid.h),
                              chart.n_nodes - 2);
      if (!chart.valid[j][ic] || !chart.valid[j][ic + 1]) continue;
      PointSample p = sample_point(traj, chart, j, rc);
      const double T = 0.5 * (p.u + p.v);
      if (T < T0 - 1e-12 || T > T1 + 1e-12) continue;
      if (is_v_level) {
        coord.push_back(p.u);
        integ.push_back((p.gamma_u * p.gamma_u + p.phi_u * p.phi_u + p.f_pot) * p.r);
      } else {
        coord.push_back(p.v);
        integ.push_back((p.gamma_v * p.gamma_v + p.phi_v * p.phi_v + p.f_pot) * p.r);
      }
    }
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < coord.size(); ++k)
      acc += 0.5 * (coord[k + 1] - coord[k]) * (integ[k] + integ[k + 1]);
    return acc;
  };

  for (int l = 0; l < n_lines; ++l) {
    const double fr = (l + 0.5) / n_lines;
    rep.u_line_flux.push_back(integrate_line(vmin + fr * (vmax - vmin), true));
    rep.v_line_flux.push_back(integrate_line(umin + fr * (umax - umin), false));
  }
  for (double x : rep.u_line_flux) {
    rep.worst_ratio = std::max(rep.worst_ratio, x / (rep.kappa_u * rep.E0));
    if (x > rep.kappa_u * rep.E0 * (1.0 + 1e-9)) ++rep.violations;
  }
  for (double x : rep.v_line_flux) {
    rep.worst_ratio = std::max(rep.worst_ratio, x / (rep.kappa_v * rep.E0));
    if (x > rep.kappa_v * rep.E0 * (1.0 + 1e-9)) ++rep.violations;
  }
  return rep;
}

ConeTREnergy cone_TR_energy(const Trajectory& traj, const NullChart& cone_chart,
                            const ConeRegion& reg, double T0) {
  ConeTREnergy out;
  const double E0 = total_energy(traj.snapshots.front(), traj.grid);
  const std::size_t ns = cone_chart.n_snapshots();
  double Cmin = std::numeric_limits<double>::infinity();

  std::vector<double> Rs, integ;
  for (int i = 0; i < cone_chart.n_nodes; ++i) {
    // find the snapshot bracket where T(t, r_i) crosses T0
    for (std::size_t j = 0; j + 1 < ns; ++j) {
      if (!cone_chart.valid[j][i] || !cone_chart.valid[j + 1][i]) continue;
      const double Ta = 0.5 * (cone_chart.u[j][i] + cone_chart.v[j][i]);
      const double Tb = 0.5 * (cone_chart.u[j + 1][i] + cone_chart.v[j + 1][i]);
      if (!(Ta <= T0 && T0 < Tb)) continue;
      const double wgt = (T0 - Ta) / (Tb - Ta);
      auto mix = [&](const std::vector<double>& a, const std::vector<double>& b) {
        return (1.0 - wgt) * a[i] + wgt * b[i];
      };
      const double vv = mix(cone_chart.v[j], cone_chart.v[j + 1]);
      if (vv > reg.t_apex + 1e-9) break;  // outside the cone
      const double uu = mix(cone_chart.u[j], cone_chart.u[j + 1]);
      const double R = 0.5 * (vv - uu);
      PointSample pa = sample_point(traj, cone_chart, j, traj.grid.r[i]);
      PointSample pb = sample_point(traj, cone_chart, j + 1, traj.grid.r[i]);
      auto mixd = [&](double a, double b) { return (1.0 - wgt) * a + wgt * b; };
      const double lam = mixd(pa.lam, pb.lam);
      const double F = mixd(pa.F, pb.F), G = mixd(pa.G, pb.G);
      const double gu = mixd(pa.gamma_u, pb.gamma_u), gv = mixd(pa.gamma_v, pb.gamma_v);
      const double pu = mixd(pa.phi_u, pb.phi_u), pv = mixd(pa.phi_v, pb.phi_v);
      const double fpot = mixd(pa.f_pot, pb.f_pot);
      const double etilde = std::exp(-2.0 * lam) * (2.0 * (gu * gu + gv * gv) +
                                                    pu * pu + pv * pv) +
                            0.5 * fpot;
      Rs.push_back(R);
      integ.push_back(etilde * traj.grid.r[i] * std::exp(lam));
      const double C_pt = std::min(std::exp(lam - std::max(F, G)),
                                   0.5 * std::exp(-lam) * (std::exp(F) + std::exp(G)));
      Cmin = std::min(Cmin, C_pt);
      break;
    }
  }
  out.n_points = static_cast<int>(Rs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < Rs.size(); ++k)
    acc += 0.5 * std::abs(Rs[k + 1] - Rs[k]) * (integ[k] + integ[k + 1]);
  out.value = 2.0 * M_PI * acc;
  out.kappa = std::isfinite(Cmin) && Cmin > 0.0 ? 1.0 / Cmin : 0.0;
  out.bound = out.kappa * E0;
  out.ok = out.n_points == 0 || out.value <= out.bound * (1.0 + 1e-9);
  return out;
}

ConeMonitor cone_gradient_monitor(const Trajectory& traj, const NullChart& chart, double T_c,
                                  double R_c, double scale) {
  ConeMonitor mon;
  mon.scale = scale;
  const double snap_dt = traj.snapshot_dt();
  const double base_lo = T_c - scale;
  const double base_hi = base_lo + std::max(scale / 8.0, 1.5 * snap_dt);
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[j][i]) continue;
      const double T = 0.5 * (chart.u[j][i] + chart.v[j][i]);
      const double R = 0.5 * (chart.v[j][i] - chart.u[j][i]);
      if (T < base_lo - 1e-12 || T > T_c + 1e-12) continue;
      if (std::abs(R - R_c) > (T_c - T) + 1e-12 && std::abs(R - R_c) > scale) continue;
      PointSample p = sample_point(traj, chart, j, traj.grid.r[i]);
      const double gv = std::abs(p.gamma_v) + std::abs(p.phi_v);
      const double gu = std::abs(p.gamma_u) + std::abs(p.phi_u);
      if (T <= base_hi && std::abs(R - R_c) <= scale) {
        mon.M = std::max(mon.M, gv + gu);
        ++mon.n_base;
      }
      if (std::abs(R - R_c) <= (T_c - T)) {
        mon.X = std::max(mon.X, gv);
        mon.X_u = std::max(mon.X_u, gu);
        ++mon.n_cone;
      }
    }
  }
  mon.ratio = mon.M > 0.0 ? std::max(mon.X, mon.X_u) / mon.M : 0.0;
  return mon;
}

EnergySeries energy_series(const Trajectory& traj, const ConeRegion* reg) {
  EnergySeries es;
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    const CauchyState& s = traj.snapshots[j];
    es.t.push_back(s.t);
    es.E_total.push_back(total_energy(s, traj.grid));
    es.E_cone.push_back(reg ? cone_energy(traj, *reg, j) : 0.0);
    double gmin = std::numeric_limits<double>::infinity();
    double bmax = -gmin, amin = gmin, amax = -gmin;
    for (int i = 0; i < traj.grid.n_nodes(); ++i) {
      gmin = std::min(gmin, s.gamma[i]);
      bmax = std::max(bmax, s.beta[i]);
      amin = std::min(amin, s.alpha[i]);
      amax = std::max(amax, s.alpha[i]);
    }
    es.gamma_min.push_back(gmin);
    es.beta_max.push_back(bmax);
    es.alpha_min.push_back(amin);
    es.alpha_max.push_back(amax);
  }
  return es;
}

}  // namespace ekg
