#include "ekg/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ekg/densities.hpp"
#include "ekg/errors.hpp"

namespace ekg {

namespace {

constexpr double kValidTol = 1e-9;

// Linear interpolation of a speed field in r (clamped at the edges).
double interp_r(const std::vector<double>& c, double h, double r) {
  if (r <= 0.0) return c.front();
  const double x = r / h;
  const int n = static_cast<int>(c.size()) - 1;
  if (x >= n) return c.back();
  const int i = static_cast<int>(x);
  const double w = x - i;
  return (1.0 - w) * c[i] + w * c[i + 1];
}

// Speed e^{alpha-beta} at arbitrary (t, r), linear in t between step times.
double speed_at(const Trajectory& traj, double t, double r) {
  const auto& ts = traj.step_times;
  if (t <= ts.front()) return interp_r(traj.speed_history.front(), traj.grid.h, r);
  if (t >= ts.back()) return interp_r(traj.speed_history.back(), traj.grid.h, r);
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const int k = static_cast<int>(it - ts.begin()) - 1;
  const double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
  const double c0 = interp_r(traj.speed_history[k], traj.grid.h, r);
  const double c1 = interp_r(traj.speed_history[k + 1], traj.grid.h, r);
  return (1.0 - w) * c0 + w * c1;
}

// One midpoint step of dr/dt = -c backward in time from (t1, r1) to t0 < t1.
double ray_step_back(const Trajectory& traj, double t1, double r1, double t0) {
  const double dt = t1 - t0;
  const double k1 = speed_at(traj, t1, r1);
  const double rm = r1 + 0.5 * dt * k1;
  const double k2 = speed_at(traj, t1 - 0.5 * dt, rm);
  return r1 + dt * k2;
}

// Second-order upwind transport operators. v flows inward (stencil to the
// right), u flows outward (stencil to the left, axis ghost from the swap
// partner). The outermost v node is fed by the frozen-exterior value.
void rhs_v(const std::vector<double>& v, const std::vector<double>& c, double h,
           std::vector<double>& out) {
  const int n = static_cast<int>(v.size());
  const double inv2h = 1.0 / (2.0 * h);
  for (int i = 0; i <= n - 3; ++i)
    out[i] = c[i] * (-3.0 * v[i] + 4.0 * v[i + 1] - v[i + 2]) * inv2h;
  const double ghost = 3.0 * v[n - 1] - 3.0 * v[n - 2] + v[n - 3];
  out[n - 2] = c[n - 2] * (-3.0 * v[n - 2] + 4.0 * v[n - 1] - ghost) * inv2h;
  out[n - 1] = c[n - 1];  // d/dt of the exterior characteristic value
}

void rhs_u(const std::vector<double>& u, double swap_ghost, const std::vector<double>& c,
           double h, std::vector<double>& out) {
  const int n = static_cast<int>(u.size());
  const double inv2h = 1.0 / (2.0 * h);
  out[0] = 0.0;  // axis value imposed by the boundary condition
  out[1] = -c[1] * (3.0 * u[1] - 4.0 * u[0] + swap_ghost) * inv2h;
  for (int i = 2; i < n; ++i)
    out[i] = -c[i] * (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) * inv2h;
}

void check_cfl(const std::vector<double>& c, double dt, double h) {
  double cmax = 0.0;
  for (double x : c) cmax = std::max(cmax, x);
  if (cmax * dt / h > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "chart transport CFL violated: c*dt/h = " << cmax * dt / h;
    throw ChartError(os.str());
  }
}

void init_chart_storage(NullChart& chart, const Trajectory& traj) {
  chart.times.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) chart.times.push_back(s.t);
  chart.snapshot_steps = traj.snapshot_steps;
  chart.n_nodes = traj.grid.n_nodes();
  chart.h = traj.grid.h;
  chart.r_max = traj.grid.r_max;
  const std::size_t ns = chart.times.size();
  chart.u.assign(ns, {});
  chart.v.assign(ns, {});
  chart.valid.assign(ns, {});
}

void causal_mask(const RadialGrid& g, double t, std::vector<uint8_t>& out) {
  out.resize(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i)
    out[i] = (g.r[i] + t <= g.r_max + kValidTol) ? 1 : 0;
}

}  // namespace

std::vector<double> trace_ingoing_back(const Trajectory& traj, double t_start, double r_start) {
  const auto& ts = traj.step_times;
  if (t_start < ts.front() - 1e-12 || t_start > ts.back() + 1e-12)
    throw ConfigError("trace_ingoing_back: start time outside trajectory span");
  int k = static_cast<int>(std::upper_bound(ts.begin(), ts.end(), t_start) - ts.begin()) - 1;
  k = std::clamp(k, 0, static_cast<int>(ts.size()) - 1);

  std::vector<double> r(k + 1);
  double cur = r_start;
  double tcur = t_start;
  if (t_start > ts[k] + 1e-14) cur = ray_step_back(traj, tcur, cur, ts[k]);
  r[k] = cur;
  for (int j = k - 1; j >= 0; --j) {
    cur = ray_step_back(traj, ts[j + 1], cur, ts[j]);
    r[j] = cur;
  }
  return r;
}

NullChart solve_chart(const Trajectory& traj) {
  if (traj.speed_history.size() != traj.step_times.size())
    throw ChartError("solve_chart: trajectory lacks per-step gauge history");
  NullChart chart;
  init_chart_storage(chart, traj);
  const RadialGrid& g = traj.grid;
  const int n = g.n_nodes();

  std::vector<double> u(n), v(n);
  for (int i = 0; i < n; ++i) {
    u[i] = -g.r[i];
    v[i] = g.r[i];
  }

  std::size_t next_snap = 0;
  auto record = [&](int step_idx, double t) {
    if (next_snap < chart.snapshot_steps.size() && chart.snapshot_steps[next_snap] == step_idx) {
      chart.u[next_snap] = u;
      chart.v[next_snap] = v;
      causal_mask(g, t, chart.valid[next_snap]);
      ++next_snap;
    }
  };
  record(0, 0.0);

  std::vector<double> lu0(n), lu1(n), lv0(n), lv1(n), up(n), vp(n);
  const int n_steps = static_cast<int>(traj.dts.size());
  for (int s = 0; s < n_steps; ++s) {
    const double dt = traj.dts[s];
    const auto& c0 = traj.speed_history[s];
    const auto& c1 = traj.speed_history[s + 1];
    check_cfl(c0, dt, g.h);

    rhs_v(v, c0, g.h, lv0);
    rhs_u(u, v[1], c0, g.h, lu0);
    for (int i = 0; i < n; ++i) {
      vp[i] = v[i] + dt * lv0[i];
      up[i] = u[i] + dt * lu0[i];
    }
    up[0] = vp[0];

    rhs_v(vp, c1, g.h, lv1);
    rhs_u(up, vp[1], c1, g.h, lu1);
    for (int i = 0; i < n; ++i) {
      v[i] += 0.5 * dt * (lv0[i] + lv1[i]);
      u[i] += 0.5 * dt * (lu0[i] + lu1[i]);
    }
    u[0] = v[0];

    record(s + 1, traj.step_times[s + 1]);
  }
  return chart;
}

void compute_jacobian(NullChart& chart, const Trajectory& traj) {
  const std::size_t ns = chart.n_snapshots();
  const int n = chart.n_nodes;
  const double h = chart.h;
  auto alloc = [&](std::vector<std::vector<double>>& f) { f.assign(ns, std::vector<double>(n)); };
  alloc(chart.ut); alloc(chart.ur); alloc(chart.vt); alloc(chart.vr);
  alloc(chart.tu); alloc(chart.tv); alloc(chart.ru); alloc(chart.rv);

  for (std::size_t j = 0; j < ns; ++j) {
    const CauchyState& s = traj.snapshots[j];
    const auto& u = chart.u[j];
    const auto& v = chart.v[j];
    for (int i = 0; i < n; ++i) {
      const double inv2h = 1.0 / (2.0 * h);
      double du, dv;
      if (i == 0) {  // swap ghosts: u(-h) = v(h), v(-h) = u(h)
        du = (u[1] - v[1]) * inv2h;
        dv = (v[1] - u[1]) * inv2h;
      } else if (i == n - 1) {
        du = (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) * inv2h;
        dv = (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) * inv2h;
      } else {
        du = (u[i + 1] - u[i - 1]) * inv2h;
        dv = (v[i + 1] - v[i - 1]) * inv2h;
      }
      const double c = std::exp(s.alpha[i] - s.beta[i]);
      chart.ur[j][i] = du;
      chart.vr[j][i] = dv;
      chart.ut[j][i] = -c * du;  // transport relations supply the time column
      chart.vt[j][i] = c * dv;

      const double det = chart.vt[j][i] * du - dv * chart.ut[j][i];
      if (chart.valid[j][i] && std::abs(det) < 1e-12) {
        std::ostringstream os;
        os << "degenerate chart Jacobian at t = " << chart.times[j] << ", r = " << i * h;
        throw ChartError(os.str());
      }
      chart.tv[j][i] = du / det;
      chart.tu[j][i] = -dv / det;
      chart.rv[j][i] = -chart.ut[j][i] / det;
      chart.ru[j][i] = chart.vt[j][i] / det;
    }
  }
  chart.has_jacobian = true;
}

void compute_FG(NullChart& chart, const Trajectory& traj) {
  if (!chart.has_jacobian) compute_jacobian(chart, traj);
  const std::size_t ns = chart.n_snapshots();
  const int n = chart.n_nodes;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto alloc = [&](std::vector<std::vector<double>>& f) {
    f.assign(ns, std::vector<double>(n, nan));
  };
  alloc(chart.F); alloc(chart.G); alloc(chart.lam); alloc(chart.F_alt); alloc(chart.G_alt);

  for (std::size_t j = 0; j < ns; ++j) {
    const CauchyState& s = traj.snapshots[j];
    for (int i = 0; i < n; ++i) {
      if (!chart.valid[j][i]) continue;
      const double at = 2.0 * chart.tv[j][i];
      const double bt = 2.0 * chart.tu[j][i];
      if (!(at > 0.0) || !(bt > 0.0)) {
        std::ostringstream os;
        os << "chart not future-directed at t = " << chart.times[j] << ", r = " << i * chart.h;
        throw ChartError(os.str());
      }
      chart.F[j][i] = s.alpha[i] + std::log(at);
      chart.G[j][i] = s.alpha[i] + std::log(bt);
      chart.lam[j][i] = 0.5 * (chart.F[j][i] + chart.G[j][i]);
      const double ar = 2.0 * chart.rv[j][i];
      const double br = -2.0 * chart.ru[j][i];
      chart.F_alt[j][i] = (ar > 0.0) ? s.beta[i] + std::log(ar) : nan;
      chart.G_alt[j][i] = (br > 0.0) ? s.beta[i] + std::log(br) : nan;
    }
  }
  chart.has_fg = true;
}

TransportResiduals transport_residuals(const NullChart& chart, const Trajectory& traj) {
  if (!chart.has_fg) throw ChartError("transport_residuals: compute_FG first");
  TransportResiduals out;
  const int n = chart.n_nodes;
  const double h = chart.h;
  const std::size_t ns = chart.n_snapshots();

  for (std::size_t j = 1; j + 1 < ns; ++j) {
    const double dtf = chart.times[j + 1] - chart.times[j];
    const double dtb = chart.times[j] - chart.times[j - 1];
    if (std::abs(dtf - dtb) > 1e-9 * dtb) continue;  // skip the clipped final interval
    const CauchyState& s = traj.snapshots[j];
    MatterDensities d = densities(s);

    std::vector<double> rg(n), rf(n);
    for (int i = 0; i < n; ++i) {
      const bool ok = chart.valid[j][i] && chart.valid[j - 1][i] && chart.valid[j + 1][i] &&
                      i > 0 && i < n - 1 && chart.valid[j][i + 1] && chart.valid[j][i - 1];
      if (!ok) {
        rg[i] = rf[i] = 0.0;
        continue;
      }
      const double Gt = (chart.G[j + 1][i] - chart.G[j - 1][i]) / (dtf + dtb);
      const double Ft = (chart.F[j + 1][i] - chart.F[j - 1][i]) / (dtf + dtb);
      const double Gr = (chart.G[j][i + 1] - chart.G[j][i - 1]) / (2.0 * h);
      const double Fr = (chart.F[j][i + 1] - chart.F[j][i - 1]) / (2.0 * h);
      const double dvG = chart.tv[j][i] * Gt + chart.rv[j][i] * Gr;
      const double duF = chart.tu[j][i] * Ft + chart.ru[j][i] * Fr;
      const double reb = traj.grid.r[i] * std::exp(s.beta[i]);
      rg[i] = 2.0 * dvG - std::exp(chart.F[j][i]) * reb * (d.e[i] + d.m_hat[i] - d.f[i]);
      rf[i] = 2.0 * duF + std::exp(chart.G[j][i]) * reb * (d.e[i] - d.m_hat[i] - d.f[i]);
      out.max_res_G = std::max(out.max_res_G, std::abs(rg[i]));
      out.max_res_F = std::max(out.max_res_F, std::abs(rf[i]));
    }
    out.snapshot_index.push_back(static_cast<int>(j));
    out.res_G.push_back(std::move(rg));
    out.res_F.push_back(std::move(rf));
  }
  return out;
}

NullChart solve_cone_chart(const Trajectory& traj, double t_apex) {
  if (!(t_apex > 0.0) || t_apex > traj.t_end() + 1e-12)
    throw ConfigError("solve_cone_chart: apex time outside trajectory span");
  NullChart chart;
  chart.cone = true;
  chart.t_apex = t_apex;
  init_chart_storage(chart, traj);
  const RadialGrid& g = traj.grid;
  const int n = g.n_nodes();
  const auto& ts = traj.step_times;
  const int n_times = static_cast<int>(ts.size());

  // Backward rays from every axis point (t_k, 0); ray k stores r at step
  // times 0..k. v~ = t_k along ray k.
  std::vector<std::vector<double>> ray(n_times);
  ray[0] = {0.0};
  for (int k = 1; k < n_times; ++k) ray[k] = trace_ingoing_back(traj, ts[k], 0.0);

  // v~ ghost value at r = h for every step time (for the u~ axis stencil):
  // interpolate between the first two rays that straddle r = h.
  std::vector<double> vghost(n_times, 0.0);
  std::vector<double> pos, val;
  auto fill_row = [&](int j, std::vector<double>& vrow, std::vector<uint8_t>& cover) {
    pos.clear();
    val.clear();
    for (int k = j; k < n_times; ++k) {
      const double p = ray[k][j];
      if (!pos.empty() && p <= pos.back()) continue;  // enforce monotone samples
      pos.push_back(p);
      val.push_back(ts[k]);
    }
    vrow.resize(n);
    cover.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      const double r = g.r[i];
      if (r > pos.back()) {
        // beyond the last traced ray: smooth filler, masked invalid
        vrow[i] = val.back() + (r - pos.back());
        continue;
      }
      const auto it = std::lower_bound(pos.begin(), pos.end(), r);
      const std::size_t q = static_cast<std::size_t>(it - pos.begin());
      if (q == 0) {
        vrow[i] = val[0];
      } else {
        const double w = (r - pos[q - 1]) / (pos[q] - pos[q - 1]);
        vrow[i] = (1.0 - w) * val[q - 1] + w * val[q];
      }
      cover[i] = 1;
    }
  };

  std::vector<double> vrow(n);
  std::vector<uint8_t> cover(n);
  std::vector<std::vector<double>> vrows_at_steps;  // only rows we need: ghost everywhere
  for (int j = 0; j < n_times; ++j) {
    fill_row(j, vrow, cover);
    vghost[j] = vrow[1];
    if (j == 0) {
      // keep the initial row for u~'s initial data
      vrows_at_steps.push_back(vrow);
    }
  }

  // u~: initial data -v~(0, r), advected outward with axis value u~ = t.
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = -vrows_at_steps[0][i];
  u[0] = 0.0;

  std::size_t next_snap = 0;
  auto record = [&](int step_idx, double t) {
    if (next_snap < chart.snapshot_steps.size() && chart.snapshot_steps[next_snap] == step_idx) {
      fill_row(step_idx, vrow, cover);
      chart.u[next_snap] = u;
      chart.v[next_snap] = vrow;
      auto& msk = chart.valid[next_snap];
      causal_mask(g, t, msk);
      for (int i = 0; i < n; ++i) msk[i] = msk[i] && cover[i];
      ++next_snap;
    }
  };
  record(0, 0.0);

  std::vector<double> lu0(n), lu1(n), up(n);
  const int n_steps = static_cast<int>(traj.dts.size());
  for (int s = 0; s < n_steps; ++s) {
    const double dt = traj.dts[s];
    const auto& c0 = traj.speed_history[s];
    const auto& c1 = traj.speed_history[s + 1];
    check_cfl(c0, dt, g.h);

    rhs_u(u, vghost[s], c0, g.h, lu0);
    for (int i = 0; i < n; ++i) up[i] = u[i] + dt * lu0[i];
    up[0] = ts[s + 1];
    rhs_u(up, vghost[s + 1], c1, g.h, lu1);
    for (int i = 0; i < n; ++i) u[i] += 0.5 * dt * (lu0[i] + lu1[i]);
    u[0] = ts[s + 1];

    record(s + 1, ts[s + 1]);
  }
  return chart;
}

ConeRegion cone_region(const NullChart& cone_chart, const Trajectory& traj, double t_O) {
  if (!cone_chart.cone) throw ConfigError("cone_region: chart is not a cone chart");
  if (t_O > cone_chart.t_apex + 1e-12)
    throw ConfigError("cone_region: t_O beyond the chart's apex");
  ConeRegion reg;
  reg.t_apex = t_O;
  const auto& ts = traj.step_times;
  reg.boundary_r.assign(ts.size(), 0.0);
  std::vector<double> apex_ray = trace_ingoing_back(traj, t_O, 0.0);
  for (std::size_t j = 0; j < apex_ray.size(); ++j) reg.boundary_r[j] = apex_ray[j];

  const std::size_t ns = cone_chart.n_snapshots();
  reg.sigma.assign(ns, std::vector<uint8_t>(cone_chart.n_nodes, 0));
  for (std::size_t j = 0; j < ns; ++j) {
    if (cone_chart.times[j] > t_O + 1e-12) continue;
    for (int i = 0; i < cone_chart.n_nodes; ++i)
      reg.sigma[j][i] =
          cone_chart.valid[j][i] && cone_chart.v[j][i] <= t_O + kValidTol ? 1 : 0;
  }
  return reg;
}

}  // namespace ekg
