#include "ekg/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ekg/csv.hpp"
#include "ekg/diagnostics.hpp"
#include "ekg/double_null.hpp"
#include "ekg/evolve.hpp"
#include "ekg/oracles.hpp"

namespace ekg {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double conv_order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return 99.0;  // at rounding floor
  return std::log2(coarse / fine);
}

// Everything measured on one canonical run at a single resolution.
struct GridRun {
  int n = 0;
  double h = 0;
  double drift = 0;              // relative causal-energy conservation drift
  double beta_identity = 0;      // max |e^beta (1 - E/2pi) - 1|
  MetricBounds mbounds;
  double mom_res = 0;            // max momentum-constraint residual
  double eq213_res = 0;          // max redundant-equation residual
  double div_pt = 0;             // max divergence monitor residual
  double reduction_err = 0;      // max |Phi_X - d_r X|
  double axis_phi = 0;           // max |gamma_r(t, h)|
  double e_minus_m_min = 0;      // min of e - |mhat|
  double w_min = 1, w_max = 1;   // range of e^{-2beta}
  double jac_identity = 0;       // max |J J^{-1} - I|
  double lam_identity = 0;       // max |2 lam - (F+G)|
  double col_consistency = 0;    // max |F - F'| and |G - G'|
  double metric_lam_agree = 0;   // max |e^{F+G} / (-2 g(du,dv)) - 1|
  double transport_res = 0;      // max of both F/G transport residuals
  double chart_oracle = 0;       // max level-set deviation vs traced rays
  ChartBounds cbounds;
  GammaFloor gfloor;
  double cone_monotone[2] = {0, 0};  // per apex
  double cone_stokes[2] = {0, 0};
  double cone_oracle = 0;            // cone boundary vs independent ray tracing
  FluxBoundsReport flux;
  std::vector<ConeTREnergy> tr_energies;
  double tr_ratio_at_T0 = 1.0;   // cone (T,R) energy at T=0 vs E^O(0)
  CauchyComparison dn_cmp;
  double dn_raych = 0;
  double dn_trform = 0;
  Trajectory traj;               // kept only for the coarsest/finest as needed
};

struct Scenario {
  RunConfig cfg;
  std::vector<double> apexes;
  double flux_T0 = 2, flux_T1 = 6;
  int base_n = 512;
};

GridRun run_grid(const Scenario& sc, int n) {
  const RunConfig& cfg = sc.cfg;
  GridRun out;
  out.n = n;
  RadialGrid grid = make_grid(cfg.r_max, n);
  out.h = grid.h;

  DataFamilyParams fam;
  fam.a_gamma = cfg.a_gamma;
  fam.a_phi = cfg.a_phi;
  fam.p = cfg.p;
  fam.w = cfg.w;
  fam.mass = cfg.mass;
  fam.gamma1_amp = cfg.gamma1_amp;
  InitialDataSet data = build_initial_data(fam, grid);

  CauchyEvolver ev(grid, cfg.mass);
  EvolveOptions opt;
  opt.t_end = cfg.t_end;
  opt.courant = cfg.courant;
  opt.snapshot_every = cfg.snapshot_every;
  Trajectory traj = ev.evolve(data, opt);
  if (!traj.completed()) throw NumericalError("canonical run stopped: " + traj.stop_reason);

  // conservation drift from the causally corrected record
  const double E0d = traj.conserved_energy.front();
  for (double e : traj.conserved_energy)
    out.drift = std::max(out.drift, std::abs(e - E0d) / std::abs(E0d));

  out.mbounds = metric_bounds_report(traj);

  for (const CauchyState& s : traj.snapshots) {
    out.beta_identity = std::max(out.beta_identity, beta_identity_residual(s, grid));
    MatterDensities d = densities(s);
    ScalarField gr = d_r(s.gamma, grid), pr = d_r(s.phi, grid);
    for (int i = 0; i < grid.n_nodes(); ++i) {
      if (grid.r[i] + s.t > grid.r_max + 1e-9) break;
      out.e_minus_m_min = std::min(out.e_minus_m_min, d.e[i] - std::abs(d.m_hat[i]));
      const double w = std::exp(-2.0 * s.beta[i]);
      out.w_min = std::min(out.w_min, w);
      out.w_max = std::max(out.w_max, w);
      out.reduction_err = std::max(out.reduction_err,
                                   std::max(std::abs(s.gamma_r[i] - gr[i]),
                                            std::abs(s.phi_r[i] - pr[i])));
    }
    out.axis_phi = std::max(out.axis_phi, std::abs(s.gamma_r[1]));
  }

  // residual monitors on uniform snapshot triplets
  for (std::size_t j = 1; j + 1 < traj.snapshots.size(); ++j) {
    const auto& p = traj.snapshots[j - 1];
    const auto& m = traj.snapshots[j];
    const auto& nx = traj.snapshots[j + 1];
    if (std::abs((nx.t - m.t) - (m.t - p.t)) > 1e-9 * (m.t - p.t)) continue;
    ScalarField mres = momentum_constraint_residual(p, m, nx, grid);
    ScalarField eres = eq213_residual(p, m, nx, grid);
    ScalarField dres = divergence_PT(p, m, nx, grid);
    for (int i = 0; i < grid.n_nodes(); ++i) {
      if (grid.r[i] + m.t > grid.r_max + 1e-9) break;
      out.mom_res = std::max(out.mom_res, std::abs(mres[i]));
      out.eq213_res = std::max(out.eq213_res, std::abs(eres[i]));
      out.div_pt = std::max(out.div_pt, std::abs(dres[i]));
    }
  }

  // global chart and its certificates
  NullChart chart = solve_chart(traj);
  compute_FG(chart, traj);
  out.cbounds = chart_bounds_report(chart, traj);
  out.gfloor = gamma_floor(traj);
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[j][i]) continue;
      const double j00 = chart.tv[j][i] * chart.vt[j][i] + chart.tu[j][i] * chart.ut[j][i];
      const double j01 = chart.tv[j][i] * chart.vr[j][i] + chart.tu[j][i] * chart.ur[j][i];
      const double j10 = chart.rv[j][i] * chart.vt[j][i] + chart.ru[j][i] * chart.ut[j][i];
      const double j11 = chart.rv[j][i] * chart.vr[j][i] + chart.ru[j][i] * chart.ur[j][i];
      out.jac_identity = std::max({out.jac_identity, std::abs(j00 - 1.0), std::abs(j01),
                                   std::abs(j10), std::abs(j11 - 1.0)});
      out.lam_identity = std::max(
          out.lam_identity, std::abs(2.0 * chart.lam[j][i] - chart.F[j][i] - chart.G[j][i]));
      if (std::isfinite(chart.F_alt[j][i]))
        out.col_consistency =
            std::max(out.col_consistency, std::abs(chart.F[j][i] - chart.F_alt[j][i]));
      if (std::isfinite(chart.G_alt[j][i]))
        out.col_consistency =
            std::max(out.col_consistency, std::abs(chart.G[j][i] - chart.G_alt[j][i]));
      const CauchyState& s = traj.snapshots[j];
      const double guv = -std::exp(2.0 * s.alpha[i]) * chart.tu[j][i] * chart.tv[j][i] +
                         std::exp(2.0 * s.beta[i]) * chart.ru[j][i] * chart.rv[j][i];
      const double e2lam = std::exp(chart.F[j][i] + chart.G[j][i]);
      out.metric_lam_agree =
          std::max(out.metric_lam_agree, std::abs(-2.0 * guv / e2lam - 1.0));
    }
  }
  out.transport_res = [&] {
    TransportResiduals tr = transport_residuals(chart, traj);
    return std::max(tr.max_res_G, tr.max_res_F);
  }();

  // chart oracle: independent high-resolution characteristic tracing
  for (double r0 : {0.25 * cfg.r_max, 0.45 * cfg.r_max}) {
    std::vector<double> ray_out = oracle::trace_characteristic(traj, r0, +1);
    std::vector<double> ray_in = oracle::trace_characteristic(traj, r0, -1);
    for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
      const int step = chart.snapshot_steps[j];
      auto level_dev = [&](const std::vector<double>& row, double rr, double level) {
        const double x = rr / grid.h;
        const int i = std::min(static_cast<int>(x), grid.n_cells - 1);
        if (!chart.valid[j][i] || !chart.valid[j][i + 1]) return 0.0;
        const double w = x - i;
        return std::abs((1.0 - w) * row[i] + w * row[i + 1] - level);
      };
      out.chart_oracle = std::max(out.chart_oracle, level_dev(chart.u[j], ray_out[step], -r0));
      if (ray_in[step] > 0.0)
        out.chart_oracle = std::max(out.chart_oracle, level_dev(chart.v[j], ray_in[step], r0));
    }
  }

  // cone charts, energetics, (T,R) energies
  for (std::size_t a = 0; a < sc.apexes.size() && a < 2; ++a) {
    const double tO = sc.apexes[a];
    NullChart cchart = solve_cone_chart(traj, tO);
    compute_FG(cchart, traj);
    ConeRegion reg = cone_region(cchart, traj, tO);
    ConeEnergetics ce = cone_energetics(traj, reg);
    out.cone_monotone[a] = ce.max_monotonicity_violation;
    out.cone_stokes[a] = ce.max_stokes_error;

    // independent check of the cone boundary against the RK4 tracer
    std::vector<double> apex_ray = oracle::trace_characteristic(traj, 0.0, -1);
    // trace forward from (0, r*) where r* is the traced boundary at t=0
    std::vector<double> fwd = oracle::trace_characteristic(traj, reg.boundary_r[0], -1);
    for (std::size_t s = 0; s < fwd.size() && traj.step_times[s] <= tO; ++s)
      out.cone_oracle = std::max(out.cone_oracle, std::abs(fwd[s] - reg.boundary_r[s]));

    for (double frac : {0.0, 0.5, 0.75}) {
      ConeTREnergy te = cone_TR_energy(traj, cchart, reg, frac * tO);
      if (frac == 0.0 && !ce.energy.empty() && ce.energy.front() > 0.0)
        out.tr_ratio_at_T0 = te.value / ce.energy.front();
      out.tr_energies.push_back(te);
    }

    if (a == 0) {
      // cone bands for the t ~ T estimate
      ChartBounds cb = chart_bounds_report(cchart, traj);
      out.cbounds.t_over_T_min = cb.t_over_T_min;
      out.cbounds.t_over_T_max = cb.t_over_T_max;
    }
  }

  out.flux = null_flux_bounds(traj, chart, sc.flux_T0, sc.flux_T1, cfg.flux_lines);

  // double-null cross-validation on an off-axis diamond
  DoubleNullParams dn;
  if (cfg.dn_enabled) {
    dn.u_min = cfg.dn_u_min;
    dn.u_max = cfg.dn_u_max;
    dn.v_min = cfg.dn_v_min;
    dn.v_max = cfg.dn_v_max;
    dn.n_u = cfg.dn_n_u;
  } else {
    dn.u_min = -0.3 * cfg.r_max;
    dn.u_max = -0.1 * cfg.r_max;
    dn.v_min = 0.4 * cfg.r_max;
    dn.v_max = 0.6 * cfg.r_max;
    dn.n_u = 32;
  }
  dn.n_u *= std::max(1, n / sc.base_n);  // joint refinement with the grid
  DoubleNullState dns = seed_from_cauchy(traj, chart, dn);
  evolve_diamond(dns);
  if (!dns.evolved) throw NumericalError("double-null run stopped: " + dns.stop_reason);
  RaychaudhuriResiduals rr = raychaudhuri_residuals(dns);
  out.dn_raych = std::max(rr.max_u, rr.max_v);
  TRFormResiduals trf = tr_form_residuals(dns);
  out.dn_trform = std::max(trf.max_constraint, trf.max_wave);
  out.dn_cmp = compare_with_cauchy(dns, traj, chart);

  out.traj = std::move(traj);
  return out;
}

}  // namespace

std::string canonical_config_text() {
  return
      "[grid]\n"
      "r_max = 20\n"
      "n_cells = 512\n"
      "[data]\n"
      "a_gamma = 0.1\n"
      "a_phi = 0.1\n"
      "p = 1\n"
      "w = 1\n"
      "mass = 1\n"
      "[evolve]\n"
      "courant = 0.5\n"
      "t_end = 8\n"
      "snapshot_every = 16\n"
      "[diagnostics]\n"
      "cone_apexes = 4,6\n"
      "flux_T0 = 2\n"
      "flux_T1 = 6\n"
      "flux_lines = 8\n"
      "small_cones = 4,4,1\n"
      "[output]\n"
      "dir = out\n";
}

VerifyReport run_verification(const RunConfig& cfg, std::ostream& log) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  VerifyReport rep;

  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
    log << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
  };

  const int n0 = cfg.n_cells;
  const std::vector<int> ns = {n0, 2 * n0, 4 * n0};

  // ---- radial calculus invariants -----------------------------------------
  {
    RadialGrid g = make_grid(10.0, 1000);
    const bool arith = std::abs(g.h - 0.01) < 1e-15 && g.r[0] == 0.0 && g.r[1000] == 10.0;
    check("grid arithmetic", arith, "h = " + fmt(g.h));

    double err[3], axis_err[3], roundtrip[3], integ_err[3];
    for (int k = 0; k < 3; ++k) {
      RadialGrid gk = make_grid(10.0, 256 << k);
      ScalarField f = make_field(gk, Parity::odd);
      for (int i = 0; i < gk.n_nodes(); ++i) f[i] = std::sin(gk.r[i]);
      ScalarField df = d_r(f, gk);
      double e = 0;
      for (int i = 0; i < gk.n_nodes() - 1; ++i)
        e = std::max(e, std::abs(df[i] - std::cos(gk.r[i])));
      err[k] = e;

      ScalarField c = make_field(gk, Parity::even);
      for (int i = 0; i < gk.n_nodes(); ++i) c[i] = std::cos(gk.r[i]);
      axis_err[k] = std::abs(axis_limit_ratio(c, gk) + 1.0);

      ScalarField rec = radial_integrate(d_r(c, gk), gk);
      double re = 0;
      for (int i = 0; i < gk.n_nodes() - 1; ++i)
        re = std::max(re, std::abs(rec[i] + c[0] - c[i]));
      roundtrip[k] = re;

      ScalarField dens = make_field(gk, Parity::odd);
      for (int i = 0; i < gk.n_nodes(); ++i)
        dens[i] = gk.r[i] * std::exp(-gk.r[i] * gk.r[i]);
      ScalarField integ = radial_integrate(dens, gk);
      double ie = 0;
      for (int i = 0; i < gk.n_nodes(); ++i)
        ie = std::max(ie,
                      std::abs(integ[i] - 0.5 * (1.0 - std::exp(-gk.r[i] * gk.r[i]))));
      integ_err[k] = ie;
    }
    const double o1 = conv_order(err[0], err[1]), o2 = conv_order(err[1], err[2]);
    check("d_r sin convergence", std::min(o1, o2) >= 1.9,
          "orders " + fmt(o1) + ", " + fmt(o2));
    const double a1 = conv_order(axis_err[0], axis_err[1]);
    const double a2 = conv_order(axis_err[1], axis_err[2]);
    check("axis limit ratio convergence", std::min(a1, a2) >= 1.9,
          "orders " + fmt(a1) + ", " + fmt(a2));
    const double r1 = conv_order(roundtrip[0], roundtrip[1]);
    const double r2 = conv_order(roundtrip[1], roundtrip[2]);
    check("d_r / integrate round trip", std::min(r1, r2) >= 1.9,
          "orders " + fmt(r1) + ", " + fmt(r2));
    const double i1 = conv_order(integ_err[0], integ_err[1]);
    const double i2 = conv_order(integ_err[1], integ_err[2]);
    check("cumulative quadrature convergence", std::min(i1, i2) >= 1.9,
          "orders " + fmt(i1) + ", " + fmt(i2));

    ScalarField sq = make_field(g, Parity::even);
    for (int i = 0; i < g.n_nodes(); ++i) sq[i] = g.r[i] * g.r[i];
    ScalarField dsq = d_r(sq, g);
    double sq_err = 0;
    for (int i = 0; i < g.n_nodes(); ++i) sq_err = std::max(sq_err, std::abs(dsq[i] - 2 * g.r[i]));
    check("d_r exact on quadratics", sq_err < 1e-11, "max err " + fmt(sq_err));
    check("parity round trip", dsq.parity == Parity::odd && dsq[0] == 0.0,
          "d_r even -> odd with exact axis zero");
  }

  // ---- initial data invariants --------------------------------------------
  {
    RadialGrid g = make_grid(cfg.r_max, n0);
    DataFamilyParams fam;
    fam.a_gamma = 0.1;
    fam.a_phi = 0.1;
    fam.p = 1;
    fam.w = 1;
    fam.mass = 1;
    InitialDataSet d = build_initial_data(fam, g);
    check("gauge normalisation", d.beta0[0] == 0.0 && d.alpha0[0] == 0.0,
          "beta(0) = alpha(0) = 0");

    // independent RK4 oracle on the constraint ODE, both routes evaluated
    // at 10x the finest canonical resolution
    auto kin = [&](double r) {
      const double gr = bump_deriv(0.1, 1, 1, r);
      const double pr = bump_deriv(0.1, 1, 1, r);
      return gr * gr + 0.5 * pr * pr;
    };
    auto rhs_ode = [&](double r, double w) {
      const double gam = bump(0.1, 1, 1, r);
      const double ph = bump(0.1, 1, 1, r);
      return -(2.0 * r * kin(r) * w + r * std::exp(-2.0 * gam) * ph * ph);
    };
    RadialGrid gfine = make_grid(cfg.r_max, 10 * 4 * n0);
    InitialDataSet dfine = build_initial_data(fam, gfine);
    std::vector<double> w10 =
        oracle::rk4_integrate(rhs_ode, 1.0, 0.0, gfine.r_max, 4 * gfine.n_cells);
    double beta_err = 0;
    for (int i = 0; i < gfine.n_nodes(); ++i) {
      const double beta_oracle = -0.5 * std::log(w10[4 * i]);
      beta_err = std::max(beta_err, std::abs(dfine.beta0[i] - beta_oracle));
    }
    check("beta constraint vs RK4 oracle", beta_err <= 1e-8, "max err " + fmt(beta_err));

    double mono = 0, alpha_le_beta = 0;
    for (int i = 0; i + 1 < g.n_nodes(); ++i)
      mono = std::max(mono, std::exp(-d.beta0[i + 1]) - std::exp(-d.beta0[i]));
    for (int i = 0; i < g.n_nodes(); ++i)
      alpha_le_beta = std::max(alpha_le_beta, d.alpha0[i] - d.beta0[i]);
    check("e^{-beta} nonincreasing", mono <= 1e-14, "max increase " + fmt(mono));
    check("alpha <= beta (massive)", alpha_le_beta <= 1e-14, "max excess " + fmt(alpha_le_beta));
    check("K_rr time-symmetric", max_abs(d.k_rr.v) == 0.0, "max |K_rr| = 0");
    check("cd1 margin", d.cd1_margin < 1.0, "sup D = " + fmt(d.cd1_margin));

    RadialGrid g100 = make_grid(100.0, 2048);
    DataFamilyParams slow;
    slow.a_phi = 0.3;
    slow.p = 11.0 / 16.0;
    FamilySample fs = sample_family(slow, g100);
    DecayReport dr = check_decay(fs.phi0, g100);
    check("decay fit at critical exponent", !dr.too_slow && std::abs(dr.exponent - 1.375) < 0.05,
          "fitted exponent " + fmt(dr.exponent));
    ScalarField tooslow = make_field(g100, Parity::even);
    for (int i = 0; i < g100.n_nodes(); ++i)
      tooslow[i] = std::pow(1.0 + g100.r[i] * g100.r[i], -0.25);
    DecayReport dr2 = check_decay(tooslow, g100);
    check("decay flag on slow tail", dr2.too_slow, "fitted exponent " + fmt(dr2.exponent));
  }

  // ---- vacuum fixed point ---------------------------------------------------
  {
    const auto t0 = clock::now();
    RadialGrid g = make_grid(cfg.r_max, n0);
    CauchyEvolver ev(g, 0.0);
    InitialDataSet vac = build_initial_data(DataFamilyParams{}, g);
    CauchyState s = ev.make_state(vac);
    const double dt = ev.cfl_dt(s, cfg.courant);
    for (int k = 0; k < 1000; ++k) ev.step(s, dt);
    double m = 0;
    for (const ScalarField* f : {&s.gamma, &s.phi, &s.pi_gamma, &s.pi_phi, &s.gamma_r,
                                 &s.phi_r, &s.alpha, &s.beta})
      m = std::max(m, max_abs(f->v));
    const double E = total_energy(s, g);
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    check("C1 vacuum fixed point", m <= 1e-12 && E == 0.0 && secs < 5.0,
          "max field " + fmt(m) + ", E = " + fmt(E) + ", " + fmt(secs) + " s");
  }

  // ---- massless degeneration -----------------------------------------------
  {
    RadialGrid g = make_grid(cfg.r_max, n0);
    DataFamilyParams fam;
    fam.a_gamma = cfg.a_gamma;
    fam.a_phi = cfg.a_phi;
    fam.p = cfg.p;
    fam.w = cfg.w;
    fam.mass = 0.0;
    CauchyEvolver ev(g, 0.0);
    EvolveOptions opt;
    opt.t_end = cfg.t_end;
    opt.courant = cfg.courant;
    opt.snapshot_every = cfg.snapshot_every;
    Trajectory traj = ev.evolve(build_initial_data(fam, g), opt);
    double dev = 0;
    for (const CauchyState& s : traj.snapshots)
      for (int i = 0; i < g.n_nodes(); ++i)
        dev = std::max(dev, std::abs(s.alpha[i] - s.beta[i]));
    check("C10 massless degeneration", traj.completed() && dev <= 1e-10,
          "max |alpha - beta| = " + fmt(dev));
  }

  // ---- flat-limit chart ------------------------------------------------------
  {
    RadialGrid g = make_grid(cfg.r_max, n0);
    CauchyEvolver ev(g, 0.0);
    EvolveOptions opt;
    opt.t_end = 2.0;
    opt.courant = cfg.courant;
    opt.snapshot_every = cfg.snapshot_every;
    Trajectory traj = ev.evolve(build_initial_data(DataFamilyParams{}, g), opt);
    NullChart chart = solve_chart(traj);
    compute_jacobian(chart, traj);
    double chart_err = 0, jac_err = 0;
    for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
      const double t = chart.times[j];
      for (int i = 0; i < chart.n_nodes; ++i) {
        if (!chart.valid[j][i]) continue;
        chart_err = std::max({chart_err, std::abs(chart.u[j][i] - (t - g.r[i])),
                              std::abs(chart.v[j][i] - (t + g.r[i]))});
        jac_err = std::max({jac_err, std::abs(chart.tv[j][i] - 0.5),
                            std::abs(chart.tu[j][i] - 0.5), std::abs(chart.rv[j][i] - 0.5),
                            std::abs(chart.ru[j][i] + 0.5)});
      }
    }
    check("C5 flat-limit chart", chart_err <= 1e-10 && jac_err <= 1e-10,
          "max |u,v dev| = " + fmt(chart_err) + ", max |J dev| = " + fmt(jac_err));
  }

  // ---- canonical scenario across the three grids ---------------------------
  Scenario sc;
  sc.cfg = cfg;
  sc.base_n = n0;
  sc.apexes = cfg.cone_apexes;
  if (sc.apexes.empty()) sc.apexes = {0.5 * cfg.t_end, 0.75 * cfg.t_end};
  if (sc.apexes.size() > 2) sc.apexes.resize(2);
  sc.flux_T0 = cfg.flux_T0 > 0 ? cfg.flux_T0 : 0.25 * cfg.t_end;
  sc.flux_T1 = cfg.flux_T1 > 0 ? cfg.flux_T1 : 0.75 * cfg.t_end;

  std::vector<GridRun> runs;
  for (int n : ns) {
    log << "  ... running canonical scenario at n = " << n << "\n";
    runs.push_back(run_grid(sc, n));
  }
  const GridRun& fine = runs.back();

  // C2 energy conservation
  {
    const double o1 = conv_order(runs[0].drift, runs[1].drift);
    const double o2 = conv_order(runs[1].drift, runs[2].drift);
    const bool below_floor = runs[1].drift < 1e-9 && runs[2].drift < 1e-9;
    const bool order_ok = below_floor || std::min(o1, o2) >= 1.8;
    check("C2 energy conservation",
          fine.drift <= 1e-6 && order_ok,
          "drift " + fmt(runs[0].drift) + " / " + fmt(runs[1].drift) + " / " +
              fmt(runs[2].drift) + ", orders " + fmt(o1) + ", " + fmt(o2));
  }

  // C3 beta-energy identity and metric bounds
  {
    const bool ok = fine.beta_identity <= 1e-6 && fine.mbounds.ok &&
                    fine.mbounds.beta_inf_drift <= 1e-6;
    check("C3 beta-energy identity",
          ok,
          "max residual " + fmt(fine.beta_identity) + ", beta in [" +
              fmt(fine.mbounds.beta_min) + ", " + fmt(fine.mbounds.beta_max) +
              "], beta_inf drift " + fmt(fine.mbounds.beta_inf_drift));
  }

  // C4 constraint propagation
  {
    const double m1 = conv_order(runs[0].mom_res, runs[1].mom_res);
    const double m2 = conv_order(runs[1].mom_res, runs[2].mom_res);
    const double e1 = conv_order(runs[0].eq213_res, runs[1].eq213_res);
    const double e2 = conv_order(runs[1].eq213_res, runs[2].eq213_res);
    const bool ok = std::min(m1, m2) >= 1.8 && std::min(e1, e2) >= 1.8 &&
                    fine.mom_res < 1e-4 && fine.eq213_res < 1e-4;
    check("C4 constraint propagation", ok,
          "mom res " + fmt(fine.mom_res) + " (orders " + fmt(m1) + ", " + fmt(m2) +
              "), eq(2.13)-type res " + fmt(fine.eq213_res) + " (orders " + fmt(e1) + ", " +
              fmt(e2) + ")");
    const double d1 = conv_order(runs[0].div_pt, runs[1].div_pt);
    const double d2 = conv_order(runs[1].div_pt, runs[2].div_pt);
    check("divergence monitor convergence", std::min(d1, d2) >= 1.8,
          "max " + fmt(fine.div_pt) + ", orders " + fmt(d1) + ", " + fmt(d2));
  }

  // C6 chart algebra
  {
    const double c1o = conv_order(runs[0].col_consistency, runs[1].col_consistency);
    const double c2o = conv_order(runs[1].col_consistency, runs[2].col_consistency);
    const bool ok = fine.jac_identity <= 1e-8 && fine.lam_identity == 0.0 &&
                    std::min(c1o, c2o) >= 0.9 && fine.metric_lam_agree <= 1e-6;
    check("C6 chart algebra", ok,
          "|J Jinv - I| " + fmt(fine.jac_identity) + ", |2lam-(F+G)| " +
              fmt(fine.lam_identity) + ", col-consistency orders " + fmt(c1o) + ", " +
              fmt(c2o) + ", e^{2lam} agreement " + fmt(fine.metric_lam_agree));
    const double t1 = conv_order(runs[0].transport_res, runs[1].transport_res);
    const double t2 = conv_order(runs[1].transport_res, runs[2].transport_res);
    check("F/G transport residual convergence", std::min(t1, t2) >= 0.9,
          "max " + fmt(fine.transport_res) + ", orders " + fmt(t1) + ", " + fmt(t2));
    check("chart vs characteristic oracle", fine.chart_oracle <= 5e-3 * cfg.r_max,
          "max deviation " + fmt(fine.chart_oracle));
  }

  // C7 r/R bands and gamma floor
  {
    const double c1_mid = runs[1].cbounds.r_over_R_min;
    const double c1_fine = fine.cbounds.r_over_R_min;
    const double c2_mid = runs[1].cbounds.r_over_R_max;
    const double c2_fine = fine.cbounds.r_over_R_max;
    const double rel1 = std::abs(c1_fine - c1_mid) / c1_mid;
    const double rel2 = std::abs(c2_fine - c2_mid) / c2_mid;
    const bool ok = c1_fine > 0 && rel1 <= 0.05 && rel2 <= 0.05 && fine.gfloor.ok;
    check("C7 r/R band and gamma floor", ok,
          "r/R in [" + fmt(c1_fine) + ", " + fmt(c2_fine) + "] (drift " + fmt(rel1) + ", " +
              fmt(rel2) + "), min gamma " + fmt(fine.gfloor.gamma_min));
  }

  // C8 cone energetics
  {
    bool ok = true;
    std::ostringstream det;
    for (std::size_t a = 0; a < sc.apexes.size(); ++a) {
      double viol[3], stokes[3];
      for (int k = 0; k < 3; ++k) {
        viol[k] = runs[k].cone_monotone[a];
        stokes[k] = runs[k].cone_stokes[a];
      }
      // C h^2 scaling: the measured constant must not grow under refinement
      const double Cv0 = viol[0] / (runs[0].h * runs[0].h);
      const double Cv2 = viol[2] / (runs[2].h * runs[2].h);
      const double Cs0 = stokes[0] / (runs[0].h * runs[0].h);
      const double Cs2 = stokes[2] / (runs[2].h * runs[2].h);
      const double floor_abs = 1e-10;
      const bool mono_ok = viol[2] < floor_abs || Cv2 <= 2.0 * std::max(Cv0, 1e-8);
      const bool stokes_ok = stokes[2] < floor_abs || Cs2 <= 2.0 * std::max(Cs0, 1e-8);
      ok = ok && mono_ok && stokes_ok;
      det << "apex " << sc.apexes[a] << ": viol " << fmt(viol[2]) << " (C " << fmt(Cv2)
          << "), stokes " << fmt(stokes[2]) << " (C " << fmt(Cs2) << "); ";
    }
    check("C8 cone energetics", ok, det.str());
    check("cone boundary vs ray oracle", fine.cone_oracle <= 5e-3 * cfg.r_max,
          "max deviation " + fmt(fine.cone_oracle));
  }

  // C9 flux bounds
  {
    bool ok = fine.flux.violations == 0;
    double worst_tr = 0;
    for (const ConeTREnergy& te : fine.tr_energies) {
      ok = ok && te.ok;
      if (te.bound > 0) worst_tr = std::max(worst_tr, te.value / te.bound);
    }
    const bool t0_ok =
        std::abs(fine.tr_ratio_at_T0 - 1.0) <= std::max(0.02, 5.0 * fine.col_consistency);
    check("C9 flux bounds", ok && t0_ok,
          "null-line worst ratio " + fmt(fine.flux.worst_ratio) + ", cone (T,R) worst ratio " +
              fmt(worst_tr) + ", E~(0)/E^O(0) = " + fmt(fine.tr_ratio_at_T0));
  }

  // C11 cross-formulation agreement
  {
    auto sup = [](const CauchyComparison& c) {
      return std::max({c.sup_gamma, c.sup_phi, c.sup_r, c.sup_lam});
    };
    const double s0 = sup(runs[0].dn_cmp), s1 = sup(runs[1].dn_cmp), s2 = sup(runs[2].dn_cmp);
    const double o1 = conv_order(s0, s1), o2 = conv_order(s1, s2);
    const double r1 = conv_order(runs[0].dn_raych, runs[1].dn_raych);
    const double r2 = conv_order(runs[1].dn_raych, runs[2].dn_raych);
    const bool ok = std::min(o1, o2) >= 1.5 && std::min(r1, r2) >= 1.8 &&
                    runs[2].dn_cmp.n_points > 100;
    check("C11 cross-formulation agreement", ok,
          "sup diff " + fmt(s2) + " (orders " + fmt(o1) + ", " + fmt(o2) + "), raych res " +
              fmt(fine.dn_raych) + " (orders " + fmt(r1) + ", " + fmt(r2) + ")");
    const double f1 = conv_order(runs[0].dn_trform, runs[1].dn_trform);
    const double f2 = conv_order(runs[1].dn_trform, runs[2].dn_trform);
    check("(T,R)-form residual convergence", std::min(f1, f2) >= 1.5,
          "max " + fmt(fine.dn_trform) + ", orders " + fmt(f1) + ", " + fmt(f2));
  }

  // C12 small-cone monitor
  {
    std::vector<SmallConeSpec> cones = cfg.small_cones;
    if (cones.empty()) cones.push_back({0.5 * cfg.t_end, 0.5 * cfg.t_end, 1.0});
    bool ok = true;
    std::ostringstream det;
    NullChart chart = solve_chart(fine.traj);
    compute_FG(chart, fine.traj);
    for (const SmallConeSpec& scn : cones) {
      double ratios[3];
      for (int k = 0; k < 3; ++k) {
        ConeMonitor mon = cone_gradient_monitor(fine.traj, chart, scn.T_c, scn.R_c,
                                                scn.scale / (1 << k));
        ratios[k] = mon.ratio;
        ok = ok && mon.n_cone > 0 && std::isfinite(mon.ratio);
      }
      ok = ok && ratios[2] <= 2.5 * std::max({ratios[0], ratios[1], 0.5});
      det << "X/M at scales e, e/2, e/4: " << fmt(ratios[0]) << ", " << fmt(ratios[1]) << ", "
          << fmt(ratios[2]) << "; ";
    }
    check("C12 small-cone monitor", ok, det.str());
  }

  // ---- remaining module invariants on the finest run ------------------------
  check("e >= |mhat| pointwise", fine.e_minus_m_min >= -1e-15,
        "min (e - |mhat|) = " + fmt(fine.e_minus_m_min));
  check("e^{-2beta} in (0,1]", fine.w_min > 0.0 && fine.w_max <= 1.0 + 1e-15,
        "range [" + fmt(fine.w_min) + ", " + fmt(fine.w_max) + "]");
  {
    const double k1 = conv_order(runs[0].reduction_err, runs[1].reduction_err);
    const double k2 = conv_order(runs[1].reduction_err, runs[2].reduction_err);
    const bool below = runs[2].reduction_err < 1e-12;
    check("first-order reduction consistency", below || std::min(k1, k2) >= 1.8,
          "max |Phi - d_r X| = " + fmt(fine.reduction_err) + ", orders " + fmt(k1) + ", " +
              fmt(k2));
    const bool axis_ok = fine.axis_phi <= 10.0 * fine.h * std::max(1.0, cfg.a_gamma);
    check("axis regularity", axis_ok, "max |gamma_r(t, h)| = " + fmt(fine.axis_phi) +
                                          " vs h = " + fmt(fine.h));
  }

  // determinism: identical configs give byte-identical CSV
  {
    namespace fs = std::filesystem;
    const fs::path tmp = fs::temp_directory_path() / "ekg_verify_det";
    fs::create_directories(tmp);
    auto run_once = [&](const fs::path& p) {
      RadialGrid g = make_grid(cfg.r_max, n0);
      DataFamilyParams fam;
      fam.a_gamma = cfg.a_gamma;
      fam.a_phi = cfg.a_phi;
      fam.mass = cfg.mass;
      CauchyEvolver ev(g, cfg.mass);
      EvolveOptions opt;
      opt.t_end = 10 * cfg.courant * g.h;
      opt.courant = cfg.courant;
      opt.snapshot_every = 5;
      Trajectory t = ev.evolve(build_initial_data(fam, g), opt);
      write_snapshot_csv(p.string(), t.snapshots.back(), g);
    };
    run_once(tmp / "a.csv");
    run_once(tmp / "b.csv");
    std::ifstream fa(tmp / "a.csv"), fb(tmp / "b.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    check("determinism", sa.str() == sb.str() && sa.str().size() > 0,
          "byte-identical snapshot CSV across repeated runs");
  }

  rep.wall_seconds = std::chrono::duration<double>(clock::now() - t_start).count();
  log << (rep.all_pass() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << " ("
      << fmt(rep.wall_seconds) << " s)\n";
  return rep;
}

}  // namespace ekg
