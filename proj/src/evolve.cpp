#include "ekg/evolve.hpp"

#include <cmath>
#include <sstream>

namespace ekg {

void StateDerivs::resize(std::size_t n) {
  gamma.resize(n);
  phi.resize(n);
  pi_gamma.resize(n);
  pi_phi.resize(n);
  gamma_r.resize(n);
  phi_r.resize(n);
}

CauchyEvolver::CauchyEvolver(RadialGrid grid, double mass) : grid_(std::move(grid)), mass_(mass) {
  if (mass_ < 0.0) throw ConfigError("evolver: mass must be nonnegative");
}

CauchyState CauchyEvolver::make_state(const InitialDataSet& data) const {
  CauchyState s;
  s.t = 0.0;
  s.mass = mass_;
  s.gamma = data.gamma0;
  s.phi = data.phi0;
  s.pi_gamma = data.gamma1;
  s.pi_phi = data.phi1;
  s.gamma_r = ScalarField(data.gamma0.size(), Parity::odd);
  s.phi_r = ScalarField(data.phi0.size(), Parity::odd);
  stencil::deriv4(data.gamma0.v.data(), grid_.n_nodes(), grid_.h, Parity::even,
                  s.gamma_r.v.data());
  stencil::deriv4(data.phi0.v.data(), grid_.n_nodes(), grid_.h, Parity::even,
                  s.phi_r.v.data());
  s.alpha = make_field(grid_, Parity::even);
  s.beta = make_field(grid_, Parity::even);
  solve_gauge(s);
  return s;
}

void CauchyEvolver::solve_gauge(CauchyState& s) const {
  const int n = grid_.n_nodes();
  std::vector<double> kin(n);
  for (int i = 0; i < n; ++i) {
    const double pg = s.pi_gamma[i], pp = s.pi_phi[i];
    const double gr = s.gamma_r[i], pr = s.phi_r[i];
    kin[i] = pg * pg + gr * gr + 0.5 * (pp * pp + pr * pr);
  }
  BetaSolve bs = solve_beta_constraint(kin, s.gamma, s.phi, mass_, grid_);
  s.beta = std::move(bs.beta);
  s.alpha = solve_alpha(s.beta, s.gamma, s.phi, mass_, grid_);
}

void CauchyEvolver::rhs(const CauchyState& s, StateDerivs& out) const {
  const int n = grid_.n_nodes();
  out.resize(n);
  const double m2 = mass_ * mass_;

  // work buffers: c Pi and c Phi for both fields
  static thread_local std::vector<double> c, eab, w;
  c.resize(n);
  eab.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    c[i] = std::exp(s.alpha[i] - s.beta[i]);
    eab[i] = std::exp(s.alpha[i] + s.beta[i]);
  }

  for (int i = 0; i < n; ++i) out.gamma[i] = c[i] * s.pi_gamma[i];
  stencil::deriv4(out.gamma.data(), n, grid_.h, Parity::even, out.gamma_r.data());

  for (int i = 0; i < n; ++i) out.phi[i] = c[i] * s.pi_phi[i];
  stencil::deriv4(out.phi.data(), n, grid_.h, Parity::even, out.phi_r.data());

  for (int i = 0; i < n; ++i) w[i] = c[i] * s.gamma_r[i];
  stencil::div_r4(w.data(), grid_.r.data(), n, grid_.h, out.pi_gamma.data());
  for (int i = 0; i < n; ++i) {
    const double src = -0.5 * m2 * std::exp(-2.0 * s.gamma[i]) * s.phi[i] * s.phi[i];
    out.pi_gamma[i] -= eab[i] * src;
  }

  for (int i = 0; i < n; ++i) w[i] = c[i] * s.phi_r[i];
  stencil::div_r4(w.data(), grid_.r.data(), n, grid_.h, out.pi_phi.data());
  for (int i = 0; i < n; ++i) {
    const double src = m2 * std::exp(-2.0 * s.gamma[i]) * s.phi[i];
    out.pi_phi[i] -= eab[i] * src;
  }
}

double CauchyEvolver::cfl_dt(const CauchyState& s, double courant) const {
  if (!(courant > 0.0 && courant <= 1.0))
    throw ConfigError("cfl_dt: courant must lie in (0, 1]");
  double cmax = 0.0;
  for (int i = 0; i < grid_.n_nodes(); ++i)
    cmax = std::max(cmax, std::exp(s.alpha[i] - s.beta[i]));
  return courant * grid_.h / cmax;
}

namespace {

void axpy_state(CauchyState& y, const CauchyState& base, double a, const StateDerivs& k) {
  const std::size_t n = base.gamma.size();
  for (std::size_t i = 0; i < n; ++i) {
    y.gamma[i] = base.gamma[i] + a * k.gamma[i];
    y.phi[i] = base.phi[i] + a * k.phi[i];
    y.pi_gamma[i] = base.pi_gamma[i] + a * k.pi_gamma[i];
    y.pi_phi[i] = base.pi_phi[i] + a * k.pi_phi[i];
    y.gamma_r[i] = base.gamma_r[i] + a * k.gamma_r[i];
    y.phi_r[i] = base.phi_r[i] + a * k.phi_r[i];
  }
  // odd reduction variables vanish on the axis
  y.gamma_r[0] = 0.0;
  y.phi_r[0] = 0.0;
}

bool finite_state(const CauchyState& s) {
  auto ok = [](const ScalarField& f) {
    for (double x : f.v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  return ok(s.gamma) && ok(s.phi) && ok(s.pi_gamma) && ok(s.pi_phi) && ok(s.gamma_r) &&
         ok(s.phi_r) && ok(s.alpha) && ok(s.beta);
}

}  // namespace

void CauchyEvolver::step(CauchyState& s, double dt) const {
  if (dt == 0.0) return;
  static thread_local StateDerivs k1, k2, k3, k4;
  CauchyState stage = s;

  rhs(s, k1);
  axpy_state(stage, s, 0.5 * dt, k1);
  solve_gauge(stage);
  rhs(stage, k2);
  axpy_state(stage, s, 0.5 * dt, k2);
  solve_gauge(stage);
  rhs(stage, k3);
  axpy_state(stage, s, dt, k3);
  solve_gauge(stage);
  rhs(stage, k4);

  const std::size_t n = s.gamma.size();
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.gamma[i] += w * (k1.gamma[i] + 2.0 * k2.gamma[i] + 2.0 * k3.gamma[i] + k4.gamma[i]);
    s.phi[i] += w * (k1.phi[i] + 2.0 * k2.phi[i] + 2.0 * k3.phi[i] + k4.phi[i]);
    s.pi_gamma[i] +=
        w * (k1.pi_gamma[i] + 2.0 * k2.pi_gamma[i] + 2.0 * k3.pi_gamma[i] + k4.pi_gamma[i]);
    s.pi_phi[i] += w * (k1.pi_phi[i] + 2.0 * k2.pi_phi[i] + 2.0 * k3.pi_phi[i] + k4.pi_phi[i]);
    s.gamma_r[i] +=
        w * (k1.gamma_r[i] + 2.0 * k2.gamma_r[i] + 2.0 * k3.gamma_r[i] + k4.gamma_r[i]);
    s.phi_r[i] += w * (k1.phi_r[i] + 2.0 * k2.phi_r[i] + 2.0 * k3.phi_r[i] + k4.phi_r[i]);
  }
  s.gamma_r[0] = 0.0;
  s.phi_r[0] = 0.0;
  s.t += dt;
  solve_gauge(s);

  if (!finite_state(s)) {
    std::ostringstream os;
    os << "numerical failure: non-finite field detected at t = " << s.t;
    throw NumericalError(os.str());
  }
}

Trajectory CauchyEvolver::evolve(const InitialDataSet& data, const EvolveOptions& opt) const {
  if (!(opt.t_end > 0.0)) throw ConfigError("evolve: t_end must be positive");
  if (opt.snapshot_every < 1) throw ConfigError("evolve: snapshot_every must be >= 1");

  Trajectory traj;
  traj.grid = grid_;
  traj.mass = mass_;
  traj.courant = opt.courant;

  const double r_diag = opt.r_diag > 0.0 ? opt.r_diag : std::max(grid_.h, grid_.r_max - opt.t_end);
  traj.r_diag_index =
      std::min(grid_.n_cells, static_cast<int>(std::floor(r_diag / grid_.h + 0.5)));

  CauchyState s = make_state(data);

  auto record_speed = [&](const CauchyState& st) {
    std::vector<double> c(grid_.n_nodes());
    for (int i = 0; i < grid_.n_nodes(); ++i) c[i] = std::exp(st.alpha[i] - st.beta[i]);
    traj.speed_history.push_back(std::move(c));
  };
  auto boundary_flux = [&](const CauchyState& st) {
    const int j = traj.r_diag_index;
    const double mhat = std::exp(-2.0 * st.beta[j]) *
                        (2.0 * st.pi_gamma[j] * st.gamma_r[j] + st.pi_phi[j] * st.phi_r[j]);
    return 2.0 * M_PI * grid_.r[j] * std::exp(st.alpha[j]) * mhat;
  };
  auto ball_energy_at_diag = [&](const CauchyState& st) {
    return 2.0 * M_PI * (1.0 - std::exp(-st.beta[traj.r_diag_index]));
  };

  traj.step_times.push_back(0.0);
  record_speed(s);
  traj.boundary_flux.push_back(boundary_flux(s));
  traj.conserved_energy.push_back(ball_energy_at_diag(s));
  traj.snapshots.push_back(s);
  traj.snapshot_steps.push_back(0);
  if (opt.on_snapshot) opt.on_snapshot(s, 0);

  double flux_acc = 0.0;
  int step_idx = 0;
  while (s.t < opt.t_end - 1e-12 * opt.t_end) {
    double dt = cfl_dt(s, opt.courant);
    dt = std::min(dt, opt.t_end - s.t);
    try {
      step(s, dt);
    } catch (const NumericalError& e) {
      traj.stop_reason = e.what();
      break;
    }
    ++step_idx;
    traj.dts.push_back(dt);
    traj.step_times.push_back(s.t);
    record_speed(s);
    const double fl = boundary_flux(s);
    flux_acc += 0.5 * dt * (traj.boundary_flux.back() + fl);
    traj.boundary_flux.push_back(fl);
    traj.conserved_energy.push_back(ball_energy_at_diag(s) - flux_acc);

    const bool at_end = s.t >= opt.t_end - 1e-12 * opt.t_end;
    if (step_idx % opt.snapshot_every == 0 || at_end) {
      traj.snapshots.push_back(s);
      traj.snapshot_steps.push_back(step_idx);
      if (opt.on_snapshot) opt.on_snapshot(s, step_idx);
    }
  }
  return traj;
}

namespace {

// Centered second radial derivative of an even field, one-sided at r_max.
void second_deriv_even(const ScalarField& f, const RadialGrid& g, std::vector<double>& out) {
  const int n = g.n_nodes();
  out.resize(n);
  const double ih2 = 1.0 / (g.h * g.h);
  out[0] = 2.0 * (f[1] - f[0]) * ih2;
  for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * ih2;
  out[n - 1] =
      (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * ih2;
}

}  // namespace

ScalarField momentum_constraint_residual(const CauchyState& prev, const CauchyState& mid,
                                         const CauchyState& next, const RadialGrid& g) {
  const double dt2 = next.t - prev.t;
  ScalarField res = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double beta_t = (next.beta[i] - prev.beta[i]) / dt2;
    const double c = std::exp(mid.alpha[i] - mid.beta[i]);
    const double rhs = 2.0 * g.r[i] * (c * mid.pi_gamma[i]) * mid.gamma_r[i] +
                       g.r[i] * (c * mid.pi_phi[i]) * mid.phi_r[i];
    res[i] = beta_t - rhs;
  }
  return res;
}

ScalarField eq213_residual(const CauchyState& prev, const CauchyState& mid,
                           const CauchyState& next, const RadialGrid& g) {
  const double dt = 0.5 * (next.t - prev.t);
  const double m2 = mid.mass * mid.mass;
  static thread_local std::vector<double> arr;
  ScalarField a_r = d_r(mid.alpha, g);
  ScalarField b_r = d_r(mid.beta, g);
  second_deriv_even(mid.alpha, g, arr);

  ScalarField res = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double e2b = std::exp(-2.0 * mid.beta[i]);
    const double e2a = std::exp(-2.0 * mid.alpha[i]);
    const double a_t = (next.alpha[i] - prev.alpha[i]) / (2.0 * dt);
    const double b_t = (next.beta[i] - prev.beta[i]) / (2.0 * dt);
    const double b_tt = (next.beta[i] - 2.0 * mid.beta[i] + prev.beta[i]) / (dt * dt);
    const double lhs = e2b * arr[i] - e2a * b_tt + e2b * a_r[i] * (a_r[i] - b_r[i]) +
                       e2a * b_t * (a_t - b_t);
    const double c = std::exp(mid.alpha[i] - mid.beta[i]);
    const double g_t = c * mid.pi_gamma[i], p_t = c * mid.pi_phi[i];
    const double rhs = -0.5 * m2 * std::exp(-2.0 * mid.gamma[i]) * mid.phi[i] * mid.phi[i] +
                       e2a * (g_t * g_t + 0.5 * p_t * p_t) -
                       e2b * (mid.gamma_r[i] * mid.gamma_r[i] + 0.5 * mid.phi_r[i] * mid.phi_r[i]);
    res[i] = lhs - rhs;
  }
  return res;
}

}  // namespace ekg
