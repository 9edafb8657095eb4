#include "ekg/initial_data.hpp"

#include <cmath>
#include <sstream>

namespace ekg {

void validate(const DataFamilyParams& p) {
  if (!(p.w > 0.0)) throw ConfigError("data family: width w must be positive");
  if (!(p.p >= 11.0 / 16.0))
    throw ConfigError("data family: decay exponent p must be >= 11/16");
  if (!(p.mass >= 0.0)) throw ConfigError("data family: mass must be nonnegative");
  if (p.a_gamma < 0.0)
    throw FamilyError("data family: a_gamma < 0 violates gamma_0 >= 0");
  if (p.gamma1_amp < 0.0)
    throw FamilyError("data family: gamma1_amp < 0 violates gamma_1 >= 0");
  if (!std::isfinite(p.a_gamma) || !std::isfinite(p.a_phi) || !std::isfinite(p.gamma1_amp))
    throw ConfigError("data family: amplitudes must be finite");
}

double bump(double a, double p, double w, double r) {
  const double x = r / w;
  return a * std::pow(1.0 + x * x, -p);
}

double bump_deriv(double a, double p, double w, double r) {
  const double x = r / w;
  return -2.0 * a * p * (r / (w * w)) * std::pow(1.0 + x * x, -p - 1.0);
}

FamilySample sample_family(const DataFamilyParams& p, const RadialGrid& g) {
  validate(p);
  FamilySample s;
  s.gamma0 = make_field(g, Parity::even);
  s.gamma1 = make_field(g, Parity::even);
  s.phi0 = make_field(g, Parity::even);
  s.phi1 = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double r = g.r[i];
    s.gamma0[i] = bump(p.a_gamma, p.p, p.w, r);
    s.gamma1[i] = bump(p.gamma1_amp, p.p, p.w, r);
    s.phi0[i] = bump(p.a_phi, p.p, p.w, r);
  }
  // gamma_0 >= 0 and gamma_0' > -1/(2r) checked pointwise on the sampled
  // profile (the closed-form derivative avoids stencil noise near the axis).
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double r = g.r[i];
    if (s.gamma0[i] < 0.0) {
      std::ostringstream os;
      os << "data family: gamma_0(" << r << ") < 0";
      throw FamilyError(os.str());
    }
    if (i > 0) {
      const double dg = bump_deriv(p.a_gamma, p.p, p.w, r);
      if (!(dg > -0.5 / r)) {
        std::ostringstream os;
        os << "data family: gamma_0'(" << r << ") <= -1/(2r)";
        throw FamilyError(os.str());
      }
    }
  }
  return s;
}

BetaSolve solve_beta_constraint(const std::vector<double>& kin, const ScalarField& gamma,
                                const ScalarField& phi, double mass, const RadialGrid& g) {
  const int n = g.n_nodes();
  BetaSolve out;
  out.beta = make_field(g, Parity::even);
  out.D.assign(n, 0.0);

  std::vector<double> q(n), Q(n);
  for (int i = 0; i < n; ++i) q[i] = 2.0 * g.r[i] * kin[i];
  stencil::cumquad4(q.data(), n, g.h, Q.data());

  const double m2 = mass * mass;
  std::vector<double> integ(n);
  for (int i = 0; i < n; ++i)
    integ[i] = m2 * g.r[i] * std::exp(-2.0 * gamma[i] + Q[i]) * phi[i] * phi[i];
  stencil::cumquad4(integ.data(), n, g.h, out.D.data());

  for (int i = 0; i < n; ++i) {
    out.cd1_margin = std::max(out.cd1_margin, out.D[i]);
    const double w = std::exp(-Q[i]) * (1.0 - out.D[i]);
    if (!(w > 1e-14)) {
      std::ostringstream os;
      os << "(cd1) violated at r = " << g.r[i] << ": D(r) = " << out.D[i]
         << " reaches 1 (infinite initial energy)";
      throw GaugeSingularityError(os.str());
    }
    out.beta[i] = -0.5 * std::log(w);
  }
  return out;
}

ScalarField solve_beta0(const ScalarField& gamma0, const ScalarField& phi0, double mass,
                        const RadialGrid& g) {
  ScalarField gr(gamma0.size(), Parity::odd), pr(phi0.size(), Parity::odd);
  stencil::deriv4(gamma0.v.data(), g.n_nodes(), g.h, gamma0.parity, gr.v.data());
  stencil::deriv4(phi0.v.data(), g.n_nodes(), g.h, phi0.parity, pr.v.data());
  std::vector<double> kin(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) kin[i] = gr[i] * gr[i] + 0.5 * pr[i] * pr[i];
  return solve_beta_constraint(kin, gamma0, phi0, mass, g).beta;
}

ScalarField solve_alpha(const ScalarField& beta, const ScalarField& gamma,
                        const ScalarField& phi, double mass, const RadialGrid& g) {
  const int n = g.n_nodes();
  const double m2 = mass * mass;
  std::vector<double> aux(n), acc(n);
  for (int i = 0; i < n; ++i)
    aux[i] = m2 * g.r[i] * std::exp(2.0 * (beta[i] - gamma[i])) * phi[i] * phi[i];
  stencil::cumquad4(aux.data(), n, g.h, acc.data());
  ScalarField alpha = make_field(g, Parity::even);
  for (int i = 0; i < n; ++i) alpha[i] = beta[i] - acc[i];
  return alpha;
}

InitialDataSet build_initial_data(const DataFamilyParams& p, const RadialGrid& g) {
  InitialDataSet d;
  d.params = p;
  FamilySample s = sample_family(p, g);
  d.gamma0 = std::move(s.gamma0);
  d.gamma1 = std::move(s.gamma1);
  d.phi0 = std::move(s.phi0);
  d.phi1 = std::move(s.phi1);

  ScalarField gr(d.gamma0.size(), Parity::odd), pr(d.phi0.size(), Parity::odd);
  stencil::deriv4(d.gamma0.v.data(), g.n_nodes(), g.h, Parity::even, gr.v.data());
  stencil::deriv4(d.phi0.v.data(), g.n_nodes(), g.h, Parity::even, pr.v.data());
  std::vector<double> kin(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double pg = d.gamma1[i];  // densitized momentum e^{beta-alpha} gamma_t
    const double pp = d.phi1[i];
    kin[i] = pg * pg + gr[i] * gr[i] + 0.5 * (pp * pp + pr[i] * pr[i]);
  }
  BetaSolve bs = solve_beta_constraint(kin, d.gamma0, d.phi0, p.mass, g);
  d.beta0 = std::move(bs.beta);
  d.cd1_margin = bs.cd1_margin;
  d.alpha0 = solve_alpha(d.beta0, d.gamma0, d.phi0, p.mass, g);

  // K_rr = e^{-alpha+2beta} beta_t with beta_t = 2r gamma_t gamma_r + r phi_t phi_r.
  d.k_rr = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double c = std::exp(d.alpha0[i] - d.beta0[i]);  // gamma_t = c * Pi_gamma
    const double beta_t = 2.0 * g.r[i] * (c * d.gamma1[i]) * gr[i];
    d.k_rr[i] = std::exp(-d.alpha0[i] + 2.0 * d.beta0[i]) * beta_t;
  }
  return d;
}

DecayReport check_decay(const ScalarField& field, const RadialGrid& g) {
  DecayReport rep;
  double fmax = 0.0;
  for (double x : field.v) fmax = std::max(fmax, std::abs(x));
  if (fmax == 0.0) {
    rep.identically_zero = true;
    return rep;
  }
  // least squares of log|f| against log r on the outer third
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int i = 2 * g.n_cells / 3; i < g.n_nodes(); ++i) {
    const double f = std::abs(field[i]);
    if (f < 1e-300 || g.r[i] <= 0.0) continue;
    const double x = std::log(g.r[i]);
    const double y = std::log(f);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++count;
  }
  if (count < 4) {
    rep.identically_zero = true;  // tail numerically empty
    return rep;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  rep.exponent = -slope;
  rep.too_slow = rep.exponent < 11.0 / 8.0 - 0.05;
  return rep;
}

}  // namespace ekg
