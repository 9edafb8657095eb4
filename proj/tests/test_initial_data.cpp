#include <cmath>

#include "doctest.h"
#include "ekg/initial_data.hpp"
#include "ekg/oracles.hpp"

using namespace ekg;

TEST_CASE("sample_family profiles and inequalities") {
  RadialGrid g = make_grid(20.0, 512);

  DataFamilyParams zero;
  FamilySample fz = sample_family(zero, g);
  CHECK(max_abs(fz.gamma0.v) == 0.0);
  CHECK(max_abs(fz.phi0.v) == 0.0);

  DataFamilyParams p;
  p.a_gamma = 0.1;
  p.w = 1.0;
  p.p = 1.0;
  FamilySample f = sample_family(p, g);
  // gamma_0(1) = 0.1 / (1 + 1) = 0.05, and nodes sample the closed form
  CHECK(bump(0.1, 1.0, 1.0, 1.0) == doctest::Approx(0.05).epsilon(1e-14));
  const int i1 = static_cast<int>(1.0 / g.h + 0.5);
  CHECK(f.gamma0[i1] == doctest::Approx(bump(0.1, 1.0, 1.0, g.r[i1])).epsilon(1e-14));
  // gamma_0' > -1/(2r) on a dense sample
  for (int k = 1; k <= 4000; ++k) {
    const double r = 20.0 * k / 4000.0;
    CHECK(bump_deriv(0.1, 1.0, 1.0, r) > -0.5 / r);
  }

  DataFamilyParams bad;
  bad.gamma1_amp = -0.1;
  CHECK_THROWS_AS(sample_family(bad, g), FamilyError);
}

TEST_CASE("solve_beta0 vacuum and oracle checks") {
  RadialGrid g = make_grid(20.0, 512);
  ScalarField zero = make_field(g, Parity::even);
  ScalarField beta = solve_beta0(zero, zero, 0.0, g);
  CHECK(max_abs(beta.v) == 0.0);

  // the closed form is checked against an RK4 oracle at 10x the finest
  // canonical resolution, where both have converged well below 1e-8
  RadialGrid gf = make_grid(20.0, 5120);
  ScalarField zf = make_field(gf, Parity::even);

  // massless pure-gamma data: -d_r e^{-2beta} = 2 r e^{-2beta} gamma_r^2
  auto rhs_massless = [](double r, double w) {
    const double gr = bump_deriv(0.2, 1.0, 1.0, r);
    return -2.0 * r * gr * gr * w;
  };
  std::vector<double> w_oracle =
      oracle::rk4_integrate(rhs_massless, 1.0, 0.0, 20.0, 4 * gf.n_cells);
  ScalarField gamma0 = make_field(gf, Parity::even);
  for (int i = 0; i < gf.n_nodes(); ++i) gamma0[i] = bump(0.2, 1.0, 1.0, gf.r[i]);
  ScalarField beta_m0 = solve_beta0(gamma0, zf, 0.0, gf);
  double err = 0;
  for (int i = 0; i < gf.n_nodes(); ++i)
    err = std::max(err, std::abs(beta_m0[i] + 0.5 * std::log(w_oracle[4 * i])));
  CHECK(err <= 1e-8);

  // full family with mass
  auto rhs_full = [](double r, double w) {
    const double gr = bump_deriv(0.1, 1.0, 1.0, r);
    const double pr = bump_deriv(0.1, 1.0, 1.0, r);
    const double gam = bump(0.1, 1.0, 1.0, r);
    const double ph = bump(0.1, 1.0, 1.0, r);
    return -(2.0 * r * (gr * gr + 0.5 * pr * pr) * w + r * std::exp(-2.0 * gam) * ph * ph);
  };
  std::vector<double> wf = oracle::rk4_integrate(rhs_full, 1.0, 0.0, 20.0, 4 * gf.n_cells);
  ScalarField phi0 = make_field(gf, Parity::even);
  for (int i = 0; i < gf.n_nodes(); ++i) {
    gamma0[i] = bump(0.1, 1.0, 1.0, gf.r[i]);
    phi0[i] = bump(0.1, 1.0, 1.0, gf.r[i]);
  }
  ScalarField beta_f = solve_beta0(gamma0, phi0, 1.0, gf);
  err = 0;
  for (int i = 0; i < gf.n_nodes(); ++i)
    err = std::max(err, std::abs(beta_f[i] + 0.5 * std::log(wf[4 * i])));
  CHECK(err <= 1e-8);
}

TEST_CASE("solve_alpha structure") {
  RadialGrid g = make_grid(20.0, 512);
  ScalarField zero = make_field(g, Parity::even);
  ScalarField alpha_vac = solve_alpha(zero, zero, zero, 1.0, g);
  CHECK(max_abs(alpha_vac.v) == 0.0);

  DataFamilyParams p;
  p.a_gamma = 0.1;
  p.a_phi = 0.1;
  p.mass = 0.0;
  InitialDataSet d0 = build_initial_data(p, g);
  for (int i = 0; i < g.n_nodes(); ++i) CHECK(d0.alpha0[i] == d0.beta0[i]);

  p.mass = 1.0;
  InitialDataSet dm = build_initial_data(p, g);
  CHECK(dm.beta0[0] == 0.0);
  CHECK(dm.alpha0[0] == 0.0);
  for (int i = 0; i < g.n_nodes(); ++i) CHECK(dm.alpha0[i] <= dm.beta0[i] + 1e-15);
  // e^{-beta} nonincreasing
  for (int i = 0; i + 1 < g.n_nodes(); ++i)
    CHECK(std::exp(-dm.beta0[i + 1]) <= std::exp(-dm.beta0[i]) + 1e-15);
  CHECK(max_abs(dm.k_rr.v) == 0.0);
  CHECK(dm.cd1_margin < 1.0);
  CHECK(dm.cd1_margin > 0.0);
}

TEST_CASE("discrete constraint residual converges at order >= 1.9") {
  double res[3];
  for (int k = 0; k < 3; ++k) {
    RadialGrid g = make_grid(20.0, 512 << k);
    DataFamilyParams p;
    p.a_gamma = 0.1;
    p.a_phi = 0.1;
    p.mass = 1.0;
    InitialDataSet d = build_initial_data(p, g);
    ScalarField gr = d_r(d.gamma0, g), pr = d_r(d.phi0, g);
    // centered residual of -d_r(e^{-2beta}) = 2r e^{-2beta}(gr^2 + pr^2/2) + m^2 r e^{-2gam} phi^2
    double worst = 0;
    for (int i = 1; i + 1 < g.n_nodes(); ++i) {
      const double dw =
          -(std::exp(-2.0 * d.beta0[i + 1]) - std::exp(-2.0 * d.beta0[i - 1])) / (2.0 * g.h);
      const double rhs = 2.0 * g.r[i] * std::exp(-2.0 * d.beta0[i]) *
                             (gr[i] * gr[i] + 0.5 * pr[i] * pr[i]) +
                         g.r[i] * std::exp(-2.0 * d.gamma0[i]) * d.phi0[i] * d.phi0[i];
      worst = std::max(worst, std::abs(dw - rhs));
    }
    res[k] = worst;
  }
  CHECK(std::log2(res[0] / res[1]) > 1.9);
  CHECK(std::log2(res[1] / res[2]) > 1.9);
}

TEST_CASE("cd1 violation raises") {
  RadialGrid g = make_grid(20.0, 512);
  DataFamilyParams p;
  p.a_phi = 40.0;  // enormous mass-energy: D(r) crosses 1
  p.mass = 4.0;
  CHECK_THROWS_AS(build_initial_data(p, g), GaugeSingularityError);
}

TEST_CASE("check_decay") {
  RadialGrid g = make_grid(100.0, 2048);
  ScalarField zero = make_field(g, Parity::even);
  DecayReport rz = check_decay(zero, g);
  CHECK(rz.identically_zero);

  ScalarField crit = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i)
    crit[i] = std::pow(1.0 + g.r[i] * g.r[i], -11.0 / 16.0);
  DecayReport rc = check_decay(crit, g);
  CHECK(!rc.identically_zero);
  CHECK(std::abs(rc.exponent - 11.0 / 8.0) < 0.05);
  CHECK(!rc.too_slow);

  ScalarField slow = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) slow[i] = std::pow(1.0 + g.r[i] * g.r[i], -0.25);
  DecayReport rs = check_decay(slow, g);
  CHECK(rs.too_slow);
}
