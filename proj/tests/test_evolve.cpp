#include <cmath>

#include "doctest.h"
#include "ekg/diagnostics.hpp"
#include "ekg/evolve.hpp"

using namespace ekg;

namespace {

DataFamilyParams weak_family(double amp = 0.1, double mass = 1.0) {
  DataFamilyParams p;
  p.a_gamma = amp;
  p.a_phi = amp;
  p.p = 1.0;
  p.w = 1.0;
  p.mass = mass;
  return p;
}

}  // namespace

TEST_CASE("solve_gauge vacuum and initial-slice consistency") {
  RadialGrid g = make_grid(20.0, 256);
  CauchyEvolver ev(g, 1.0);
  InitialDataSet vac = build_initial_data(DataFamilyParams{}, g);
  CauchyState s = ev.make_state(vac);
  CHECK(max_abs(s.alpha.v) == 0.0);
  CHECK(max_abs(s.beta.v) == 0.0);

  // the evolver's gauge solve reproduces the initial-data solve bit-for-bit
  InitialDataSet d = build_initial_data(weak_family(), g);
  CauchyState sw = ev.make_state(d);
  for (int i = 0; i < g.n_nodes(); ++i) {
    CHECK(sw.beta[i] == d.beta0[i]);
    CHECK(sw.alpha[i] == d.alpha0[i]);
  }
}

TEST_CASE("rhs vacuum and frozen-gauge oscillator") {
  RadialGrid g = make_grid(20.0, 256);
  CauchyEvolver ev(g, 1.0);
  CauchyState s = ev.make_state(build_initial_data(DataFamilyParams{}, g));
  StateDerivs k;
  ev.rhs(s, k);
  CHECK(max_abs(k.gamma) == 0.0);
  CHECK(max_abs(k.pi_phi) == 0.0);

  // spatially constant phi on a frozen flat gauge: dPi_phi/dt = -m^2 phi
  CauchyState osc = s;
  const double phi0 = 0.03;
  for (auto& x : osc.phi.v) x = phi0;
  ev.rhs(osc, k);
  for (std::size_t i = 0; i < k.pi_phi.size(); ++i)
    CHECK(k.pi_phi[i] == doctest::Approx(-phi0).epsilon(1e-12));
  for (std::size_t i = 0; i < k.pi_gamma.size(); ++i)
    CHECK(k.pi_gamma[i] == doctest::Approx(0.5 * phi0 * phi0).epsilon(1e-12));
}

TEST_CASE("cfl_dt") {
  RadialGrid g = make_grid(10.0, 1000);
  CauchyEvolver ev(g, 0.0);
  CauchyState s = ev.make_state(build_initial_data(DataFamilyParams{}, g));
  CHECK(ev.cfl_dt(s, 0.5) == doctest::Approx(0.005).epsilon(1e-14));

  // doubling the characteristic speed halves dt
  for (auto& x : s.alpha.v) x = std::log(2.0);
  CHECK(ev.cfl_dt(s, 0.5) == doctest::Approx(0.0025).epsilon(1e-14));
  CHECK_THROWS_AS(ev.cfl_dt(s, 1.5), ConfigError);
}

TEST_CASE("step leaves vacuum invariant and dt = 0 is the identity") {
  RadialGrid g = make_grid(20.0, 256);
  CauchyEvolver ev(g, 1.0);
  CauchyState s = ev.make_state(build_initial_data(DataFamilyParams{}, g));
  CauchyState s0 = s;
  ev.step(s, ev.cfl_dt(s, 0.5));
  for (int i = 0; i < g.n_nodes(); ++i) {
    CHECK(s.gamma[i] == s0.gamma[i]);
    CHECK(s.beta[i] == s0.beta[i]);
  }

  CauchyState w = ev.make_state(build_initial_data(weak_family(), g));
  CauchyState w0 = w;
  ev.step(w, 0.0);
  for (int i = 0; i < g.n_nodes(); ++i) CHECK(w.gamma[i] == w0.gamma[i]);
}

TEST_CASE("RK4 time integration order >= 3.8") {
  RadialGrid g = make_grid(20.0, 256);
  CauchyEvolver ev(g, 1.0);
  InitialDataSet d = build_initial_data(weak_family(), g);
  const double T = 16.0 * 0.5 * g.h;

  auto integrate = [&](int steps) {
    CauchyState s = ev.make_state(d);
    const double dt = T / steps;
    for (int k = 0; k < steps; ++k) ev.step(s, dt);
    return s;
  };
  CauchyState a = integrate(16), b = integrate(32), c = integrate(64);
  double e1 = 0, e2 = 0;
  for (int i = 0; i < g.n_nodes(); ++i) {
    e1 = std::max(e1, std::abs(a.gamma[i] - b.gamma[i]));
    e2 = std::max(e2, std::abs(b.gamma[i] - c.gamma[i]));
  }
  CHECK(std::log2(e1 / e2) > 3.8);
}

TEST_CASE("evolve: vacuum trajectory and weak-data energy drift") {
  RadialGrid g = make_grid(20.0, 512);
  CauchyEvolver ev(g, 1.0);
  EvolveOptions opt;
  opt.t_end = 1.0;
  opt.snapshot_every = 8;

  Trajectory vac = ev.evolve(build_initial_data(DataFamilyParams{}, g), opt);
  CHECK(vac.completed());
  for (const CauchyState& s : vac.snapshots) CHECK(total_energy(s, g) == 0.0);

  opt.t_end = 2.0;
  Trajectory weak = ev.evolve(build_initial_data(weak_family(0.01), g), opt);
  CHECK(weak.completed());
  const double E0 = weak.conserved_energy.front();
  double drift = 0;
  for (double e : weak.conserved_energy) drift = std::max(drift, std::abs(e - E0));
  CHECK(drift <= 1e-8 * std::abs(E0));
}

TEST_CASE("massless runs keep alpha identical to beta") {
  RadialGrid g = make_grid(20.0, 256);
  CauchyEvolver ev(g, 0.0);
  EvolveOptions opt;
  opt.t_end = 2.0;
  Trajectory tr = ev.evolve(build_initial_data(weak_family(0.1, 0.0), g), opt);
  CHECK(tr.completed());
  for (const CauchyState& s : tr.snapshots)
    for (int i = 0; i < g.n_nodes(); ++i) CHECK(s.alpha[i] == s.beta[i]);
}

TEST_CASE("non-finite state detected") {
  RadialGrid g = make_grid(20.0, 256);
  CauchyEvolver ev(g, 0.0);
  CauchyState s = ev.make_state(build_initial_data(weak_family(0.1, 0.0), g));
  s.pi_gamma[40] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ev.step(s, 0.01), NumericalError);
}

TEST_CASE("residual monitors vanish in vacuum") {
  RadialGrid g = make_grid(20.0, 256);
  CauchyEvolver ev(g, 1.0);
  EvolveOptions opt;
  opt.t_end = 0.5;
  opt.snapshot_every = 2;
  Trajectory tr = ev.evolve(build_initial_data(DataFamilyParams{}, g), opt);
  REQUIRE(tr.snapshots.size() >= 3);
  ScalarField m = momentum_constraint_residual(tr.snapshots[0], tr.snapshots[1],
                                               tr.snapshots[2], g);
  ScalarField e = eq213_residual(tr.snapshots[0], tr.snapshots[1], tr.snapshots[2], g);
  CHECK(max_abs(m.v) == 0.0);
  CHECK(max_abs(e.v) == 0.0);
}
