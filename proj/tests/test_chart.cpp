#include <cmath>

#include "doctest.h"
#include "ekg/chart.hpp"
#include "ekg/evolve.hpp"
#include "ekg/oracles.hpp"

using namespace ekg;

namespace {

Trajectory flat_trajectory(int n = 256, double t_end = 1.0) {
  RadialGrid g = make_grid(20.0, n);
  CauchyEvolver ev(g, 0.0);
  EvolveOptions opt;
  opt.t_end = t_end;
  opt.snapshot_every = 8;
  return ev.evolve(build_initial_data(DataFamilyParams{}, g), opt);
}

Trajectory weak_trajectory(int n = 512, double t_end = 3.0, double mass = 1.0) {
  RadialGrid g = make_grid(20.0, n);
  DataFamilyParams p;
  p.a_gamma = 0.1;
  p.a_phi = 0.1;
  p.mass = mass;
  CauchyEvolver ev(g, mass);
  EvolveOptions opt;
  opt.t_end = t_end;
  opt.snapshot_every = 8;
  return ev.evolve(build_initial_data(p, g), opt);
}

}  // namespace

TEST_CASE("flat chart is exact") {
  Trajectory tr = flat_trajectory();
  NullChart chart = solve_chart(tr);
  const RadialGrid& g = tr.grid;
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
    const double t = chart.times[j];
    CHECK(chart.u[j][0] == chart.v[j][0]);  // axis condition
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[j][i]) continue;
      CHECK(std::abs(chart.u[j][i] - (t - g.r[i])) <= 1e-10);
      CHECK(std::abs(chart.v[j][i] - (t + g.r[i])) <= 1e-10);
    }
  }
  // initial slice: u + v = 0
  for (int i = 0; i < chart.n_nodes; ++i) CHECK(chart.u[0][i] + chart.v[0][i] == 0.0);

  compute_jacobian(chart, tr);
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j)
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[j][i]) continue;
      CHECK(std::abs(chart.tv[j][i] - 0.5) <= 1e-10);
      CHECK(std::abs(chart.tu[j][i] - 0.5) <= 1e-10);
      CHECK(std::abs(chart.rv[j][i] - 0.5) <= 1e-10);
      CHECK(std::abs(chart.ru[j][i] + 0.5) <= 1e-10);
    }

  compute_FG(chart, tr);
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j)
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[j][i]) continue;
      CHECK(std::abs(chart.F[j][i]) <= 1e-12);
      CHECK(std::abs(chart.G[j][i]) <= 1e-12);
      CHECK(std::abs(chart.lam[j][i]) <= 1e-12);
    }
}

TEST_CASE("weak-field chart: normalisations and oracle agreement") {
  Trajectory tr = weak_trajectory();
  NullChart chart = solve_chart(tr);
  compute_FG(chart, tr);

  // F = G = beta on the initial slice
  const CauchyState& s0 = tr.snapshots.front();
  for (int i = 0; i < chart.n_nodes; ++i) {
    if (!chart.valid[0][i]) continue;
    CHECK(std::abs(chart.F[0][i] - s0.beta[i]) <= 1e-12);
    CHECK(std::abs(chart.G[0][i] - s0.beta[i]) <= 1e-12);
  }

  // 2 lam = F + G pointwise by construction
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j)
    for (int i = 0; i < chart.n_nodes; ++i)
      if (chart.valid[j][i])
        CHECK(2.0 * chart.lam[j][i] == chart.F[j][i] + chart.G[j][i]);

  // level sets follow independently traced characteristics
  const double r0 = 5.0;
  std::vector<double> ray = oracle::trace_characteristic(tr, r0, +1);
  double dev = 0;
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
    const double rr = ray[chart.snapshot_steps[j]];
    const double x = rr / tr.grid.h;
    const int i = std::min(static_cast<int>(x), chart.n_nodes - 2);
    if (!chart.valid[j][i + 1]) continue;
    const double w = x - i;
    const double u_interp = (1.0 - w) * chart.u[j][i] + w * chart.u[j][i + 1];
    dev = std::max(dev, std::abs(u_interp + r0));
  }
  CHECK(dev <= 5e-3 * tr.grid.r_max);
}

TEST_CASE("transport residuals vanish in vacuum") {
  Trajectory tr = flat_trajectory();
  NullChart chart = solve_chart(tr);
  compute_FG(chart, tr);
  TransportResiduals res = transport_residuals(chart, tr);
  CHECK(res.max_res_F <= 1e-12);
  CHECK(res.max_res_G <= 1e-12);
}

TEST_CASE("cone chart flat limit and region masks") {
  Trajectory tr = flat_trajectory(256, 2.0);
  NullChart cc = solve_cone_chart(tr, 1.0);
  const RadialGrid& g = tr.grid;
  for (std::size_t j = 0; j < cc.n_snapshots(); ++j) {
    const double t = cc.times[j];
    for (int i = 0; i < cc.n_nodes; ++i) {
      if (!cc.valid[j][i]) continue;
      CHECK(std::abs(cc.u[j][i] - (t - g.r[i])) <= 2e-10);
      CHECK(std::abs(cc.v[j][i] - (t + g.r[i])) <= 2e-10);
    }
  }
  // initial slice: u = -v on covered nodes
  for (int i = 0; i < cc.n_nodes; ++i)
    if (cc.valid[0][i]) CHECK(cc.u[0][i] == -cc.v[0][i]);

  ConeRegion reg = cone_region(cc, tr, 1.0);
  // Minkowski cone: Sigma_t^O = {r <= 1 - t}
  for (std::size_t j = 0; j < cc.n_snapshots(); ++j) {
    const double t = cc.times[j];
    if (t > 1.0) break;
    for (int i = 0; i < cc.n_nodes; ++i) {
      const bool expect = g.r[i] <= 1.0 - t + 1e-8;
      if (std::abs(g.r[i] - (1.0 - t)) < 2.0 * g.h) continue;  // boundary cell
      CHECK(static_cast<bool>(reg.sigma[j][i]) == expect);
    }
  }
  // boundary of J^-(O) is the v = t_O level set
  for (std::size_t s = 0; s < tr.step_times.size(); ++s) {
    if (tr.step_times[s] > 1.0) break;
    CHECK(std::abs(reg.boundary_r[s] - (1.0 - tr.step_times[s])) <= 1e-9);
  }

  CHECK_THROWS_AS(solve_cone_chart(tr, 5.0), ConfigError);  // beyond span
}

TEST_CASE("cone chart weak field agrees with backward ray tracing") {
  Trajectory tr = weak_trajectory(512, 3.0);
  NullChart cc = solve_cone_chart(tr, 2.5);
  ConeRegion reg = cone_region(cc, tr, 2.5);
  // independent forward trace from the t=0 boundary point
  std::vector<double> fwd = oracle::trace_characteristic(tr, reg.boundary_r[0], -1);
  double dev = 0;
  for (std::size_t s = 0; s < tr.step_times.size() && tr.step_times[s] <= 2.5; ++s)
    dev = std::max(dev, std::abs(fwd[s] - reg.boundary_r[s]));
  CHECK(dev <= 5e-3 * tr.grid.r_max);
}

TEST_CASE("chart error paths") {
  Trajectory tr = flat_trajectory(256, 0.5);
  NullChart chart = solve_chart(tr);
  CHECK_THROWS_AS(transport_residuals(chart, tr), ChartError);  // FG missing
  CHECK_THROWS_AS(trace_ingoing_back(tr, 9.0, 0.0), ConfigError);
}
