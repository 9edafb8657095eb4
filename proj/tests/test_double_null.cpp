#include <cmath>

#include "doctest.h"
#include "ekg/double_null.hpp"
#include "ekg/evolve.hpp"

using namespace ekg;

namespace {

DoubleNullState flat_seeded(double mass, int n_u) {
  DoubleNullState s;
  s.p = {-6.0, -2.0, 8.0, 12.0, n_u};
  s.mass = mass;
  s.k = (s.p.u_max - s.p.u_min) / n_u;
  s.nu = n_u + 1;
  s.nv = static_cast<int>(std::round((s.p.v_max - s.p.v_min) / s.k)) + 1;
  const std::size_t total = static_cast<std::size_t>(s.nu) * s.nv;
  s.r.assign(total, 0.0);
  s.lam.assign(total, 0.0);
  s.gamma.assign(total, 0.0);
  s.phi.assign(total, 0.0);
  for (int j = 0; j < s.nv; ++j) s.r[j] = 0.5 * (s.v_of(j) - s.p.u_min);
  for (int i = 0; i < s.nu; ++i)
    s.r[static_cast<std::size_t>(i) * s.nv] = 0.5 * (s.p.v_min - s.u_of(i));
  return s;
}

Trajectory weak_trajectory(int n, double t_end = 6.0) {
  RadialGrid g = make_grid(20.0, n);
  DataFamilyParams p;
  p.a_gamma = 0.1;
  p.a_phi = 0.1;
  p.mass = 1.0;
  CauchyEvolver ev(g, 1.0);
  EvolveOptions opt;
  opt.t_end = t_end;
  opt.snapshot_every = 8;
  return ev.evolve(build_initial_data(p, g), opt);
}

}  // namespace

TEST_CASE("vacuum diamond: r advances exactly, everything else stays zero") {
  DoubleNullState s = flat_seeded(0.0, 32);
  evolve_diamond(s);
  CHECK(s.evolved);
  for (int i = 0; i < s.nu; ++i)
    for (int j = 0; j < s.nv; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * s.nv + j;
      CHECK(std::abs(s.r[q] - 0.5 * (s.v_of(j) - s.u_of(i))) <= 1e-13);
      CHECK(s.lam[q] == 0.0);
      CHECK(s.gamma[q] == 0.0);
      CHECK(s.phi[q] == 0.0);
    }
  RaychaudhuriResiduals res = raychaudhuri_residuals(s);
  CHECK(res.max_u <= 1e-13);
  CHECK(res.max_v <= 1e-13);
}

TEST_CASE("massless cells keep r_uv = 0") {
  DoubleNullState s = flat_seeded(0.0, 16);
  // nonzero matter on the seeds; with m = 0 the r equation has no source
  for (int j = 0; j < s.nv; ++j) s.phi[j] = 0.01 * std::sin(0.5 * j);
  evolve_diamond(s);
  CHECK(s.evolved);
  for (int i = 0; i + 1 < s.nu; ++i)
    for (int j = 0; j + 1 < s.nv; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * s.nv + j;
      const double box = s.r[q + s.nv + 1] - s.r[q + 1] - s.r[q + s.nv] + s.r[q];
      CHECK(std::abs(box) <= 1e-13);
    }
}

TEST_CASE("seeded weak-field diamond evolves and matches the Cauchy run") {
  Trajectory tr = weak_trajectory(512);
  NullChart chart = solve_chart(tr);
  compute_FG(chart, tr);
  DoubleNullParams p{-6.0, -2.0, 8.0, 12.0, 32};
  DoubleNullState s = seed_from_cauchy(tr, chart, p);
  evolve_diamond(s);
  CHECK(s.evolved);

  CauchyComparison cmp = compare_with_cauchy(s, tr, chart);
  CHECK(cmp.n_points > 100);
  CHECK(cmp.sup_r < 2e-2);
  CHECK(cmp.sup_gamma < 2e-2);
  CHECK(cmp.sup_phi < 2e-2);
  CHECK(cmp.sup_lam < 2e-2);

  // null energy sign: e^{-2lam} r_u nonincreasing in u along each v-line
  for (int j = 0; j < s.nv; ++j) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < s.nu; ++i) {
      const std::size_t q = static_cast<std::size_t>(i) * s.nv + j;
      const double w = std::exp(-(s.lam[q] + s.lam[q + s.nv])) * (s.r[q + s.nv] - s.r[q]) / s.k;
      CHECK(w <= prev + 1e-12);
      prev = w;
    }
  }
}

TEST_CASE("lattice self-convergence under k refinement") {
  Trajectory tr = weak_trajectory(512);
  NullChart chart = solve_chart(tr);
  compute_FG(chart, tr);
  double corner[3];
  for (int k = 0; k < 3; ++k) {
    DoubleNullParams p{-6.0, -2.0, 8.0, 12.0, 16 << k};
    DoubleNullState s = seed_from_cauchy(tr, chart, p);
    evolve_diamond(s);
    REQUIRE(s.evolved);
    corner[k] = s.gamma.back();  // far corner (u_max, v_max)
  }
  const double e1 = std::abs(corner[0] - corner[1]);
  const double e2 = std::abs(corner[1] - corner[2]);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("seeding rejects rays outside the chart") {
  Trajectory tr = weak_trajectory(256, 2.0);
  NullChart chart = solve_chart(tr);
  compute_FG(chart, tr);
  DoubleNullParams bad{-30.0, -25.0, 31.0, 35.0, 16};
  CHECK_THROWS_AS(seed_from_cauchy(tr, chart, bad), ConfigError);
  DoubleNullParams axis_touch{-2.0, 2.0, 1.0, 3.0, 16};
  CHECK_THROWS_AS(seed_from_cauchy(tr, chart, axis_touch), ConfigError);
}
