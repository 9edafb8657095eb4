#include <cmath>

#include "doctest.h"
#include "ekg/grid.hpp"

using namespace ekg;

TEST_CASE("make_grid uniform mesh arithmetic") {
  RadialGrid g = make_grid(10.0, 1000);
  CHECK(g.h == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(g.r[0] == 0.0);
  CHECK(g.r[1000] == 10.0);

  RadialGrid g2 = make_grid(1.0, 16);
  CHECK(g2.h == doctest::Approx(0.0625).epsilon(1e-15));

  CHECK_THROWS_AS(make_grid(-1.0, 100), ConfigError);
  CHECK_THROWS_AS(make_grid(1.0, 8), ConfigError);
}

TEST_CASE("d_r exact on quadratics and constants") {
  RadialGrid g = make_grid(5.0, 100);
  ScalarField f = make_field(g, Parity::even);
  for (int i = 0; i <= 100; ++i) f[i] = g.r[i] * g.r[i];
  ScalarField df = d_r(f, g);
  CHECK(df.parity == Parity::odd);
  for (int i = 0; i <= 100; ++i) CHECK(df[i] == doctest::Approx(2.0 * g.r[i]).epsilon(1e-12));
  CHECK(df[0] == 0.0);  // parity ghost makes the axis value exactly zero

  ScalarField c = make_field(g, Parity::even, 3.25);
  ScalarField dc = d_r(c, g);
  for (int i = 0; i <= 100; ++i) CHECK(dc[i] == 0.0);
}

TEST_CASE("d_r of sin converges at second order") {
  double err[2];
  for (int k = 0; k < 2; ++k) {
    RadialGrid g = make_grid(6.0, 192 << k);
    ScalarField f = make_field(g, Parity::odd);
    for (int i = 0; i < g.n_nodes(); ++i) f[i] = std::sin(g.r[i]);
    ScalarField df = d_r(f, g);
    double e = 0;
    for (int i = 0; i < g.n_nodes() - 1; ++i)
      e = std::max(e, std::abs(df[i] - std::cos(g.r[i])));
    err[k] = e;
  }
  CHECK(std::log2(err[0] / err[1]) > 1.9);
}

TEST_CASE("axis_limit_ratio") {
  RadialGrid g = make_grid(2.0, 200);
  ScalarField f = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) f[i] = g.r[i] * g.r[i];
  CHECK(axis_limit_ratio(f, g) == doctest::Approx(2.0).epsilon(1e-12));

  ScalarField c = make_field(g, Parity::even, 7.0);
  CHECK(axis_limit_ratio(c, g) == 0.0);

  ScalarField cs = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) cs[i] = std::cos(g.r[i]);
  CHECK(axis_limit_ratio(cs, g) == doctest::Approx(-1.0).epsilon(1e-4));

  ScalarField odd = make_field(g, Parity::odd);
  CHECK_THROWS_AS(axis_limit_ratio(odd, g), ParityError);

  // agrees with (d_r f)/r at r = h to O(h)
  ScalarField sm = make_field(g, Parity::even);
  for (int i = 0; i < g.n_nodes(); ++i) sm[i] = std::exp(-g.r[i] * g.r[i]);
  ScalarField dsm = d_r(sm, g);
  CHECK(std::abs(axis_limit_ratio(sm, g) - dsm[1] / g.r[1]) < 10.0 * g.h);
}

TEST_CASE("radial_integrate") {
  RadialGrid g = make_grid(4.0, 256);
  ScalarField one = make_field(g, Parity::even, 1.0);
  ScalarField integ = radial_integrate(one, g);
  for (int i = 0; i < g.n_nodes(); ++i) CHECK(integ[i] == doctest::Approx(g.r[i]).epsilon(1e-13));
  CHECK(integ[0] == 0.0);

  ScalarField zero = make_field(g, Parity::even);
  ScalarField iz = radial_integrate(zero, g);
  for (int i = 0; i < g.n_nodes(); ++i) CHECK(iz[i] == 0.0);

  double err[2];
  for (int k = 0; k < 2; ++k) {
    RadialGrid gk = make_grid(4.0, 256 << k);
    ScalarField d = make_field(gk, Parity::odd);
    for (int i = 0; i < gk.n_nodes(); ++i) d[i] = gk.r[i] * std::exp(-gk.r[i] * gk.r[i]);
    ScalarField out = radial_integrate(d, gk);
    double e = 0;
    for (int i = 0; i < gk.n_nodes(); ++i)
      e = std::max(e, std::abs(out[i] - 0.5 * (1.0 - std::exp(-gk.r[i] * gk.r[i]))));
    err[k] = e;
  }
  CHECK(std::log2(err[0] / err[1]) > 1.9);
}

TEST_CASE("d_r then radial_integrate reconstructs smooth fields") {
  double err[3];
  for (int k = 0; k < 3; ++k) {
    RadialGrid g = make_grid(4.0, 128 << k);
    ScalarField f = make_field(g, Parity::even);
    for (int i = 0; i < g.n_nodes(); ++i) f[i] = std::cos(2.0 * g.r[i]) / (1.0 + g.r[i] * g.r[i]);
    ScalarField rec = radial_integrate(d_r(f, g), g);
    double e = 0;
    for (int i = 0; i < g.n_nodes() - 1; ++i) e = std::max(e, std::abs(rec[i] + f[0] - f[i]));
    err[k] = e;
  }
  CHECK(std::log2(err[0] / err[1]) > 1.9);
  CHECK(std::log2(err[1] / err[2]) > 1.9);
}

TEST_CASE("radial_divergence regular at the axis") {
  RadialGrid g = make_grid(3.0, 300);
  // f = r^3 (odd): (1/r) d/dr(r f) = 4 r^2, with absolute stencil error 4 h^2
  ScalarField f = make_field(g, Parity::odd);
  for (int i = 0; i < g.n_nodes(); ++i) f[i] = std::pow(g.r[i], 3);
  ScalarField dv = radial_divergence(f, g);
  const double tol = 5.0 * g.h * g.h;
  for (int i = 0; i < g.n_nodes() - 1; ++i)
    CHECK(std::abs(dv[i] - 4.0 * g.r[i] * g.r[i]) < tol);

  ScalarField even = make_field(g, Parity::even);
  CHECK_THROWS_AS(radial_divergence(even, g), ParityError);
}
