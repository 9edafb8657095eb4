#pragma once

// Uniform radial mesh with the axis r = 0 as a grid node, parity-aware
// ghost handling, and the second-order discrete calculus shared by the
// solvers: d/dr, the axis limit of (d_r f)/r, cumulative integrals from
// the axis, and (1/r) d/dr (r g) with its regularized axis value.

#include <cstddef>
#include <vector>

#include "ekg/errors.hpp"

namespace ekg {

enum class Parity { even, odd };

inline Parity flip(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

struct RadialGrid {
  int n_cells = 0;  // n_cells + 1 nodes, node 0 at the axis
  double r_max = 0.0;
  double h = 0.0;
  std::vector<double> r;  // r[i] = i*h, r.back() = r_max

  int n_nodes() const { return n_cells + 1; }
};

// r_max > 0, n_cells >= 16.
RadialGrid make_grid(double r_max, int n_cells);

// Nodal samples of a radially symmetric function with definite parity
// about the axis. Even fields have vanishing odd-order derivatives at
// r = 0; odd fields vanish there.
struct ScalarField {
  std::vector<double> v;
  Parity parity = Parity::even;

  ScalarField() = default;
  ScalarField(std::size_t n, Parity p, double fill = 0.0) : v(n, fill), parity(p) {}

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

ScalarField make_field(const RadialGrid& g, Parity p, double fill = 0.0);

// Low-level kernels on raw buffers (no allocation); f and out may not alias.
namespace stencil {

// Centered d/dr with a parity ghost at the axis and a one-sided
// second-order closure at the outer edge. The closure equals a centered
// stencil on quadratically extrapolated ghost values, which is the
// outgoing-extrapolation outer boundary used by the evolver.
void deriv(const double* f, int n_nodes, double h, Parity parity, double* out);

// (1/r) d/dr (r g) for odd g; the axis value is the regular limit 2 g'(0).
void div_r(const double* g, const double* r, int n_nodes, double h, double* out);

// Cumulative trapezoid from the axis; out[0] = 0. In-place allowed.
void cumtrapz(const double* f, int n_nodes, double h, double* out);

// Fourth-order variants used by the evolution kernels: 5-point centered
// derivative with two parity ghost cells at the axis (second-order
// closure on the outermost two nodes), the matching (1/r) d/dr (r g)
// operator, and a cumulative quadrature built from cubic panels.
void deriv4(const double* f, int n_nodes, double h, Parity parity, double* out);
void div_r4(const double* g, const double* r, int n_nodes, double h, double* out);
void cumquad4(const double* f, int n_nodes, double h, double* out);

}  // namespace stencil

// d/dr; output parity flipped.
ScalarField d_r(const ScalarField& f, const RadialGrid& g);
void d_r_into(const ScalarField& f, const RadialGrid& g, ScalarField& out);

// lim_{r->0} (d_r f)/r for even f, i.e. f''(0). Throws ParityError on odd input.
double axis_limit_ratio(const ScalarField& f, const RadialGrid& g);

// Cumulative integral from the axis (trapezoid); output(0) = 0, parity flipped.
ScalarField radial_integrate(const ScalarField& f, const RadialGrid& g);

// (1/r) d/dr (r g) for odd g; even output. Throws ParityError on even input.
ScalarField radial_divergence(const ScalarField& g_in, const RadialGrid& g);

// Largest |f_i| over the grid.
double max_abs(const std::vector<double>& v);

}  // namespace ekg
