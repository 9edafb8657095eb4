#pragma once

// Independent numerical routes used only for verification: adaptive
// Simpson quadrature, a dense-output RK4 scalar ODE integrator, and a
// high-resolution characteristic tracer. None of these share code with
// the solver paths they certify.

#include <cmath>
#include <functional>
#include <vector>

#include "ekg/state.hpp"

namespace ekg::oracle {

// Adaptive Simpson on [a, b] with absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

// Classical RK4 for y' = f(x, y) from a to b with n uniform steps;
// returns all n+1 nodal values.
std::vector<double> rk4_integrate(const std::function<double(double, double)>& f, double y0,
                                  double a, double b, int n);

// Radial characteristic dr/dt = sign * e^{alpha-beta} traced through the
// trajectory's per-step speed history with RK4 at `substeps` per evolver
// step (cubic-in-r, linear-in-t interpolation of the speed field).
std::vector<double> trace_characteristic(const Trajectory& traj, double r0, int sign,
                                         int substeps = 10);

}  // namespace ekg::oracle
