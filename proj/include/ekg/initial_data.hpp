#pragma once

// Cauchy data construction for the radially symmetric Einstein-wave-
// Klein-Gordon system. The matter profiles come from a rational-power
// bump family; the metric function beta is obtained from the Hamiltonian
// constraint, which in the e^{-2beta} variable is a first-order linear
// ODE solved exactly by an integrating factor:
//
//   -d/dr e^{-2beta} = 2 r e^{-2beta} kin(r) + m^2 r e^{-2gamma} phi^2,
//   beta(0) = 0,
//   e^{-2beta} = e^{-Q(r)} (1 - D(r)),
//     Q(r) = int_0^r 2 xi kin(xi) dxi,
//     D(r) = int_0^r xi m^2 e^{-2gamma} phi^2 e^{Q(xi)} dxi.
//
// D < 1 everywhere is the finite-initial-energy condition; alpha follows
// from alpha_r = beta_r - m^2 r e^{2beta-2gamma} phi^2 with alpha(0) = 0.

#include <vector>

#include "ekg/grid.hpp"

namespace ekg {

struct DataFamilyParams {
  double a_gamma = 0.0;     // bump amplitude of gamma_0, >= 0
  double a_phi = 0.0;       // bump amplitude of phi_0
  double p = 1.0;           // decay exponent, >= 11/16 so the tail is O(r^{-11/8})
  double w = 1.0;           // bump width
  double mass = 0.0;        // Klein-Gordon mass
  double gamma1_amp = 0.0;  // amplitude of gamma_t(0,r), >= 0
};

// Throws FamilyError / ConfigError on invalid parameters.
void validate(const DataFamilyParams& p);

// Closed-form bump profile a (1 + (r/w)^2)^{-p} and its radial derivative.
double bump(double a, double p, double w, double r);
double bump_deriv(double a, double p, double w, double r);

struct FamilySample {
  ScalarField gamma0, gamma1, phi0, phi1;  // all even; phi1 identically zero
};

// Samples the family on the grid and checks gamma_0 >= 0,
// gamma_0' > -1/(2r) and gamma_1 >= 0 pointwise.
FamilySample sample_family(const DataFamilyParams& p, const RadialGrid& g);

struct BetaSolve {
  ScalarField beta;        // even, beta(0) = 0
  std::vector<double> D;   // running mass integral, must stay < 1
  double cd1_margin = 0.0; // sup_r D(r)
};

// Integrating-factor solve with pointwise kinetic density
// kin = Pi_gamma^2 + gamma_r^2 + (Pi_phi^2 + phi_r^2)/2.
// Throws GaugeSingularityError when D reaches 1.
BetaSolve solve_beta_constraint(const std::vector<double>& kin, const ScalarField& gamma,
                                const ScalarField& phi, double mass, const RadialGrid& g);

// Time-symmetric slice (gamma_t = phi_t = 0): kin = gamma0_r^2 + phi0_r^2/2.
ScalarField solve_beta0(const ScalarField& gamma0, const ScalarField& phi0, double mass,
                        const RadialGrid& g);

// alpha_r = beta_r - m^2 r e^{2beta-2gamma} phi^2, alpha(0) = 0.
ScalarField solve_alpha(const ScalarField& beta, const ScalarField& gamma,
                        const ScalarField& phi, double mass, const RadialGrid& g);

struct InitialDataSet {
  DataFamilyParams params;
  ScalarField gamma0, gamma1, phi0, phi1;
  ScalarField beta0, alpha0;
  ScalarField k_rr;        // e^{-alpha+2beta} beta_t; zero for time-symmetric data
  double cd1_margin = 0.0; // sup_r of the (cd1) integral, < 1
};

// Samples the family and solves the constraints. gamma1 enters the
// Hamiltonian constraint as the densitized momentum e^{beta-alpha} gamma_t,
// which keeps the constraint decoupled from alpha.
InitialDataSet build_initial_data(const DataFamilyParams& p, const RadialGrid& g);

struct DecayReport {
  bool identically_zero = false;
  double exponent = 0.0;  // fitted tail exponent q of |f| ~ r^{-q}
  bool too_slow = false;  // q < 11/8 (up to fit tolerance)
};

// Fits log|field| vs log r on the outer third of the grid.
DecayReport check_decay(const ScalarField& field, const RadialGrid& g);

}  // namespace ekg
