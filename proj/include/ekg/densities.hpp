#pragma once

// Pointwise matter densities of the (t, r) system:
//   e    = e^{-2beta}(Pi_g^2 + Phi_g^2 + (Pi_p^2 + Phi_p^2)/2) + f/2
//   mhat = e^{-2beta}(2 Pi_g Phi_g + Pi_p Phi_p)
//   f    = m^2 e^{-2gamma} phi^2
// written in the first-order variables (e^{-2alpha} gamma_t^2 =
// e^{-2beta} Pi_gamma^2 and so on); e >= |mhat| holds pointwise.

#include "ekg/state.hpp"

namespace ekg {

struct MatterDensities {
  ScalarField e;      // energy density (even)
  ScalarField m_hat;  // momentum density (even; odd-in-r structure carried by Phi)
  ScalarField f;      // potential density (even)
};

MatterDensities densities(const CauchyState& s);

}  // namespace ekg
