#include "ekg/densities.hpp"

#include <cmath>

namespace ekg {

MatterDensities densities(const CauchyState& s) {
  const std::size_t n = s.gamma.size();
  MatterDensities d;
  d.e = ScalarField(n, Parity::even);
  d.m_hat = ScalarField(n, Parity::even);
  d.f = ScalarField(n, Parity::even);
  const double m2 = s.mass * s.mass;
  for (std::size_t i = 0; i < n; ++i) {
    const double e2b = std::exp(-2.0 * s.beta[i]);
    const double pg = s.pi_gamma[i], pp = s.pi_phi[i];
    const double gr = s.gamma_r[i], pr = s.phi_r[i];
    const double f = m2 * std::exp(-2.0 * s.gamma[i]) * s.phi[i] * s.phi[i];
    d.f[i] = f;
    d.e[i] = e2b * (pg * pg + gr * gr + 0.5 * (pp * pp + pr * pr)) + 0.5 * f;
    d.m_hat[i] = e2b * (2.0 * pg * gr + pp * pr);
  }
  return d;
}

}  // namespace ekg
