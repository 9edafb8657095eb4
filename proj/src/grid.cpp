#include "ekg/grid.hpp"

#include <cmath>

namespace ekg {

RadialGrid make_grid(double r_max, int n_cells) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw ConfigError("make_grid: r_max must be positive and finite");
  if (n_cells < 16) throw ConfigError("make_grid: n_cells must be at least 16");
  RadialGrid g;
  g.n_cells = n_cells;
  g.r_max = r_max;
  g.h = r_max / n_cells;
  g.r.resize(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) g.r[i] = i * g.h;
  g.r.back() = r_max;
  return g;
}

ScalarField make_field(const RadialGrid& g, Parity p, double fill) {
  return ScalarField(static_cast<std::size_t>(g.n_nodes()), p, fill);
}

namespace stencil {

void deriv(const double* f, int n_nodes, double h, Parity parity, double* out) {
  const double inv2h = 1.0 / (2.0 * h);
  const double ghost = (parity == Parity::even) ? f[1] : -f[1];
  out[0] = (f[1] - ghost) * inv2h;  // exactly 0 for even fields
  for (int i = 1; i < n_nodes - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2h;
  const int n = n_nodes - 1;
  out[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) * inv2h;
}

void div_r(const double* g, const double* r, int n_nodes, double h, double* out) {
  const double inv2h = 1.0 / (2.0 * h);
  out[0] = 2.0 * g[1] / h;  // lim (1/r)(r g)' = 2 g'(0) for odd g
  for (int i = 1; i < n_nodes - 1; ++i)
    out[i] = (r[i + 1] * g[i + 1] - r[i - 1] * g[i - 1]) * inv2h / r[i];
  const int n = n_nodes - 1;
  out[n] = (3.0 * r[n] * g[n] - 4.0 * r[n - 1] * g[n - 1] + r[n - 2] * g[n - 2]) * inv2h / r[n];
}

void cumtrapz(const double* f, int n_nodes, double h, double* out) {
  double acc = 0.0;
  double prev = f[0];
  out[0] = 0.0;
  for (int i = 1; i < n_nodes; ++i) {
    const double cur = f[i];
    acc += 0.5 * h * (prev + cur);
    out[i] = acc;
    prev = cur;
  }
}

void deriv4(const double* f, int n_nodes, double h, Parity parity, double* out) {
  const int n = n_nodes - 1;
  const double s = (parity == Parity::even) ? 1.0 : -1.0;
  const double i12h = 1.0 / (12.0 * h);
  const double i2h = 1.0 / (2.0 * h);
  // ghosts f(-h) = s f(h), f(-2h) = s f(2h)
  out[0] = (parity == Parity::even) ? 0.0 : (16.0 * f[1] - 2.0 * f[2]) * i12h;
  out[1] = (-f[3] + 8.0 * f[2] - 8.0 * f[0] + s * f[1]) * i12h;
  for (int i = 2; i <= n - 2; ++i)
    out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) * i12h;
  out[n - 1] = (f[n] - f[n - 2]) * i2h;
  out[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) * i2h;
}

void div_r4(const double* g, const double* r, int n_nodes, double h, double* out) {
  const int n = n_nodes - 1;
  const double i12h = 1.0 / (12.0 * h);
  const double i2h = 1.0 / (2.0 * h);
  auto w = [&](int i) { return r[i] * g[i]; };
  // axis limit 2 g'(0) with the parity-aware 4th-order stencil
  out[0] = (8.0 * g[1] - g[2]) / (3.0 * h);
  // w = r g is even about the axis
  out[1] = (-w(3) + 8.0 * w(2) + w(1)) * i12h / r[1];
  for (int i = 2; i <= n - 2; ++i)
    out[i] = (-w(i + 2) + 8.0 * w(i + 1) - 8.0 * w(i - 1) + w(i - 2)) * i12h / r[i];
  out[n - 1] = (w(n) - w(n - 2)) * i2h / r[n - 1];
  out[n] = (3.0 * w(n) - 4.0 * w(n - 1) + w(n - 2)) * i2h / r[n];
}

void cumquad4(const double* f, int n_nodes, double h, double* out) {
  const int n = n_nodes - 1;  // panel count
  out[0] = 0.0;
  if (n < 4) {  // too short for cubic panels
    cumtrapz(f, n_nodes, h, out);
    return;
  }
  const double c = h / 24.0;
  double acc = c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  out[1] = acc;
  for (int i = 1; i <= n - 2; ++i) {
    acc += c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    out[i + 1] = acc;
  }
  acc += c * (f[n - 3] - 5.0 * f[n - 2] + 19.0 * f[n - 1] + 9.0 * f[n]);
  out[n] = acc;
}

}  // namespace stencil

ScalarField d_r(const ScalarField& f, const RadialGrid& g) {
  ScalarField out(f.size(), flip(f.parity));
  d_r_into(f, g, out);
  return out;
}

void d_r_into(const ScalarField& f, const RadialGrid& g, ScalarField& out) {
  out.v.resize(f.size());
  out.parity = flip(f.parity);
  stencil::deriv(f.v.data(), g.n_nodes(), g.h, f.parity, out.v.data());
}

double axis_limit_ratio(const ScalarField& f, const RadialGrid& g) {
  if (f.parity != Parity::even)
    throw ParityError("axis_limit_ratio: field must be even about the axis");
  // L'Hopital: (d_r f)/r -> f''(0); with the even ghost f(-h) = f(h)
  // the centered second derivative at the axis is 2 (f_1 - f_0)/h^2.
  return 2.0 * (f[1] - f[0]) / (g.h * g.h);
}

ScalarField radial_integrate(const ScalarField& f, const RadialGrid& g) {
  ScalarField out(f.size(), flip(f.parity));
  stencil::cumtrapz(f.v.data(), g.n_nodes(), g.h, out.v.data());
  return out;
}

ScalarField radial_divergence(const ScalarField& g_in, const RadialGrid& g) {
  if (g_in.parity != Parity::odd)
    throw ParityError("radial_divergence: integrand must be odd about the axis");
  ScalarField out(g_in.size(), Parity::even);
  stencil::div_r(g_in.v.data(), g.r.data(), g.n_nodes(), g.h, out.v.data());
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace ekg
