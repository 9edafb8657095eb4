#include "ekg/oracles.hpp"

#include <algorithm>

namespace ekg::oracle {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double fm, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, fm, whole, tol, max_depth);
}

std::vector<double> rk4_integrate(const std::function<double(double, double)>& f, double y0,
                                  double a, double b, int n) {
  std::vector<double> y(n + 1);
  y[0] = y0;
  const double h = (b - a) / n;
  double cur = y0;
  for (int i = 0; i < n; ++i) {
    const double x = a + i * h;
    const double k1 = f(x, cur);
    const double k2 = f(x + 0.5 * h, cur + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h, cur + 0.5 * h * k2);
    const double k4 = f(x + h, cur + h * k3);
    cur += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    y[i + 1] = cur;
  }
  return y;
}

namespace {

// 4-point Lagrange interpolation in r, linear in t between step times.
double speed_interp(const Trajectory& traj, double t, double r) {
  const auto& ts = traj.step_times;
  int k = static_cast<int>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
  k = std::clamp(k, 0, static_cast<int>(ts.size()) - 2);
  const double w = std::clamp((t - ts[k]) / (ts[k + 1] - ts[k]), 0.0, 1.0);

  auto in_r = [&](const std::vector<double>& c) {
    const double h = traj.grid.h;
    const int n = static_cast<int>(c.size());
    double x = std::clamp(r / h, 0.0, static_cast<double>(n - 1));
    int i0 = std::clamp(static_cast<int>(x) - 1, 0, n - 4);
    double acc = 0.0;
    for (int m = 0; m < 4; ++m) {
      double L = 1.0;
      for (int q = 0; q < 4; ++q)
        if (q != m) L *= (x - (i0 + q)) / static_cast<double>(m - q);
      acc += L * c[i0 + m];
    }
    return acc;
  };
  return (1.0 - w) * in_r(traj.speed_history[k]) + w * in_r(traj.speed_history[k + 1]);
}

}  // namespace

std::vector<double> trace_characteristic(const Trajectory& traj, double r0, int sign,
                                         int substeps) {
  std::vector<double> out(traj.step_times.size());
  double r = r0;
  out[0] = r;
  for (std::size_t s = 0; s + 1 < traj.step_times.size(); ++s) {
    const double t0 = traj.step_times[s];
    const double dt = (traj.step_times[s + 1] - t0) / substeps;
    for (int q = 0; q < substeps; ++q) {
      const double t = t0 + q * dt;
      auto f = [&](double tt, double rr) {
        const double rc = std::clamp(rr, 0.0, traj.grid.r_max);
        return sign * speed_interp(traj, tt, rc);
      };
      const double k1 = f(t, r);
      const double k2 = f(t + 0.5 * dt, r + 0.5 * dt * k1);
      const double k3 = f(t + 0.5 * dt, r + 0.5 * dt * k2);
      const double k4 = f(t + dt, r + dt * k3);
      r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      r = std::clamp(r, 0.0, traj.grid.r_max);
    }
    out[s + 1] = r;
  }
  return out;
}

}  // namespace ekg::oracle
