#include "ekg/double_null.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ekg/errors.hpp"

namespace ekg {

namespace {

struct SeedSamples {
  std::vector<double> s;  // coordinate along the ray (v on the u-ray, u on the v-ray)
  std::vector<double> r, lam, gamma, phi;
};

double lerp(const std::vector<double>& f, double h, double r) {
  if (r <= 0.0) return f.front();
  const double x = r / h;
  const int n = static_cast<int>(f.size()) - 1;
  if (x >= n) return f.back();
  const int i = static_cast<int>(x);
  const double w = x - i;
  return (1.0 - w) * f[i] + w * f[i + 1];
}

// Crossing of a monotone chart row with a level; -1 when outside the row.
double crossing(const std::vector<double>& row, double h, double level, bool increasing) {
  const int n = static_cast<int>(row.size());
  for (int i = 0; i + 1 < n; ++i) {
    const double a = row[i], b = row[i + 1];
    const bool hit = increasing ? (a <= level && level < b) : (b < level && level <= a);
    if (hit) return (i + (level - a) / (b - a)) * h;
  }
  return -1.0;
}

SeedSamples trace_seed(const Trajectory& traj, const NullChart& chart, double level,
                       bool level_is_u) {
  SeedSamples out;
  const double h = traj.grid.h;
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j) {
    const auto& row = level_is_u ? chart.u[j] : chart.v[j];
    const double rc = crossing(row, h, level, !level_is_u);
    if (rc < 0.0) continue;
    const int ic = std::min(static_cast<int>(rc / h), chart.n_nodes - 2);
    if (!chart.valid[j][ic] || !chart.valid[j][ic + 1]) continue;
    const CauchyState& snap = traj.snapshots[j];
    out.s.push_back(level_is_u ? lerp(chart.v[j], h, rc) : lerp(chart.u[j], h, rc));
    out.r.push_back(rc);
    out.lam.push_back(lerp(chart.lam[j], h, rc));
    out.gamma.push_back(lerp(snap.gamma.v, h, rc));
    out.phi.push_back(lerp(snap.phi.v, h, rc));
  }
  return out;
}

double sample_at(const SeedSamples& smp, const std::vector<double>& f, double x) {
  const auto it = std::lower_bound(smp.s.begin(), smp.s.end(), x);
  if (it == smp.s.begin() || it == smp.s.end())
    throw ConfigError("double-null seeding: seed ray leaves the chart's valid region");
  const std::size_t q = static_cast<std::size_t>(it - smp.s.begin());
  const double w = (x - smp.s[q - 1]) / (smp.s[q] - smp.s[q - 1]);
  return (1.0 - w) * f[q - 1] + w * f[q];
}

}  // namespace

DoubleNullState seed_from_cauchy(const Trajectory& traj, const NullChart& chart,
                                 const DoubleNullParams& p) {
  if (!(p.u_max > p.u_min) || !(p.v_max > p.v_min))
    throw ConfigError("double-null: degenerate (u,v) rectangle");
  if (!(p.v_min - p.u_max > 0.0))
    throw ConfigError("double-null: rectangle must satisfy v - u > 0 (away from the axis)");
  if (p.n_u < 4) throw ConfigError("double-null: n_u must be at least 4");
  if (!chart.has_fg) throw ConfigError("double-null: chart needs compute_FG first");

  DoubleNullState s;
  s.p = p;
  s.mass = traj.mass;
  s.k = (p.u_max - p.u_min) / p.n_u;
  s.nu = p.n_u + 1;
  s.nv = static_cast<int>(std::round((p.v_max - p.v_min) / s.k)) + 1;
  if (s.nv < 2) throw ConfigError("double-null: empty v range");
  const std::size_t total = static_cast<std::size_t>(s.nu) * s.nv;
  s.r.assign(total, 0.0);
  s.lam.assign(total, 0.0);
  s.gamma.assign(total, 0.0);
  s.phi.assign(total, 0.0);

  SeedSamples uray = trace_seed(traj, chart, p.u_min, true);
  SeedSamples vray = trace_seed(traj, chart, p.v_min, false);
  if (uray.s.size() < 4 || vray.s.size() < 4)
    throw ConfigError("double-null seeding: seed rays not covered by the chart");

  for (int j = 0; j < s.nv; ++j) {
    const double v = s.v_of(j);
    s.r[j] = sample_at(uray, uray.r, v);
    s.lam[j] = sample_at(uray, uray.lam, v);
    s.gamma[j] = sample_at(uray, uray.gamma, v);
    s.phi[j] = sample_at(uray, uray.phi, v);
  }
  for (int i = 0; i < s.nu; ++i) {
    const double u = s.u_of(i);
    const std::size_t q = static_cast<std::size_t>(i) * s.nv;
    s.r[q] = sample_at(vray, vray.r, u);
    s.lam[q] = sample_at(vray, vray.lam, u);
    s.gamma[q] = sample_at(vray, vray.gamma, u);
    s.phi[q] = sample_at(vray, vray.phi, u);
  }
  return s;
}

void box_step(DoubleNullState& s, int i, int j) {
  const int nv = s.nv;
  const std::size_t S = static_cast<std::size_t>(i) * nv + j;
  const std::size_t W = S + nv;      // (i+1, j)
  const std::size_t E = S + 1;       // (i, j+1)
  const std::size_t N = S + nv + 1;  // (i+1, j+1)
  const double k = s.k;
  const double m2 = s.mass * s.mass;

  // second-order initial guess for the future corner
  s.r[N] = s.r[E] + s.r[W] - s.r[S];
  s.lam[N] = s.lam[E] + s.lam[W] - s.lam[S];
  s.gamma[N] = s.gamma[E] + s.gamma[W] - s.gamma[S];
  s.phi[N] = s.phi[E] + s.phi[W] - s.phi[S];

  for (int pass = 0; pass < 8; ++pass) {
    const double rb = 0.25 * (s.r[S] + s.r[W] + s.r[E] + s.r[N]);
    const double lamb = 0.25 * (s.lam[S] + s.lam[W] + s.lam[E] + s.lam[N]);
    const double gamb = 0.25 * (s.gamma[S] + s.gamma[W] + s.gamma[E] + s.gamma[N]);
    const double phib = 0.25 * (s.phi[S] + s.phi[W] + s.phi[E] + s.phi[N]);
    const double inv2k = 1.0 / (2.0 * k);
    const double r_u = ((s.r[W] - s.r[S]) + (s.r[N] - s.r[E])) * inv2k;
    const double r_v = ((s.r[E] - s.r[S]) + (s.r[N] - s.r[W])) * inv2k;
    const double g_u = ((s.gamma[W] - s.gamma[S]) + (s.gamma[N] - s.gamma[E])) * inv2k;
    const double g_v = ((s.gamma[E] - s.gamma[S]) + (s.gamma[N] - s.gamma[W])) * inv2k;
    const double p_u = ((s.phi[W] - s.phi[S]) + (s.phi[N] - s.phi[E])) * inv2k;
    const double p_v = ((s.phi[E] - s.phi[S]) + (s.phi[N] - s.phi[W])) * inv2k;
    const double expf = std::exp(2.0 * lamb - 2.0 * gamb);

    const double rn = s.r[E] + s.r[W] - s.r[S] + k * k * (0.25 * m2 * rb * expf * phib * phib);
    const double ln = s.lam[E] + s.lam[W] - s.lam[S] +
                      k * k * (-g_u * g_v - 0.5 * p_u * p_v + 0.125 * m2 * expf * phib * phib);
    const double rhs_g = 0.25 * m2 * rb * expf * phib * phib;
    const double gn = s.gamma[E] + s.gamma[W] - s.gamma[S] +
                      k * k * (rhs_g - r_u * g_v - r_v * g_u) / (2.0 * rb);
    const double rhs_p = -0.5 * m2 * rb * expf * phib;
    const double pn = s.phi[E] + s.phi[W] - s.phi[S] +
                      k * k * (rhs_p - r_u * p_v - r_v * p_u) / (2.0 * rb);

    const double delta = std::max(std::max(std::abs(rn - s.r[N]), std::abs(ln - s.lam[N])),
                                  std::max(std::abs(gn - s.gamma[N]), std::abs(pn - s.phi[N])));
    s.r[N] = rn;
    s.lam[N] = ln;
    s.gamma[N] = gn;
    s.phi[N] = pn;
    if (delta < 1e-10 && pass >= 1) return;
  }
  std::ostringstream os;
  os << "double-null cell (" << i << "," << j << ") fixed point did not converge";
  throw NumericalError(os.str());
}

void evolve_diamond(DoubleNullState& s) {
  for (int i = 0; i + 1 < s.nu; ++i) {
    for (int j = 0; j + 1 < s.nv; ++j) {
      box_step(s, i, j);
      const std::size_t S = static_cast<std::size_t>(i) * s.nv + j;
      const double r_u = (s.r[S + s.nv] - s.r[S]) / s.k;
      const double r_v = (s.r[S + 1] - s.r[S]) / s.k;
      if (!(r_u < 0.0) || !(r_v > 0.0)) {
        std::ostringstream os;
        os << "trapped-region signature at u = " << s.u_of(i) << ", v = " << s.v_of(j)
           << ": r_u = " << r_u << ", r_v = " << r_v;
        s.stop_reason = os.str();
        return;
      }
    }
  }
  s.evolved = true;
}

RaychaudhuriResiduals raychaudhuri_residuals(const DoubleNullState& s) {
  RaychaudhuriResiduals out;
  const int nu = s.nu, nv = s.nv;
  const double k = s.k;
  out.res_u.assign(static_cast<std::size_t>(nu) * nv, 0.0);
  out.res_v.assign(static_cast<std::size_t>(nu) * nv, 0.0);
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * nv + j; };

  for (int i = 1; i + 1 < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double wp = std::exp(-(s.lam[idx(i + 1, j)] + s.lam[idx(i, j)])) *
                        (s.r[idx(i + 1, j)] - s.r[idx(i, j)]) / k;
      const double wm = std::exp(-(s.lam[idx(i, j)] + s.lam[idx(i - 1, j)])) *
                        (s.r[idx(i, j)] - s.r[idx(i - 1, j)]) / k;
      const double gu = (s.gamma[idx(i + 1, j)] - s.gamma[idx(i - 1, j)]) / (2.0 * k);
      const double pu = (s.phi[idx(i + 1, j)] - s.phi[idx(i - 1, j)]) / (2.0 * k);
      const double res = (wp - wm) / k + std::exp(-2.0 * s.lam[idx(i, j)]) * s.r[idx(i, j)] *
                                             (2.0 * gu * gu + pu * pu);
      out.res_u[idx(i, j)] = res;
      out.max_u = std::max(out.max_u, std::abs(res));
    }
  }
  for (int i = 0; i < nu; ++i) {
    for (int j = 1; j + 1 < nv; ++j) {
      const double wp = std::exp(-(s.lam[idx(i, j + 1)] + s.lam[idx(i, j)])) *
                        (s.r[idx(i, j + 1)] - s.r[idx(i, j)]) / k;
      const double wm = std::exp(-(s.lam[idx(i, j)] + s.lam[idx(i, j - 1)])) *
                        (s.r[idx(i, j)] - s.r[idx(i, j - 1)]) / k;
      const double gv = (s.gamma[idx(i, j + 1)] - s.gamma[idx(i, j - 1)]) / (2.0 * k);
      const double pv = (s.phi[idx(i, j + 1)] - s.phi[idx(i, j - 1)]) / (2.0 * k);
      const double res = (wp - wm) / k + std::exp(-2.0 * s.lam[idx(i, j)]) * s.r[idx(i, j)] *
                                             (2.0 * gv * gv + pv * pv);
      out.res_v[idx(i, j)] = res;
      out.max_v = std::max(out.max_v, std::abs(res));
    }
  }
  return out;
}

TRFormResiduals tr_form_residuals(const DoubleNullState& s) {
  TRFormResiduals out;
  const int nu = s.nu, nv = s.nv;
  const double k = s.k;
  const double m2 = s.mass * s.mass;
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * nv + j; };

  struct D2 {
    double val, du, dv, duu, dvv, duv;
  };
  auto derivs = [&](const std::vector<double>& f, int i, int j) {
    D2 d;
    d.val = f[idx(i, j)];
    d.du = (f[idx(i + 1, j)] - f[idx(i - 1, j)]) / (2.0 * k);
    d.dv = (f[idx(i, j + 1)] - f[idx(i, j - 1)]) / (2.0 * k);
    d.duu = (f[idx(i + 1, j)] - 2.0 * f[idx(i, j)] + f[idx(i - 1, j)]) / (k * k);
    d.dvv = (f[idx(i, j + 1)] - 2.0 * f[idx(i, j)] + f[idx(i, j - 1)]) / (k * k);
    d.duv = (f[idx(i + 1, j + 1)] - f[idx(i + 1, j - 1)] - f[idx(i - 1, j + 1)] +
             f[idx(i - 1, j - 1)]) /
            (4.0 * k * k);
    return d;
  };

  for (int i = 1; i + 1 < nu; ++i) {
    for (int j = 1; j + 1 < nv; ++j) {
      const D2 r = derivs(s.r, i, j);
      const D2 l = derivs(s.lam, i, j);
      const D2 g = derivs(s.gamma, i, j);
      const D2 p = derivs(s.phi, i, j);
      auto T = [](const D2& d) { return d.du + d.dv; };
      auto R = [](const D2& d) { return d.dv - d.du; };
      auto TT = [](const D2& d) { return d.duu + 2.0 * d.duv + d.dvv; };
      auto RR = [](const D2& d) { return d.duu - 2.0 * d.duv + d.dvv; };
      auto TR = [](const D2& d) { return d.dvv - d.duu; };

      const double e2l = std::exp(2.0 * l.val - 2.0 * g.val);
      const double quad =
          T(g) * T(g) + R(g) * R(g) + 0.5 * (T(p) * T(p) + R(p) * R(p));
      const double mass_term = 0.5 * m2 * e2l * p.val * p.val;

      const double c16 =
          (T(r) * T(l) + R(r) * R(l) - RR(r)) / r.val - (quad + mass_term);
      const double c17 = (-TR(r) + T(r) * R(l) + R(r) * T(l)) / r.val -
                         (2.0 * T(g) * R(g) + T(p) * R(p));
      const double c18 =
          (T(r) * T(l) + R(r) * R(l) - TT(r)) / r.val - (quad - mass_term);
      out.max_constraint = std::max({out.max_constraint, std::abs(c16), std::abs(c17),
                                     std::abs(c18)});

      const double e2lam = std::exp(-2.0 * l.val);
      const double e2gam = std::exp(-2.0 * g.val);
      const double w19 =
          e2lam * (RR(l) - TT(l)) -
          (-0.5 * m2 * e2gam * p.val * p.val + e2lam * (T(g) * T(g) - R(g) * R(g)) +
           0.5 * e2lam * (T(p) * T(p) - R(p) * R(p)));
      const double w10 =
          e2lam * (-TT(g) + RR(g) - T(r) / r.val * T(g) + R(r) / r.val * R(g)) -
          (-0.5 * m2 * e2gam * p.val * p.val);
      const double w11 =
          e2lam * (-TT(p) + RR(p) - T(r) / r.val * T(p) + R(r) / r.val * R(p)) -
          m2 * e2gam * p.val;
      out.max_wave = std::max({out.max_wave, std::abs(w19), std::abs(w10), std::abs(w11)});
    }
  }
  return out;
}

CauchyComparison compare_with_cauchy(const DoubleNullState& s, const Trajectory& traj,
                                     const NullChart& chart) {
  CauchyComparison cmp;
  const double k = s.k;
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * s.nv + j; };
  auto bilerp = [&](const std::vector<double>& f, double iu, double jv) {
    const int i = static_cast<int>(iu), j = static_cast<int>(jv);
    const double wu = iu - i, wv = jv - j;
    return (1.0 - wu) * ((1.0 - wv) * f[idx(i, j)] + wv * f[idx(i, j + 1)]) +
           wu * ((1.0 - wv) * f[idx(i + 1, j)] + wv * f[idx(i + 1, j + 1)]);
  };

  for (std::size_t js = 0; js < chart.n_snapshots(); ++js) {
    const CauchyState& snap = traj.snapshots[js];
    for (int i = 0; i < chart.n_nodes; ++i) {
      if (!chart.valid[js][i]) continue;
      const double u = chart.u[js][i], v = chart.v[js][i];
      const double iu = (u - s.p.u_min) / k, jv = (v - s.p.v_min) / k;
      if (iu < 0.0 || jv < 0.0 || iu > s.nu - 1.001 || jv > s.nv - 1.001) continue;
      cmp.sup_gamma =
          std::max(cmp.sup_gamma, std::abs(bilerp(s.gamma, iu, jv) - snap.gamma[i]));
      cmp.sup_phi = std::max(cmp.sup_phi, std::abs(bilerp(s.phi, iu, jv) - snap.phi[i]));
      cmp.sup_r = std::max(cmp.sup_r, std::abs(bilerp(s.r, iu, jv) - traj.grid.r[i]));
      cmp.sup_lam = std::max(cmp.sup_lam, std::abs(bilerp(s.lam, iu, jv) - chart.lam[js][i]));
      ++cmp.n_points;
    }
  }
  return cmp;
}

}  // namespace ekg
