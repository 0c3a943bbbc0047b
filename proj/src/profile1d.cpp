#include "glsurf/profile1d.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iostream>
#include <mutex>

#include "glsurf/numerics.hpp"

namespace glsurf {

std::vector<double> Profile1D::derivative() const {
  const int n = grid.n;
  const double h = grid.spacing();
  std::vector<double> d(n);
  for (int i = 1; i + 1 < n; ++i) d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
  d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
  return d;
}

double Profile1D::sup() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

double potential_v(double t, double k, double alpha, double eps) {
  const double rho = 1.0 - eps * k * t;
  if (rho <= 0.0)
    throw degenerate_metric_error("1 - eps*k*t <= 0 at t=" + std::to_string(t));
  const double c = t + alpha - 0.5 * eps * k * t * t;
  return c * c / (rho * rho);
}

namespace {

struct Coeffs {
  std::vector<double> t, rho, V, w;  // nodes, metric weight, potential, trapezoid weights
  std::vector<double> rho_mid;       // metric weight at cell midpoints
  double h;
};

Coeffs coeffs_for(double k, double alpha, const ProblemParams& p, const Grid1D& g) {
  Coeffs c;
  const int n = g.n;
  c.h = g.spacing();
  c.t.resize(n);
  c.rho.resize(n);
  c.V.resize(n);
  c.rho_mid.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    c.t[i] = g.node(i);
    c.rho[i] = 1.0 - p.eps * k * c.t[i];
    if (c.rho[i] <= 0.5)
      throw degenerate_metric_error("metric weight 1-eps*k*t <= 1/2 on the grid");
    c.V[i] = potential_v(c.t[i], k, alpha, p.eps);
  }
  for (int i = 0; i + 1 < n; ++i)
    c.rho_mid[i] = 1.0 - p.eps * k * (c.t[i] + 0.5 * c.h);
  c.w = trapezoid_weights(n, c.h);
  return c;
}

} // namespace

double energy_1d(const Profile1D& f) {
  const Coeffs c = coeffs_for(f.k, f.alpha, f.params, f.grid);
  const int n = f.grid.n;
  const auto& v = f.values;
  double kin = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double df = (v[i + 1] - v[i]) / c.h;
    kin += c.h * c.rho_mid[i] * df * df;
  }
  double pot = 0.0;
  const double inv2b = 0.5 / f.params.b;
  for (int i = 0; i < n; ++i) {
    const double f2 = v[i] * v[i];
    pot += c.w[i] * c.rho[i] * (c.V[i] * f2 - inv2b * (2.0 * f2 - f2 * f2));
  }
  return kin + pot;
}

double energy_1d_dalpha(const Profile1D& f) {
  const Coeffs c = coeffs_for(f.k, f.alpha, f.params, f.grid);
  double s = 0.0;
  for (int i = 0; i < f.grid.n; ++i) {
    const double m = c.t[i] + f.alpha - 0.5 * f.params.eps * f.k * c.t[i] * c.t[i];
    s += c.w[i] * m / c.rho[i] * f.values[i] * f.values[i];
  }
  return 2.0 * s;
}

double el_residual_max(const Profile1D& f) {
  const Coeffs c = coeffs_for(f.k, f.alpha, f.params, f.grid);
  const int n = f.grid.n;
  const auto& v = f.values;
  const double h2 = c.h * c.h;
  double rmax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double fm = (i == 0) ? v[1] : v[i - 1];
    const double fp = (i == n - 1) ? v[n - 2] : v[i + 1];
    const double fpp = (fp - 2.0 * v[i] + fm) / h2;
    const double fpr = (fp - fm) / (2.0 * c.h);
    const double r = -fpp + (f.params.eps * f.k / c.rho[i]) * fpr + c.V[i] * v[i] -
                     (1.0 / f.params.b) * (1.0 - v[i] * v[i]) * v[i];
    rmax = std::max(rmax, std::abs(r));
  }
  return rmax;
}

Profile1D solve_profile(double k, double alpha, const ProblemParams& params,
                        const Grid1D& grid, const std::vector<double>* init,
                        const SolveOptions& opts) {
  params.validate();
  const Coeffs c = coeffs_for(k, alpha, params, grid);
  const int n = grid.n;
  const double h = c.h, h2 = h * h;
  const double b = params.b;

  Profile1D prof;
  prof.grid = grid;
  prof.alpha = alpha;
  prof.k = k;
  prof.params = params;
  prof.values.resize(n);
  if (init) {
    if (static_cast<int>(init->size()) != n) throw usage_error("init size mismatch");
    prof.values = *init;
  } else {
    // Ground mode of the linearization -(rho f')' + rho V f = mu rho f (Neumann),
    // scaled to the energy-minimizing amplitude along the ray. E(init) <= 0
    // whenever a nontrivial minimizer exists (mu < 1/b), so the flow cannot
    // decay into the normal branch; mu >= 1/b yields the normal state directly.
    std::vector<double> dpen(n, 0.0), epen(n - 1), wm(n);
    {
      const std::vector<double> wq = trapezoid_weights(n, c.h);
      for (int i = 0; i < n; ++i) wm[i] = wq[i] * c.rho[i];
      for (int i = 0; i + 1 < n; ++i) {
        dpen[i] += c.rho_mid[i] / c.h;
        dpen[i + 1] += c.rho_mid[i] / c.h;
      }
      for (int i = 0; i < n; ++i) dpen[i] = (dpen[i] + wm[i] * c.V[i]) / wm[i];
      for (int i = 0; i + 1 < n; ++i)
        epen[i] = (-c.rho_mid[i] / c.h) / std::sqrt(wm[i] * wm[i + 1]);
    }
    std::vector<double> x(n), lo0(n), up0(n), di0(n);
    for (int i = 0; i < n; ++i) x[i] = std::exp(-0.5 * c.t[i] * c.t[i]);
    double mu = 0.0;
    for (int it = 0; it < 60; ++it) {
      for (int i = 0; i < n; ++i) {
        di0[i] = dpen[i];
        lo0[i] = (i > 0) ? epen[i - 1] : 0.0;
        up0[i] = (i + 1 < n) ? epen[i] : 0.0;
      }
      thomas_solve(lo0, di0, up0, x);
      double nrm = 0.0;
      for (double v : x) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (auto& v : x) v /= nrm;
      double mu_new = 0.0;
      for (int i = 0; i < n; ++i) {
        double av = dpen[i] * x[i];
        if (i > 0) av += epen[i - 1] * x[i - 1];
        if (i + 1 < n) av += epen[i] * x[i + 1];
        mu_new += x[i] * av;
      }
      if (it > 3 && std::abs(mu_new - mu) < 1e-10 * std::max(1.0, std::abs(mu_new))) {
        mu = mu_new;
        break;
      }
      mu = mu_new;
    }
    // back to the physical mode phi = x / sqrt(w rho), normalized in L2(rho)
    double mass = 0.0, quart = 0.0;
    for (int i = 0; i < n; ++i) {
      prof.values[i] = std::abs(x[i]) / std::sqrt(wm[i]);
      mass += wm[i] * prof.values[i] * prof.values[i];
      quart += wm[i] * std::pow(prof.values[i], 4.0);
    }
    const double quad = (mu - 1.0 / b) * mass;
    const double a2 = (quad < 0.0) ? -b * quad / quart : 0.0;
    const double amp = std::sqrt(a2);
    for (auto& v : prof.values) v *= amp;
  }
  auto& f = prof.values;
  const double e_init = energy_1d(prof);

  // Linear operator L = -D2 + (eps k/rho) D1 + V with mirror-ghost Neumann rows.
  std::vector<double> lo(n), up(n), di(n);
  for (int i = 0; i < n; ++i) {
    const double cc = params.eps * k / c.rho[i];
    lo[i] = -1.0 / h2 - cc / (2.0 * h);
    up[i] = -1.0 / h2 + cc / (2.0 * h);
    di[i] = 2.0 / h2 + c.V[i];
  }
  // ghost folds: row 0 couples only to f[1] with both off-diagonal weights
  up[0] = -2.0 / h2;
  lo[n - 1] = -2.0 / h2;

  std::vector<double> diag(n), rhs(n);
  const double dt = opts.flow_dt;
  double res = el_residual_max(prof);
  int flow_steps = 0;
  while (res > opts.flow_switch_tol && flow_steps < opts.max_flow_steps) {
    const int chunk = 50;
    for (int s = 0; s < chunk; ++s) {
      for (int i = 0; i < n; ++i) {
        diag[i] = 1.0 + dt * di[i];
        rhs[i] = f[i] + dt * (1.0 / b) * (1.0 - f[i] * f[i]) * f[i];
      }
      std::vector<double> lo_dt(n), up_dt(n);
      for (int i = 0; i < n; ++i) { lo_dt[i] = dt * lo[i]; up_dt[i] = dt * up[i]; }
      thomas_solve(lo_dt, diag, up_dt, rhs);
      for (int i = 0; i < n; ++i) f[i] = std::abs(rhs[i]);
    }
    flow_steps += chunk;
    res = el_residual_max(prof);
  }

  // Newton on the same ghost-node system.
  for (int it = 0; it < opts.max_newton_steps && res > opts.tol; ++it) {
    for (int i = 0; i < n; ++i) {
      const double fm = (i == 0) ? f[1] : f[i - 1];
      const double fp = (i == n - 1) ? f[n - 2] : f[i + 1];
      const double fpp = (fp - 2.0 * f[i] + fm) / h2;
      const double fpr = (fp - fm) / (2.0 * h);
      rhs[i] = -(-fpp + (params.eps * k / c.rho[i]) * fpr + c.V[i] * f[i] -
                 (1.0 / b) * (1.0 - f[i] * f[i]) * f[i]);
      diag[i] = di[i] - (1.0 / b) * (1.0 - 3.0 * f[i] * f[i]);
    }
    thomas_solve(lo, diag, up, rhs);
    double step = 1.0;
    for (int i = 0; i < n; ++i) f[i] += step * rhs[i];
    res = el_residual_max(prof);
  }

  if (res > std::max(opts.tol, 1e-8))
    throw non_convergence_error("solve_profile did not converge", res);

  // Sign projection: the discrete solution from nonnegative data stays nonnegative
  // up to rounding in the far tail.
  for (auto& x : f) if (x < 0.0 && x > -1e-14) x = -x;

  // A poor initialization can slide into the normal-state branch through the
  // saddle at 0; when that happens, retry from the default envelope and keep
  // the lower-energy solution.
  if (init && prof.sup() < 1e-6) {
    Profile1D alt = solve_profile(k, alpha, params, grid, nullptr, opts);
    if (energy_1d(alt) < energy_1d(prof)) return alt;
  }

  const double e_final = energy_1d(prof);
  if (e_final > e_init + 1e-9 * std::max(1.0, std::abs(e_init)))
    throw non_convergence_error("solve_profile energy exceeded initialization", e_final - e_init);
  return prof;
}

OptimalPair optimal_phase(double k, const ProblemParams& params, const Grid1D& grid,
                          const PhaseOptions& opts) {
  params.validate();
  const double th0 = theta0_cached();
  if (!(params.b > 1.0 && params.b < 1.0 / th0)) {
    std::cerr << "[glsurf] warning: b=" << params.b
              << " outside the surface regime (1, " << 1.0 / th0 << ")\n";
  }

  double lo = opts.bracket_lo, hi = opts.bracket_hi;
  if (opts.warm_alpha) {
    lo = std::max(lo, *opts.warm_alpha - 0.25);
    hi = std::min(hi, *opts.warm_alpha + 0.25);
  }

  std::vector<double> warm;
  bool have_warm = false;
  auto solve_at = [&](double a) {
    Profile1D pr = solve_profile(k, a, params, grid, have_warm ? &warm : nullptr, opts.solve);
    double sup = 0.0;
    for (double v : pr.values) sup = std::max(sup, v);
    if (sup > 1e-3) {  // never warm-start from a collapsed (normal-state) profile
      warm = pr.values;
      have_warm = true;
    } else {
      have_warm = false;
    }
    return pr;
  };
  auto eval_E = [&](double a) { return energy_1d(solve_at(a)); };

  // Coarse scan first: E(alpha) is flat (== 0, collapsed profiles) away from the
  // superconducting well, which defeats plain golden-section bracketing.
  const int nscan = 17;
  int best = 0;
  double best_e = 1e300;
  for (int q = 0; q < nscan; ++q) {
    const double a = lo + (hi - lo) * q / (nscan - 1);
    const double e = eval_E(a);
    if (e < best_e) {
      best_e = e;
      best = q;
    }
  }
  if (best_e > -1e-14) {
    if (params.b < 1.0 / th0)
      throw bracket_failure_error("the alpha bracket misses the superconducting well");
    // normal state (b beyond the window): report it (spec: warn, not fail)
    OptimalPair pair;
    pair.alpha_star = lo + (hi - lo) * best / (nscan - 1);
    pair.profile = solve_at(pair.alpha_star);
    pair.energy = energy_1d(pair.profile);
    pair.stationarity_residual = 0.5 * energy_1d_dalpha(pair.profile);
    std::cerr << "[glsurf] normal state: no nontrivial profile in the alpha bracket\n";
    return pair;
  }
  if (best == 0 || best == nscan - 1)
    throw bracket_failure_error("no interior minimum of E1D(k,alpha) in the alpha bracket");

  const double step = (hi - lo) / (nscan - 1);
  const double blo = lo + (best - 1) * step;
  const double bhi = lo + (best + 1) * step;
  double a_star = brent_minimize(eval_E, blo, bhi, opts.xatol);

  // Polish the stationarity condition dE/dalpha = 0 (step-capped secant).
  auto g = [&](double a) { return energy_1d_dalpha(solve_at(a)); };
  double a0 = a_star, g0 = g(a0);
  double a1 = a_star + 1e-6, g1 = g(a1);
  for (int it = 0; it < 40 && std::abs(g1) > 1e-11; ++it) {
    if (g1 == g0) break;
    double anext = a1 - g1 * (a1 - a0) / (g1 - g0);
    anext = std::clamp(anext, a_star - step, a_star + step);
    a0 = a1; g0 = g1;
    a1 = anext; g1 = g(a1);
  }
  a_star = (std::abs(g1) < std::abs(g0)) ? a1 : a0;

  OptimalPair pair;
  pair.profile = solve_at(a_star);
  pair.alpha_star = a_star;
  pair.energy = energy_1d(pair.profile);
  pair.stationarity_residual = 0.5 * energy_1d_dalpha(pair.profile);

  const double supv = pair.profile.sup();
  if (supv >= 1e-6) {
    for (double v : pair.profile.values)
      if (!(v > 0.0))
        throw non_convergence_error("optimal profile not strictly positive", supv);
  }
  return pair;
}

namespace {

// Symmetric tridiagonal pencil for -u'' + (t+alpha)^2 u, Neumann, edge form:
// K (stiffness) + diag(w V), mass diag(w); folded to standard form via M^{-1/2}.
struct Tridiag {
  std::vector<double> d, e;  // diagonal, off-diagonal
};

Tridiag oscillator_matrix(double alpha, int n, double tmax) {
  const double h = tmax / (n - 1);
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  std::vector<double> kd(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) { kd[i] += 1.0 / h; kd[i + 1] += 1.0 / h; }
  Tridiag T;
  T.d.resize(n);
  T.e.resize(n - 1);
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    const double v = (t + alpha) * (t + alpha);
    T.d[i] = (kd[i] + w[i] * v) / w[i];
  }
  for (int i = 0; i + 1 < n; ++i) T.e[i] = (-1.0 / h) / std::sqrt(w[i] * w[i + 1]);
  return T;
}

} // namespace

double theta0_mu(double alpha, int resolution, double tmax) {
  if (resolution < 512) throw usage_error("theta0 resolution must be >= 512");
  if (tmax < 10.0) throw usage_error("theta0 truncation endpoint must be >= 10");
  const int n = resolution;
  Tridiag T = oscillator_matrix(alpha, n, tmax);

  // Inverse iteration with a fixed small shift (operator is positive definite).
  const double sigma = 0.0;
  std::vector<double> x(n, 1.0), lo(n), up(n), di(n), y(n);
  for (int i = 0; i < n; ++i) x[i] = std::exp(-0.5 * (i * tmax / (n - 1)) * (i * tmax / (n - 1)));
  double mu_prev = 0.0;
  for (int it = 0; it < 500; ++it) {
    for (int i = 0; i < n; ++i) {
      di[i] = T.d[i] - sigma;
      lo[i] = (i > 0) ? T.e[i - 1] : 0.0;
      up[i] = (i + 1 < n) ? T.e[i] : 0.0;
    }
    y = x;
    thomas_solve(lo, di, up, y);
    double nrm = 0.0;
    for (double v : y) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (auto& v : y) v /= nrm;
    // Rayleigh quotient
    double mu = 0.0;
    for (int i = 0; i < n; ++i) {
      double Av = T.d[i] * y[i];
      if (i > 0) Av += T.e[i - 1] * y[i - 1];
      if (i + 1 < n) Av += T.e[i] * y[i + 1];
      mu += y[i] * Av;
    }
    x = y;
    if (it > 2 && std::abs(mu - mu_prev) < 1e-12 * std::max(1.0, std::abs(mu))) return mu;
    mu_prev = mu;
  }
  throw eigensolver_error("theta0 inverse iteration did not converge");
}

Theta0Result theta0(int resolution, std::pair<double, double> alpha_range, double tmax) {
  auto f = [&](double a) { return theta0_mu(a, resolution, tmax); };
  const double a_opt = brent_minimize(f, alpha_range.first, alpha_range.second, 1e-10);
  return {f(a_opt), a_opt};
}

double theta0_cached() {
  static std::once_flag flag;
  static double value = 0.0;
  std::call_once(flag, [] { value = theta0(1024).theta0; });
  return value;
}

} // namespace glsurf
