#include "glsurf/costfn.hpp"

#include <algorithm>
#include <cmath>

namespace glsurf {

namespace {

std::vector<double> moment_integrand(const Profile1D& f) {
  const int n = f.grid.n;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double t = f.grid.node(i);
    const double rho = 1.0 - f.params.eps * f.k * t;
    const double m = t + f.alpha - 0.5 * f.params.eps * f.k * t * t;
    g[i] = 2.0 * f.values[i] * f.values[i] * m / rho;
  }
  return g;
}

int positivity_endpoint(const Profile1D& f) {
  const double thr = std::pow(f.params.log_eps_abs(), 3.0) * f.values.back();
  int idx = 0;
  for (int i = 0; i < f.grid.n; ++i)
    if (f.values[i] >= thr) idx = i;
  return idx;
}

} // namespace

CostProfile potential_function(const OptimalPair& pair) {
  CostProfile cp;
  cp.base = pair.profile;
  const auto& f = cp.base;
  const int n = f.grid.n;
  const double h = f.grid.spacing();
  const auto g = moment_integrand(f);
  cp.F.assign(n, 0.0);
  for (int i = 1; i < n; ++i) cp.F[i] = cp.F[i - 1] + 0.5 * h * (g[i] + g[i - 1]);
  cp.t_bar_index = positivity_endpoint(f);
  cp.t_bar = f.grid.node(cp.t_bar_index);
  cp.d_eps = f.params.d_eps;
  return cp;
}

CostProfile cost_function(CostProfile cp, double d_eps) {
  const auto& f = cp.base;
  const double dmax = std::pow(f.params.log_eps_abs(), -4.0);
  if (!(d_eps > 0.0 && d_eps <= dmax))
    throw margin_out_of_range_error("d_eps must lie in (0, |log eps|^-4]");
  cp.d_eps = d_eps;
  const int n = f.grid.n;
  cp.K.resize(n);
  for (int i = 0; i < n; ++i)
    cp.K[i] = (1.0 - d_eps) * f.values[i] * f.values[i] + cp.F[i];
  // min over [0, t_bar]: nodes plus midpoints (f linear, F by half-step trapezoid)
  const double h = f.grid.spacing();
  const auto g = moment_integrand(f);
  double mn = cp.K[0];
  for (int i = 0; i <= cp.t_bar_index; ++i) {
    mn = std::min(mn, cp.K[i]);
    if (i < n - 1) {
      const double fm = 0.5 * (f.values[i] + f.values[i + 1]);
      const double gm = 0.5 * (g[i] + g[i + 1]);
      const double Fm = cp.F[i] + 0.5 * (0.5 * h) * (g[i] + gm);
      mn = std::min(mn, (1.0 - d_eps) * fm * fm + Fm);
    }
  }
  cp.min_K = mn;
  return cp;
}

namespace {

// Tail-anchored F: forward F minus its endpoint, so F(t_eps) = 0 exactly and the
// tail values reflect the true backward integral rather than the stationarity
// residual of the solve.
std::vector<double> anchored_F(const Profile1D& f) {
  OptimalPair tmp;
  tmp.profile = f;
  CostProfile cp = potential_function(tmp);
  const double end = cp.F.back();
  for (auto& v : cp.F) v -= end;
  return cp.F;
}

} // namespace

CorrectionDiagnostics correction_function(const OptimalPair& pa, const OptimalPair& pb) {
  const auto& fa = pa.profile;
  const auto& fb = pb.profile;
  if (fa.grid.n != fb.grid.n || std::abs(fa.grid.t1 - fb.grid.t1) > 1e-12)
    throw usage_error("correction_function requires both pairs on the same grid");
  const int n = fa.grid.n;
  const double h = fa.grid.spacing();

  CorrectionDiagnostics d;
  d.k = fa.k;
  d.k_prime = fb.k;
  const auto Fa = anchored_F(fa);
  const auto Fb = anchored_F(fb);

  d.I.assign(n, 0.0);
  d.excluded_nodes = 0;
  std::vector<char> ok(n, 1);
  for (int i = 0; i < n; ++i) {
    const double fb2 = fb.values[i] * fb.values[i];
    const double fa2 = fa.values[i] * fa.values[i];
    if (fb.values[i] < 1e-300 || fa.values[i] < 1e-300) {
      ok[i] = 0;
      ++d.excluded_nodes;
      continue;
    }
    d.I[i] = Fa[i] - Fb[i] * (fa2 / fb2);
  }

  const int ia = positivity_endpoint(fa);
  const int ib = positivity_endpoint(fb);
  const int ibar = std::min(ia, ib);
  d.t_bar = fa.grid.node(ibar);

  for (int i = 0; i < n; ++i) {
    if (!ok[i]) continue;
    const double fa2 = fa.values[i] * fa.values[i];
    d.sup_ratio = std::max(d.sup_ratio, std::abs(d.I[i] / fa2));
  }
  for (int i = 0; i <= ibar; ++i) {
    if (!ok[i]) continue;
    double dI;
    if (i == 0) dI = (-3.0 * d.I[0] + 4.0 * d.I[1] - d.I[2]) / (2.0 * h);
    else if (i == n - 1) dI = (3.0 * d.I[n - 1] - 4.0 * d.I[n - 2] + d.I[n - 3]) / (2.0 * h);
    else dI = (d.I[i + 1] - d.I[i - 1]) / (2.0 * h);
    const double fa2 = fa.values[i] * fa.values[i];
    d.sup_deriv_ratio = std::max(d.sup_deriv_ratio, std::abs(dI / fa2));
  }
  d.logderiv_gap = log_derivative_gap(pa, pb);
  return d;
}

double log_derivative_gap(const OptimalPair& pa, const OptimalPair& pb) {
  const auto& fa = pa.profile;
  const auto& fb = pb.profile;
  if (fa.grid.n != fb.grid.n || std::abs(fa.grid.t1 - fb.grid.t1) > 1e-12)
    throw usage_error("log_derivative_gap requires both pairs on the same grid");
  const auto da = fa.derivative();
  const auto db = fb.derivative();
  double gap = 0.0;
  for (int i = 0; i < fa.grid.n; ++i) {
    if (fa.values[i] < 1e-300 || fb.values[i] < 1e-300) continue;
    gap = std::max(gap, std::abs(da[i] / fa.values[i] - db[i] / fb.values[i]));
  }
  return gap;
}

} // namespace glsurf
