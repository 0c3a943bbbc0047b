#include "glsurf/trial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "glsurf/numerics.hpp"

namespace glsurf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

int TrialState::cell_of(double s) const {
  const int N = ref.cells.n_cells;
  double ss = std::fmod(s, length);
  if (ss < 0) ss += length;
  return std::min<int>(static_cast<int>(ss / ref.cells.ell), N - 1);
}

double TrialState::g(double s, double t) const {
  const int N = ref.cells.n_cells;
  const int n = cell_of(s);
  double ss = std::fmod(s, length);
  if (ss < 0) ss += length;
  const double lam = (ss - ref.cells.cells[n].s_lo) / ref.cells.ell;
  const Grid1D& gr = ref.grid;
  if (t < 0.0 || t > gr.t1) return 0.0;
  const double h = gr.spacing();
  const int i = std::min<int>(static_cast<int>(t / h), gr.n - 2);
  const double mu = (t - gr.node(i)) / h;
  auto interp = [&](const OptimalPair& p) {
    return (1.0 - mu) * p.profile.values[i] + mu * p.profile.values[i + 1];
  };
  const double fn = interp(ref.pair(n));
  const double fn1 = interp(ref.pair((n + 1) % N));
  return fn + lam * (fn1 - fn);
}

double TrialState::S(double s) const {
  const int n = cell_of(s);
  double ss = std::fmod(s, length);
  if (ss < 0) ss += length;
  const double sloc = alphas[n] * (ss - ref.cells.cells[n].s_lo) + sloc_off[n];
  return sloc + sglo_amp * smoothstep5(ss / length);
}

double TrialState::dS(double s) const {
  const int n = cell_of(s);
  double ss = std::fmod(s, length);
  if (ss < 0) ss += length;
  return alphas[n] + sglo_amp * smoothstep5_deriv(ss / length) / length;
}

double TrialState::phase(double s) const {
  // defined modulo 2*pi*winding: both terms use the wrapped coordinate
  const ProblemParams& p = ref.params;
  double ss = std::fmod(s, length);
  if (ss < 0) ss += length;
  return S(ss) / p.eps + delta_eps * ss;
}

double TrialState::dphase(double s) const {
  const ProblemParams& p = ref.params;
  return dS(s) / p.eps + delta_eps;
}

double TrialState::S_increment() const {
  const int N = ref.cells.n_cells;
  return sloc_off[N - 1] + alphas[N - 1] * ref.cells.ell + sglo_amp;
}

double TrialState::phase_increment() const {
  return S_increment() / ref.params.eps + delta_eps * length;
}

TrialState build_trial(const BoundaryGeometry& geom, const ProblemParams& params,
                       const Grid1D& grid, int jobs) {
  TrialState tr;
  tr.ref = reference_profile(geom, params, grid, false, jobs);
  tr.length = geom.length();
  tr.delta_eps = params.delta_eps;
  const int N = tr.ref.cells.n_cells;
  tr.alphas.resize(N);
  tr.sloc_off.resize(N);
  for (int n = 0; n < N; ++n) tr.alphas[n] = tr.ref.pair(n).alpha_star;
  tr.sloc_off[0] = 0.0;
  for (int n = 1; n < N; ++n)
    tr.sloc_off[n] = tr.sloc_off[n - 1] + tr.alphas[n - 1] * tr.ref.cells.ell;
  const double sloc_end = tr.sloc_off[N - 1] + tr.alphas[N - 1] * tr.ref.cells.ell;

  // Close the total winding S(L)/eps + delta*L to 2*pi*Z via the smoothstep endpoint.
  const double target = (sloc_end / params.eps + params.delta_eps * tr.length) / kTwoPi;
  tr.winding = std::llround(target);
  tr.sglo_amp =
      params.eps * (kTwoPi * tr.winding - params.delta_eps * tr.length) - sloc_end;

  // measured smoothing-amplitude controls
  for (int n = 0; n < N; ++n) {
    const auto& fa = tr.ref.pair(n).profile.values;
    const auto& fb = tr.ref.pair((n + 1) % N).profile.values;
    double sup = 0.0;
    for (size_t i = 0; i < fa.size(); ++i) sup = std::max(sup, std::abs(fb[i] - fa[i]));
    tr.chi_sup = std::max(tr.chi_sup, sup);
    tr.dchi_s_sup = std::max(tr.dchi_s_sup, sup / tr.ref.cells.ell);
  }
  return tr;
}

double trial_periodicity_defect(const TrialState& trial) {
  // psi(L,t) - psi(0,t) with psi = g exp(-i Phi); g is periodic by construction,
  // so the defect is carried by the phase increment over one period.
  const Grid1D& gr = trial.ref.grid;
  const cplx seam = std::exp(cplx(0.0, -trial.phase_increment())) - 1.0;
  double d = 0.0;
  for (int i = 0; i < gr.n; ++i)
    d = std::max(d, trial.g(0.0, gr.node(i)) * std::abs(seam));
  return d;
}

BoundaryField assemble_field(const TrialState& trial, int ns_per_cell) {
  BoundaryField f;
  const int N = trial.ref.cells.n_cells;
  f.ns = N * ns_per_cell;
  f.tgrid = trial.ref.grid;
  f.length = trial.length;
  f.values.resize(static_cast<size_t>(f.tgrid.n) * f.ns);
  f.phiref_val.resize(f.ns);
  f.phiref_slope.resize(f.ns);
  for (int j = 0; j < f.ns; ++j) {
    const double s = f.s_node(j);
    f.phiref_val[j] = trial.phase(s);
    f.phiref_slope[j] = trial.dphase(s);
    const cplx ph = std::exp(cplx(0.0, -f.phiref_val[j]));
    for (int i = 0; i < f.tgrid.n; ++i)
      f.at(i, j) = trial.g(s, f.tgrid.node(i)) * ph;
  }
  return f;
}

namespace {

// Shared core: integrates the layer functional given per-column envelope data.
// Columns are produced on demand (rolling 3-column window for the s stencil).
struct ColumnData {
  std::vector<cplx> w;  // envelope values on the t grid
};

double layer_functional_core(
    int ns, const Grid1D& tg, double length, const ProblemParams& params,
    const std::function<void(int, ColumnData&)>& fill_column,
    const std::function<double(int)>& curvature_at,
    const std::function<double(int)>& phiref_slope_at) {
  const int nt = tg.n;
  const double h = tg.spacing();
  const double hs = length / ns;
  const double inv2b = 0.5 / params.b;

  // rolling 3-column window for the periodic s stencil
  ColumnData prev, cur, next;
  prev.w.resize(nt); cur.w.resize(nt); next.w.resize(nt);
  fill_column((ns - 1) % ns, prev);
  fill_column(0, cur);
  fill_column(1 % ns, next);

  double total = 0.0;
  for (int j = 0; j < ns; ++j) {
    const double kj = curvature_at(j);
    const double slope = phiref_slope_at(j);
    double col = 0.0;
    // normal kinetic term, flux form
    for (int i = 0; i + 1 < nt; ++i) {
      const double rho_mid = 1.0 - params.eps * kj * (tg.node(i) + 0.5 * h);
      const cplx d = (cur.w[i + 1] - cur.w[i]) / h;
      col += h * rho_mid * std::norm(d);
    }
    // node terms
    for (int i = 0; i < nt; ++i) {
      const double t = tg.node(i);
      const double rho = 1.0 - params.eps * kj * t;
      if (rho <= 0.0)
        throw degenerate_metric_error("layer metric degenerate at t=" + std::to_string(t));
      const double wq = (i == 0 || i == nt - 1) ? 0.5 * h : h;
      const double a = -t + 0.5 * params.eps * kj * t * t + params.eps * params.delta_eps;
      const double ashift = a - params.eps * slope;
      const cplx ds = (next.w[i] - prev.w[i]) / (2.0 * hs);
      const cplx cov = params.eps * ds + cplx(0.0, ashift) * cur.w[i];
      const double dens = std::norm(cur.w[i]);
      col += wq * (std::norm(cov) / rho + rho * (-inv2b * (2.0 * dens - dens * dens)));
    }
    total += hs * col;
    // slide window
    std::swap(prev, cur);
    std::swap(cur, next);
    fill_column((j + 2) % ns, next);
  }
  return total;
}

} // namespace

double boundary_functional(const BoundaryField& field, const BoundaryGeometry& geom,
                           const ProblemParams& params) {
  const bool has_ref = !field.phiref_val.empty();
  auto fill = [&](int j, ColumnData& c) {
    const double pr = has_ref ? field.phiref_val[j] : 0.0;
    const cplx ph = std::exp(cplx(0.0, pr));
    for (int i = 0; i < field.tgrid.n; ++i) c.w[i] = field.at(i, j) * ph;
  };
  auto curv = [&](int j) {
    return geom.is_strip() ? 0.0 : geom.curvature(field.s_node(j));
  };
  auto slope = [&](int j) { return has_ref ? field.phiref_slope[j] : 0.0; };
  return layer_functional_core(field.ns, field.tgrid, field.length, params, fill, curv, slope);
}

double ansatz_energy(const std::vector<double>& g_samples, const std::vector<double>& S_samples,
                     const std::vector<double>* dS_slopes, int ns, const Grid1D& tgrid,
                     const BoundaryGeometry& geom, const ProblemParams& params) {
  const int nt = tgrid.n;
  if (static_cast<int>(g_samples.size()) != nt * ns)
    throw usage_error("ansatz density sample count mismatch");
  for (double v : g_samples)
    if (v < 0.0) throw usage_error("ansatz density must be nonnegative");
  const double L = geom.length();
  const double hs = L / ns;
  std::vector<double> slopes(ns);
  if (dS_slopes) {
    if (static_cast<int>(dS_slopes->size()) != ns)
      throw usage_error("ansatz slope sample count mismatch");
    slopes = *dS_slopes;
  } else {
    // central differences of the samples; the seam increment S(L)-S(0) is not
    // recoverable from samples on [0,L), so it is approximated by the last
    // interior increment (exact for piecewise-linear S away from the seam).
    std::vector<double> inc(ns);
    for (int j = 0; j + 1 < ns; ++j) inc[j] = S_samples[j + 1] - S_samples[j];
    inc[ns - 1] = inc[ns - 2];
    for (int j = 0; j < ns; ++j) {
      const double before = inc[(j + ns - 1) % ns];
      slopes[j] = (before + inc[j]) / (2.0 * hs);
    }
  }
  auto fill = [&](int j, ColumnData& c) {
    for (int i = 0; i < nt; ++i) c.w[i] = g_samples[static_cast<size_t>(i) * ns + j];
  };
  auto curv = [&](int j) { return geom.is_strip() ? 0.0 : geom.curvature(L * j / ns); };
  auto slope = [&](int j) { return slopes[j] / params.eps + params.delta_eps; };
  return layer_functional_core(ns, tgrid, L, params, fill, curv, slope);
}

double trial_boundary_energy(const TrialState& trial, const BoundaryGeometry& geom,
                             const ProblemParams& params, int ns_per_cell) {
  const int ns = trial.ref.cells.n_cells * ns_per_cell;
  const double L = trial.length;
  auto fill = [&](int j, ColumnData& c) {
    const double s = L * j / ns;
    for (int i = 0; i < trial.ref.grid.n; ++i)
      c.w[i] = trial.g(s, trial.ref.grid.node(i));
  };
  auto curv = [&](int j) { return geom.is_strip() ? 0.0 : geom.curvature(L * j / ns); };
  auto slope = [&](int j) { return trial.dphase(L * j / ns); };
  return layer_functional_core(ns, trial.ref.grid, L, params, fill, curv, slope);
}

std::vector<DecouplingRow> decoupling_check(const BoundaryField& field,
                                            const BoundaryGeometry& geom,
                                            const ProblemParams& params, int jobs) {
  ReferenceProfile rp = reference_profile(geom, params, field.tgrid, false, jobs);
  const int N = rp.cells.n_cells;
  const int nt = field.tgrid.n;
  const int ns = field.ns;
  if (ns % N != 0)
    throw usage_error("decoupling check needs the s grid to align with cells");
  const int m = ns / N;
  const double hs = field.length / ns;
  const double h = field.tgrid.spacing();
  const double inv2b = 0.5 / params.b;

  std::vector<DecouplingRow> rows(N);
  for (int n = 0; n < N; ++n) {
    const double kn = rp.cells.cells[n].k;
    const double an = rp.pair(n).alpha_star;
    const auto& fn = rp.pair(n).profile.values;
    DecouplingRow row;
    row.cell = n;
    row.e_1d = rp.cells.ell * rp.pair(n).energy;

    // envelope w = psi * exp(+i theta_n s), theta_n = alpha_n/eps + delta
    const double theta = an / params.eps + params.delta_eps;
    const int j0 = n * m;
    std::vector<std::vector<cplx>> w(m + 1, std::vector<cplx>(nt));
    std::vector<std::vector<cplx>> u(m + 1, std::vector<cplx>(nt));
    for (int jj = 0; jj <= m; ++jj) {
      const int j = (j0 + jj) % ns;
      const double s = field.length * (j0 + jj) / ns;
      const cplx ph = std::exp(cplx(0.0, theta * s));
      for (int i = 0; i < nt; ++i) {
        w[jj][i] = field.at(i, j) * ph;
        if (fn[i] < 1e-300) throw usage_error("decoupling division guard tripped");
        u[jj][i] = w[jj][i] / fn[i];
      }
    }
    auto ds_of = [&](const std::vector<std::vector<cplx>>& arr, int jj, int i) -> cplx {
      if (jj == 0) return (-3.0 * arr[0][i] + 4.0 * arr[1][i] - arr[2][i]) / (2.0 * hs);
      if (jj == m) return (3.0 * arr[m][i] - 4.0 * arr[m - 1][i] + arr[m - 2][i]) / (2.0 * hs);
      return (arr[jj + 1][i] - arr[jj - 1][i]) / (2.0 * hs);
    };

    double e_gl = 0.0, e_red = 0.0;
    for (int jj = 0; jj <= m; ++jj) {
      const double wq_s = (jj == 0 || jj == m) ? 0.5 * hs : hs;
      double col_gl = 0.0, col_red = 0.0;
      for (int i = 0; i + 1 < nt; ++i) {
        const double rho_mid = 1.0 - params.eps * kn * (field.tgrid.node(i) + 0.5 * h);
        col_gl += h * rho_mid * std::norm((w[jj][i + 1] - w[jj][i]) / h);
        const double f_mid = 0.5 * (fn[i] + fn[i + 1]);
        col_red += h * rho_mid * f_mid * f_mid * std::norm((u[jj][i + 1] - u[jj][i]) / h);
      }
      for (int i = 0; i < nt; ++i) {
        const double t = field.tgrid.node(i);
        const double rho = 1.0 - params.eps * kn * t;
        const double wq = (i == 0 || i == nt - 1) ? 0.5 * h : h;
        const double c = t + an - 0.5 * params.eps * kn * t * t;
        const cplx dsw = ds_of(w, jj, i);
        const cplx cov = params.eps * dsw - cplx(0.0, c) * w[jj][i];
        const double dens = std::norm(w[jj][i]);
        col_gl += wq * (std::norm(cov) / rho - rho * inv2b * (2.0 * dens - dens * dens));

        const cplx dsu = ds_of(u, jj, i);
        const double js = std::imag(std::conj(u[jj][i]) * dsu);
        const double f2 = fn[i] * fn[i];
        const double one_m = 1.0 - std::norm(u[jj][i]);
        col_red += wq * (f2 * params.eps * params.eps * std::norm(dsu) / rho -
                         2.0 * params.eps * (c / rho) * f2 * js +
                         rho * inv2b * f2 * f2 * one_m * one_m);
      }
      e_gl += wq_s * col_gl;
      e_red += wq_s * col_red;
    }
    row.e_gl = e_gl;
    row.e_red = e_red;
    row.residual = std::abs(e_gl - row.e_1d - e_red);
    rows[n] = row;
  }
  return rows;
}

} // namespace glsurf
