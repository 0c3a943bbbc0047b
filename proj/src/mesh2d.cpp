#include "glsurf/mesh2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace glsurf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Boundary radius R(theta) about the centroid and its theta-derivative, via the
// curve parameter: R' = (u . gamma') R / (u x gamma'), u = gamma - c.
struct RayTable {
  std::vector<double> xi;  // curve parameter per theta sample
  int n = 0;
  double lookup(double theta, const std::vector<double>& tab) const {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    const double pos = t / kTwoPi * n;
    const int j = std::min<int>(static_cast<int>(pos), n - 1);
    const double lam = pos - j;
    double a = tab[j], b = tab[(j + 1) % n];
    double wrap = 0.0;
    if (b - a > std::numbers::pi) wrap = -kTwoPi;
    if (a - b > std::numbers::pi) wrap = kTwoPi;
    return a + lam * (b + wrap - a);
  }
};

RayTable build_rays(const BoundaryGeometry& geom, Vec2 c, int n) {
  // Unwrapped polar angle of gamma(xi) about c, tabulated on a fine xi grid.
  // Monotone for star-shaped domains; inverted by binary search per theta target.
  const int fine = std::max(8192, 8 * n);
  std::vector<double> ang(fine + 1);
  Vec2 u0 = geom.gamma(0.0) - c;
  double tp = std::atan2(u0.y, u0.x);
  ang[0] = tp;
  for (int p = 1; p <= fine; ++p) {
    const Vec2 u = geom.gamma(kTwoPi * p / fine) - c;
    const double t = std::atan2(u.y, u.x);
    double d = t - tp;
    while (d > std::numbers::pi) d -= kTwoPi;
    while (d < -std::numbers::pi) d += kTwoPi;
    if (d <= 0.0)
      throw geometry_error("domain not star-shaped about the centroid");
    ang[p] = ang[p - 1] + d;
    tp = t;
  }
  RayTable rt;
  rt.n = n;
  rt.xi.resize(n);
  const double th0 = ang[0];
  for (int k = 0; k < n; ++k) {
    double goal = kTwoPi * k / n;
    while (goal < th0) goal += kTwoPi;
    while (goal >= th0 + kTwoPi) goal -= kTwoPi;
    const auto it = std::lower_bound(ang.begin(), ang.end(), goal);
    int p = std::clamp<int>(static_cast<int>(it - ang.begin()), 1, fine);
    const double lam = (goal - ang[p - 1]) / (ang[p] - ang[p - 1]);
    rt.xi[k] = kTwoPi * (p - 1 + lam) / fine;
  }
  return rt;
}

} // namespace

Mesh2D build_mesh(const BoundaryGeometry& geom, const ProblemParams& params,
                  const MeshOptions& opts) {
  if (geom.is_strip()) throw geometry_error("cannot mesh a strip surrogate");
  Mesh2D m;
  m.center = geom.centroid();

  // boundary radius/derivative tables about the centroid
  const int ntab = 2048;
  RayTable rays = build_rays(geom, m.center, ntab);
  std::vector<double> Rtab(ntab), dRtab(ntab);
  double Rmin = 1e300, Rmax = 0.0;
  for (int k = 0; k < ntab; ++k) {
    const double xi = rays.xi[k];
    const Vec2 u = geom.gamma(xi) - m.center;
    const Vec2 d1 = geom.dgamma(xi);
    Rtab[k] = u.norm();
    dRtab[k] = u.dot(d1) * Rtab[k] / u.cross(d1);
    Rmin = std::min(Rmin, Rtab[k]);
    Rmax = std::max(Rmax, Rtab[k]);
  }
  auto Rof = [&](double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    const double pos = t / kTwoPi * ntab;
    const int j = std::min<int>(static_cast<int>(pos), ntab - 1);
    const double lam = pos - j;
    return (1 - lam) * Rtab[j] + lam * Rtab[(j + 1) % ntab];
  };
  auto dRof = [&](double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    const double pos = t / kTwoPi * ntab;
    const int j = std::min<int>(static_cast<int>(pos), ntab - 1);
    const double lam = pos - j;
    return (1 - lam) * dRtab[j] + lam * dRtab[(j + 1) % ntab];
  };

  const double eps = params.eps, te = params.t_eps;
  // lift cutoff: [t_eps, 2 t_eps] clamped so the support fits inside the domain
  m.t_cut = std::min(2.0 * te, 0.9 * Rmin / eps);
  if (m.t_cut <= te) m.t_cut = std::min(2.0 * te, 0.97 * Rmin / eps);
  m.collar_depth = std::min(1.15 * eps * te, 0.6 * Rmin);

  // radial nodes: uniform fine zone near the boundary, geometric coarsening inward
  m.hr_fine = eps / opts.radial_rule * opts.refine;
  const double dr_rho_fine = m.hr_fine / Rmax;
  const double rho_fine_lo = 1.0 - std::min(eps * m.t_cut * 1.02 / Rmin + 2 * dr_rho_fine,
                                            0.97 - opts.rho_min);
  std::vector<double> rho_rev;  // from 1 downward
  {
    const int nfine = static_cast<int>(std::ceil((1.0 - rho_fine_lo) / dr_rho_fine));
    for (int i = 0; i <= nfine; ++i) rho_rev.push_back(1.0 - (1.0 - rho_fine_lo) * i / nfine);
    double step = dr_rho_fine;
    while (rho_rev.back() > opts.rho_min) {
      step *= opts.coarse_growth;
      rho_rev.push_back(std::max(rho_rev.back() - step, opts.rho_min));
    }
  }
  m.rho.assign(rho_rev.rbegin(), rho_rev.rend());
  m.nr = static_cast<int>(m.rho.size());

  // angular nodes: resolve the boundary arc at eps/angular_rule
  const double target_arc = eps / opts.angular_rule * opts.refine;
  m.ntheta = std::max(64, static_cast<int>(std::ceil(geom.length() / target_arc)));
  m.theta.resize(m.ntheta);
  for (int j = 0; j < m.ntheta; ++j) m.theta[j] = kTwoPi * j / m.ntheta;
  m.htheta_arc = geom.length() / m.ntheta;

  // node geometry
  const int nn = m.n_nodes();
  m.x.resize(nn); m.y.resize(nn);
  m.weight.resize(nn); m.detJ.resize(nn);
  m.g_rr.resize(nn); m.g_rt.resize(nn); m.g_tt.resize(nn);
  m.inv11.resize(nn); m.inv12.resize(nn); m.inv21.resize(nn); m.inv22.resize(nn);
  m.s_of.assign(nn, -1.0);
  m.tau_of.assign(nn, -1.0);

  std::vector<double> wr(m.nr, 0.0);
  for (int i = 0; i + 1 < m.nr; ++i) {
    const double h = m.rho[i + 1] - m.rho[i];
    wr[i] += 0.5 * h;
    wr[i + 1] += 0.5 * h;
  }
  const double htheta = kTwoPi / m.ntheta;

  for (int j = 0; j < m.ntheta; ++j) {
    const double th = m.theta[j];
    const double R = Rof(th), dR = dRof(th);
    const double ct = std::cos(th), st = std::sin(th);
    for (int i = 0; i < m.nr; ++i) {
      const int q = m.index(i, j);
      const double rho = m.rho[i];
      m.x[q] = m.center.x + rho * R * ct;
      m.y[q] = m.center.y + rho * R * st;
      // J = [[R ct, rho(dR ct - R st)], [R st, rho(dR st + R ct)]]
      const double j11 = R * ct, j12 = rho * (dR * ct - R * st);
      const double j21 = R * st, j22 = rho * (dR * st + R * ct);
      const double det = j11 * j22 - j12 * j21;  // = rho R^2
      if (det <= 0.0) throw geometry_error("mesh Jacobian not positive");
      m.detJ[q] = det;
      // inverse metric G = inv(J) inv(J)^T
      const double i11 = j22 / det, i12 = -j12 / det;
      const double i21 = -j21 / det, i22 = j11 / det;
      m.inv11[q] = i11; m.inv12[q] = i12;
      m.inv21[q] = i21; m.inv22[q] = i22;
      m.g_rr[q] = i11 * i11 + i12 * i12;
      m.g_rt[q] = i11 * i21 + i12 * i22;
      m.g_tt[q] = i21 * i21 + i22 * i22;
      m.weight[q] = wr[i] * htheta * det;
      if (m.weight[q] <= 0.0) throw geometry_error("non-positive quadrature weight");
    }
  }

  // boundary-layer coordinates via closest-point projection (collar + chi support)
  const double proj_depth = std::max(m.collar_depth, eps * m.t_cut) * 1.2;
  for (int j = 0; j < m.ntheta; ++j) {
    const double xi0 = rays.lookup(m.theta[j], rays.xi);
    for (int i = m.nr - 1; i >= 0; --i) {
      const int q = m.index(i, j);
      const Vec2 p = {m.x[q], m.y[q]};
      const double crude = (1.0 - m.rho[i]) * Rof(m.theta[j]);
      if (crude > 1.6 * proj_depth) break;
      const auto st_pair = geom.project(p, xi0);
      if (st_pair[1] > proj_depth) continue;
      double s = std::fmod(st_pair[0], geom.length());
      if (s < 0) s += geom.length();
      m.s_of[q] = s;
      m.tau_of[q] = st_pair[1];
    }
  }
  return m;
}

} // namespace glsurf
