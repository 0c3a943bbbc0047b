#include "glsurf/field2d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "glsurf/numerics.hpp"

namespace glsurf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
using cd = std::complex<double>;
}

Vec2 VectorPotential::grad_h(Vec2 p) const {
  // h = c0 + sum_m Re/Im((z/r_scale)^m) terms; grad via m z^{m-1}.
  const cd z((p.x - center.x) / r_scale, (p.y - center.y) / r_scale);
  const int modes = static_cast<int>((coef.size() - 1) / 2);
  cd zp(1.0, 0.0);  // z^{m-1}
  double hx = 0.0, hy = 0.0;
  for (int m = 1; m <= modes; ++m) {
    const double am = coef[2 * m - 1], bm = coef[2 * m];
    const cd d = static_cast<double>(m) * zp / r_scale;
    // d/dx Re(z^m) = Re(m z^{m-1}), d/dy Re(z^m) = -Im(m z^{m-1})
    hx += am * d.real() + bm * d.imag();
    hy += -am * d.imag() + bm * d.real();
    zp *= z;
  }
  return {hx, hy};
}

Vec2 VectorPotential::eval(Vec2 p) const {
  const Vec2 gh = grad_h(p);
  return {-0.5 * p.y - gh.y, 0.5 * p.x + gh.x};  // (1/2)(-y,x) + grad^perp h
}

double VectorPotential::boundary_normal_residual(const BoundaryGeometry& geom,
                                                 int npts) const {
  double r = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double s = geom.length() * i / npts;
    const Vec2 p = geom.point(s);
    const Vec2 nu = geom.normal_in(s);
    r = std::max(r, std::abs(eval(p).dot(nu)));
  }
  return r;
}

VectorPotential vector_potential(const BoundaryGeometry& geom, int modes,
                                 int collocation_pts) {
  VectorPotential vp;
  vp.center = geom.centroid();
  double rmax = 0.0;
  for (int i = 0; i < 256; ++i) {
    const Vec2 p = geom.point(geom.length() * i / 256.0);
    rmax = std::max(rmax, (p - vp.center).norm());
  }
  vp.r_scale = rmax;

  // Dirichlet data h|bdry = -(x^2+y^2)/4 up to a constant; least squares in the
  // harmonic basis {1, Re z^m, Im z^m}.
  const int P = std::max(collocation_pts, 4 * modes);
  Eigen::MatrixXd M(P, 2 * modes + 1);
  Eigen::VectorXd rhs(P);
  for (int i = 0; i < P; ++i) {
    const Vec2 p = geom.point(geom.length() * i / P);
    const cd z((p.x - vp.center.x) / vp.r_scale, (p.y - vp.center.y) / vp.r_scale);
    M(i, 0) = 1.0;
    cd zp = z;
    for (int m = 1; m <= modes; ++m) {
      M(i, 2 * m - 1) = zp.real();
      M(i, 2 * m) = zp.imag();
      zp *= z;
    }
    rhs(i) = -0.25 * (p.x * p.x + p.y * p.y);
  }
  Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
  vp.coef.assign(sol.data(), sol.data() + sol.size());
  return vp;
}

namespace {

// link phase (1/eps^2) * int A . dl along the straight edge a->b (trapezoid;
// exact for affine A and for gradients of quadratics).
double link_phase(const VectorPotential& A, Vec2 a, Vec2 b, double eps) {
  const Vec2 Aa = A.eval(a), Ab = A.eval(b);
  const Vec2 d = b - a;
  return 0.5 * (Aa.dot(d) + Ab.dot(d)) / (eps * eps);
}

} // namespace

GlModel build_model(const BoundaryGeometry& geom, const ProblemParams& params,
                    const MeshOptions& mopts) {
  GlModel m;
  m.geom = &geom;
  m.params = params;
  m.mesh = build_mesh(geom, params, mopts);
  m.A = vector_potential(geom);
  const int nn = m.mesh.n_nodes();
  m.A_at.resize(nn);
  for (int q = 0; q < nn; ++q) m.A_at[q] = m.A.eval({m.mesh.x[q], m.mesh.y[q]});

  const int nr = m.mesh.nr, nt = m.mesh.ntheta;
  const double htheta = kTwoPi / nt;
  std::vector<Eigen::Triplet<cd>> tr_r, tr_t;
  tr_r.reserve(3 * nn);
  tr_t.reserve(2 * nn);

  auto node_pos = [&](int q) { return Vec2{m.mesh.x[q], m.mesh.y[q]}; };
  auto link = [&](int qa, int qb) {
    return std::exp(cd(0.0, link_phase(m.A, node_pos(qa), node_pos(qb), params.eps)));
  };

  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int q = m.mesh.index(i, j);
      // covariant rho-derivative (nonuniform central; one-sided second order at ends)
      if (i > 0 && i + 1 < nr) {
        const double hm = m.mesh.rho[i] - m.mesh.rho[i - 1];
        const double hp = m.mesh.rho[i + 1] - m.mesh.rho[i];
        const int qm = m.mesh.index(i - 1, j), qp = m.mesh.index(i + 1, j);
        const double cm = -hp / (hm * (hm + hp));
        const double c0 = (hp - hm) / (hp * hm);
        const double cp = hm / (hp * (hm + hp));
        tr_r.emplace_back(q, qm, cm * link(q, qm));
        tr_r.emplace_back(q, q, cd(c0, 0.0));
        tr_r.emplace_back(q, qp, cp * link(q, qp));
      } else if (i == 0) {
        const double h1 = m.mesh.rho[1] - m.mesh.rho[0];
        const double h2 = m.mesh.rho[2] - m.mesh.rho[1];
        const int q1 = m.mesh.index(1, j), q2 = m.mesh.index(2, j);
        // f'(x0) for nonuniform one-sided stencil
        const double c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
        const double c1 = (h1 + h2) / (h1 * h2);
        const double c2 = -h1 / (h2 * (h1 + h2));
        tr_r.emplace_back(q, q, cd(c0, 0.0));
        tr_r.emplace_back(q, q1, c1 * link(q, q1));
        tr_r.emplace_back(q, q2, c2 * link(q, q2));
      } else {
        const double h1 = m.mesh.rho[nr - 1] - m.mesh.rho[nr - 2];
        const double h2 = m.mesh.rho[nr - 2] - m.mesh.rho[nr - 3];
        const int q1 = m.mesh.index(nr - 2, j), q2 = m.mesh.index(nr - 3, j);
        const double c0 = (2.0 * h1 + h2) / (h1 * (h1 + h2));
        const double c1 = -(h1 + h2) / (h1 * h2);
        const double c2 = h1 / (h2 * (h1 + h2));
        tr_r.emplace_back(q, q, cd(c0, 0.0));
        tr_r.emplace_back(q, q1, c1 * link(q, q1));
        tr_r.emplace_back(q, q2, c2 * link(q, q2));
      }
      // covariant theta-derivative (uniform central, periodic)
      const int qm = m.mesh.index(i, (j + nt - 1) % nt);
      const int qp = m.mesh.index(i, (j + 1) % nt);
      tr_t.emplace_back(q, qm, -0.5 / htheta * link(q, qm));
      tr_t.emplace_back(q, qp, 0.5 / htheta * link(q, qp));
    }
  }
  m.Gr.resize(nn, nn);
  m.Gt.resize(nn, nn);
  m.Gr.setFromTriplets(tr_r.begin(), tr_r.end());
  m.Gt.setFromTriplets(tr_t.begin(), tr_t.end());
  m.GrH = m.Gr.adjoint();
  m.GtH = m.Gt.adjoint();

  m.wa.resize(nn); m.wb.resize(nn); m.wc.resize(nn); m.w.resize(nn);
  for (int q = 0; q < nn; ++q) {
    m.w(q) = m.mesh.weight[q];
    m.wa(q) = m.mesh.weight[q] * m.mesh.g_rr[q];
    m.wb(q) = m.mesh.weight[q] * m.mesh.g_rt[q];
    m.wc(q) = m.mesh.weight[q] * m.mesh.g_tt[q];
  }

  // curl penalty via plaquette circulation (the discretization-native curl;
  // exact 1 for affine A, and exactly gauge-invariant like the links)
  double curl_sum = 0.0;
  for (int i = 0; i + 1 < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int q00 = m.mesh.index(i, j);
      const int q10 = m.mesh.index(i + 1, j);
      const int q11 = m.mesh.index(i + 1, (j + 1) % nt);
      const int q01 = m.mesh.index(i, (j + 1) % nt);
      auto seg = [&](int qa, int qb) {
        const Vec2 a{m.mesh.x[qa], m.mesh.y[qa]}, b2{m.mesh.x[qb], m.mesh.y[qb]};
        const Vec2 d = b2 - a;
        return 0.5 * (m.A_at[qa].dot(d) + m.A_at[qb].dot(d));
      };
      const double circ = seg(q00, q10) + seg(q10, q11) + seg(q11, q01) + seg(q01, q00);
      auto xof = [&](int q) { return m.mesh.x[q]; };
      auto yof = [&](int q) { return m.mesh.y[q]; };
      const double area =
          0.5 * ((xof(q00) * yof(q10) - xof(q10) * yof(q00)) +
                 (xof(q10) * yof(q11) - xof(q11) * yof(q10)) +
                 (xof(q11) * yof(q01) - xof(q01) * yof(q11)) +
                 (xof(q01) * yof(q00) - xof(q00) * yof(q01)));
      curl_sum += std::abs(area) * std::pow(circ / area - 1.0, 2);
    }
  }
  m.curl_term = params.b / std::pow(params.eps, 4) * curl_sum;
  return m;
}

CVec GlModel::apply_H(const CVec& psi) const {
  const CVec gr = Gr * psi;
  const CVec gt = Gt * psi;
  const int nn = n_nodes();
  CVec ar(nn), at(nn);
  for (int q = 0; q < nn; ++q) {
    ar(q) = wa(q) * gr(q) + wb(q) * gt(q);
    at(q) = wb(q) * gr(q) + wc(q) * gt(q);
  }
  return GrH * ar + GtH * at;
}

namespace {

struct KinParts {
  CVec gr, gt;
};

double kinetic_energy(const GlModel& m, const KinParts& kp) {
  double e = 0.0;
  const int nn = m.n_nodes();
  for (int q = 0; q < nn; ++q) {
    const double a = std::norm(kp.gr(q));
    const double c = std::norm(kp.gt(q));
    const double b = (kp.gr(q) * std::conj(kp.gt(q))).real();
    e += m.wa(q) * a + 2.0 * m.wb(q) * b + m.wc(q) * c;
  }
  return e;
}

double kinetic_cross(const GlModel& m, const KinParts& x, const KinParts& y) {
  // Re x^H H y
  double e = 0.0;
  const int nn = m.n_nodes();
  for (int q = 0; q < nn; ++q) {
    const cd t = m.wa(q) * std::conj(x.gr(q)) * y.gr(q) +
                 m.wb(q) * (std::conj(x.gr(q)) * y.gt(q) + std::conj(x.gt(q)) * y.gr(q)) +
                 m.wc(q) * std::conj(x.gt(q)) * y.gt(q);
    e += t.real();
  }
  return e;
}

} // namespace

double gl_energy(const GlModel& m, const CVec& psi) {
  KinParts kp{m.Gr * psi, m.Gt * psi};
  double e = kinetic_energy(m, kp);
  const double c2 = 1.0 / (2.0 * m.params.b * m.params.eps * m.params.eps);
  const int nn = m.n_nodes();
  for (int q = 0; q < nn; ++q) {
    const double dens = std::norm(psi(q));
    e += m.w(q) * (-c2 * (2.0 * dens - dens * dens));
  }
  return e + m.curl_term;
}

CVec gl_gradient(const GlModel& m, const CVec& psi) {
  CVec g = m.apply_H(psi);
  const double cb = 1.0 / (m.params.b * m.params.eps * m.params.eps);
  const int nn = m.n_nodes();
  for (int q = 0; q < nn; ++q)
    g(q) += m.w(q) * cb * (std::norm(psi(q)) - 1.0) * psi(q);
  return g;
}

MinimizeResult minimize(const GlModel& m, const CVec& psi0, const MinimizeOptions& opts) {
  MinimizeResult res;
  res.psi = psi0;
  const int nn = m.n_nodes();
  const double c1 = 1.0 / (m.params.b * m.params.eps * m.params.eps);
  const double c2 = 0.5 * c1;

  // Jacobi preconditioner: diag(H) + local quadratic scale.
  Eigen::VectorXd precon = Eigen::VectorXd::Zero(nn);
  for (int k = 0; k < m.Gr.outerSize(); ++k)
    for (SpMat::InnerIterator it(m.Gr, k); it; ++it)
      precon(it.col()) += m.wa(it.row()) * std::norm(it.value());
  for (int k = 0; k < m.Gt.outerSize(); ++k)
    for (SpMat::InnerIterator it(m.Gt, k); it; ++it)
      precon(it.col()) += m.wc(it.row()) * std::norm(it.value());
  for (int q = 0; q < nn; ++q) precon(q) += m.w(q) * c1;

  // factor products of the current iterate, updated incrementally
  CVec gr = m.Gr * res.psi, gt = m.Gt * res.psi;
  auto gradient_from = [&](const CVec& psi, const CVec& gr_, const CVec& gt_) {
    CVec ar(nn), at(nn);
    for (int q = 0; q < nn; ++q) {
      ar(q) = m.wa(q) * gr_(q) + m.wb(q) * gt_(q);
      at(q) = m.wb(q) * gr_(q) + m.wc(q) * gt_(q);
    }
    CVec g = m.GrH * ar + m.GtH * at;
    for (int q = 0; q < nn; ++q)
      g(q) += m.w(q) * c1 * (std::norm(psi(q)) - 1.0) * psi(q);
    return g;
  };
  auto energy_from = [&](const CVec& psi, const CVec& gr_, const CVec& gt_) {
    double e = m.curl_term;
    for (int q = 0; q < nn; ++q) {
      const double a = std::norm(gr_(q)), cc = std::norm(gt_(q));
      const double bb = (gr_(q) * std::conj(gt_(q))).real();
      const double dens = std::norm(psi(q));
      e += m.wa(q) * a + 2.0 * m.wb(q) * bb + m.wc(q) * cc +
           m.w(q) * (-c2 * (2.0 * dens - dens * dens));
    }
    return e;
  };

  CVec g = gradient_from(res.psi, gr, gt);
  CVec z = g.cwiseQuotient(precon.cast<cd>().eval());
  CVec d = -z;
  double e = energy_from(res.psi, gr, gt);
  res.trace.push_back(e);
  double gmax = g.cwiseAbs().maxCoeff();

  CVec grd(nn), gtd(nn);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (gmax < opts.grad_tol) { res.converged = true; break; }
    grd.noalias() = m.Gr * d;
    gtd.noalias() = m.Gt * d;
    // quartic energy along psi + eta d
    double p1 = 0.0, p2 = 0.0, p3 = 0.0, p4 = 0.0;
    for (int q = 0; q < nn; ++q) {
      const cd cross = m.wa(q) * std::conj(grd(q)) * gr(q) +
                       m.wb(q) * (std::conj(grd(q)) * gt(q) + std::conj(gtd(q)) * gr(q)) +
                       m.wc(q) * std::conj(gtd(q)) * gt(q);
      p1 += 2.0 * cross.real();
      p2 += m.wa(q) * std::norm(grd(q)) +
            2.0 * m.wb(q) * (grd(q) * std::conj(gtd(q))).real() +
            m.wc(q) * std::norm(gtd(q));
      const double A = std::norm(res.psi(q));
      const double B = 2.0 * (std::conj(res.psi(q)) * d(q)).real();
      const double C = std::norm(d(q));
      const double wq = m.w(q);
      p1 += wq * (-c1 * B + c2 * 2.0 * A * B);
      p2 += wq * (-c1 * C + c2 * (B * B + 2.0 * A * C));
      p3 += wq * c2 * 2.0 * B * C;
      p4 += wq * c2 * C * C;
    }
    // minimize p1 x + p2 x^2 + p3 x^3 + p4 x^4 for x > 0
    double eta = 0.0;
    {
      auto dp = [&](double x) { return p1 + 2 * p2 * x + 3 * p3 * x * x + 4 * p4 * x * x * x; };
      if (p1 < 0.0) {
        double hi = 1.0;
        while (dp(hi) < 0.0 && hi < 1e18) hi *= 2.0;
        double lo = 0.0;
        for (int b = 0; b < 200; ++b) {
          const double mid = 0.5 * (lo + hi);
          if (dp(mid) < 0.0) lo = mid; else hi = mid;
        }
        eta = 0.5 * (lo + hi);
      }
    }
    if (eta <= 0.0) {  // not a descent direction: restart along -z
      d = -z;
      continue;
    }
    res.psi += eta * d;
    gr += eta * grd;
    gt += eta * gtd;
    e += ((p4 * eta + p3) * eta + p2) * eta * eta + p1 * eta;
    if ((it + 1) % 128 == 0) {  // resync incremental drift
      gr.noalias() = m.Gr * res.psi;
      gt.noalias() = m.Gt * res.psi;
      e = energy_from(res.psi, gr, gt);
    }
    res.trace.push_back(e);

    CVec gn = gradient_from(res.psi, gr, gt);
    CVec zn = gn.cwiseQuotient(precon.cast<cd>().eval());
    const double denom = (g.dot(z)).real();
    double beta = 0.0;
    if (denom > 0.0) beta = std::max(0.0, (zn.dot(gn - g)).real() / denom);
    if ((it + 1) % 200 == 0) beta = 0.0;  // periodic restart
    d = -zn + beta * d;
    g.swap(gn);
    z.swap(zn);
    gmax = g.cwiseAbs().maxCoeff();
    res.grad_max = gmax;
    res.iterations = it + 1;

    if (static_cast<int>(res.trace.size()) > opts.stall_window) {
      const double eref = res.trace[res.trace.size() - 1 - opts.stall_window];
      if (eref - e < opts.stall_rel * std::abs(e)) { res.converged = true; break; }
    }
  }
  res.energy = gl_energy(m, res.psi);
  res.grad_max = gl_gradient(m, res.psi).cwiseAbs().maxCoeff();
  if (!res.converged)
    throw non_convergence_error("2D minimization hit the iteration cap", res.grad_max);
  return res;
}

namespace {

// cumulative boundary circulation (1/eps^2) int_0^s gamma'.A, dense table
struct CircTable {
  std::vector<double> s, val;
  double total = 0.0;
  double eval(double ss) const {
    const auto it = std::upper_bound(s.begin(), s.end(), ss);
    int p = std::clamp<int>(static_cast<int>(it - s.begin()) - 1, 0, static_cast<int>(s.size()) - 2);
    const double lam = (ss - s[p]) / (s[p + 1] - s[p]);
    return val[p] + lam * (val[p + 1] - val[p]);
  }
};

CircTable boundary_circulation(const BoundaryGeometry& geom, const VectorPotential& A,
                               double eps) {
  CircTable ct;
  const int N = 8192;
  ct.s.resize(N + 1);
  ct.val.resize(N + 1);
  ct.s[0] = 0.0;
  ct.val[0] = 0.0;
  const double L = geom.length();
  double acc = 0.0;
  Vec2 pprev = geom.point(0.0);
  for (int i = 1; i <= N; ++i) {
    const double s = L * i / N;
    const Vec2 p = geom.point(s);
    // trapezoid of gamma'.A via segment midpoint (A smooth): use endpoints
    const Vec2 tp = geom.tangent(L * (i - 0.5) / N);
    const Vec2 Am = A.eval(geom.point(L * (i - 0.5) / N));
    acc += Am.dot(tp) * (L / N);
    (void)pprev;
    pprev = p;
    ct.s[i] = s;
    ct.val[i] = acc / (eps * eps);
  }
  ct.total = ct.val.back();
  return ct;
}

} // namespace

CVec lift_trial(const TrialState& trial, const GlModel& m) {
  const ProblemParams& p = m.params;
  const double te = p.t_eps;
  const double t_cut = m.mesh.t_cut;
  const double t_a = std::min(te, 0.55 * t_cut);
  // chi support must start where the density is already negligible
  {
    const double fa = trial.g(0.0, std::min(t_a, trial.ref.grid.t1));
    if (fa * fa > 1e-12)
      throw collar_coverage_error("lift cutoff starts where the profile is not negligible");
  }
  const CircTable circ = boundary_circulation(*m.geom, m.A, p.eps);

  // total winding (see layer phase convention): -2*pi*m_trial - circulation total;
  // closed to the nearest integer by a smoothstep correction.
  const double w_tot = (-trial.phase_increment() - circ.total) / kTwoPi;
  const double D = std::round(w_tot);
  const double corr_amp = kTwoPi * (D - w_tot);

  const int nn = m.n_nodes();
  CVec psi = CVec::Zero(nn);
  const double L = trial.length;
  for (int q = 0; q < nn; ++q) {
    const double tau = m.mesh.tau_of[q];
    if (tau < 0.0) continue;
    const double t = tau / p.eps;
    if (t > t_cut) continue;
    const double s = m.mesh.s_of[q];
    const double gv = trial.g(s, t);
    double chi = 1.0;
    if (t > t_a) chi = 1.0 - smoothstep5((t - t_a) / (t_cut - t_a));
    const double amp = gv * chi;
    if (amp == 0.0) continue;
    // normal line integral (1/eps) int_0^t nu.A(r(s, eps*eta)) d eta
    const Vec2 nu = m.geom->normal_in(s);
    const Vec2 base = m.geom->point(s);
    auto integrand = [&](double eta) {
      const Vec2 pos = base + nu * (p.eps * eta);
      return nu.dot(m.A.eval(pos));
    };
    const int nq = 24;
    double nint = 0.0;
    for (int r = 0; r < nq; ++r) {  // composite Simpson
      const double a = t * r / nq, b2 = t * (r + 1) / nq;
      nint += (b2 - a) / 6.0 * (integrand(a) + 4.0 * integrand(0.5 * (a + b2)) + integrand(b2));
    }
    const double theta_tot = -trial.phase(s) - circ.eval(s) - nint / p.eps +
                             corr_amp * smoothstep5(s / L);
    psi(q) = std::polar(amp, theta_tot);
  }
  return psi;
}

CVec interpolate_field(const GlModel& src, const CVec& psi, const GlModel& dst) {
  const auto& sm = src.mesh;
  const auto& dm = dst.mesh;
  // Remove the integer boundary winding before interpolating: the raw field
  // rotates by several radians per column, which plain bilinear interpolation
  // cannot represent. The de-wound envelope is slow wherever |psi| matters.
  long long D = 0;
  try {
    D = winding_number(src, psi);
  } catch (const zero_on_boundary_error&) {
    D = 0;
  }
  CVec out(dm.n_nodes());
  const double ht_src = kTwoPi / sm.ntheta;
  for (int i = 0; i < dm.nr; ++i) {
    const double rho = dm.rho[i];
    int i0 = static_cast<int>(std::upper_bound(sm.rho.begin(), sm.rho.end(), rho) -
                              sm.rho.begin()) - 1;
    i0 = std::clamp(i0, 0, sm.nr - 2);
    const double lr = std::clamp((rho - sm.rho[i0]) / (sm.rho[i0 + 1] - sm.rho[i0]), 0.0, 1.0);
    for (int j = 0; j < dm.ntheta; ++j) {
      const double th = dm.theta[j];
      const int j0 = static_cast<int>(std::floor(th / ht_src)) % sm.ntheta;
      const double lt = th / ht_src - std::floor(th / ht_src);
      const int j1 = (j0 + 1) % sm.ntheta;
      const double th0 = sm.theta[j0], th1 = th0 + ht_src;
      auto env = [&](int q, double thq) { return psi(q) * std::polar(1.0, -D * thq); };
      const cd v00 = env(sm.index(i0, j0), th0), v01 = env(sm.index(i0, j1), th1);
      const cd v10 = env(sm.index(i0 + 1, j0), th0), v11 = env(sm.index(i0 + 1, j1), th1);
      const cd w = (1 - lr) * ((1 - lt) * v00 + lt * v01) +
                   lr * ((1 - lt) * v10 + lt * v11);
      out(dm.index(i, j)) = w * std::polar(1.0, D * th);
    }
  }
  return out;
}

MinimizeResult minimize_continuation(const BoundaryGeometry& geom, const GlModel& target,
                                     const TrialState& trial, const MinimizeOptions& opts) {
  // coarse level: roughly half the resolution (quarter of the nodes)
  MeshOptions coarse_opts;
  coarse_opts.refine = std::min(2.0 * target.mesh.hr_fine /
                                    (target.params.eps / 6.0),
                                1.2);
  GlModel coarse = build_model(geom, target.params, coarse_opts);
  MinimizeOptions copts = opts;
  copts.stall_rel = 1e-11;  // the coarse level only needs a good basin point
  MinimizeResult cres = minimize(coarse, lift_trial(trial, coarse), copts);
  CVec psi0 = interpolate_field(coarse, cres.psi, target);
  MinimizeResult res = minimize(target, psi0, opts);
  res.iterations += cres.iterations;
  return res;
}

CVec random_init(const GlModel& m, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uang(0.0, kTwoPi);
  std::uniform_real_distribution<double> uamp(0.0, 1.0);
  const int nn = m.n_nodes();
  CVec psi = CVec::Zero(nn);
  for (int q = 0; q < nn; ++q) {
    const double tau = m.mesh.tau_of[q];
    const double env = (tau >= 0.0) ? std::exp(-0.5 * std::pow(tau / m.params.eps, 2) * 0.1) : 0.0;
    psi(q) = std::polar(0.5 * env * uamp(rng), uang(rng));
  }
  return psi;
}

double density_l2_error(const GlModel& m, const CVec& psi, const ReferenceProfile& ref) {
  double acc = 0.0;
  const int nn = m.n_nodes();
  for (int q = 0; q < nn; ++q) {
    double gref2 = 0.0;
    if (m.mesh.tau_of[q] >= 0.0) {
      const double g = ref.eval(m.mesh.s_of[q], m.mesh.tau_of[q] / m.params.eps);
      gref2 = g * g;
    }
    const double diff = std::norm(psi(q)) - gref2;
    acc += m.w(q) * diff * diff;
  }
  return std::sqrt(acc);
}

double density_l2_norm_ref(const GlModel& m, const ReferenceProfile& ref) {
  double acc = 0.0;
  const int nn = m.n_nodes();
  for (int q = 0; q < nn; ++q) {
    if (m.mesh.tau_of[q] < 0.0) continue;
    const double g = ref.eval(m.mesh.s_of[q], m.mesh.tau_of[q] / m.params.eps);
    acc += m.w(q) * g * g * g * g;
  }
  return std::sqrt(acc);
}

namespace {
double f0_interp(const OptimalPair& pair, double t) {
  const Grid1D& g = pair.profile.grid;
  if (t < 0.0 || t > g.t1) return 0.0;
  const double h = g.spacing();
  const int i = std::min<int>(static_cast<int>(t / h), g.n - 2);
  const double lam = (t - g.node(i)) / h;
  return (1.0 - lam) * pair.profile.values[i] + lam * pair.profile.values[i + 1];
}
} // namespace

double pan_uniform_error(const GlModel& m, const CVec& psi, const OptimalPair& f0_pair,
                         double gamma) {
  double sup = -1.0;
  const int nn = m.n_nodes();
  for (int q = 0; q < nn; ++q) {
    if (m.mesh.tau_of[q] < 0.0) continue;
    const double f0 = f0_interp(f0_pair, m.mesh.tau_of[q] / m.params.eps);
    if (f0 < gamma) continue;
    sup = std::max(sup, std::abs(std::abs(psi(q)) - f0));
  }
  if (sup < 0.0) throw empty_region_error("pan region empty: gamma above sup f0");
  return sup;
}

double pan_boundary_error(const GlModel& m, const CVec& psi, const OptimalPair& f0_pair) {
  const double f00 = f0_pair.profile.values[0];
  double sup = 0.0;
  for (int j = 0; j < m.mesh.ntheta; ++j)
    sup = std::max(sup, std::abs(std::abs(psi(m.mesh.boundary_node(j))) - f00));
  return sup;
}

long long winding_number(const GlModel& m, const CVec& psi) {
  const int nt = m.mesh.ntheta;
  double minmod = 1e300;
  for (int j = 0; j < nt; ++j)
    minmod = std::min(minmod, std::abs(psi(m.mesh.boundary_node(j))));
  if (minmod <= 0.0)
    throw zero_on_boundary_error("winding undefined: |psi| vanishes on the boundary");
  double acc = 0.0;
  for (int j = 0; j < nt; ++j) {
    const cd a = psi(m.mesh.boundary_node(j));
    const cd b = psi(m.mesh.boundary_node((j + 1) % nt));
    acc += std::arg(b / a);
  }
  return std::llround(acc / kTwoPi);
}

double quadratic_form_min_eig(const GlModel& m, int iters, unsigned long long seed) {
  const int nn = m.n_nodes();
  const double cb = 1.0 / (m.params.b * m.params.eps * m.params.eps);
  auto applyQ = [&](const CVec& v) {
    CVec r = m.apply_H(v);
    for (int q = 0; q < nn; ++q) r(q) -= m.w(q) * cb * v(q);
    return r;
  };
  // generalized problem Q v = lambda W v; work with W^{-1/2} Q W^{-1/2}
  Eigen::VectorXd sqw(nn);
  for (int q = 0; q < nn; ++q) sqw(q) = std::sqrt(m.w(q));
  auto applyS = [&](const CVec& v) {
    CVec t = v.cwiseQuotient(sqw.cast<cd>());
    CVec r = applyQ(t);
    return CVec(r.cwiseQuotient(sqw.cast<cd>()));
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec v(nn);
  for (int q = 0; q < nn; ++q) v(q) = cd(nd(rng), nd(rng));
  v.normalize();
  double lmax = 0.0;
  for (int it = 0; it < iters; ++it) {
    CVec w2 = applyS(v);
    lmax = std::abs((v.dot(w2)).real());
    v = w2.normalized();
  }
  lmax *= 1.05;
  for (int q = 0; q < nn; ++q) v(q) = cd(nd(rng), nd(rng));
  v.normalize();
  double lmin = 0.0;
  for (int it = 0; it < iters; ++it) {
    CVec w2 = lmax * v - applyS(v);
    lmin = lmax - (v.dot(w2)).real();
    v = w2.normalized();
  }
  return lmin;
}

} // namespace glsurf
