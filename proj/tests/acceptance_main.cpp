// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "glsurf/costfn.hpp"
#include "glsurf/field2d.hpp"
#include "glsurf/numerics.hpp"
#include "glsurf/serialize.hpp"
#include "glsurf/trial.hpp"

using namespace glsurf;
using nlohmann::json;

extern "C" void dstev_(const char* jobz, const int* n, double* d, double* e, double* z,
                       const int* ldz, double* work, int* info);

namespace {

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  if (!pass) ++failures;
}

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

double dense_mu(double alpha, int n, double tmax) {
  const double h = tmax / (n - 1);
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  std::vector<double> kd(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    kd[i] += 1.0 / h;
    kd[i + 1] += 1.0 / h;
  }
  std::vector<double> d(n), e(n - 1);
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    d[i] = (kd[i] + w[i] * (t + alpha) * (t + alpha)) / w[i];
  }
  for (int i = 0; i + 1 < n; ++i) e[i] = (-1.0 / h) / std::sqrt(w[i] * w[i + 1]);
  int info = 0;
  const char jobz = 'N';
  const int ldz = 1;
  dstev_(&jobz, &n, d.data(), e.data(), nullptr, &ldz, nullptr, &info);
  return info == 0 ? d[0] : 1e300;
}

void criterion1() {
  const double t0 = now_s();
  const Theta0Result r = theta0(2048);
  const double mu0 = theta0_mu(0.0, 2048, 12.0);
  const double da = 0.01;
  const double m0 = dense_mu(r.alpha_opt - da, 4096, 12.0);
  const double m1 = dense_mu(r.alpha_opt, 4096, 12.0);
  const double m2 = dense_mu(r.alpha_opt + da, 4096, 12.0);
  double oracle = m1;
  const double denom = m0 - 2.0 * m1 + m2;
  if (denom > 0.0) {
    const double shift = 0.5 * da * (m0 - m2) / denom;
    oracle = m1 - 0.25 * (m0 - m2) * shift / da;
  }
  const double dt = now_s() - t0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "theta0=%.8f oracle=%.8f |diff|=%.2e mu0=%.6f runtime=%.1fs",
                r.theta0, oracle, std::abs(r.theta0 - oracle), mu0, dt);
  report("AC1", std::abs(r.theta0 - oracle) <= 1e-5 && std::abs(mu0 - 1.0) <= 1e-4 &&
                    dt < 10.0,
         buf);
}

void criterion2_and_3() {
  const double t0 = now_s();
  bool ok2 = true, ok3 = true;
  double worst_el = 0, worst_eid = 0, worst_stat = 0, worst_sup = 0, worst_minK = 0;
  for (double b : {1.2, 1.4, 1.6})
    for (double k : {-1.0, 0.0, 1.0})
      for (double eps : {0.04, 0.02}) {
        ProblemParams p = ProblemParams::make(b, eps, 1.0);
        Grid1D grid(p.t_eps, 2048);
        OptimalPair pair = optimal_phase(k, p, grid);
        const double el = el_residual_max(pair.profile);
        const auto w = trapezoid_weights(grid.n, grid.spacing());
        double quart = 0.0, l2 = 0.0;
        for (int i = 0; i < grid.n; ++i) {
          const double rho = 1.0 - eps * k * grid.node(i);
          quart += w[i] * rho * std::pow(pair.profile.values[i], 4.0);
          l2 += w[i] * pair.profile.values[i] * pair.profile.values[i];
        }
        const double eid = std::abs(pair.energy + quart / (2 * b)) / std::abs(pair.energy);
        const double stat = std::abs(pair.stationarity_residual) / l2;
        const double sup = pair.profile.sup();
        // monotone decrease past -alpha + 1/sqrt(b)
        bool mono = true;
        const double thr = -pair.alpha_star + 1.0 / std::sqrt(b);
        for (int i = 0; i + 1 < grid.n; ++i)
          if (grid.node(i) >= thr && pair.profile.values[i + 1] > pair.profile.values[i] + 1e-12)
            mono = false;
        if (el > 1e-8 || eid > 1e-6 || stat > 1e-6 || sup > 1 + 1e-8 || !mono) ok2 = false;
        worst_el = std::max(worst_el, el);
        worst_eid = std::max(worst_eid, eid);
        worst_stat = std::max(worst_stat, stat);
        worst_sup = std::max(worst_sup, sup);

        CostProfile cp =
            cost_function(potential_function(pair), std::pow(p.log_eps_abs(), -5.0));
        worst_minK = std::min(worst_minK, cp.min_K);
        if (cp.min_K < -1e-8) ok3 = false;
      }
  const double dt = now_s() - t0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "18 cases: el<=%.1e eid<=%.1e stat<=%.1e sup<=1+%.1e runtime=%.1fs",
                worst_el, worst_eid, worst_stat, worst_sup - 1.0, dt);
  report("AC2", ok2 && dt < 60.0, buf);
  std::snprintf(buf, sizeof(buf), "min K over sweep = %.2e (d_eps=|log eps|^-5)", worst_minK);
  report("AC3", ok3, buf);
}

void criterion4() {
  const double t0 = now_s();
  const double kA = 0.0, kB = 0.5;
  bool ok = true;
  double r_e0 = 0, r_a0 = 0, r_f0 = 0, r_g0 = 0, r_i0 = 0;
  std::string detail;
  bool first = true;
  for (double eps : {0.08, 0.04, 0.02, 0.01}) {
    ProblemParams p = ProblemParams::make(1.4, eps, kB);
    Grid1D grid(p.t_eps, 2048);
    OptimalPair pa = optimal_phase(kA, p, grid);
    OptimalPair pb = optimal_phase(kB, p, grid);
    const double scale1 = eps * std::abs(kA - kB);
    const double scale2 = std::sqrt(scale1);
    const double rE = std::abs(pa.energy - pb.energy) / scale1;
    const double rA = std::abs(pa.alpha_star - pb.alpha_star) / scale2;
    double df = 0.0;
    for (int i = 0; i < grid.n; ++i)
      df = std::max(df, std::abs(pa.profile.values[i] - pb.profile.values[i]));
    const double rF = df / scale2;
    const double rG = log_derivative_gap(pa, pb) / scale2;
    CorrectionDiagnostics cd = correction_function(pa, pb);
    const double rI = cd.sup_ratio / scale2;
    if (first) {
      r_e0 = rE; r_a0 = rA; r_f0 = rF; r_g0 = rG; r_i0 = rI;
      first = false;
    } else {
      if (rE > 4 * r_e0 || rA > 4 * r_a0 || rF > 4 * r_f0 || rG > 4 * r_g0 || rI > 4 * r_i0)
        ok = false;
    }
    char row[160];
    std::snprintf(row, sizeof(row), " [eps=%.2f: %.3f %.3f %.3f %.3f %.3f]", eps, rE, rA,
                  rF, rG, rI);
    detail += row;
  }
  const double dt = now_s() - t0;
  detail += " runtime=" + std::to_string(dt) + "s";
  report("AC4", ok && dt < 120.0, detail);
}

struct SweepPoint {
  double eps, refine;
  double gap = 0, riemann = 0, pan = 0, dl2rel = 0, e2d = 0, elift = 0;
};

void criteria5_7_8() {
  auto geom = BoundaryGeometry::circle(1.0);
  const double b = 1.4;
  std::vector<SweepPoint> pts = {{0.08, 0.70}, {0.04, 0.55}, {0.02, 0.43}};
  double t_finest = 0.0;
  for (auto& pt : pts) {
    const double t0 = now_s();
    ProblemParams p = ProblemParams::make(b, pt.eps, 1.0);
    p.delta_eps = ProblemParams::gauge_offset(geom.area(), geom.length(), pt.eps);
    Grid1D grid(p.t_eps, 2048);
    MeshOptions mo;
    mo.refine = pt.refine;
    GlModel model = build_model(geom, p, mo);
    TrialState trial = build_trial(geom, p, grid);
    CVec psi0 = lift_trial(trial, model);
    pt.elift = gl_energy(model, psi0);
    MinimizeResult res = minimize(model, psi0);
    pt.e2d = res.energy;
    double riemann = 0.0;
    for (int c = 0; c < trial.ref.cells.n_cells; ++c)
      riemann += trial.ref.cells.ell * trial.ref.pair(c).energy;
    pt.riemann = riemann;
    pt.gap = std::abs(pt.eps * res.energy - riemann);
    pt.dl2rel = density_l2_error(model, res.psi, trial.ref) /
                density_l2_norm_ref(model, trial.ref);
    OptimalPair f0 = optimal_phase(0.0, p, grid);
    const double gamma = std::min(std::pow(pt.eps, 1.0 / 6.0) * p.log_eps_abs(),
                                  0.5 * f0.profile.values[0]);
    pt.pan = pan_uniform_error(model, res.psi, f0, gamma);
    if (pt.eps == 0.02) t_finest = now_s() - t0;

    if (pt.eps == 0.05) {}
  }
  const bool mono_gap = pts[0].gap > pts[1].gap && pts[1].gap > pts[2].gap;
  const bool tight = pts[2].gap <= 0.05 * std::abs(pts[2].riemann);
  const bool sandwich = pts[0].e2d <= pts[0].elift + 1e-9 &&
                        pts[1].e2d <= pts[1].elift + 1e-9 &&
                        pts[2].e2d <= pts[2].elift + 1e-9;
  char buf[300];
  std::snprintf(buf, sizeof(buf),
                "gaps {%.4f, %.4f, %.4f} target<=%.4f sandwich=%d t(0.02)=%.0fs",
                pts[0].gap, pts[1].gap, pts[2].gap, 0.05 * std::abs(pts[2].riemann),
                sandwich ? 1 : 0, t_finest);
  report("AC5", mono_gap && tight && sandwich && t_finest < 1200.0, buf);

  const bool mono_dl2 = pts[0].dl2rel > pts[1].dl2rel && pts[1].dl2rel > pts[2].dl2rel;
  const bool mono_pan = pts[0].pan > pts[1].pan && pts[1].pan > pts[2].pan;
  std::snprintf(buf, sizeof(buf),
                "dl2rel {%.4f, %.4f, %.4f} pan {%.4f, %.4f, %.4f} pan(0.02)<=0.2",
                pts[0].dl2rel, pts[1].dl2rel, pts[2].dl2rel, pts[0].pan, pts[1].pan,
                pts[2].pan);
  report("AC7", mono_dl2 && mono_pan && pts[2].pan <= 0.2, buf);

  // criterion 8: disc at eps = 0.05
  {
    const double eps = 0.05;
    ProblemParams p = ProblemParams::make(b, eps, 1.0);
    p.delta_eps = ProblemParams::gauge_offset(geom.area(), geom.length(), eps);
    Grid1D grid(p.t_eps, 2048);
    MeshOptions mo;
    mo.refine = 0.5;
    GlModel model = build_model(geom, p, mo);
    TrialState trial = build_trial(geom, p, grid);
    MinimizeResult res = minimize(model, lift_trial(trial, model));
    const long long deg = winding_number(model, res.psi);
    // paper-unit comparison: 2*pi*|deg| vs pi/eps^2 (see decisions ledger on the
    // 2*pi normalization of the degree formula)
    const double lhs = 2 * kPi * std::llabs(deg);
    const double target = kPi / (eps * eps);
    bool ok = std::abs(lhs - target) <= 5.0 / eps;
    // synthetic windings on the same mesh
    const int nn = model.n_nodes();
    for (int nwind : {-3, 0, 1, 7}) {
      CVec psi(nn);
      for (int q = 0; q < nn; ++q) {
        const double th = std::atan2(model.mesh.y[q], model.mesh.x[q]);
        psi(q) = std::polar(1.0, nwind * th);
      }
      if (winding_number(model, psi) != nwind) ok = false;
    }
    std::snprintf(buf, sizeof(buf),
                  "deg=%lld 2pi|deg|=%.1f pi/eps^2=%.1f |diff|=%.1f<=%.0f synthetics exact",
                  deg, lhs, target, std::abs(lhs - target), 5.0 / eps);
    report("AC8", ok, buf);
  }
}

void criterion6() {
  const double t0 = now_s();
  auto geom = BoundaryGeometry::ellipse(1.5, 1.0);
  const double b = 1.4, eps = 0.04;
  ProblemParams p = ProblemParams::make(b, eps, geom.curvature_sup());
  p.delta_eps = ProblemParams::gauge_offset(geom.area(), geom.length(), eps);
  Grid1D grid(p.t_eps, 2048);
  BoundaryEnergy be = boundary_energy(geom, p, grid);
  const double riemann = be.leading * eps;  // sum ell E1D*(k_n)
  const double refined4 = riemann_energy_sum(geom, p, grid, 4);
  const bool riemann_ok = std::abs(riemann - refined4) <= 1e-4 * std::abs(refined4);

  MeshOptions mo;
  mo.refine = 0.6;
  GlModel model = build_model(geom, p, mo);
  TrialState trial = build_trial(geom, p, grid);
  CVec psi0 = lift_trial(trial, model);
  const double elift = gl_energy(model, psi0);
  MinimizeResult res = minimize(model, psi0);
  const double epsE = eps * res.energy;
  const double slack = 0.1 * std::abs(riemann);
  const bool between = epsE >= riemann - slack && res.energy <= elift + 1e-9;
  const double dt = now_s() - t0;
  char buf[300];
  std::snprintf(
      buf, sizeof(buf),
      "eps*E2D=%.5f riemann=%.5f slack=%.5f lift*eps=%.5f riemann4x rel=%.2e t=%.0fs",
      epsE, riemann, slack, eps * elift, std::abs(riemann - refined4) / std::abs(refined4),
      dt);
  report("AC6", between && riemann_ok && dt < 1800.0, buf);
}

// smooth random periodic field (same construction as the unit tests)
BoundaryField random_field(const BoundaryGeometry& geom, const Grid1D& grid, int ns,
                           unsigned seed) {
  BoundaryField f;
  f.ns = ns;
  f.tgrid = grid;
  f.length = geom.length();
  f.values.resize(static_cast<size_t>(grid.n) * ns);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double L = f.length;
  for (int j = 0; j < ns; ++j) f.phiref_val.push_back(0.0);
  f.phiref_val.clear();
  std::vector<double> ar(3), br(3), ai(3), bi(3);
  for (int m = 0; m < 3; ++m) { ar[m] = u(rng); br[m] = u(rng); ai[m] = u(rng); bi[m] = u(rng); }
  for (int j = 0; j < ns; ++j) {
    const double s = L * j / ns;
    for (int i = 0; i < grid.n; ++i) {
      const double t = grid.node(i);
      double re = 0, im = 0;
      for (int m = 0; m < 3; ++m) {
        const double env = std::exp(-0.4 * (t - 1.0) * (t - 1.0));
        re += env * (ar[m] * std::cos((m + 1) * 2 * kPi * s / L) +
                     br[m] * std::sin((m + 1) * 2 * kPi * s / L));
        im += env * (ai[m] * std::cos((m + 1) * 2 * kPi * s / L) +
                     bi[m] * std::sin((m + 1) * 2 * kPi * s / L));
      }
      f.at(i, j) = cplx(0.4 * re, 0.4 * im);
    }
  }
  return f;
}

void criterion9() {
  bool ok = true;
  std::string detail;

  // decoupling residuals on random smooth states
  {
    auto geom = BoundaryGeometry::circle(1.0);
    ProblemParams p = ProblemParams::make(1.4, 0.05, 1.0);
    p.delta_eps = ProblemParams::gauge_offset(geom.area(), geom.length(), 0.05);
    Grid1D grid(p.t_eps, 8192);
    const int ncells = static_cast<int>(std::llround(geom.length() / 0.05));
    BoundaryField f = random_field(geom, grid, 16 * ncells, 11);
    auto rows = decoupling_check(f, geom, p);
    double worst = 0.0;
    for (const auto& r : rows)
      worst = std::max(worst, r.residual / std::max(1e-12, std::abs(r.e_gl)));
    if (worst > 1e-6) ok = false;
    detail += "decoupling rel<=" + std::to_string(worst);
  }

  // gradient vs central differences, 20 directions
  {
    auto geom = BoundaryGeometry::circle(1.0);
    ProblemParams p = ProblemParams::make(1.4, 0.08, 1.0);
    MeshOptions mo;
    mo.refine = 2.0;
    GlModel m = build_model(geom, p, mo);
    std::mt19937 rng(99);
    std::normal_distribution<double> nd;
    CVec psi(m.n_nodes());
    for (int q = 0; q < m.n_nodes(); ++q) psi(q) = cplx(0.3 * nd(rng), 0.3 * nd(rng));
    const CVec g = gl_gradient(m, psi);
    double worst = 0.0;
    for (int dir = 0; dir < 20; ++dir) {
      CVec d(m.n_nodes());
      for (int q = 0; q < m.n_nodes(); ++q) d(q) = cplx(nd(rng), nd(rng));
      d /= d.norm();
      // 5-point central stencil (exact for the quartic up to rounding)
      const double h = 1e-3;
      const double fd = (-gl_energy(m, psi + 2 * h * d) + 8 * gl_energy(m, psi + h * d) -
                         8 * gl_energy(m, psi - h * d) + gl_energy(m, psi - 2 * h * d)) /
                        (12 * h);
      const double an = 2.0 * (g.dot(d)).real();
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    if (worst > 1e-6) ok = false;
    detail += " gradfd<=" + std::to_string(worst);
  }

  // gauge covariance (phi = xy) via exact link shifts
  {
    auto geom = BoundaryGeometry::circle(1.0);
    ProblemParams p = ProblemParams::make(1.4, 0.06, 1.0);
    GlModel m = build_model(geom, p);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    CVec psi(m.n_nodes());
    for (int q = 0; q < m.n_nodes(); ++q) psi(q) = cplx(nd(rng), nd(rng)) * 0.3;
    const double e0 = gl_energy(m, psi);
    GlModel m2 = m;
    const double inv_eps2 = 1.0 / (p.eps * p.eps);
    auto phi = [](double x, double y) { return x * y; };
    CVec psi2(m.n_nodes());
    for (int q = 0; q < m.n_nodes(); ++q)
      psi2(q) = psi(q) * std::polar(1.0, -phi(m.mesh.x[q], m.mesh.y[q]) * inv_eps2);
    for (auto* G : {&m2.Gr, &m2.Gt})
      for (int k = 0; k < G->outerSize(); ++k)
        for (SpMat::InnerIterator it(*G, k); it; ++it) {
          if (it.row() == it.col()) continue;
          const double dphi = phi(m.mesh.x[it.col()], m.mesh.y[it.col()]) -
                              phi(m.mesh.x[it.row()], m.mesh.y[it.row()]);
          it.valueRef() *= std::polar(1.0, dphi * inv_eps2);
        }
    m2.GrH = m2.Gr.adjoint();
    m2.GtH = m2.Gt.adjoint();
    const double e1 = gl_energy(m2, psi2);
    const double rel = std::abs(e1 - e0) / std::max(1.0, std::abs(e0));
    if (rel > 1e-8) ok = false;
    detail += " gauge<=" + std::to_string(rel);
  }

  // determinism: identical runs produce byte-identical serialized records
  {
    ProblemParams p = ProblemParams::make(1.4, 0.04, 0.0);
    Grid1D grid(p.t_eps, 1024);
    auto run = [&] {
      OptimalPair pair = optimal_phase(0.0, p, grid);
      return pair_json(pair).dump() + profile_csv(pair.profile);
    };
    const std::string r1 = run(), r2 = run();
    if (r1 != r2) ok = false;
    detail += (r1 == r2) ? " determinism=byte-identical" : " determinism=VIOLATED";
  }

  report("AC9", ok, detail);
}

} // namespace

int main() {
  criterion1();
  criterion2_and_3();
  criterion4();
  criterion6();
  criteria5_7_8();
  criterion9();
  std::printf("%s (%d failure%s)\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}
