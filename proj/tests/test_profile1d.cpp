#include <doctest.h>

#include <cmath>
#include <random>

#include "glsurf/costfn.hpp"
#include "glsurf/numerics.hpp"
#include "glsurf/profile1d.hpp"

using namespace glsurf;

extern "C" void dstev_(const char* jobz, const int* n, double* d, double* e, double* z,
                       const int* ldz, double* work, int* info);

namespace {

ProblemParams params_for(double b, double eps, double kmax = 1.0) {
  return ProblemParams::make(b, eps, kmax);
}

// Full diagonalization of the same Neumann-oscillator pencil (edge form) via
// LAPACK dstev; independent of the inverse-iteration path.
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
  REQUIRE(info == 0);
  return d[0];
}

} // namespace

TEST_CASE("potential_v closed form") {
  CHECK(potential_v(0.0, 3.7, -0.5, 0.01) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(potential_v(2.0, 0.0, -1.0, 0.05) == doctest::Approx(1.0).epsilon(1e-14));
  const double expect = std::pow((1.0 - 0.05) / 0.9, 2);  // independent re-evaluation
  CHECK(potential_v(1.0, 1.0, 0.0, 0.1) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(potential_v(20.0, 1.0, 0.0, 0.1), degenerate_metric_error);
}

TEST_CASE("energy_1d trivial profiles") {
  ProblemParams p;
  p.b = 1.0;
  p.eps = 0.05;
  p.t_eps = 1.0;
  p.c0 = 1.0 / p.log_eps_abs();
  p.d_eps = 1e-4;
  Grid1D g(1.0, 4096);
  Profile1D f{g, std::vector<double>(g.n, 0.0), 0.0, 0.0, p};
  CHECK(energy_1d(f) == doctest::Approx(0.0).epsilon(1e-14));
  Profile1D one{g, std::vector<double>(g.n, 1.0), 0.0, 0.0, p};
  // analytic: t_eps^3/3 - t_eps/(2b) = 1/3 - 1/2
  CHECK(energy_1d(one) == doctest::Approx(-1.0 / 6.0).epsilon(1e-6));
}

TEST_CASE("energy_1d against adaptive quadrature oracle") {
  ProblemParams p = params_for(1.5, 0.02, 0.0);
  Grid1D g(p.t_eps, 16384);
  Profile1D f{g, {}, 0.0, 0.0, p};
  f.values.resize(g.n);
  for (int i = 0; i < g.n; ++i) f.values[i] = std::exp(-g.node(i));
  const double b = p.b;
  auto integrand = [&](double t) {
    const double ft = std::exp(-t), df = -std::exp(-t);
    return df * df + t * t * ft * ft - (1.0 / (2 * b)) * (2 * ft * ft - ft * ft * ft * ft);
  };
  const double oracle = adaptive_simpson(integrand, 0.0, p.t_eps, 1e-12);
  CHECK(energy_1d(f) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("solve_profile contracts") {
  ProblemParams p = params_for(1.4, 0.02, 0.0);
  Grid1D g(p.t_eps, 2048);
  Profile1D f = solve_profile(0.0, -0.77, p, g);

  CHECK(el_residual_max(f) <= 1e-8);
  CHECK(f.sup() <= 1.0 + 1e-8);
  for (double v : f.values) CHECK(v >= 0.0);

  // monotone decreasing past -alpha + 1/sqrt(b)
  const double thr = 0.77 + 1.0 / std::sqrt(p.b);
  for (int i = 0; i + 1 < g.n; ++i)
    if (g.node(i) >= thr) CHECK(f.values[i + 1] <= f.values[i] + 1e-12);

  // enforced Neumann condition (mirror ghosts): the solver's central derivative
  // across each end vanishes identically; the one-sided second-order derivative
  // carries the O(h^2 f''') consistency error.
  const auto d = f.derivative();
  CHECK(std::abs(d[0]) <= 1e-4);
  CHECK(std::abs(d[g.n - 1]) <= 1e-6);

  // energy identity
  double quart = 0.0;
  const auto w = trapezoid_weights(g.n, g.spacing());
  for (int i = 0; i < g.n; ++i) quart += w[i] * std::pow(f.values[i], 4.0);
  const double e = energy_1d(f);
  CHECK(std::abs(e + quart / (2 * p.b)) <= 1e-6 * std::abs(e));

  // second initialization converges to the same profile (uniqueness surrogate)
  std::vector<double> init(g.n, 0.5);
  Profile1D f2 = solve_profile(0.0, -0.77, p, g, &init);
  CHECK(el_residual_max(f2) <= 1e-8);
  double gap = 0.0;
  for (int i = 0; i < g.n; ++i) gap = std::max(gap, std::abs(f.values[i] - f2.values[i]));
  CHECK(gap <= 1e-6);
}

TEST_CASE("optimal_phase stationarity and optimality") {
  ProblemParams p = params_for(1.4, 0.02, 0.0);
  Grid1D g(p.t_eps, 2048);
  OptimalPair pair = optimal_phase(0.0, p, g);

  double l2 = 0.0;
  const auto w = trapezoid_weights(g.n, g.spacing());
  for (int i = 0; i < g.n; ++i) l2 += w[i] * pair.profile.values[i] * pair.profile.values[i];
  CHECK(std::abs(pair.stationarity_residual) <= 1e-6 * l2);
  for (double v : pair.profile.values) CHECK(v > 0.0);

  // minimizer property on a 50-point alpha scan
  for (int q = 0; q < 50; ++q) {
    const double a = -4.0 + 4.0 * q / 49.0;
    Profile1D f = solve_profile(0.0, a, p, g);
    CHECK(pair.energy <= energy_1d(f) + 1e-10);
  }

  // brute-force 400-point refinement oracle
  double best_a = 0.0, best_e = 1e300;
  for (int q = 0; q <= 400; ++q) {
    const double a = -4.0 + 4.0 * q / 400.0;
    Profile1D f = solve_profile(0.0, a, p, g);
    const double e = energy_1d(f);
    if (e < best_e) { best_e = e; best_a = a; }
  }
  CHECK(std::abs(pair.alpha_star - best_a) <= 4.0 / 400.0);
}

TEST_CASE("optimal_phase bracket failure") {
  // a bracket that excludes the interior minimum must be rejected
  ProblemParams p = params_for(1.4, 0.02, 0.0);
  Grid1D g(p.t_eps, 512);
  PhaseOptions po;
  po.bracket_lo = -4.0;
  po.bracket_hi = -3.0;  // optimal alpha ~ -0.8 lies outside
  CHECK_THROWS_AS(optimal_phase(0.0, p, g, po), bracket_failure_error);
}

TEST_CASE("theta0 against dense eigensolver oracle") {
  const Theta0Result r = theta0(2048);
  CHECK(theta0_mu(0.0, 2048, 12.0) == doctest::Approx(1.0).epsilon(1e-4));

  // dense full-diagonalization oracle at doubled resolution, parabolic alpha refine
  const double da = 0.01;
  const double m0 = dense_mu(r.alpha_opt - da, 4096, 12.0);
  const double m1 = dense_mu(r.alpha_opt, 4096, 12.0);
  const double m2 = dense_mu(r.alpha_opt + da, 4096, 12.0);
  const double denom = m0 - 2.0 * m1 + m2;
  double oracle = m1;
  if (denom > 0.0) {
    const double shift = 0.5 * da * (m0 - m2) / denom;
    oracle = m1 - 0.25 * (m0 - m2) * shift / da;
  }
  CHECK(std::abs(r.theta0 - oracle) <= 1e-5);

  // mu(alpha) - alpha^2 changes sign at the minimizer (bracketing check)
  auto gfun = [&](double a) { return theta0_mu(a, 1024, 12.0) - a * a; };
  CHECK(gfun(r.alpha_opt - 0.05) * gfun(r.alpha_opt + 0.05) < 0.0);
}

TEST_CASE("gaussian sandwich and pointwise bound across a sweep") {
  // constants fitted once (first case), then required to stay within 10x across
  // the sweep; the pointwise sandwich holds with the fitted constants.
  double c_lo_ref = 0.0, c_hi_ref = 0.0;
  bool first = true;
  for (double eps : {0.04, 0.02}) {
    for (double k : {0.0, 0.5}) {
      ProblemParams p = params_for(1.4, eps, 0.5);
      Grid1D g(p.t_eps, 2048);
      OptimalPair pair = optimal_phase(k, p, g);
      CHECK(pair.profile.sup() <= 1.0 + 1e-8);
      CostProfile cp = potential_function(pair);
      double c_lo = 1e300, c_hi = 0.0;
      for (int i = 0; i <= cp.t_bar_index; ++i) {
        const double t = g.node(i);
        const double lo = std::exp(-0.5 * (t + std::sqrt(2.0)) * (t + std::sqrt(2.0)));
        const double hi = std::exp(-0.5 * (t + pair.alpha_star) * (t + pair.alpha_star));
        c_lo = std::min(c_lo, pair.profile.values[i] / lo);
        c_hi = std::max(c_hi, pair.profile.values[i] / hi);
      }
      CHECK(c_lo > 0.0);
      CHECK(std::isfinite(c_hi));
      if (first) {
        c_lo_ref = c_lo;
        c_hi_ref = c_hi;
        first = false;
      } else {
        CHECK(c_lo >= 0.1 * c_lo_ref);
        CHECK(c_hi <= 10.0 * c_hi_ref);
      }
      for (int i = 0; i <= cp.t_bar_index; ++i) {
        const double t = g.node(i);
        const double lo = c_lo * std::exp(-0.5 * (t + std::sqrt(2.0)) * (t + std::sqrt(2.0)));
        const double hi = c_hi * std::exp(-0.5 * (t + pair.alpha_star) * (t + pair.alpha_star));
        CHECK(pair.profile.values[i] >= lo * (1.0 - 1e-12));
        CHECK(pair.profile.values[i] <= hi * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("normal state beyond the window is reported, not failed") {
  ProblemParams p = params_for(3.0, 0.04, 0.0);
  Grid1D g(p.t_eps, 512);
  OptimalPair pair = optimal_phase(0.0, p, g);
  CHECK(pair.profile.sup() < 1e-6);
  CHECK(std::abs(pair.energy) < 1e-12);
}

TEST_CASE("grid and parameter validation") {
  CHECK_THROWS_AS(Grid1D(8.0, 32), usage_error);
  ProblemParams bad;
  bad.b = 1.4;
  bad.eps = 0.3;
  bad.c0 = 1.0;
  bad.t_eps = 1.0 * std::abs(std::log(0.3));
  bad.d_eps = 1e-4;
  CHECK_THROWS_AS(bad.validate(), usage_error);
}
