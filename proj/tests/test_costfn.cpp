#include <doctest.h>

#include <cmath>

#include "glsurf/costfn.hpp"
#include "glsurf/numerics.hpp"

using namespace glsurf;

namespace {

OptimalPair solve_pair(double k, double b, double eps, int n = 2048, double kmax = 1.0) {
  ProblemParams p = ProblemParams::make(b, eps, kmax);
  Grid1D g(p.t_eps, n);
  return optimal_phase(k, p, g);
}

double l2sq(const Profile1D& f) {
  const auto w = trapezoid_weights(f.grid.n, f.grid.spacing());
  double s = 0.0;
  for (int i = 0; i < f.grid.n; ++i) s += w[i] * f.values[i] * f.values[i];
  return s;
}

} // namespace

TEST_CASE("potential function endpoint identities and sign") {
  OptimalPair pair = solve_pair(0.0, 1.4, 0.02);
  CostProfile cp = potential_function(pair);
  CHECK(cp.F.front() == 0.0);  // empty integral, exact
  CHECK(std::abs(cp.F.back()) <= 1e-6 * l2sq(pair.profile));
  double fmax = -1e300, fmin = 1e300;
  int argmin = 0;
  for (int i = 0; i < pair.profile.grid.n; ++i) {
    fmax = std::max(fmax, cp.F[i]);
    if (cp.F[i] < fmin) { fmin = cp.F[i]; argmin = i; }
  }
  CHECK(fmax <= 1e-10);
  CHECK(fmin < 0.0);
  CHECK(argmin > 0);
  CHECK(argmin < pair.profile.grid.n - 1);  // attained in the interior
}

TEST_CASE("cost function positivity and margins") {
  OptimalPair pair = solve_pair(0.0, 1.4, 0.02);
  CostProfile cp0 = potential_function(pair);

  // K(0) = (1-d) f(0)^2 > 0
  const double de = std::pow(pair.profile.params.log_eps_abs(), -5.0);
  CostProfile cp = cost_function(cp0, de);
  CHECK(cp.K.front() == doctest::Approx((1 - de) * pair.profile.values[0] *
                                        pair.profile.values[0]).epsilon(1e-14));
  CHECK(cp.K.front() > 0.0);
  CHECK(cp.min_K >= -1e-8);

  // margin validation (d_eps must lie in (0, |log eps|^-4])
  CHECK_THROWS_AS(cost_function(cp0, 0.0), margin_out_of_range_error);
  CHECK_THROWS_AS(cost_function(cp0, 1.0), margin_out_of_range_error);

  // d_eps -> 0 edge: K = f^2 + F pointwise equals the sum of stored arrays
  CostProfile cpe = cost_function(cp0, 1e-300);
  for (int i = 0; i < pair.profile.grid.n; ++i) {
    const double expect = (1.0 - 1e-300) * pair.profile.values[i] * pair.profile.values[i] +
                          cpe.F[i];
    CHECK(cpe.K[i] == expect);
  }
}

TEST_CASE("positivity sweep (lemma-level check)") {
  for (double b : {1.2, 1.4, 1.6})
    for (double k : {-1.0, 0.0, 1.0})
      for (double eps : {0.04, 0.02}) {
        OptimalPair pair = solve_pair(k, b, eps);
        const double de = std::pow(pair.profile.params.log_eps_abs(), -5.0);
        CostProfile cp = cost_function(potential_function(pair), de);
        INFO("b=", b, " k=", k, " eps=", eps);
        CHECK(cp.min_K >= -1e-8);
      }
}

TEST_CASE("correction function trivial and antisymmetry") {
  OptimalPair pa = solve_pair(0.0, 1.4, 0.02);
  CorrectionDiagnostics same = correction_function(pa, pa);
  for (double v : same.I) CHECK(v == 0.0);  // identical pairs: exact zero
  CHECK(same.sup_ratio == 0.0);
  CHECK(same.sup_deriv_ratio == 0.0);
  CHECK(same.logderiv_gap == 0.0);

  OptimalPair pb = solve_pair(0.5, 1.4, 0.02);
  CorrectionDiagnostics ab = correction_function(pa, pb);
  CorrectionDiagnostics ba = correction_function(pb, pa);
  // antisymmetry surrogate: I_ab/f_a^2 + I_ba/f_b^2 == 0 nodewise (IEEE-exact)
  for (int i = 0; i < pa.profile.grid.n; ++i) {
    const double fa2 = pa.profile.values[i] * pa.profile.values[i];
    const double fb2 = pb.profile.values[i] * pb.profile.values[i];
    if (pa.profile.values[i] < 1e-300 || pb.profile.values[i] < 1e-300) continue;
    CHECK(std::abs(ab.I[i] / fa2 + ba.I[i] / fb2) <= 1e-10);
  }
  CHECK(ab.sup_ratio > 0.0);
  CHECK(std::isfinite(ab.sup_deriv_ratio));
}

TEST_CASE("correction-ratio scaling bounded under eps halving") {
  // sup|I/f^2| / (eps |dk|)^(1/2) and the derivative analogue stay bounded
  double first_ratio = 0.0, first_dratio = 0.0;
  bool first = true;
  for (double eps : {0.04, 0.02, 0.01}) {
    OptimalPair pa = solve_pair(0.0, 1.4, eps, 2048, 0.5);
    OptimalPair pb = solve_pair(0.5, 1.4, eps, 2048, 0.5);
    CorrectionDiagnostics d = correction_function(pa, pb);
    const double scale = std::sqrt(eps * 0.5);
    const double r1 = d.sup_ratio / scale;
    const double r2 = d.sup_deriv_ratio / scale;
    INFO("eps=", eps, " r1=", r1, " r2=", r2);
    if (first) {
      first_ratio = r1;
      first_dratio = r2;
      first = false;
    } else {
      CHECK(r1 <= 4.0 * first_ratio);
      CHECK(r2 <= 4.0 * first_dratio);
    }
  }
}

TEST_CASE("log-derivative gap") {
  OptimalPair pa = solve_pair(0.0, 1.4, 0.02);
  CHECK(log_derivative_gap(pa, pa) == 0.0);

  // continuity degeneration: k' -> k
  OptimalPair pb = solve_pair(1e-8, 1.4, 0.02);
  CHECK(log_derivative_gap(pa, pb) <= 1e-4);

  // scaling boundedness under halving
  double first_r = 0.0;
  bool first = true;
  for (double eps : {0.04, 0.02, 0.01}) {
    OptimalPair qa = solve_pair(0.0, 1.4, eps, 2048, 0.5);
    OptimalPair qb = solve_pair(0.5, 1.4, eps, 2048, 0.5);
    const double r = log_derivative_gap(qa, qb) / std::sqrt(eps * 0.5);
    if (first) {
      first_r = r;
      first = false;
    } else {
      CHECK(r <= 4.0 * first_r);
    }
  }
}

TEST_CASE("grid mismatch is rejected") {
  OptimalPair pa = solve_pair(0.0, 1.4, 0.02, 1024);
  OptimalPair pb = solve_pair(0.5, 1.4, 0.02, 2048);
  CHECK_THROWS_AS(correction_function(pa, pb), usage_error);
  CHECK_THROWS_AS(log_derivative_gap(pa, pb), usage_error);
}
