#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace glsurf {

// Trapezoid weights on a uniform grid of n nodes with spacing h.
inline std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

// Solve a tridiagonal system in place (Thomas). lo[0] and up[n-1] are unused.
void thomas_solve(std::span<const double> lo, std::span<double> diag,
                  std::span<const double> up, std::span<double> rhs);

// Bracketed scalar minimization (golden section + parabolic steps, Brent).
// Returns argmin of f on [a, b] to absolute x tolerance xatol.
double brent_minimize(const std::function<double(double)>& f, double a, double b,
                      double xatol, int max_iter = 200);

// Root of g on [a, b] by safeguarded secant/bisection; g(a), g(b) need not bracket,
// falls back to best found. Used to polish stationarity conditions.
double secant_root(const std::function<double(double)>& g, double x0, double x1,
                   double ytol, int max_iter = 60);

// Quintic smoothstep: 0 at 0, 1 at 1, first and second derivatives vanish at ends.
inline double smoothstep5(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

inline double smoothstep5_deriv(double x) {
  if (x <= 0 || x >= 1) return 0.0;
  return 30.0 * x * x * (1.0 + x * (-2.0 + x));
}

// Adaptive Simpson quadrature, used as an independent oracle in tests and for
// the smooth 1D line integrals in the lift.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 30);

// Deterministic parallel map: applies fn(i) for i in [0, n) on up to `jobs`
// threads with static partitioning; each index owns its output slot, so the
// result does not depend on the number of threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

} // namespace glsurf
