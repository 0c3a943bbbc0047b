#include "glsurf/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace glsurf {

void thomas_solve(std::span<const double> lo, std::span<double> diag,
                  std::span<const double> up, std::span<double> rhs) {
  const std::size_t n = diag.size();
  assert(lo.size() == n && up.size() == n && rhs.size() == n);
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lo[i] / diag[i - 1];
    diag[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / diag[i];
  }
}

double brent_minimize(const std::function<double(double)>& f, double a, double b,
                      double xatol, int max_iter) {
  const double gold = 0.3819660112501051;
  double x = a + gold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = xatol + 1e-14 * std::abs(x);
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;
    bool parabolic = false;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0) p = -p;
      q = std::abs(q);
      const double etmp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etmp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m) ? b - x : a - x;
      d = gold * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0) ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw; w = x; fw = fx; x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) { v = w; fv = fw; w = u; fw = fu; }
      else if (fu <= fv || v == x || v == w) { v = u; fv = fu; }
    }
  }
  return x;
}

double secant_root(const std::function<double(double)>& g, double x0, double x1,
                   double ytol, int max_iter) {
  double g0 = g(x0), g1 = g(x1);
  if (std::abs(g0) <= ytol) return x0;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(g1) <= ytol) return x1;
    const double denom = g1 - g0;
    if (denom == 0.0) break;
    double x2 = x1 - g1 * (x1 - x0) / denom;
    if (!std::isfinite(x2)) break;
    x0 = x1; g0 = g1;
    x1 = x2; g1 = g(x1);
  }
  return (std::abs(g1) < std::abs(g0)) ? x1 : x0;
}

namespace {
double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa,
                            double b, double fb, double m, double fm, double whole,
                            double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(f, a, fa, b, fb, m, fm);
  return adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t nthreads = (jobs > 0) ? static_cast<std::size_t>(jobs) : hw;
  nthreads = std::min(nthreads, n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::exception_ptr err;
  std::mutex err_mtx;
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::size_t i = t; i < n; i += nthreads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mtx);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

} // namespace glsurf
