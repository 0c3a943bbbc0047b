#pragma once

#include <cmath>

#include "glsurf/errors.hpp"

namespace glsurf {

// Physical/numerical parameter bundle. t_eps = c0*|log eps| is the normal-layer
// extent in rescaled units; delta_eps the fractional gauge offset; d_eps the
// cost-function margin.
struct ProblemParams {
  double b = 1.4;
  double eps = 0.02;
  double c0 = 0.0;
  double t_eps = 0.0;
  double delta_eps = 0.0;
  double d_eps = 0.0;

  double log_eps_abs() const { return std::abs(std::log(eps)); }

  void validate() const {
    if (!(eps > 0.0 && eps <= 0.2)) throw usage_error("eps must lie in (0, 0.2]");
    if (!(b > 0.0)) throw usage_error("b must be positive");
    if (!(c0 > 0.0)) throw usage_error("c0 must be positive");
    const double te = c0 * log_eps_abs();
    if (std::abs(te - t_eps) > 1e-12 * std::max(1.0, te))
      throw usage_error("t_eps must equal c0*|log eps|");
    if (!(delta_eps >= 0.0 && delta_eps < 1.0)) throw usage_error("delta_eps must lie in [0,1)");
    const double dmax = std::pow(log_eps_abs(), -4.0);
    if (!(d_eps > 0.0 && d_eps <= dmax))
      throw margin_out_of_range_error("d_eps must lie in (0, |log eps|^-4]");
  }

  // Chooses the layer extent: smallest t_eps with t_eps >= max(8, 2*|alpha|+6)
  // (|alpha| bounded by 1.2 over the supported b range), shortened if needed to
  // keep 1 - eps*|k|*t_eps >= 0.55 on the whole interval.
  static ProblemParams make(double b, double eps, double k_max = 0.0) {
    ProblemParams p;
    p.b = b;
    p.eps = eps;
    double te = std::max(8.0, 2.0 * 1.2 + 6.0);
    const double ak = std::abs(k_max);
    if (ak > 0.0 && eps * ak * te > 0.45) te = 0.45 / (eps * ak);
    p.t_eps = te;
    p.c0 = te / p.log_eps_abs();
    p.d_eps = std::pow(p.log_eps_abs(), -5.0);
    p.delta_eps = 0.0;
    p.validate();
    return p;
  }

  // Gauge offset from the frozen field (curl A = 1): delta = frac(gamma0/eps^2),
  // gamma0 = |Omega|/|dOmega|.
  static double gauge_offset(double area, double perimeter, double eps) {
    const double g = area / perimeter / (eps * eps);
    return g - std::floor(g);
  }
};

} // namespace glsurf
