#pragma once

#include <vector>

#include "glsurf/profile1d.hpp"

namespace glsurf {

// Potential function F_k, cost function K_k and the positivity-region endpoint.
struct CostProfile {
  Profile1D base;            // f_k with its alpha(k)
  std::vector<double> F;     // forward cumulative trapezoid per the definition
  std::vector<double> K;     // (1 - d_eps) f^2 + F
  double t_bar = 0.0;        // largest node with f >= |log eps|^3 f(t_eps)
  int t_bar_index = 0;
  double d_eps = 0.0;
  double min_K = 0.0;        // min over nodes and midpoints of [0, t_bar]
};

// Inter-cell correction diagnostics for a curvature pair.
struct CorrectionDiagnostics {
  double k = 0.0, k_prime = 0.0;
  std::vector<double> I;         // F_k - F_k' * f_k^2/f_k'^2, tail-anchored F
  double sup_ratio = 0.0;        // sup over [0, t_eps] of |I / f_k^2|
  double sup_deriv_ratio = 0.0;  // sup over [0, t_bar] of |dI/dt / f_k^2|
  double logderiv_gap = 0.0;     // sup of the log-derivative difference of the two profiles
  double t_bar = 0.0;            // min of the two positivity endpoints
  int excluded_nodes = 0;        // division-guard exclusions
};

// F part: cumulative trapezoid of 2 f^2 (t + alpha - eps k t^2/2)/(1 - eps k t).
CostProfile potential_function(const OptimalPair& pair);

// K part: K = (1 - d_eps) f^2 + F; reports min over [0, t_bar] (nodes + midpoints).
CostProfile cost_function(CostProfile cp, double d_eps);

CorrectionDiagnostics correction_function(const OptimalPair& pa, const OptimalPair& pb);

double log_derivative_gap(const OptimalPair& pa, const OptimalPair& pb);

} // namespace glsurf
