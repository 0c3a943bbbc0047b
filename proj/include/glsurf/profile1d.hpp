#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "glsurf/params.hpp"

namespace glsurf {

// Uniform grid on [0, t_eps].
struct Grid1D {
  double t0 = 0.0;
  double t1 = 0.0;
  int n = 0;

  Grid1D() = default;
  Grid1D(double t1_, int n_) : t1(t1_), n(n_) {
    if (n < 64) throw usage_error("Grid1D needs n >= 64");
    if (!(t1 > t0)) throw usage_error("Grid1D needs t1 > t0");
  }
  double spacing() const { return (t1 - t0) / (n - 1); }
  double node(int i) const { return t0 + i * spacing(); }
};

// Nonnegative density sample on the layer interval, at phase alpha and curvature k.
struct Profile1D {
  Grid1D grid;
  std::vector<double> values;
  double alpha = 0.0;
  double k = 0.0;
  ProblemParams params;

  // Node-centered derivative: second-order central, one-sided second-order at the ends.
  std::vector<double> derivative() const;
  double sup() const;
};

// Minimizing triple for one curvature value.
struct OptimalPair {
  double alpha_star = 0.0;
  Profile1D profile;
  double energy = 0.0;
  double stationarity_residual = 0.0;
};

// V_{k,alpha}(t) = (t + alpha - eps k t^2/2)^2 / (1 - eps k t)^2.
double potential_v(double t, double k, double alpha, double eps);

// Quadrature value of the 1D effective energy of a sampled profile:
// kinetic term by midpoint-centered central differences (flux form), the rest trapezoid.
double energy_1d(const Profile1D& f);

// Envelope derivative of the energy in alpha at the solved profile:
// dE/dalpha = 2 * int (t + alpha - eps k t^2/2)/(1 - eps k t) f^2 dt.
double energy_1d_dalpha(const Profile1D& f);

// Max-norm of the strong-form Euler-Lagrange residual
// -f'' + (eps k/(1-eps k t)) f' + V f - (1/b)(1-f^2) f, ghost-node Neumann.
double el_residual_max(const Profile1D& f);

struct SolveOptions {
  double tol = 1e-11;           // max-norm residual target (contract: <= 1e-8)
  int max_flow_steps = 100000;  // semi-implicit gradient-flow cap
  int max_newton_steps = 80;
  double flow_dt = 0.25;
  double flow_switch_tol = 1e-6;  // residual at which Newton takes over
};

// Solves the variational equation at fixed (k, alpha): semi-implicit gradient flow
// (implicit in -f'' and V f, explicit in the cubic term, f <- |f| projection),
// then Newton on the same ghost-node system. init defaults to exp(-t^2/2).
Profile1D solve_profile(double k, double alpha, const ProblemParams& params,
                        const Grid1D& grid,
                        const std::vector<double>* init = nullptr,
                        const SolveOptions& opts = {});

struct PhaseOptions {
  double bracket_lo = -4.0;
  double bracket_hi = 0.0;
  double xatol = 1e-9;
  std::optional<double> warm_alpha;  // shrinks the bracket around a known value
  SolveOptions solve;
};

// Minimizes alpha -> E1D(k, alpha) by bracketed scalar minimization, then polishes
// the stationarity condition (eq. of the optimal phase) by a secant pass.
OptimalPair optimal_phase(double k, const ProblemParams& params, const Grid1D& grid,
                          const PhaseOptions& opts = {});

struct Theta0Result {
  double theta0 = 0.0;
  double alpha_opt = 0.0;
};

// Lowest Neumann eigenvalue of -d^2/dt^2 + (t+alpha)^2 on [0, tmax].
double theta0_mu(double alpha, int resolution, double tmax);

// de Gennes constant: min over alpha of theta0_mu, by inverse iteration plus
// bracketed minimization. resolution >= 512, tmax >= 10.
Theta0Result theta0(int resolution = 2048, std::pair<double, double> alpha_range = {-2.0, 0.0},
                    double tmax = 12.0);

// Cached theta0 at default resolution (used for the b-regime warning).
double theta0_cached();

} // namespace glsurf
