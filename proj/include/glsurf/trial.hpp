#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "glsurf/geometry.hpp"

namespace glsurf {

using cplx = std::complex<double>;

// Piecewise trial state on the unfolded layer [0,L) x [0,t_eps]:
// density g = f_n + chi_n (linear blend toward the next cell's profile),
// phase S = S_loc + S_glo with the total winding S(L)/eps + delta*L closed to 2*pi*Z.
struct TrialState {
  ReferenceProfile ref;
  std::vector<double> alphas;     // alpha_n per cell
  std::vector<double> sloc_off;   // S_loc(s_n) per cell
  double sglo_amp = 0.0;          // S_glo = amp * smoothstep5(s/L)
  long long winding = 0;          // total winding integer m
  double delta_eps = 0.0;
  double length = 0.0;

  double chi_sup = 0.0;           // measured sup |chi_n|
  double dchi_s_sup = 0.0;        // measured sup |d chi_n / ds|

  int cell_of(double s) const;
  double g(double s, double t) const;
  double S(double s) const;
  double dS(double s) const;
  // Full phase Phi(s) = S(s)/eps + delta*s; psi_trial = g * exp(-i Phi).
  double phase(double s) const;
  double dphase(double s) const;
  double S_increment() const;      // S(L) - S(0)
  double phase_increment() const;  // Phi(L) - Phi(0) = 2*pi*winding
};

// max_t |psi(L,t) - psi(0,t)| of the trial state (seam phase defect).
double trial_periodicity_defect(const TrialState& trial);

TrialState build_trial(const BoundaryGeometry& geom, const ProblemParams& params,
                       const Grid1D& grid, int jobs = 0);

// Complex field on the unfolded layer. Column-major in s: value(i_t, j_s).
struct BoundaryField {
  int ns = 0;            // uniform s nodes on [0, L), spacing L/ns, periodic
  Grid1D tgrid;
  double length = 0.0;
  std::vector<cplx> values;  // index i_t * ns + j_s
  bool periodic_s = true;

  // Optional reference winding: values/slopes of a phase Phi_ref(s); when present,
  // tangential derivatives act on the envelope psi * exp(+i Phi_ref).
  std::vector<double> phiref_val;    // per s node
  std::vector<double> phiref_slope;  // per s node

  cplx& at(int it, int js) { return values[static_cast<size_t>(it) * ns + js]; }
  cplx at(int it, int js) const { return values[static_cast<size_t>(it) * ns + js]; }
  double s_node(int j) const { return length * j / ns; }

  double periodicity_defect() const;  // max_t |psi(0,t) - psi(L,t)| via wrap column
};

// Samples the trial state on ns_per_cell s-nodes per cell; sets the reference winding.
BoundaryField assemble_field(const TrialState& trial, int ns_per_cell = 16);

// Reduced GL boundary functional on the layer (trapezoid quadrature, central
// differences; flux-form normal kinetic term). k(s) from the geometry (0 for strips).
double boundary_functional(const BoundaryField& field, const BoundaryGeometry& geom,
                           const ProblemParams& params);

// 2D ansatz functional of real density/phase samples on the same grid.
// dS_slopes: tangential phase slope per s node (computed centrally when absent).
double ansatz_energy(const std::vector<double>& g_samples, const std::vector<double>& S_samples,
                     const std::vector<double>* dS_slopes, int ns, const Grid1D& tgrid,
                     const BoundaryGeometry& geom, const ProblemParams& params);

// Streaming evaluation of the boundary functional of the trial state itself
// (equals boundary_functional(assemble_field(trial)) without materializing it).
double trial_boundary_energy(const TrialState& trial, const BoundaryGeometry& geom,
                             const ProblemParams& params, int ns_per_cell = 16);

struct DecouplingRow {
  int cell = 0;
  double e_gl = 0.0;      // cell GL energy of psi (frozen curvature)
  double e_red = 0.0;     // reduced functional of u_n
  double e_1d = 0.0;      // ell * E1D*(k_n)
  double residual = 0.0;  // |e_gl - e_1d - e_red|
};

// Verifies the per-cell splitting of the boundary functional against the
// reduced functionals; pairs are solved on the field's t grid.
std::vector<DecouplingRow> decoupling_check(const BoundaryField& field,
                                            const BoundaryGeometry& geom,
                                            const ProblemParams& params, int jobs = 0);

} // namespace glsurf
