#pragma once

#include <Eigen/SparseCore>
#include <complex>
#include <vector>

#include "glsurf/mesh2d.hpp"
#include "glsurf/trial.hpp"

namespace glsurf {

using SpMat = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;
using CVec = Eigen::VectorXcd;

// Frozen vector potential A = (1/2)(-y, x) + grad^perp h with h harmonic,
// fitted so A.nu = 0 on the boundary (Fourier/harmonic-polynomial collocation).
struct VectorPotential {
  Vec2 center;
  double r_scale = 1.0;
  std::vector<double> coef;  // c0, a1, b1, a2, b2, ...

  Vec2 eval(Vec2 p) const;        // A(p)
  Vec2 grad_h(Vec2 p) const;      // gradient of the harmonic correction
  double boundary_normal_residual(const BoundaryGeometry& geom, int npts) const;
};

VectorPotential vector_potential(const BoundaryGeometry& geom, int modes = 24,
                                 int collocation_pts = 512);

// Discrete GL model at fixed A: covariant difference factors with exact link
// phases, quadrature weights, and the constant curl penalty term.
struct GlModel {
  const BoundaryGeometry* geom = nullptr;
  Mesh2D mesh;
  ProblemParams params;
  VectorPotential A;
  std::vector<Vec2> A_at;  // A sampled at nodes

  SpMat Gr, Gt, GrH, GtH;  // covariant difference factors and their adjoints
  Eigen::VectorXd wa, wb, wc;  // weight * inverse-metric entries
  Eigen::VectorXd w;           // quadrature weights
  double curl_term = 0.0;      // (b/eps^4) * sum w |curl_h A - 1|^2

  int n_nodes() const { return mesh.n_nodes(); }
  CVec apply_H(const CVec& psi) const;  // kinetic quadratic-form operator
};

GlModel build_model(const BoundaryGeometry& geom, const ProblemParams& params,
                    const MeshOptions& mopts = {});

// Full GL energy of (psi, A): kinetic + condensation + curl penalty.
double gl_energy(const GlModel& m, const CVec& psi);

// Wirtinger gradient dE/d(conj psi); the real-vector gradient is twice this.
CVec gl_gradient(const GlModel& m, const CVec& psi);

struct MinimizeOptions {
  int max_iter = 100000;
  double grad_tol = 1e-8;
  double stall_rel = 1e-12;  // relative energy decrease over stall_window
  int stall_window = 100;
  bool record_trace = true;
};

struct MinimizeResult {
  CVec psi;
  double energy = 0.0;
  double grad_max = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // energy history (every iteration)
  bool converged = false;
};

// Nonlinear conjugate gradient (Polak-Ribiere+, exact quartic line search) on
// psi at frozen A. Monotone descent by construction.
MinimizeResult minimize(const GlModel& m, const CVec& psi0, const MinimizeOptions& opts = {});

// Lifted trial state on the mesh: |Psi| = g * chi(t), phase from the trial winding
// plus the line integrals of A (normal and boundary terms), closed to an integer
// total winding by a smoothstep correction.
CVec lift_trial(const TrialState& trial, const GlModel& m);

// Random-phase initial state (seeded), amplitude ~ boundary layer envelope.
CVec random_init(const GlModel& m, unsigned long long seed);

// Bilinear transfer of a field between two meshes of the same geometry.
CVec interpolate_field(const GlModel& src, const CVec& psi, const GlModel& dst);

// Two-level continuation: minimize on a coarsened mesh first, interpolate,
// then polish on the target model. Returns the fine-level result.
MinimizeResult minimize_continuation(const BoundaryGeometry& geom, const GlModel& target,
                                     const TrialState& trial,
                                     const MinimizeOptions& opts = {});

// || |psi|^2 - g_ref^2(s, tau/eps) ||_L2(Omega), g_ref extended by zero.
double density_l2_error(const GlModel& m, const CVec& psi, const ReferenceProfile& ref);
double density_l2_norm_ref(const GlModel& m, const ReferenceProfile& ref);  // ||g_ref^2||

// sup over nodes with f0(tau/eps) >= gamma of | |psi| - f0(tau/eps) |.
double pan_uniform_error(const GlModel& m, const CVec& psi, const OptimalPair& f0_pair,
                         double gamma);
// Boundary-only variant: max over boundary nodes of | |psi| - f0(0) |.
double pan_boundary_error(const GlModel& m, const CVec& psi, const OptimalPair& f0_pair);

// Exact integer winding of psi along the boundary ring (principal-value sum).
long long winding_number(const GlModel& m, const CVec& psi);

// Smallest eigenvalue estimate of the quadratic form H - (1/(b eps^2)) diag(w)
// by shifted power iteration (normal-state oracle).
double quadratic_form_min_eig(const GlModel& m, int iters = 300, unsigned long long seed = 7);

} // namespace glsurf
