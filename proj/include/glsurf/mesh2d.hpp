#pragma once

#include <vector>

#include "glsurf/geometry.hpp"

namespace glsurf {

// Boundary-fitted curvilinear mesh: (rho, theta) -> center + rho*R(theta)*e(theta),
// rho in [rho_min, 1] (small free inner hole), theta periodic. For a disc this is
// the clustered polar grid; radial nodes are clustered near rho = 1 so the
// physical normal spacing in the collar stays below the resolution rule.
struct Mesh2D {
  int nr = 0, ntheta = 0;
  std::vector<double> rho;    // strictly increasing, rho.back() == 1
  std::vector<double> theta;  // uniform on [0, 2pi)
  Vec2 center;

  // per-node geometry, index q = i*ntheta + j
  std::vector<double> x, y;
  std::vector<double> weight;               // quadrature weight (includes |det J|)
  std::vector<double> g_rr, g_rt, g_tt;     // inverse metric entries
  std::vector<double> inv11, inv12, inv21, inv22;  // inv(J) rows: d(rho,theta)/d(x,y)
  std::vector<double> detJ;
  // boundary-layer coordinates (valid where tau <= collar_depth; else tau = -1)
  std::vector<double> s_of, tau_of;

  double collar_depth = 0.0;   // physical depth of the fine zone
  double t_cut = 0.0;          // lift cutoff in t units (chi support end)
  double hr_fine = 0.0;        // physical radial spacing in the collar
  double htheta_arc = 0.0;     // max physical arc spacing on the boundary

  int index(int i, int j) const { return i * ntheta + j; }
  int boundary_node(int j) const { return (nr - 1) * ntheta + j; }
  int n_nodes() const { return nr * ntheta; }
};

struct MeshOptions {
  double refine = 1.0;        // < 1 refines both directions
  double rho_min = 0.05;      // inner hole radius relative to min boundary radius
  double coarse_growth = 1.15;
  double radial_rule = 6.0;   // fine spacing = eps/radial_rule * refine
  double angular_rule = 4.0;  // arc spacing = eps/angular_rule * refine
};

// Builds the mesh for a star-shaped geometry (rays from the centroid must hit the
// boundary once). Checks positive Jacobians and positive quadrature weights.
Mesh2D build_mesh(const BoundaryGeometry& geom, const ProblemParams& params,
                  const MeshOptions& opts = {});

} // namespace glsurf
