#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "glsurf/profile1d.hpp"

namespace glsurf {

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

// Smooth closed boundary curve, stored as a real Fourier series in the parameter
// xi in [0, 2pi). Point-cloud input is fitted by trigonometric interpolation.
// A "strip" is a periodic flat surrogate (k == 0) used by tests; it has no embedding.
class BoundaryGeometry {
 public:
  static BoundaryGeometry circle(double radius, Vec2 center = {0.0, 0.0});
  static BoundaryGeometry ellipse(double a, double b, Vec2 center = {0.0, 0.0});
  // coefficient layout: x(xi) = cx[0] + sum_m cx[2m-1] cos(m xi) + cx[2m] sin(m xi)
  static BoundaryGeometry fourier(std::vector<double> cx, std::vector<double> cy,
                                  int samples = 4096);
  static BoundaryGeometry from_points(const std::vector<Vec2>& pts, int samples = 4096);
  static BoundaryGeometry flat_strip(double length);

  bool is_strip() const { return strip_; }
  double length() const { return length_; }
  double area() const { return area_; }
  double curvature_sup() const { return k_sup_; }
  double curvature_deriv_sup() const { return dk_sup_; }

  // Arc-length evaluators (s in [0, length), periodic).
  Vec2 point(double s) const;
  Vec2 tangent(double s) const;   // unit tangent, counterclockwise
  Vec2 normal_in(double s) const; // inward unit normal
  double curvature(double s) const;
  // Cumulative turning angle T(s) = int_0^s k; T(length) = 2*pi for closed curves.
  double turning(double s) const;

  // Parameter-space evaluators.
  Vec2 gamma(double xi) const;
  Vec2 dgamma(double xi) const;
  Vec2 ddgamma(double xi) const;
  double arclength_of_xi(double xi) const;
  double xi_of_arclength(double s) const;

  // Closest-point projection of p onto the curve: returns (s, tau) with
  // tau = distance. Requires a starting guess xi0 (e.g. from a polar ray table).
  std::array<double, 2> project(Vec2 p, double xi0) const;

  Vec2 centroid() const { return centroid_; }

 private:
  BoundaryGeometry() = default;
  void build_tables(int samples);

  bool strip_ = false;
  std::vector<double> cx_, cy_;
  double length_ = 0.0, area_ = 0.0, k_sup_ = 0.0, dk_sup_ = 0.0;
  Vec2 centroid_;
  // dense tables over xi in [0, 2pi]
  std::vector<double> xi_tab_, s_tab_, turn_tab_;
};

struct Cell {
  double s_lo = 0.0, s_hi = 0.0;
  double k = 0.0;  // cell-mean curvature
};

struct CellDecomposition {
  std::vector<Cell> cells;
  double ell = 0.0;  // common tangential width
  int n_cells = 0;
};

// Equal cells with mean curvature per cell (set midpoint=true for the
// midpoint-sample variant kept for sensitivity studies).
CellDecomposition decompose(const BoundaryGeometry& geom, const ProblemParams& params,
                            bool midpoint = false);

// Piecewise reference profile: one optimal pair per cell, deduplicated by k.
struct ReferenceProfile {
  CellDecomposition cells;
  std::vector<std::shared_ptr<const OptimalPair>> per_cell;
  Grid1D grid;
  ProblemParams params;

  const OptimalPair& pair(int cell) const { return *per_cell[cell]; }
  int cell_of(double s) const;
  // g_ref(s, t); zero beyond the layer (t > t_eps) and for t < 0.
  double eval(double s, double t) const;
};

ReferenceProfile reference_profile(const BoundaryGeometry& geom, const ProblemParams& params,
                                   const Grid1D& grid, bool midpoint = false, int jobs = 0);

struct BoundaryEnergy {
  double leading = 0.0;        // (1/eps) sum_n ell * E1D*(k_n)
  double riemann_refined = 0.0;  // same at doubled cell count
  double riemann_error = 0.0;    // |refined - leading|
  struct Row {
    int n;
    double s_lo, s_hi, k, alpha, e1d;
  };
  std::vector<Row> table;
};

BoundaryEnergy boundary_energy(const BoundaryGeometry& geom, const ProblemParams& params,
                               const Grid1D& grid, int jobs = 0);

// Sum of ell*E1D*(k_n) at a given cell-count multiple (oracle hook for tests).
double riemann_energy_sum(const BoundaryGeometry& geom, const ProblemParams& params,
                          const Grid1D& grid, int cell_multiple);

} // namespace glsurf
