#include <doctest.h>

#include <cmath>
#include <numbers>

#include "glsurf/geometry.hpp"

using namespace glsurf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("circle analytics") {
  auto g = BoundaryGeometry::circle(2.0);
  CHECK(g.length() == doctest::Approx(4 * kPi).epsilon(1e-10));
  CHECK(g.area() == doctest::Approx(4 * kPi).epsilon(1e-10));
  for (double s : {0.0, 1.0, 5.0, 11.0})
    CHECK(g.curvature(s) == doctest::Approx(0.5).epsilon(1e-10));
  // unit speed
  for (double s : {0.3, 2.0, 9.0}) {
    const Vec2 t = g.tangent(s);
    CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(g.turning(g.length()) == doctest::Approx(2 * kPi).epsilon(1e-8));
}

TEST_CASE("ellipse analytics") {
  auto g = BoundaryGeometry::ellipse(2.0, 1.0);
  // turning number of a convex curve
  CHECK(g.turning(g.length()) == doctest::Approx(2 * kPi).epsilon(1e-6));
  // max curvature a/b^2 = 2 at the vertex (closed-form oracle)
  CHECK(g.curvature_sup() == doctest::Approx(2.0).epsilon(1e-4));
  // known perimeter (Ramanujan-checked reference value)
  CHECK(g.length() == doctest::Approx(9.68844822054768).epsilon(1e-8));
  // area
  CHECK(g.area() == doctest::Approx(2 * kPi).epsilon(1e-10));
}

TEST_CASE("point-cloud input reproduces the ellipse") {
  std::vector<Vec2> pts;
  const int N = 256;
  for (int i = 0; i < N; ++i) {
    const double xi = 2 * kPi * i / N;
    pts.push_back({2.0 * std::cos(xi), std::sin(xi)});
  }
  auto g = BoundaryGeometry::from_points(pts);
  CHECK(g.length() == doctest::Approx(9.68844822054768).epsilon(1e-8));
  CHECK(g.curvature_sup() == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("geometry validation") {
  // clockwise circle: negative area
  std::vector<double> cx = {0.0, 1.0, 0.0};
  std::vector<double> cy = {0.0, 0.0, -1.0};
  CHECK_THROWS_AS(BoundaryGeometry::fourier(cx, cy), geometry_error);
  // figure-eight-like curve: tangent winding != 2*pi
  std::vector<double> fx = {0.0, 1.0, 0.0, 0.0, 0.0};
  std::vector<double> fy = {0.0, 0.0, 0.0, 0.0, 0.5};  // y ~ sin(2 xi): lemniscate
  CHECK_THROWS_AS(BoundaryGeometry::fourier(fx, fy), geometry_error);
}

TEST_CASE("decompose cells") {
  ProblemParams p = ProblemParams::make(1.4, 0.05, 1.0);
  auto g = BoundaryGeometry::circle(1.0);
  CellDecomposition cd = decompose(g, p);
  CHECK(cd.n_cells == static_cast<int>(std::llround(2 * kPi / 0.05)));
  CHECK(cd.n_cells == 126);
  for (const auto& c : cd.cells) CHECK(c.k == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(cd.cells.front().s_lo == 0.0);
  CHECK(cd.cells.back().s_hi == doctest::Approx(g.length()).epsilon(1e-12));

  // mean-curvature aggregation is exact: sum k_n ell = 2*pi
  auto e = BoundaryGeometry::ellipse(2.0, 1.0);
  ProblemParams pe = ProblemParams::make(1.4, 0.05, e.curvature_sup());
  CellDecomposition ce = decompose(e, pe);
  double tot = 0.0, dkmax = 0.0;
  for (std::size_t n = 0; n < ce.cells.size(); ++n) {
    tot += ce.cells[n].k * ce.ell;
    const auto& next = ce.cells[(n + 1) % ce.cells.size()];
    dkmax = std::max(dkmax, std::abs(ce.cells[n].k - next.k));
  }
  CHECK(tot == doctest::Approx(2 * kPi).epsilon(1e-6));
  CHECK(dkmax <= e.curvature_deriv_sup() * ce.ell * (1.0 + 1e-6));

  // too few cells
  auto small = BoundaryGeometry::circle(0.05);
  ProblemParams ps = ProblemParams::make(1.4, 0.1, 20.0);
  CHECK_THROWS_AS(decompose(small, ps), too_few_cells_error);
}

TEST_CASE("boundary energy: disc reduction and strip") {
  const double eps = 0.05, b = 1.4;
  auto g = BoundaryGeometry::circle(1.0);
  ProblemParams p = ProblemParams::make(b, eps, 1.0);
  Grid1D grid(p.t_eps, 1024);
  BoundaryEnergy be = boundary_energy(g, p, grid);
  // all cells share k=1: reduces to the disc formula (2 pi R/eps) E1D*(1/R),
  // bit-for-bit up to quadrature tolerance
  OptimalPair pair = optimal_phase(1.0, p, grid);
  CHECK(std::abs(be.leading - 2 * kPi / eps * pair.energy) <= 1e-10);
  for (const auto& row : be.table) {
    CHECK(std::abs(row.e1d - pair.energy) <= 1e-10);
    CHECK(std::abs(row.alpha - pair.alpha_star) <= 1e-9);
  }

  // flat strip of length L: (L/eps) E1D*(0)
  auto strip = BoundaryGeometry::flat_strip(3.0);
  BoundaryEnergy bs = boundary_energy(strip, p, grid);
  OptimalPair p0 = optimal_phase(0.0, p, grid);
  CHECK(bs.leading == doctest::Approx(3.0 / eps * p0.energy).epsilon(1e-12));
}

TEST_CASE("boundary energy: refined Riemann oracle on the ellipse") {
  const double eps = 0.05, b = 1.4;  // coarser eps keeps the test quick
  auto g = BoundaryGeometry::ellipse(2.0, 1.0);
  ProblemParams p = ProblemParams::make(b, eps, g.curvature_sup());
  Grid1D grid(p.t_eps, 1024);
  BoundaryEnergy be = boundary_energy(g, p, grid);
  const double refined4 = riemann_energy_sum(g, p, grid, 4) / eps;
  CHECK(std::abs(be.leading - refined4) <= 1e-4 * std::abs(refined4));
  // second-order cell means: refinement error shrinks by >= 2x under halving
  const double r2 = riemann_energy_sum(g, p, grid, 2) / eps;
  const double r8 = riemann_energy_sum(g, p, grid, 8) / eps;
  const double err_coarse = std::abs(be.leading - r8);
  const double err_half = std::abs(r2 - r8);
  CHECK(err_half * 2.0 <= err_coarse + 1e-12);
}

TEST_CASE("reference profile evaluator") {
  const double eps = 0.05, b = 1.4;
  auto g = BoundaryGeometry::circle(1.0);
  ProblemParams p = ProblemParams::make(b, eps, 1.0);
  Grid1D grid(p.t_eps, 1024);
  ReferenceProfile rp = reference_profile(g, p, grid);
  // circle: independent of s
  CHECK(rp.eval(0.1, 1.0) == doctest::Approx(rp.eval(3.0, 1.0)).epsilon(1e-12));
  // zero extension beyond the layer
  CHECK(rp.eval(1.0, p.t_eps + 0.5) == 0.0);
  CHECK(rp.eval(1.0, -0.1) == 0.0);

  // interface mismatch on the ellipse obeys the (eps |dk|)^(1/2) scaling
  auto e = BoundaryGeometry::ellipse(2.0, 1.0);
  ProblemParams pe = ProblemParams::make(b, eps, e.curvature_sup());
  Grid1D egrid(pe.t_eps, 1024);
  ReferenceProfile re = reference_profile(e, pe, egrid);
  double worst = 0.0;
  for (int n = 0; n < re.cells.n_cells; ++n) {
    const int n1 = (n + 1) % re.cells.n_cells;
    double sup = 0.0;
    for (int i = 0; i < egrid.n; ++i)
      sup = std::max(sup, std::abs(re.pair(n).profile.values[i] -
                                   re.pair(n1).profile.values[i]));
    const double dk = std::abs(re.cells.cells[n].k - re.cells.cells[n1].k);
    if (dk > 1e-14) worst = std::max(worst, sup / std::sqrt(eps * dk));
  }
  CHECK(worst < 10.0);  // boundedness of the normalized mismatch
}
