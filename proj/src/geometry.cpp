#include "glsurf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "glsurf/numerics.hpp"

namespace glsurf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGx = {0.0950125098376374, 0.2816035507792589,
                                       0.4580167776572274, 0.6178762444026438,
                                       0.7554044083550030, 0.8656312023878318,
                                       0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGw = {0.1894506104550685, 0.1826034150449236,
                                       0.1691565193950025, 0.1495959888165767,
                                       0.1246289712555339, 0.0951585116824928,
                                       0.0622535239386479, 0.0271524594117541};

double eval_series(const std::vector<double>& c, double xi, int deriv) {
  double v = (deriv == 0) ? c[0] : 0.0;
  const int modes = static_cast<int>((c.size() - 1) / 2);
  for (int m = 1; m <= modes; ++m) {
    const double a = c[2 * m - 1], b = c[2 * m];
    const double cm = std::cos(m * xi), sm = std::sin(m * xi);
    const double mm = static_cast<double>(m);
    switch (deriv) {
      case 0: v += a * cm + b * sm; break;
      case 1: v += mm * (-a * sm + b * cm); break;
      case 2: v += mm * mm * (-a * cm - b * sm); break;
      case 3: v += mm * mm * mm * (a * sm - b * cm); break;
      default: break;
    }
  }
  return v;
}
} // namespace

Vec2 BoundaryGeometry::gamma(double xi) const {
  return {eval_series(cx_, xi, 0), eval_series(cy_, xi, 0)};
}
Vec2 BoundaryGeometry::dgamma(double xi) const {
  return {eval_series(cx_, xi, 1), eval_series(cy_, xi, 1)};
}
Vec2 BoundaryGeometry::ddgamma(double xi) const {
  return {eval_series(cx_, xi, 2), eval_series(cy_, xi, 2)};
}

namespace {
double curvature_xi(const BoundaryGeometry& g, double xi) {
  const Vec2 d1 = g.dgamma(xi), d2 = g.ddgamma(xi);
  const double sp = d1.norm();
  return d1.cross(d2) / (sp * sp * sp);
}
} // namespace

void BoundaryGeometry::build_tables(int samples) {
  const int panels = std::max(samples, 1024);
  xi_tab_.resize(panels + 1);
  s_tab_.resize(panels + 1);
  turn_tab_.resize(panels + 1);
  const double hxi = kTwoPi / panels;
  xi_tab_[0] = 0.0;
  s_tab_[0] = 0.0;
  turn_tab_[0] = 0.0;
  double area2 = 0.0, min_speed = 1e300;
  double cx_m = 0.0, cy_m = 0.0, mass = 0.0;
  k_sup_ = 0.0;
  dk_sup_ = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * hxi, b = a + hxi;
    double ds = 0.0, dturn = 0.0;
    for (int q = 0; q < 8; ++q) {
      for (double sgn : {-1.0, 1.0}) {
        const double xi = 0.5 * (a + b) + sgn * 0.5 * hxi * kGx[q];
        const double w = 0.5 * hxi * kGw[q];
        const Vec2 d1 = dgamma(xi);
        const double sp = d1.norm();
        min_speed = std::min(min_speed, sp);
        ds += w * sp;
        const double k = curvature_xi(*this, xi);
        dturn += w * k * sp;
        const Vec2 g0 = gamma(xi);
        area2 += w * g0.cross(d1);
        cx_m += w * g0.x * sp;
        cy_m += w * g0.y * sp;
        mass += w * sp;
        k_sup_ = std::max(k_sup_, std::abs(k));
      }
    }
    xi_tab_[p + 1] = b;
    s_tab_[p + 1] = s_tab_[p] + ds;
    turn_tab_[p + 1] = turn_tab_[p] + dturn;
  }
  length_ = s_tab_.back();
  area_ = 0.5 * area2;
  centroid_ = {cx_m / mass, cy_m / mass};
  if (min_speed < 1e-8) throw geometry_error("zero-speed point on the curve");
  if (area_ <= 0.0)
    throw geometry_error("curve must be counterclockwise (positive enclosed area)");
  if (std::abs(turn_tab_.back() - kTwoPi) > 1e-6)
    throw geometry_error("tangent winding != 2*pi: curve is not a simple closed loop");
  // smoothness proxy sup|dk/ds| by sampling
  for (int p = 0; p <= 4 * panels; ++p) {
    const double xi = p * kTwoPi / (4 * panels);
    const double h = 1e-5;
    const double kp = (curvature_xi(*this, xi + h) - curvature_xi(*this, xi - h)) / (2 * h);
    const double sp = dgamma(xi).norm();
    dk_sup_ = std::max(dk_sup_, std::abs(kp / sp));
  }
}

BoundaryGeometry BoundaryGeometry::circle(double radius, Vec2 center) {
  std::vector<double> cx = {center.x, radius, 0.0};
  std::vector<double> cy = {center.y, 0.0, radius};
  return fourier(std::move(cx), std::move(cy));
}

BoundaryGeometry BoundaryGeometry::ellipse(double a, double b, Vec2 center) {
  std::vector<double> cx = {center.x, a, 0.0};
  std::vector<double> cy = {center.y, 0.0, b};
  return fourier(std::move(cx), std::move(cy));
}

BoundaryGeometry BoundaryGeometry::fourier(std::vector<double> cx, std::vector<double> cy,
                                           int samples) {
  if (cx.size() < 3 || cy.size() < 3 || cx.size() % 2 == 0 || cy.size() % 2 == 0)
    throw geometry_error("fourier coefficients must be [a0, a1, b1, ...] with >= 1 mode");
  BoundaryGeometry g;
  g.cx_ = std::move(cx);
  g.cy_ = std::move(cy);
  g.build_tables(samples);
  return g;
}

BoundaryGeometry BoundaryGeometry::from_points(const std::vector<Vec2>& pts, int samples) {
  const int n = static_cast<int>(pts.size());
  if (n < 8) throw geometry_error("need at least 8 boundary points");
  if ((pts.front() - pts.back()).norm() < 1e-12)
    throw geometry_error("points must not repeat the first sample at the end");
  // trigonometric interpolation on uniformly spaced parameters (plain DFT)
  const int modes = (n - 1) / 2;
  std::vector<double> cx(2 * modes + 1, 0.0), cy(2 * modes + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    cx[0] += pts[j].x / n;
    cy[0] += pts[j].y / n;
  }
  for (int m = 1; m <= modes; ++m) {
    double axc = 0, axs = 0, ayc = 0, ays = 0;
    for (int j = 0; j < n; ++j) {
      const double ang = m * kTwoPi * j / n;
      axc += pts[j].x * std::cos(ang);
      axs += pts[j].x * std::sin(ang);
      ayc += pts[j].y * std::cos(ang);
      ays += pts[j].y * std::sin(ang);
    }
    const double scale = 2.0 / n;
    cx[2 * m - 1] = scale * axc;
    cx[2 * m] = scale * axs;
    cy[2 * m - 1] = scale * ayc;
    cy[2 * m] = scale * ays;
  }
  return fourier(std::move(cx), std::move(cy), samples);
}

BoundaryGeometry BoundaryGeometry::flat_strip(double length) {
  BoundaryGeometry g;
  g.strip_ = true;
  g.length_ = length;
  g.area_ = 0.0;
  return g;
}

double BoundaryGeometry::arclength_of_xi(double xi) const {
  xi = std::fmod(xi, kTwoPi);
  if (xi < 0) xi += kTwoPi;
  const int p = std::min<int>(static_cast<int>(xi / kTwoPi * (xi_tab_.size() - 1)),
                              static_cast<int>(xi_tab_.size()) - 2);
  // refine within the panel by Gauss quadrature of the speed
  const double a = xi_tab_[p];
  double ds = 0.0;
  const double h = xi - a;
  if (h > 0) {
    for (int q = 0; q < 8; ++q) {
      for (double sgn : {-1.0, 1.0}) {
        const double x = a + 0.5 * h + sgn * 0.5 * h * kGx[q];
        ds += 0.5 * h * kGw[q] * dgamma(x).norm();
      }
    }
  }
  return s_tab_[p] + ds;
}

double BoundaryGeometry::xi_of_arclength(double s) const {
  s = std::fmod(s, length_);
  if (s < 0) s += length_;
  const auto it = std::upper_bound(s_tab_.begin(), s_tab_.end(), s);
  int p = std::max<int>(0, static_cast<int>(it - s_tab_.begin()) - 1);
  p = std::min<int>(p, static_cast<int>(s_tab_.size()) - 2);
  double xi = xi_tab_[p] + (xi_tab_[p + 1] - xi_tab_[p]) * (s - s_tab_[p]) /
                               std::max(1e-300, s_tab_[p + 1] - s_tab_[p]);
  for (int it2 = 0; it2 < 30; ++it2) {
    const double r = arclength_of_xi(xi) - s;
    const double sp = dgamma(xi).norm();
    const double step = r / sp;
    xi -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return xi;
}

Vec2 BoundaryGeometry::point(double s) const {
  if (strip_) return {s, 0.0};
  return gamma(xi_of_arclength(s));
}

Vec2 BoundaryGeometry::tangent(double s) const {
  if (strip_) return {1.0, 0.0};
  const Vec2 d = dgamma(xi_of_arclength(s));
  const double n = d.norm();
  return {d.x / n, d.y / n};
}

Vec2 BoundaryGeometry::normal_in(double s) const {
  const Vec2 t = tangent(s);
  return {-t.y, t.x};  // counterclockwise: inward normal is the left normal
}

double BoundaryGeometry::curvature(double s) const {
  if (strip_) return 0.0;
  return curvature_xi(*this, xi_of_arclength(s));
}

double BoundaryGeometry::turning(double s) const {
  if (strip_) return 0.0;
  s = std::clamp(s, 0.0, length_);
  if (s == length_) return turn_tab_.back();
  const auto it = std::upper_bound(s_tab_.begin(), s_tab_.end(), s);
  int p = std::max<int>(0, static_cast<int>(it - s_tab_.begin()) - 1);
  p = std::min<int>(p, static_cast<int>(s_tab_.size()) - 2);
  // integrate k ds from s_tab_[p] to s by Gauss in xi
  const double xi0 = xi_tab_[p];
  const double xi1 = xi_of_arclength(s);
  double dturn = 0.0;
  const double h = xi1 - xi0;
  if (h > 0) {
    for (int q = 0; q < 8; ++q) {
      for (double sgn : {-1.0, 1.0}) {
        const double x = xi0 + 0.5 * h + sgn * 0.5 * h * kGx[q];
        dturn += 0.5 * h * kGw[q] * curvature_xi(*this, x) * dgamma(x).norm();
      }
    }
  }
  return turn_tab_[p] + dturn;
}

std::array<double, 2> BoundaryGeometry::project(Vec2 p, double xi0) const {
  double xi = xi0;
  for (int it = 0; it < 50; ++it) {
    const Vec2 g0 = gamma(xi), d1 = dgamma(xi), d2 = ddgamma(xi);
    const Vec2 r = {p.x - g0.x, p.y - g0.y};
    const double g = r.dot(d1);
    const double dg = r.dot(d2) - d1.dot(d1);
    if (dg == 0.0) break;
    const double step = g / dg;
    xi -= step;
    if (std::abs(step) < 1e-14) break;
  }
  const Vec2 g0 = gamma(xi);
  const double tau = (p - g0).norm();
  return {arclength_of_xi(xi), tau};
}

CellDecomposition decompose(const BoundaryGeometry& geom, const ProblemParams& params,
                            bool midpoint) {
  const double L = geom.length();
  const int N = static_cast<int>(std::llround(L / params.eps));
  if (N < 8) throw too_few_cells_error("cell count round(|bdry|/eps) < 8");
  CellDecomposition cd;
  cd.n_cells = N;
  cd.ell = L / N;
  cd.cells.resize(N);
  for (int n = 0; n < N; ++n) {
    Cell& c = cd.cells[n];
    c.s_lo = n * cd.ell;
    c.s_hi = (n + 1) * cd.ell;
    if (geom.is_strip()) {
      c.k = 0.0;
    } else if (midpoint) {
      c.k = geom.curvature(0.5 * (c.s_lo + c.s_hi));
    } else {
      c.k = (geom.turning(c.s_hi) - geom.turning(c.s_lo)) / cd.ell;
    }
  }
  return cd;
}

int ReferenceProfile::cell_of(double s) const {
  double L = cells.n_cells * cells.ell;
  s = std::fmod(s, L);
  if (s < 0) s += L;
  int n = std::min<int>(static_cast<int>(s / cells.ell), cells.n_cells - 1);
  return n;
}

double ReferenceProfile::eval(double s, double t) const {
  if (t < 0.0 || t > grid.t1) return 0.0;
  const OptimalPair& p = pair(cell_of(s));
  const double h = grid.spacing();
  const int i = std::min<int>(static_cast<int>(t / h), grid.n - 2);
  const double lam = (t - grid.node(i)) / h;
  return (1.0 - lam) * p.profile.values[i] + lam * p.profile.values[i + 1];
}

namespace {

// Solves the optimal pairs for a set of curvatures with a warm-start chain
// ordered by k, deduplicating exactly equal values.
std::map<double, std::shared_ptr<const OptimalPair>> solve_unique(
    const std::vector<double>& ks, const ProblemParams& params, const Grid1D& grid) {
  std::map<double, std::shared_ptr<const OptimalPair>> out;
  for (double k : ks) out[k] = nullptr;
  std::optional<double> warm;
  for (auto& [k, slot] : out) {
    PhaseOptions po;
    po.warm_alpha = warm;
    OptimalPair p;
    try {
      p = optimal_phase(k, params, grid, po);
    } catch (const bracket_failure_error&) {
      PhaseOptions wide;  // retry on the full bracket
      p = optimal_phase(k, params, grid, wide);
    }
    warm = p.alpha_star;
    slot = std::make_shared<const OptimalPair>(std::move(p));
  }
  return out;
}

} // namespace

ReferenceProfile reference_profile(const BoundaryGeometry& geom, const ProblemParams& params,
                                   const Grid1D& grid, bool midpoint, int /*jobs*/) {
  ReferenceProfile rp;
  rp.cells = decompose(geom, params, midpoint);
  rp.grid = grid;
  rp.params = params;
  std::vector<double> ks;
  ks.reserve(rp.cells.cells.size());
  for (const auto& c : rp.cells.cells) ks.push_back(c.k);
  auto solved = solve_unique(ks, params, grid);
  rp.per_cell.reserve(ks.size());
  for (double k : ks) rp.per_cell.push_back(solved.at(k));
  return rp;
}

BoundaryEnergy boundary_energy(const BoundaryGeometry& geom, const ProblemParams& params,
                               const Grid1D& grid, int jobs) {
  BoundaryEnergy be;
  ReferenceProfile rp = reference_profile(geom, params, grid, false, jobs);
  double sum = 0.0;
  be.table.reserve(rp.cells.n_cells);
  for (int n = 0; n < rp.cells.n_cells; ++n) {
    const auto& c = rp.cells.cells[n];
    const auto& p = rp.pair(n);
    sum += rp.cells.ell * p.energy;
    be.table.push_back({n, c.s_lo, c.s_hi, c.k, p.alpha_star, p.energy});
  }
  be.leading = sum / params.eps;
  be.riemann_refined = riemann_energy_sum(geom, params, grid, 2) / params.eps;
  be.riemann_error = std::abs(be.riemann_refined - be.leading);
  return be;
}

double riemann_energy_sum(const BoundaryGeometry& geom, const ProblemParams& params,
                          const Grid1D& grid, int cell_multiple) {
  const double L = geom.length();
  const int N0 = static_cast<int>(std::llround(L / params.eps));
  const int N = N0 * cell_multiple;
  const double ell = L / N;
  std::vector<double> ks(N);
  for (int n = 0; n < N; ++n) {
    if (geom.is_strip()) ks[n] = 0.0;
    else ks[n] = (geom.turning((n + 1) * ell) - geom.turning(n * ell)) / ell;
  }
  auto solved = solve_unique(ks, params, grid);
  double sum = 0.0;
  for (double k : ks) sum += ell * solved.at(k)->energy;
  return sum;
}

} // namespace glsurf
