#include "glsurf/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace glsurf {

namespace {
std::string fmt15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}
} // namespace

std::string profile_csv(const Profile1D& p) {
  std::ostringstream os;
  os << "t,f,fprime\n";
  const auto d = p.derivative();
  for (int i = 0; i < p.grid.n; ++i)
    os << fmt15(p.grid.node(i)) << ',' << fmt15(p.values[i]) << ',' << fmt15(d[i]) << '\n';
  return os.str();
}

json pair_json(const OptimalPair& p) {
  return json{{"k", p.profile.k},
              {"alpha", p.alpha_star},
              {"energy", p.energy},
              {"residual", p.stationarity_residual},
              {"grid", {{"n", p.profile.grid.n}, {"t1", p.profile.grid.t1}}}};
}

json cost_profile_json(const CostProfile& cp) {
  return json{{"k", cp.base.k},
              {"alpha", cp.base.alpha},
              {"b", cp.base.params.b},
              {"eps", cp.base.params.eps},
              {"d_eps", cp.d_eps},
              {"t_bar", cp.t_bar},
              {"min_K", cp.min_K},
              {"F_end", cp.F.empty() ? 0.0 : cp.F.back()}};
}

json correction_json(const CorrectionDiagnostics& cd) {
  return json{{"k", cd.k},
              {"k_prime", cd.k_prime},
              {"sup_ratio", cd.sup_ratio},
              {"sup_deriv_ratio", cd.sup_deriv_ratio},
              {"logderiv_gap", cd.logderiv_gap},
              {"t_bar", cd.t_bar},
              {"excluded_nodes", cd.excluded_nodes}};
}

BoundaryGeometry geometry_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const int samples = j.value("samples", 4096);
  if (type == "fourier") {
    const auto cx = j.at("data").at("x").get<std::vector<double>>();
    const auto cy = j.at("data").at("y").get<std::vector<double>>();
    return BoundaryGeometry::fourier(cx, cy, samples);
  }
  if (type == "points") {
    std::vector<Vec2> pts;
    for (const auto& row : j.at("data")) pts.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    return BoundaryGeometry::from_points(pts, samples);
  }
  throw usage_error("geometry type must be 'fourier' or 'points'");
}

std::string cell_table_csv(const BoundaryEnergy& be) {
  std::ostringstream os;
  os << "n,s_lo,s_hi,k_n,alpha_n,E1D\n";
  for (const auto& r : be.table)
    os << r.n << ',' << fmt15(r.s_lo) << ',' << fmt15(r.s_hi) << ',' << fmt15(r.k) << ','
       << fmt15(r.alpha) << ',' << fmt15(r.e1d) << '\n';
  return os.str();
}

json trial_meta_json(const TrialState& t) {
  return json{{"cells", t.ref.cells.n_cells},
              {"ell", t.ref.cells.ell},
              {"length", t.length},
              {"eps", t.ref.params.eps},
              {"b", t.ref.params.b},
              {"delta_eps", t.delta_eps},
              {"winding", t.winding},
              {"sglo_amp", t.sglo_amp},
              {"chi_sup", t.chi_sup},
              {"dchi_s_sup", t.dchi_s_sup}};
}

std::string trial_samples_csv(const TrialState& t, int ns_per_cell) {
  std::ostringstream os;
  os << "s,t,g,S\n";
  const int ns = t.ref.cells.n_cells * ns_per_cell;
  const Grid1D& g = t.ref.grid;
  for (int j = 0; j < ns; ++j) {
    const double s = t.length * j / ns;
    const double S = t.S(s);
    for (int i = 0; i < g.n; i += 8)  // thinned in t to keep files reviewable
      os << fmt15(s) << ',' << fmt15(g.node(i)) << ',' << fmt15(t.g(s, g.node(i))) << ','
         << fmt15(S) << '\n';
  }
  return os.str();
}

std::string field_csv(const GlModel& m, const CVec& psi) {
  std::ostringstream os;
  os << "x,y,Re,Im,abs\n";
  for (int q = 0; q < m.n_nodes(); ++q)
    os << fmt15(m.mesh.x[q]) << ',' << fmt15(m.mesh.y[q]) << ',' << fmt15(psi(q).real()) << ','
       << fmt15(psi(q).imag()) << ',' << fmt15(std::abs(psi(q))) << '\n';
  return os.str();
}

json field_manifest_json(const GlModel& m, const CVec& psi, const std::string& geom_hash,
                         double energy, long long degree) {
  double supmod = 0.0;
  for (int q = 0; q < m.n_nodes(); ++q) supmod = std::max(supmod, std::abs(psi(q)));
  return json{{"eps", m.params.eps},
              {"b", m.params.b},
              {"geometry_hash", geom_hash},
              {"energy", energy},
              {"degree", degree},
              {"sup_mod", supmod},
              {"nodes", m.n_nodes()},
              {"nr", m.mesh.nr},
              {"ntheta", m.mesh.ntheta}};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open for writing: " + path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

} // namespace glsurf
