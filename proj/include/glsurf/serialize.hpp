#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "glsurf/costfn.hpp"
#include "glsurf/field2d.hpp"
#include "glsurf/trial.hpp"

namespace glsurf {

using json = nlohmann::json;

// Profiles: CSV with header t,f,fprime at 15 significant digits.
std::string profile_csv(const Profile1D& p);

// OptimalPair: {k, alpha, energy, residual, grid:{n,t1}}.
json pair_json(const OptimalPair& p);

json cost_profile_json(const CostProfile& cp);
json correction_json(const CorrectionDiagnostics& cd);

// Geometry from the machine schema {type:"fourier"|"points", data:[...], samples:N}.
BoundaryGeometry geometry_from_json(const json& j);

// Per-cell table CSV: n,s_lo,s_hi,k_n,alpha_n,E1D.
std::string cell_table_csv(const BoundaryEnergy& be);

// Trial state: metadata JSON + samples CSV s,t,g,S.
json trial_meta_json(const TrialState& t);
std::string trial_samples_csv(const TrialState& t, int ns_per_cell);

// Field snapshot CSV x,y,Re,Im,|Psi| and its manifest.
std::string field_csv(const GlModel& m, const CVec& psi);
json field_manifest_json(const GlModel& m, const CVec& psi, const std::string& geom_hash,
                         double energy, long long degree);

// FNV-1a of a canonical dump (report config hashes).
std::string fnv1a_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace glsurf
