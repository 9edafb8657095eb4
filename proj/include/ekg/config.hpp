#pragma once

// Plain-text run configuration: INI-style sections of `key = value` lines,
// `#` comments. Unknown sections or keys are rejected with the offending
// line number; all runs are deterministic by construction.

#include <string>
#include <vector>

#include "ekg/errors.hpp"

namespace ekg {

struct SmallConeSpec {
  double T_c = 0, R_c = 0, scale = 0;
};

struct RunConfig {
  // [grid]
  double r_max = 0;
  int n_cells = 0;
  // [data]
  double a_gamma = 0, a_phi = 0, p = 1, w = 1, mass = 0, gamma1_amp = 0;
  // [evolve]
  double courant = 0.5;
  double t_end = 0;
  int snapshot_every = 16;
  // [diagnostics]
  std::vector<double> cone_apexes;
  double flux_T0 = -1, flux_T1 = -1;  // defaults derived from t_end when < 0
  int flux_lines = 8;
  std::vector<SmallConeSpec> small_cones;
  // [double_null]
  bool dn_enabled = false;
  double dn_u_min = 0, dn_u_max = 0, dn_v_min = 0, dn_v_max = 0;
  int dn_n_u = 64;
  // [output]
  std::string out_dir = "out";
  bool write_snapshots = true;
  bool deterministic = true;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");

void validate(const RunConfig& cfg);

}  // namespace ekg
