#pragma once

// Deterministic CSV export/import. All doubles are written with 17
// significant digits so repeated runs produce byte-identical files and
// golden values survive a round trip exactly.

#include <string>
#include <vector>

#include "ekg/diagnostics.hpp"
#include "ekg/double_null.hpp"
#include "ekg/initial_data.hpp"
#include "ekg/state.hpp"

namespace ekg {

std::string format_double(double x);

void write_initial_data_csv(const std::string& path, const InitialDataSet& d,
                            const RadialGrid& g);

// columns t, r, gamma, phi, Pi_gamma, Pi_phi, alpha, beta
void write_snapshot_csv(const std::string& path, const CauchyState& s, const RadialGrid& g);
std::string snapshot_filename(double t);

// columns t, r, u, v, F, G, lambda, valid
void write_chart_csv(const std::string& path, const NullChart& chart, const RadialGrid& g);

// columns u, v, r, lambda, gamma, phi
void write_lattice_csv(const std::string& path, const DoubleNullState& s);

// columns t, E_total, E_cone, gamma_min, beta_max, alpha_min, alpha_max
void write_energy_series_csv(const std::string& path, const EnergySeries& es);

// key = value lines
void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, double>>& entries);

// columns t, r, g_tt, g_rr, g_thth, g_33
void write_metric4d_csv(const std::string& path, const CauchyState& s, const Metric4D& m,
                        const RadialGrid& g);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

// Merges snapshot CSVs into long format: columns t, r, field, value.
void write_long_format(const std::string& path, const std::vector<std::string>& snapshot_paths);

}  // namespace ekg
