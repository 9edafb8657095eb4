#include "ekg/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ekg {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

void write_row(std::ofstream& out, const std::vector<double>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out << ',';
    out << format_double(vals[i]);
  }
  out << '\n';
}

}  // namespace

void write_initial_data_csv(const std::string& path, const InitialDataSet& d,
                            const RadialGrid& g) {
  std::ofstream out = open_out(path);
  out << "r,gamma0,gamma1,phi0,phi1,beta0,alpha0\n";
  for (int i = 0; i < g.n_nodes(); ++i)
    write_row(out, {g.r[i], d.gamma0[i], d.gamma1[i], d.phi0[i], d.phi1[i], d.beta0[i],
                    d.alpha0[i]});
}

std::string snapshot_filename(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snap_t%.4f.csv", t);
  return buf;
}

void write_snapshot_csv(const std::string& path, const CauchyState& s, const RadialGrid& g) {
  std::ofstream out = open_out(path);
  out << "t,r,gamma,phi,Pi_gamma,Pi_phi,alpha,beta\n";
  for (int i = 0; i < g.n_nodes(); ++i)
    write_row(out, {s.t, g.r[i], s.gamma[i], s.phi[i], s.pi_gamma[i], s.pi_phi[i], s.alpha[i],
                    s.beta[i]});
}

void write_chart_csv(const std::string& path, const NullChart& chart, const RadialGrid& g) {
  std::ofstream out = open_out(path);
  out << "t,r,u,v,F,G,lambda,valid\n";
  for (std::size_t j = 0; j < chart.n_snapshots(); ++j)
    for (int i = 0; i < chart.n_nodes; ++i) {
      const double F = chart.has_fg ? chart.F[j][i] : 0.0;
      const double G = chart.has_fg ? chart.G[j][i] : 0.0;
      const double lam = chart.has_fg ? chart.lam[j][i] : 0.0;
      write_row(out, {chart.times[j], g.r[i], chart.u[j][i], chart.v[j][i], F, G, lam,
                      static_cast<double>(chart.valid[j][i])});
    }
}

void write_lattice_csv(const std::string& path, const DoubleNullState& s) {
  std::ofstream out = open_out(path);
  out << "u,v,r,lambda,gamma,phi\n";
  for (int i = 0; i < s.nu; ++i)
    for (int j = 0; j < s.nv; ++j) {
      const std::size_t q = static_cast<std::size_t>(i) * s.nv + j;
      write_row(out, {s.u_of(i), s.v_of(j), s.r[q], s.lam[q], s.gamma[q], s.phi[q]});
    }
}

void write_energy_series_csv(const std::string& path, const EnergySeries& es) {
  std::ofstream out = open_out(path);
  out << "t,E_total,E_cone,gamma_min,beta_max,alpha_min,alpha_max\n";
  for (std::size_t j = 0; j < es.t.size(); ++j)
    write_row(out, {es.t[j], es.E_total[j], es.E_cone[j], es.gamma_min[j], es.beta_max[j],
                    es.alpha_min[j], es.alpha_max[j]});
}

void write_report(const std::string& path,
                  const std::vector<std::pair<std::string, double>>& entries) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : entries) out << key << " = " << format_double(value) << '\n';
}

void write_metric4d_csv(const std::string& path, const CauchyState& s, const Metric4D& m,
                        const RadialGrid& g) {
  std::ofstream out = open_out(path);
  out << "t,r,g_tt,g_rr,g_thth,g_33\n";
  for (int i = 0; i < g.n_nodes(); ++i)
    write_row(out, {s.t, g.r[i], m.g_tt[i], m.g_rr[i], m.g_thth[i], m.g_33[i]});
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path);
  CsvTable table;
  std::string line;
  if (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_long_format(const std::string& path,
                       const std::vector<std::string>& snapshot_paths) {
  std::ofstream out = open_out(path);
  out << "t,r,field,value\n";
  for (const std::string& sp : snapshot_paths) {
    const CsvTable tab = read_csv(sp);
    for (const auto& row : tab.rows)
      for (std::size_t c = 2; c < row.size() && c < tab.header.size(); ++c)
        out << format_double(row[0]) << ',' << format_double(row[1]) << ',' << tab.header[c]
            << ',' << format_double(row[c]) << '\n';
  }
}

}  // namespace ekg
