// ekg-axis: constrained evolution of the radially symmetric 2+1
// Einstein-wave-Klein-Gordon system with null-chart construction and a
// one-shot verification harness.
//
//   ekg-axis <init|evolve|chart|verify|export> --config <path> [--out <dir>]
//
// exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 invariant failure.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ekg/csv.hpp"
#include "ekg/diagnostics.hpp"
#include "ekg/double_null.hpp"
#include "ekg/evolve.hpp"
#include "ekg/verify.hpp"

namespace fs = std::filesystem;
using namespace ekg;

namespace {

DataFamilyParams family_of(const RunConfig& cfg) {
  DataFamilyParams fam;
  fam.a_gamma = cfg.a_gamma;
  fam.a_phi = cfg.a_phi;
  fam.p = cfg.p;
  fam.w = cfg.w;
  fam.mass = cfg.mass;
  fam.gamma1_amp = cfg.gamma1_amp;
  return fam;
}

Trajectory run_evolution(const RunConfig& cfg, const RadialGrid& grid) {
  CauchyEvolver ev(grid, cfg.mass);
  EvolveOptions opt;
  opt.t_end = cfg.t_end;
  opt.courant = cfg.courant;
  opt.snapshot_every = cfg.snapshot_every;
  return ev.evolve(build_initial_data(family_of(cfg), grid), opt);
}

int cmd_init(const RunConfig& cfg) {
  RadialGrid grid = make_grid(cfg.r_max, cfg.n_cells);
  InitialDataSet d = build_initial_data(family_of(cfg), grid);
  fs::create_directories(cfg.out_dir);
  write_initial_data_csv((fs::path(cfg.out_dir) / "initial_data.csv").string(), d, grid);
  DecayReport dg = check_decay(d.gamma0, grid);
  DecayReport dp = check_decay(d.phi0, grid);
  std::cout << "initial data written; cd1 margin = " << format_double(d.cd1_margin) << "\n";
  auto report = [](const char* name, const DecayReport& r) {
    if (r.identically_zero)
      std::cout << name << ": identically zero\n";
    else
      std::cout << name << ": tail exponent " << format_double(r.exponent)
                << (r.too_slow ? " (TOO SLOW, needs 11/8)" : "") << "\n";
  };
  report("gamma0 decay", dg);
  report("phi0 decay", dp);
  return 0;
}

int cmd_evolve(const RunConfig& cfg) {
  RadialGrid grid = make_grid(cfg.r_max, cfg.n_cells);
  Trajectory traj = run_evolution(cfg, grid);
  fs::create_directories(cfg.out_dir);
  if (cfg.write_snapshots)
    for (const CauchyState& s : traj.snapshots)
      write_snapshot_csv((fs::path(cfg.out_dir) / snapshot_filename(s.t)).string(), s, grid);

  ConeRegion reg;
  bool have_cone = false;
  if (!cfg.cone_apexes.empty()) {
    NullChart cchart = solve_cone_chart(traj, cfg.cone_apexes.front());
    reg = cone_region(cchart, traj, cfg.cone_apexes.front());
    have_cone = true;
  }
  EnergySeries es = energy_series(traj, have_cone ? &reg : nullptr);
  write_energy_series_csv((fs::path(cfg.out_dir) / "energy.csv").string(), es);

  MetricBounds mb = metric_bounds_report(traj);
  GammaFloor gf = gamma_floor(traj);
  write_report((fs::path(cfg.out_dir) / "bounds.txt").string(),
               {{"beta_min", mb.beta_min},
                {"beta_max", mb.beta_max},
                {"alpha_min", mb.alpha_min},
                {"alpha_max", mb.alpha_max},
                {"beta_inf0", mb.beta_inf0},
                {"beta_inf_drift", mb.beta_inf_drift},
                {"gamma_min", gf.gamma_min}});

  Metric4D m4 = reconstruct_4d_metric(traj.snapshots.back(), grid);
  write_metric4d_csv((fs::path(cfg.out_dir) / "metric4d.csv").string(), traj.snapshots.back(),
                     m4, grid);

  if (!traj.completed()) {
    std::cerr << "evolution stopped early: " << traj.stop_reason << "\n";
    return 3;
  }
  std::cout << "evolution complete: " << traj.snapshots.size() << " snapshots, E(0) = "
            << format_double(es.E_total.front()) << "\n";
  return 0;
}

int cmd_chart(const RunConfig& cfg) {
  RadialGrid grid = make_grid(cfg.r_max, cfg.n_cells);
  Trajectory traj = run_evolution(cfg, grid);
  if (!traj.completed()) {
    std::cerr << "evolution stopped early: " << traj.stop_reason << "\n";
    return 3;
  }
  fs::create_directories(cfg.out_dir);
  NullChart chart = solve_chart(traj);
  compute_FG(chart, traj);
  write_chart_csv((fs::path(cfg.out_dir) / "chart.csv").string(), chart, grid);
  for (double tO : cfg.cone_apexes) {
    NullChart cc = solve_cone_chart(traj, tO);
    compute_FG(cc, traj);
    char name[64];
    std::snprintf(name, sizeof name, "cone_chart_t%.4f.csv", tO);
    write_chart_csv((fs::path(cfg.out_dir) / name).string(), cc, grid);
  }
  if (cfg.dn_enabled) {
    DoubleNullParams dn{cfg.dn_u_min, cfg.dn_u_max, cfg.dn_v_min, cfg.dn_v_max, cfg.dn_n_u};
    DoubleNullState dns = seed_from_cauchy(traj, chart, dn);
    evolve_diamond(dns);
    write_lattice_csv((fs::path(cfg.out_dir) / "lattice.csv").string(), dns);
    if (!dns.evolved) {
      std::cerr << "double-null run stopped: " << dns.stop_reason << "\n";
      return 3;
    }
  }
  std::cout << "charts written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  VerifyReport rep = run_verification(cfg, std::cout);
  return rep.all_pass() ? 0 : 4;
}

int cmd_export(const RunConfig& cfg) {
  std::vector<std::string> snaps;
  for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snap_t", 0) == 0 && entry.path().extension() == ".csv")
      snaps.push_back(entry.path().string());
  }
  if (snaps.empty()) throw ConfigError("export: no snapshot CSVs found in " + cfg.out_dir);
  std::sort(snaps.begin(), snaps.end());
  write_long_format((fs::path(cfg.out_dir) / "snapshots_long.csv").string(), snaps);
  std::cout << "merged " << snaps.size() << " snapshots into snapshots_long.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained Einstein-wave-Klein-Gordon evolution and verification"};
  app.require_subcommand(1);
  std::string config_path, out_override;

  for (const char* name : {"init", "evolve", "chart", "verify", "export"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_override, "output directory override");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = parse_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "init") return cmd_init(cfg);
    if (sub == "evolve") return cmd_evolve(cfg);
    if (sub == "chart") return cmd_chart(cfg);
    if (sub == "verify") return cmd_verify(cfg);
    if (sub == "export") return cmd_export(cfg);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
