#include "ekg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ekg {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

double to_double(const std::string& origin, int line, const std::string& key,
                 const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (...) {
    fail(origin, line, "malformed numeric value for key \"" + key + "\": " + v);
  }
}

int to_int(const std::string& origin, int line, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (...) {
    fail(origin, line, "malformed integer value for key \"" + key + "\": " + v);
  }
}

bool to_bool(const std::string& origin, int line, const std::string& key,
             const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(origin, line, "malformed boolean value for key \"" + key + "\": " + v);
}

std::vector<double> to_list(const std::string& origin, int line, const std::string& key,
                            const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(origin, line, key, item));
  }
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  bool required_rmax = false, required_ncells = false, required_tend = false;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "malformed section header: " + s);
      section = trim(s.substr(1, s.size() - 2));
      if (section != "grid" && section != "data" && section != "evolve" &&
          section != "diagnostics" && section != "double_null" && section != "output")
        fail(origin, line, "unknown section \"" + section + "\"");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected key = value, got: " + s);
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(origin, line, "empty key");

    auto unknown = [&]() { fail(origin, line, "unknown key \"" + key + "\" in section [" + section + "]"); };

    if (section == "grid") {
      if (key == "r_max") { cfg.r_max = to_double(origin, line, key, val); required_rmax = true; }
      else if (key == "n_cells") { cfg.n_cells = to_int(origin, line, key, val); required_ncells = true; }
      else unknown();
    } else if (section == "data") {
      if (key == "a_gamma") cfg.a_gamma = to_double(origin, line, key, val);
      else if (key == "a_phi") cfg.a_phi = to_double(origin, line, key, val);
      else if (key == "p") cfg.p = to_double(origin, line, key, val);
      else if (key == "w") cfg.w = to_double(origin, line, key, val);
      else if (key == "mass") cfg.mass = to_double(origin, line, key, val);
      else if (key == "gamma1_amp") cfg.gamma1_amp = to_double(origin, line, key, val);
      else unknown();
    } else if (section == "evolve") {
      if (key == "courant") cfg.courant = to_double(origin, line, key, val);
      else if (key == "t_end") { cfg.t_end = to_double(origin, line, key, val); required_tend = true; }
      else if (key == "snapshot_every") cfg.snapshot_every = to_int(origin, line, key, val);
      else unknown();
    } else if (section == "diagnostics") {
      if (key == "cone_apexes") cfg.cone_apexes = to_list(origin, line, key, val);
      else if (key == "flux_T0") cfg.flux_T0 = to_double(origin, line, key, val);
      else if (key == "flux_T1") cfg.flux_T1 = to_double(origin, line, key, val);
      else if (key == "flux_lines") cfg.flux_lines = to_int(origin, line, key, val);
      else if (key == "small_cones") {
        std::stringstream ss(val);
        std::string triple;
        while (std::getline(ss, triple, ';')) {
          triple = trim(triple);
          if (triple.empty()) continue;
          const std::vector<double> parts = to_list(origin, line, key, triple);
          if (parts.size() != 3)
            fail(origin, line, "small_cones entries must be T,R,scale triples");
          cfg.small_cones.push_back({parts[0], parts[1], parts[2]});
        }
      } else unknown();
    } else if (section == "double_null") {
      if (key == "enabled") cfg.dn_enabled = to_bool(origin, line, key, val);
      else if (key == "u_min") cfg.dn_u_min = to_double(origin, line, key, val);
      else if (key == "u_max") cfg.dn_u_max = to_double(origin, line, key, val);
      else if (key == "v_min") cfg.dn_v_min = to_double(origin, line, key, val);
      else if (key == "v_max") cfg.dn_v_max = to_double(origin, line, key, val);
      else if (key == "n_u") cfg.dn_n_u = to_int(origin, line, key, val);
      else unknown();
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "write_snapshots") cfg.write_snapshots = to_bool(origin, line, key, val);
      else if (key == "deterministic") cfg.deterministic = to_bool(origin, line, key, val);
      else unknown();
    } else {
      fail(origin, line, "key \"" + key + "\" outside any section");
    }
  }

  if (!required_rmax) throw ConfigError(origin + ": missing required key [grid] r_max");
  if (!required_ncells) throw ConfigError(origin + ": missing required key [grid] n_cells");
  if (!required_tend) throw ConfigError(origin + ": missing required key [evolve] t_end");
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void validate(const RunConfig& cfg) {
  if (!(cfg.r_max > 0) || !std::isfinite(cfg.r_max))
    throw ConfigError("r_max must be positive and finite");
  int q = cfg.n_cells;
  bool pow2_multiple = q >= 16 && q % 16 == 0;
  if (pow2_multiple) {
    q /= 16;
    while (q % 2 == 0) q /= 2;
    pow2_multiple = (q == 1);
  }
  if (!pow2_multiple)
    throw ConfigError("n_cells must be a power-of-two multiple of 16");
  if (!(cfg.courant > 0.0 && cfg.courant <= 1.0))
    throw ConfigError("courant must lie in (0, 1]");
  if (!(cfg.t_end > 0) || !std::isfinite(cfg.t_end))
    throw ConfigError("t_end must be positive and finite");
  if (cfg.snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
  if (cfg.flux_lines < 1) throw ConfigError("flux_lines must be >= 1");
  if (!cfg.deterministic)
    throw ConfigError("deterministic = false is not supported; all runs are rng-free");
  for (double a : cfg.cone_apexes)
    if (!(a > 0) || a > cfg.t_end)
      throw ConfigError("cone apex times must lie in (0, t_end]");
  for (double x : {cfg.a_gamma, cfg.a_phi, cfg.p, cfg.w, cfg.mass, cfg.gamma1_amp})
    if (!std::isfinite(x)) throw ConfigError("data family parameters must be finite");
}

}  // namespace ekg
