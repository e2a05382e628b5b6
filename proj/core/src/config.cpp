#include "oscwave/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oscwave/csv.hpp"

namespace oscwave {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line, const std::string& field) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'", line, field);
  }
}

long long parse_int(const std::string& v, int line, const std::string& field) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + v + "'", line, field);
  }
}

uint64_t parse_u64(const std::string& v, int line, const std::string& field) {
  try {
    size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("expected an unsigned integer, got '" + v + "'", line, field);
  }
}

std::vector<double> parse_list(const std::string& v, int line, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list element", line, field);
    out.push_back(parse_double(item, line, field));
  }
  return out;
}

MeasureKind parse_kind(const std::string& v, int line) {
  if (v == "lebesgue") return MeasureKind::lebesgue;
  if (v == "power_law") return MeasureKind::power_law;
  if (v == "radial_power") return MeasureKind::radial_power;
  if (v == "compact") return MeasureKind::compact;
  if (v == "table") return MeasureKind::table;
  throw ConfigError("unknown measure kind '" + v + "'", line, "measure.kind");
}

const char* kind_name(MeasureKind k) {
  switch (k) {
    case MeasureKind::lebesgue: return "lebesgue";
    case MeasureKind::power_law: return "power_law";
    case MeasureKind::radial_power: return "radial_power";
    case MeasureKind::compact: return "compact";
    case MeasureKind::table: return "table";
  }
  return "lebesgue";
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& val, int line) {
  if (key == "command") { cfg.command = val; return; }
  if (key == "model.dim") { cfg.model.dim = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "model.mu") { cfg.model.mu = parse_double(val, line, key); return; }
  if (key == "model.a") { cfg.model.a = parse_double(val, line, key); return; }
  if (key == "model.b") { cfg.model.b = parse_double(val, line, key); return; }
  if (key == "measure.kind") { cfg.measure.kind = parse_kind(val, line); return; }
  if (key == "measure.beta") { cfg.measure.beta = parse_double(val, line, key); return; }
  if (key == "measure.gamma") { cfg.measure.gamma = parse_double(val, line, key); return; }
  if (key == "measure.lo") { cfg.measure.lo = parse_double(val, line, key); return; }
  if (key == "measure.hi") { cfg.measure.hi = parse_double(val, line, key); return; }
  if (key == "measure.level") { cfg.measure.level = parse_double(val, line, key); return; }
  if (key == "measure.weights") { cfg.measure.weights = parse_list(val, line, key); return; }
  if (key == "numerics.n") { cfg.n_modes = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "numerics.tol") { cfg.tol = parse_double(val, line, key); return; }
  if (key == "numerics.dt") { cfg.dt = parse_double(val, line, key); return; }
  if (key == "numerics.steps") { cfg.steps = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "numerics.replicas") { cfg.replicas = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "numerics.seed") { cfg.seed = parse_u64(val, line, key); return; }
  if (key == "numerics.threads") { cfg.threads = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "grid.lambda_cells") { cfg.grid.lambda_cells = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "grid.lambda_pad") { cfg.grid.lambda_pad = parse_double(val, line, key); return; }
  if (key == "grid.eta_min") { cfg.grid.eta_min = parse_double(val, line, key); return; }
  if (key == "grid.eta_cutoff") { cfg.grid.eta_cutoff = parse_double(val, line, key); return; }
  if (key == "grid.eta_cells") { cfg.grid.eta_cells = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "grid.radial_cutoff") { cfg.grid.radial_cutoff = parse_double(val, line, key); return; }
  if (key == "grid.radial_cells") { cfg.grid.radial_cells = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "grid.theta_cells") { cfg.grid.theta_cells = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "quad.cells_per_octave") { cfg.quadrature.cells_per_octave = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "quad.radial_cells_per_octave") { cfg.quadrature.radial_cells_per_octave = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "quad.theta_cells") { cfg.quadrature.theta_cells = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "quad.qn_theta_cells") { cfg.quadrature.qn_theta_cells = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "quad.max_octaves") { cfg.quadrature.max_octaves = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "quad.increment_tol") { cfg.quadrature.increment_tol = parse_double(val, line, key); return; }
  if (key == "kernel.x0") { cfg.kernel_x0 = parse_double(val, line, key); return; }
  if (key == "kernel.eta") { cfg.kernel_eta = parse_double(val, line, key); return; }
  if (key == "kernel.zeta") { cfg.kernel_zeta = parse_double(val, line, key); return; }
  if (key == "continuity.eta") { cfg.continuity_eta = parse_double(val, line, key); return; }
  if (key == "continuity.zeta") { cfg.continuity_zeta = parse_double(val, line, key); return; }
  if (key == "continuity.rungs") { cfg.continuity_rungs = static_cast<int>(parse_int(val, line, key)); return; }
  if (key == "output") { cfg.out_prefix = val; return; }
  if (key == "probes") {
    cfg.probes.clear();
    std::stringstream ss(val);
    std::string entry;
    while (std::getline(ss, entry, ';')) {
      entry = trim(entry);
      if (entry.empty()) continue;
      const std::vector<double> parts = parse_list(entry, line, key);
      if (parts.size() < 2 || parts.size() > 4)
        throw ConfigError("probe needs 2-4 components t,x[,y[,z]]", line, key);
      Probe p;
      p.t = parts[0];
      p.x = parts[1];
      if (parts.size() > 2) p.y = parts[2];
      if (parts.size() > 3) p.z = parts[3];
      cfg.probes.push_back(p);
    }
    if (cfg.probes.empty()) throw ConfigError("probe list is empty", line, key);
    return;
  }
  throw ConfigError("unknown key '" + key + "'", line, key);
}

void finalize(ExperimentConfig& cfg) {
  // the non-Lebesgue marginal dimension follows the model dimension
  cfg.measure.dim_hat = cfg.model.dim == 1 ? 0 : cfg.model.dim - 1;
  if (cfg.model.dim == 1) cfg.measure.kind = MeasureKind::lebesgue;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(ss, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", lineno, s.substr(0, 24));
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", lineno, "");
    apply_key(cfg, key, val, lineno);
  }
  finalize(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'", 0, "config");
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "command = " << cfg.command << "\n";
  os << "model.dim = " << cfg.model.dim << "\n";
  os << "model.mu = " << csv::fmt(cfg.model.mu) << "\n";
  os << "model.a = " << csv::fmt(cfg.model.a) << "\n";
  os << "model.b = " << csv::fmt(cfg.model.b) << "\n";
  os << "measure.kind = " << kind_name(cfg.measure.kind) << "\n";
  os << "measure.beta = " << csv::fmt(cfg.measure.beta) << "\n";
  os << "measure.gamma = " << csv::fmt(cfg.measure.gamma) << "\n";
  os << "measure.lo = " << csv::fmt(cfg.measure.lo) << "\n";
  os << "measure.hi = " << csv::fmt(cfg.measure.hi) << "\n";
  os << "measure.level = " << csv::fmt(cfg.measure.level) << "\n";
  if (!cfg.measure.weights.empty()) {
    os << "measure.weights = ";
    for (size_t i = 0; i < cfg.measure.weights.size(); ++i) {
      if (i) os << ",";
      os << csv::fmt(cfg.measure.weights[i]);
    }
    os << "\n";
  }
  os << "numerics.n = " << cfg.n_modes << "\n";
  os << "numerics.tol = " << csv::fmt(cfg.tol) << "\n";
  os << "numerics.dt = " << csv::fmt(cfg.dt) << "\n";
  os << "numerics.steps = " << cfg.steps << "\n";
  os << "numerics.replicas = " << cfg.replicas << "\n";
  os << "numerics.seed = " << csv::fmt(cfg.seed) << "\n";
  // numerics.threads and output are execution parameters: accepted as keys,
  // excluded from the canonical form so the hash identifies the experiment
  os << "grid.lambda_cells = " << cfg.grid.lambda_cells << "\n";
  os << "grid.lambda_pad = " << csv::fmt(cfg.grid.lambda_pad) << "\n";
  os << "grid.eta_min = " << csv::fmt(cfg.grid.eta_min) << "\n";
  os << "grid.eta_cutoff = " << csv::fmt(cfg.grid.eta_cutoff) << "\n";
  os << "grid.eta_cells = " << cfg.grid.eta_cells << "\n";
  os << "grid.radial_cutoff = " << csv::fmt(cfg.grid.radial_cutoff) << "\n";
  os << "grid.radial_cells = " << cfg.grid.radial_cells << "\n";
  os << "grid.theta_cells = " << cfg.grid.theta_cells << "\n";
  os << "quad.cells_per_octave = " << cfg.quadrature.cells_per_octave << "\n";
  os << "quad.radial_cells_per_octave = " << cfg.quadrature.radial_cells_per_octave << "\n";
  os << "quad.theta_cells = " << cfg.quadrature.theta_cells << "\n";
  os << "quad.qn_theta_cells = " << cfg.quadrature.qn_theta_cells << "\n";
  os << "quad.max_octaves = " << cfg.quadrature.max_octaves << "\n";
  os << "quad.increment_tol = " << csv::fmt(cfg.quadrature.increment_tol) << "\n";
  os << "kernel.x0 = " << csv::fmt(cfg.kernel_x0) << "\n";
  os << "kernel.eta = " << csv::fmt(cfg.kernel_eta) << "\n";
  os << "kernel.zeta = " << csv::fmt(cfg.kernel_zeta) << "\n";
  os << "continuity.eta = " << csv::fmt(cfg.continuity_eta) << "\n";
  os << "continuity.zeta = " << csv::fmt(cfg.continuity_zeta) << "\n";
  os << "continuity.rungs = " << cfg.continuity_rungs << "\n";
  os << "probes = ";
  for (size_t i = 0; i < cfg.probes.size(); ++i) {
    if (i) os << ";";
    os << csv::fmt(cfg.probes[i].t) << "," << csv::fmt(cfg.probes[i].x) << ","
       << csv::fmt(cfg.probes[i].y) << "," << csv::fmt(cfg.probes[i].z);
  }
  os << "\n";
  return os.str();
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = serialize_config(cfg);
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace oscwave
