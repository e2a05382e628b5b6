// Experiment configuration: flat key = value text with dotted sections,
// total defaults, canonical serialization and an FNV-1a hash that every
// output file embeds as provenance.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscwave/isometry.hpp"
#include "oscwave/model.hpp"
#include "oscwave/noise.hpp"

namespace oscwave {

struct ConfigError : std::runtime_error {
  int line = 0;  // 1-based; 0 when not tied to a line
  std::string field;
  ConfigError(const std::string& msg, int line_, std::string field_)
      : std::runtime_error(msg), line(line_), field(std::move(field_)) {}
};

struct ExperimentConfig {
  std::string command = "variance";
  ModelParams model{1, 1.0, 0.0, 0.0};
  SpectralMeasureSpec measure = lebesgue_measure();

  int n_modes = -1;  // -1: derive from tol via choose_truncation
  double tol = 1e-6;
  double dt = 1.0 / 256.0;
  int steps = -1;  // -1: cover the latest probe
  int replicas = 1000;
  uint64_t seed = 1;
  int threads = 0;  // 0: machine parallelism

  NoiseGridSpec grid;
  IsometryOptions quadrature;

  std::vector<Probe> probes{{1.0, 0.0, 0.0, 0.0}};
  std::string out_prefix = "out/run";

  double kernel_x0 = 0.0;    // kernel command: x0 / xi0 evaluation point
  double kernel_eta = 1.0;   // kernel command, dims 2-3
  double kernel_zeta = 0.0;
  double continuity_eta = 1.0;   // continuity command, dim 3 modulus frequency
  double continuity_zeta = 1.0;
  int continuity_rungs = 11;     // h = 2^{-k}, k = 0..rungs-1
};

// Parses config text / file. Unknown keys and malformed values raise
// ConfigError carrying the 1-based line and the field name.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical serialization: every key, fixed order, %.17g numbers.
// parse(serialize(c)) == c and serialize is idempotent under round-trips.
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization.
uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace oscwave
