// Batch front end: config parsing, experiment orchestration, CSV emission.
//
// Exit codes: 0 success with all certificates met; 2 expected-negative
// outcomes (Levi violation, inadmissible measure); 1 malformed config or
// internal failure.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oscwave/config.hpp"
#include "oscwave/csv.hpp"
#include "oscwave/hermite.hpp"
#include "oscwave/isometry.hpp"
#include "oscwave/kernels.hpp"
#include "oscwave/model.hpp"
#include "oscwave/noise.hpp"

namespace {

using namespace oscwave;

double latest_probe_time(const ExperimentConfig& cfg) {
  double t = 0.0;
  for (const Probe& p : cfg.probes) t = std::max(t, p.t);
  return t;
}

int resolve_modes(const ExperimentConfig& cfg) {
  if (cfg.n_modes >= 0) return cfg.n_modes;
  const double horizon = std::max(latest_probe_time(cfg), 1e-6);
  const double d0 = hermite::calibrate_sup_bound(64).d;
  return choose_truncation(cfg.tol, horizon, d0);
}

const char* verdict_name(Admissibility v) {
  switch (v) {
    case Admissibility::admissible: return "admissible";
    case Admissibility::inadmissible: return "inadmissible";
    default: return "undecided";
  }
}

int cmd_calibrate(const ExperimentConfig& cfg, uint64_t hash) {
  const int n_max = cfg.n_modes > 0 ? cfg.n_modes : 256;
  const auto& cal = hermite::calibrate_sup_bound(n_max);
  auto os = csv::open_with_provenance(cfg.out_prefix + "_calibration.csv", hash, cfg.seed);
  os << "# C=" << csv::fmt(cal.c) << " D=" << csv::fmt(cal.d) << "\n";
  os << "n,max_psi2,scaled\n";
  for (int n = 1; n <= cal.n_max; ++n) {
    const double m = cal.max_psi2[static_cast<size_t>(n)];
    os << n << "," << csv::fmt(m) << "," << csv::fmt(std::pow(n, 1.0 / 6.0) * m) << "\n";
  }
  std::cout << "calibrate: n_max=" << cal.n_max << " C=" << cal.c << " D=" << cal.d << "\n";
  return 0;
}

int cmd_kernel(const ExperimentConfig& cfg, uint64_t hash) {
  const int N = resolve_modes(cfg);
  const double horizon = latest_probe_time(cfg);
  const TruncatedKernel k = make_kernel(cfg.model, cfg.measure, std::max(N, 2), horizon);
  auto os = csv::open_with_provenance(cfg.out_prefix + "_kernel.csv", hash, cfg.seed);
  os << "# N=" << k.N << " tail_certificate=" << csv::fmt(k.tail_certificate) << "\n";
  os << "probe,t,x,y,z,value,f_re,f_im\n";
  for (size_t i = 0; i < cfg.probes.size(); ++i) {
    const Probe& p = cfg.probes[i];
    double e = 0.0;
    std::complex<double> f;
    if (cfg.model.dim == 1) {
      e = kernel_e1(p.t, p.x, cfg.kernel_x0, k.N);
      f = kernel_f1(p.t, p.x, cfg.kernel_x0, k.N);
    } else if (cfg.model.dim == 2) {
      e = kernel_e_hat(p.t, p.x, cfg.kernel_eta, 0.0, cfg.kernel_x0, k.N, cfg.model);
      f = kernel_f2(p.t, p.x, p.y, cfg.kernel_x0, cfg.kernel_eta, k.N, cfg.model);
    } else {
      e = kernel_e_hat(p.t, p.x, cfg.kernel_eta, cfg.kernel_zeta, cfg.kernel_x0, k.N, cfg.model);
      f = kernel_f3(p.t, p.x, p.y, p.z, cfg.kernel_x0, cfg.kernel_eta, cfg.kernel_zeta, k.N,
                    cfg.model);
    }
    os << i << "," << csv::fmt(p.t) << "," << csv::fmt(p.x) << "," << csv::fmt(p.y) << ","
       << csv::fmt(p.z) << "," << csv::fmt(e) << "," << csv::fmt(f.real()) << ","
       << csv::fmt(f.imag()) << "\n";
  }
  std::cout << "kernel: N=" << k.N << " tail_certificate=" << k.tail_certificate << "\n";
  return 0;
}

VarianceReport run_variance(const ExperimentConfig& cfg, const Probe& p, int N) {
  switch (cfg.model.dim) {
    case 1:
      return variance_1d(p.t, p.x, N);
    case 2:
      return variance_2d(p.t, p.x, p.y, N, cfg.model, cfg.measure, cfg.quadrature);
    default:
      return variance_3d(p.t, p.x, p.y, p.z, N, cfg.model, cfg.measure, cfg.quadrature);
  }
}

int cmd_variance(const ExperimentConfig& cfg, uint64_t hash) {
  validate_params(cfg.model);
  const int N = resolve_modes(cfg);
  auto os = csv::open_with_provenance(cfg.out_prefix + "_variance.csv", hash, cfg.seed);
  os << "probe,t,x,y,z,n_modes,value,t0,quad_error,tail_error\n";
  for (size_t i = 0; i < cfg.probes.size(); ++i) {
    const Probe& p = cfg.probes[i];
    const VarianceReport rep = run_variance(cfg, p, N);
    os << i << "," << csv::fmt(p.t) << "," << csv::fmt(p.x) << "," << csv::fmt(p.y) << ","
       << csv::fmt(p.z) << "," << rep.N << "," << csv::fmt(rep.value) << "," << csv::fmt(rep.t0)
       << "," << csv::fmt(rep.quad_error) << "," << csv::fmt(rep.tail_error) << "\n";
    auto ms = csv::open_with_provenance(
        cfg.out_prefix + "_modes_" + std::to_string(i) + ".csv", hash, cfg.seed);
    write_mode_csv(ms, rep);
    std::cout << "variance: probe " << i << " value=" << rep.value
              << " tail_error=" << rep.tail_error << " quad_error=" << rep.quad_error << "\n";
  }
  return 0;
}

int cmd_admissibility(const ExperimentConfig& cfg, uint64_t hash) {
  auto os = csv::open_with_provenance(cfg.out_prefix + "_admissibility.csv", hash, cfg.seed);
  Admissibility verdict = Admissibility::admissible;
  const quad::DoublingResult* trace = nullptr;
  Nu2Report r2;
  Nu3Report r3;
  if (cfg.model.dim == 1) {
    // nu_1 is Lebesgue by hypothesis; nothing to check
    os << "dim,verdict,detail\n1,admissible,lebesgue\n";
    std::cout << "admissibility: dim 1 (Lebesgue) admissible\n";
    return 0;
  }
  if (cfg.model.dim == 2) {
    r2 = admissibility_nu2(cfg.measure, quad::DoublingOptions{});
    verdict = r2.verdict;
    trace = &r2.hypothesis;
    os << "dim,verdict,hypothesis_integral,proof_level_integral,proof_level_verdict\n";
    os << "2," << verdict_name(r2.verdict) << "," << csv::fmt(r2.hypothesis.value) << ","
       << csv::fmt(r2.proof_level_value) << "," << verdict_name(r2.proof_level_verdict) << "\n";
    std::cout << "admissibility: " << verdict_name(r2.verdict)
              << " hypothesis=" << r2.hypothesis.value
              << " proof_level=" << r2.proof_level_value << "\n";
  } else {
    r3 = admissibility_nu3(cfg.measure, quad::DoublingOptions{});
    verdict = r3.verdict;
    trace = &r3.at_witness;
    os << "dim,verdict,witness_alpha,delta,moment_ok,moment_value\n";
    os << "3," << verdict_name(r3.verdict) << "," << csv::fmt(r3.witness_alpha) << ","
       << csv::fmt(r3.delta) << "," << (r3.moment_ok ? 1 : 0) << "," << csv::fmt(r3.moment_value)
       << "\n";
    std::cout << "admissibility: " << verdict_name(r3.verdict)
              << " witness_alpha=" << r3.witness_alpha << "\n";
  }
  if (trace) {
    auto ts = csv::open_with_provenance(cfg.out_prefix + "_admissibility_trace.csv", hash, cfg.seed);
    ts << "octave,log_cutoff,increment,partial\n";
    for (size_t i = 0; i < trace->trace.size(); ++i) {
      const auto& s = trace->trace[i];
      ts << i << "," << csv::fmt(s.u_end) << "," << csv::fmt(s.increment) << ","
         << csv::fmt(s.partial) << "\n";
    }
  }
  if (verdict == Admissibility::inadmissible) return 2;
  if (verdict == Admissibility::undecided) return 1;
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, uint64_t hash) {
  const int N = std::max(resolve_modes(cfg), 2);
  const double horizon = latest_probe_time(cfg);
  const TruncatedKernel k = make_kernel(cfg.model, cfg.measure, N, horizon);
  const int steps = cfg.steps > 0 ? cfg.steps : static_cast<int>(std::ceil(horizon / cfg.dt - 1e-12));
  const NoiseGrid grid = build_noise_grid(k, cfg.grid, cfg.dt, std::max(steps, 1), cfg.seed);

  std::vector<double> oracle;
  for (const Probe& p : cfg.probes) oracle.push_back(run_variance(cfg, p, N).value);

  const FieldEnsemble ens = sample_field(k, grid, cfg.probes, cfg.replicas, cfg.threads, oracle);

  auto sm = csv::open_with_provenance(cfg.out_prefix + "_simulate.csv", hash, cfg.seed);
  sm << "# discarded_tail_fraction=" << csv::fmt(grid.discarded_tail_fraction) << "\n";
  sm << "probe,t,x,y,z,mean,var,stderr,oracle,grid_oracle,budget,z_score\n";
  for (size_t i = 0; i < cfg.probes.size(); ++i) {
    const Probe& p = cfg.probes[i];
    const double budget = std::fabs(ens.grid_oracle[i] - oracle[i]);
    const double z = (ens.variance[i] - oracle[i]) / ens.stderr_of_var[i];
    sm << i << "," << csv::fmt(p.t) << "," << csv::fmt(p.x) << "," << csv::fmt(p.y) << ","
       << csv::fmt(p.z) << "," << csv::fmt(ens.mean[i]) << "," << csv::fmt(ens.variance[i]) << ","
       << csv::fmt(ens.stderr_of_var[i]) << "," << csv::fmt(oracle[i]) << ","
       << csv::fmt(ens.grid_oracle[i]) << "," << csv::fmt(budget) << "," << csv::fmt(z) << "\n";
    std::cout << "simulate: probe " << i << " var=" << ens.variance[i] << " oracle=" << oracle[i]
              << " stderr=" << ens.stderr_of_var[i] << " budget=" << budget << "\n";
  }
  auto ss = csv::open_with_provenance(cfg.out_prefix + "_samples.csv", hash, cfg.seed);
  ss << "replica,probe,value\n";
  for (size_t i = 0; i < cfg.probes.size(); ++i) {
    for (size_t r = 0; r < ens.samples[i].size(); ++r) {
      ss << r << "," << i << "," << csv::fmt(ens.samples[i][r]) << "\n";
    }
  }
  return 0;
}

int cmd_continuity(const ExperimentConfig& cfg, uint64_t hash) {
  validate_params(cfg.model);
  const int N = resolve_modes(cfg);
  const Probe p = cfg.probes.front();
  auto os = csv::open_with_provenance(cfg.out_prefix + "_continuity.csv", hash, cfg.seed);
  os << "h,modulus_space,modulus_time,j1,j2,space_increment\n";
  for (int kx = 0; kx < cfg.continuity_rungs; ++kx) {
    const double h = std::pow(2.0, -kx);
    double s_space = 0.0, s_time = 0.0;
    IncrementMoments m;
    if (cfg.model.dim == 1) {
      s_space = continuity_modulus_1d(p.t, p.x, h, N);
      s_time = continuity_modulus_1d_time(p.t, p.x, h, N);
      m = increment_moments_1d(p.t, h, h, p.x, N);
    } else if (cfg.model.dim == 2) {
      s_space = continuity_modulus_3d(p.t, cfg.continuity_eta, 0.0, p.x, h, N, cfg.model);
      s_time = continuity_modulus_3d_time(p.t, cfg.continuity_eta, 0.0, p.x, h, N, cfg.model);
      m = increment_moments_2d(p.t, h, h, p.x, p.y, N, cfg.model, cfg.measure, cfg.quadrature);
    } else {
      s_space = continuity_modulus_3d(p.t, cfg.continuity_eta, cfg.continuity_zeta, p.x, h, N,
                                      cfg.model);
      s_time = continuity_modulus_3d_time(p.t, cfg.continuity_eta, cfg.continuity_zeta, p.x, h, N,
                                          cfg.model);
      m = increment_moments_3d(p.t, h, h, p.x, p.y, p.z, N, cfg.model, cfg.measure,
                               cfg.quadrature);
    }
    os << csv::fmt(h) << "," << csv::fmt(s_space) << "," << csv::fmt(s_time) << ","
       << csv::fmt(m.j1) << "," << csv::fmt(m.j2) << "," << csv::fmt(m.space) << "\n";
  }
  std::cout << "continuity: " << cfg.continuity_rungs << " dyadic rungs written\n";
  return 0;
}

int run(const ExperimentConfig& cfg) {
  const uint64_t hash = config_hash(cfg);
  if (cfg.command == "calibrate") return cmd_calibrate(cfg, hash);
  if (cfg.command == "kernel") return cmd_kernel(cfg, hash);
  if (cfg.command == "variance") return cmd_variance(cfg, hash);
  if (cfg.command == "admissibility") return cmd_admissibility(cfg, hash);
  if (cfg.command == "simulate") return cmd_simulate(cfg, hash);
  if (cfg.command == "continuity") return cmd_continuity(cfg, hash);
  throw ConfigError("unknown command '" + cfg.command + "'", 0, "command");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmonic-oscillator wave SPDE toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_prefix;
  uint64_t seed = 0;
  bool seed_set = false, out_set = false, tol_set = false, threads_set = false;
  double tol = 0.0;
  int threads = 0;

  for (const char* name : {"kernel", "variance", "admissibility", "simulate", "continuity",
                           "calibrate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file (key = value)");
    sub->add_option("--out", out_prefix, "output path prefix")->each([&](const std::string&) {
      out_set = true;
    });
    sub->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--threads", threads, "worker cap (0 = machine parallelism)")
        ->each([&](const std::string&) { threads_set = true; });
    sub->add_option("--tol", tol, "truncation tolerance")->each([&](const std::string&) {
      tol_set = true;
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : parse_config_file(config_path);
    cfg.command = app.get_subcommands().front()->get_name();
    if (out_set) cfg.out_prefix = out_prefix;
    if (seed_set) cfg.seed = seed;
    if (threads_set) cfg.threads = threads;
    if (tol_set) cfg.tol = tol;
    return run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " at line " << e.line;
    if (!e.field.empty()) std::cerr << " (field " << e.field << ")";
    std::cerr << ": " << e.what() << "\n";
    return 1;
  } catch (const LeviError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const InadmissibleMeasure& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
