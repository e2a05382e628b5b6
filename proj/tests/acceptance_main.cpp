// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one [PASS]/[FAIL] line per criterion. Exit status 0 iff all pass.
//
// Usage: oscwave_acceptance [--cli PATH] [--workdir DIR]
//   --cli      path to the batch CLI (exit-code and determinism criteria)
//   --workdir  scratch directory for config/output files
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oscwave/hermite.hpp"
#include "oscwave/isometry.hpp"
#include "oscwave/kernels.hpp"
#include "oscwave/model.hpp"
#include "oscwave/noise.hpp"

using namespace oscwave;

namespace {

int g_failures = 0;

struct Fail : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void criterion(int id, const std::string& title, double time_limit_s,
               const std::function<std::string()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  try {
    detail = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ok && time_limit_s > 0.0 && secs > time_limit_s) {
    ok = false;
    detail += " [runtime " + std::to_string(secs) + " s exceeds " +
              std::to_string(time_limit_s) + " s]";
  }
  std::printf("[%s] criterion %d (%s): %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw Fail(msg);
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(xs.size());
  for (int i = 0; i < n; ++i) {
    sx += xs[static_cast<size_t>(i)];
    sy += ys[static_cast<size_t>(i)];
    sxx += xs[static_cast<size_t>(i)] * xs[static_cast<size_t>(i)];
    sxy += xs[static_cast<size_t>(i)] * ys[static_cast<size_t>(i)];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

std::string c1_parseval() {
  const int N = 64;
  const double R = std::sqrt(2.0 * N + 1.0) + 10.0;
  const double h = 0.005;
  double worst = 0.0;
  for (double t : {0.5, 1.0, M_PI}) {
    for (double x : {0.0, 0.7, 2.0}) {
      double quad = 0.0;
      const int cols = static_cast<int>(2.0 * R / h) + 1;
      for (int j = 0; j < cols; ++j) {
        const double xi = -R + j * h;
        const double w = (j == 0 || j == cols - 1) ? 0.5 * h : h;
        quad += std::norm(kernel_f1(t, x, xi, N)) * w;
      }
      const std::vector<double> px = hermite::psi_batch(N, x);
      double mode_sum = 0.0;
      for (int n = 0; n <= N; ++n) {
        const double s = std::sin(std::sqrt(2.0 * n + 1.0) * t);
        mode_sum += s * s / (2.0 * n + 1.0) * px[static_cast<size_t>(n)] * px[static_cast<size_t>(n)];
      }
      worst = std::max(worst, std::fabs(quad - mode_sum) / mode_sum);
    }
  }
  require(worst <= 1e-8, "max relative mismatch " + num(worst) + " > 1e-8");
  return "max_rel=" + num(worst) + " over 9 (t,x) pairs, N=64";
}

std::string c2_mode_ode() {
  double worst_dev = 0.0;
  for (int n : {0, 1, 3, 10}) {
    const double r1 = hermite::mode_ode_residual(n, 0.7, 0.02);
    const double r2 = hermite::mode_ode_residual(n, 0.7, 0.01);
    const double r3 = hermite::mode_ode_residual(n, 0.7, 0.005);
    for (double ratio : {r1 / r2, r2 / r3}) {
      require(std::fabs(ratio - 4.0) <= 0.2,
              "n=" + std::to_string(n) + ": ratio " + num(ratio) + " outside 4 +- 0.2");
      worst_dev = std::max(worst_dev, std::fabs(ratio - 4.0));
    }
  }
  return "second-order ratios within 4 +- " + num(worst_dev) + " for n in {0,1,3,10}";
}

std::string c3_isometry_constants() {
  const VarianceReport n0 = variance_1d(M_PI, 0.0, 0);
  const double want = std::sqrt(M_PI) / 2.0;
  require(std::fabs(n0.value - want) <= 1e-10,
          "n=0-only value " + num(n0.value) + " differs from sqrt(pi)/2 by " +
              num(std::fabs(n0.value - want)));
  const VarianceReport full = variance_1d(M_PI, 0.0, 64);
  double series = 0.0;
  for (long n = 1; n <= 1000000; ++n)
    series += 1.0 / (2.0 * n + 1.0) * std::pow(static_cast<double>(n), -1.0 / 6.0);
  series += 3.0 * std::pow(1e6 - 1.0, -1.0 / 6.0);
  const double bound = full.d_cal * M_PI * (std::pow(M_PI, -0.25) + series);
  require(full.value <= bound,
          "I = " + num(full.value) + " exceeds the finiteness bound " + num(bound));
  return "I(pi,0)=" + num(full.value) + " <= bound " + num(bound) +
         "; n0 value within 1e-10 of sqrt(pi)/2";
}

std::string c4_admissibility() {
  const Nu2Report a = admissibility_nu2(power_law_measure(0.3));
  require(a.verdict == Admissibility::admissible, "power_law beta=0.3 not admissible");
  const Nu2Report b = admissibility_nu2(power_law_measure(0.2));
  require(b.verdict == Admissibility::inadmissible, "power_law beta=0.2 not inadmissible");
  const Nu3Report c = admissibility_nu3(radial_power_measure(0.75));
  require(c.verdict == Admissibility::admissible, "radial_power gamma=0.75 not admissible");
  require(c.witness_alpha > 0.25 && c.witness_alpha < 1.0 / 3.0,
          "witness alpha " + num(c.witness_alpha) + " outside (0.25, 1/3)");
  const Nu3Report d = admissibility_nu3(radial_power_measure(0.6));
  require(d.verdict == Admissibility::inadmissible, "radial_power gamma=0.6 not inadmissible");
  return "all four verdicts correct; witness alpha=" + num(c.witness_alpha);
}

struct CliCtx {
  std::string cli;
  std::filesystem::path workdir;
};

int run_cli(const CliCtx& ctx, const std::string& args, const std::string& log_name) {
  const std::string cmd =
      ctx.cli + " " + args + " > " + (ctx.workdir / (log_name + ".log")).string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) throw Fail("failed to launch CLI");
  return WEXITSTATUS(rc);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Fail("missing output file " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string c5_levi_gate(const CliCtx& ctx) {
  const std::string base =
      "command = kernel\n"
      "model.dim = 2\n"
      "model.mu = 1\n"
      "measure.kind = power_law\n"
      "measure.beta = 0.3\n"
      "numerics.n = 4\n"
      "probes = 1,0\n";
  // sanity: the admissible configuration must succeed
  write_file(ctx.workdir / "levi_ok.cfg", base + "model.b = 0.5\n");
  const int ok = run_cli(ctx, "kernel --config " + (ctx.workdir / "levi_ok.cfg").string() +
                                  " --out " + (ctx.workdir / "levi_ok").string(),
                         "levi_ok");
  require(ok == 0, "control run with b=0.5 exited " + std::to_string(ok));
  write_file(ctx.workdir / "levi_eq.cfg", base + "model.b = 1.0\n");
  const int eq = run_cli(ctx, "kernel --config " + (ctx.workdir / "levi_eq.cfg").string() +
                                  " --out " + (ctx.workdir / "levi_eq").string(),
                         "levi_eq");
  require(eq == 2, "b = mu exited " + std::to_string(eq) + ", want 2");
  write_file(ctx.workdir / "levi_hi.cfg", base + "model.b = 1.5\n");
  const int hi = run_cli(ctx, "kernel --config " + (ctx.workdir / "levi_hi.cfg").string() +
                                  " --out " + (ctx.workdir / "levi_hi").string(),
                         "levi_hi");
  require(hi == 2, "b = 1.5 mu exited " + std::to_string(hi) + ", want 2");
  return "b=mu and b=1.5mu both refused with exit 2; b=0.5mu control exits 0";
}

std::string c6_tail_soundness() {
  std::string gaps;
  for (int N : {2, 10, 100}) {
    double tail = 0.0;
    for (long n = N; n <= 1000000; ++n)
      tail += 1.0 / (2.0 * n + 1.0) * std::pow(static_cast<double>(n), -1.0 / 6.0);
    const double majorant = 3.0 * std::pow(N - 1.0, -1.0 / 6.0);
    require(tail <= majorant, "N=" + std::to_string(N) + ": brute tail " + num(tail) +
                                  " exceeds majorant " + num(majorant));
    gaps += " N=" + std::to_string(N) + " gap=" + num(majorant - tail);
  }

  // |value(N) - value(4N)| <= tail_error(N) across the report catalogue
  {
    const VarianceReport lo = variance_1d(1.7, 0.7, 16);
    const VarianceReport hi = variance_1d(1.7, 0.7, 64);
    require(std::fabs(hi.value - lo.value) <= lo.tail_error, "1-d report tail violated");
  }
  {
    const ModelParams p{2, 1.0, 0.0, 0.2};
    const VarianceReport lo = variance_2d(1.0, 0.7, 0.0, 16, p, power_law_measure(0.3));
    const VarianceReport hi = variance_2d(1.0, 0.7, 0.0, 64, p, power_law_measure(0.3));
    require(std::fabs(hi.value - lo.value) <= lo.tail_error, "2-d report tail violated");
  }
  {
    const ModelParams p{3, 1.0, 1.0, 0.2};
    IsometryOptions opts;
    opts.theta_cells = 128;
    const VarianceReport lo = variance_3d(0.8, 0.5, 0.0, 0.0, 8, p, radial_power_measure(0.75), opts);
    const VarianceReport hi = variance_3d(0.8, 0.5, 0.0, 0.0, 32, p, radial_power_measure(0.75), opts);
    require(std::fabs(hi.value - lo.value) <= lo.tail_error, "3-d report tail violated");
  }
  return "brute tails below majorant (" + gaps + " ); report certificates hold in dims 1-3";
}

std::string c7_qn_decay() {
  // finite-window fits carry a log(nu_n/a) transient; a = 0.01 places the
  // window in the asymptotic regime (params are free in this criterion)
  const ModelParams p{3, 1.0, 0.01, 0.0};
  const SpectralMeasureSpec spec = radial_power_measure(0.75);
  IsometryOptions opts;
  opts.qn_theta_cells = 1024;
  std::vector<double> lx, ly;
  for (int n : {8, 11, 16, 23, 32, 45, 64}) {
    const double q = qn_integral(n, p, spec, opts);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(q));
  }
  const double slope = fit_slope(lx, ly);
  require(slope <= -5.0 / 6.0 + 0.05,
          "fitted slope " + num(slope) + " > -5/6 + 0.05 = " + num(-5.0 / 6.0 + 0.05));
  return "fitted slope " + num(slope) + " <= " + num(-5.0 / 6.0 + 0.05) +
         " over n in [8,64] (mu=1, a=0.01, b=0)";
}

std::string c8_monte_carlo() {
  std::string detail;
  {  // 1-d model: everything pinned by the criterion
    const int N = 8;
    const TruncatedKernel k = make_kernel(ModelParams{1, 1.0, 0.0, 0.0}, lebesgue_measure(), N, 3.2);
    NoiseGridSpec gs;
    gs.lambda_cells = 64;
    const NoiseGrid grid = build_noise_grid(k, gs, 1.0 / 256, 805, 20260810);
    const Probe probes[3] = {{1.0, 0.0, 0.0, 0.0}, {M_PI, 0.0, 0.0, 0.0}, {1.0, 0.7, 0.0, 0.0}};
    double oracle[3];
    for (int i = 0; i < 3; ++i) oracle[i] = variance_1d(probes[i].t, probes[i].x, N).value;
    const FieldEnsemble ens = sample_field(k, grid, probes, 10000, 0, oracle);
    for (int i = 0; i < 3; ++i) {
      const double budget = std::fabs(ens.grid_oracle[static_cast<size_t>(i)] - oracle[i]);
      const double gap = std::fabs(ens.variance[static_cast<size_t>(i)] - oracle[i]);
      const double tol = 4.0 * ens.stderr_of_var[static_cast<size_t>(i)] + budget;
      require(gap <= tol, "1-d probe " + std::to_string(i) + ": |emp-oracle| " + num(gap) +
                              " > 4 stderr + budget " + num(tol));
    }
    detail += "1-d ok at 3 probes (1e4 replicas, dt=1/256)";
  }
  {  // 2-d model, power_law beta=0.3 at (t=1, x=0, y=0)
    const ModelParams p{2, 1.0, 0.0, 0.0};
    const SpectralMeasureSpec spec = power_law_measure(0.3);
    const int N = 8;
    const TruncatedKernel k = make_kernel(p, spec, N, 1.0);
    NoiseGridSpec gs;
    gs.lambda_cells = 32;
    gs.eta_cells = 192;
    gs.eta_cutoff = 1e30;
    const NoiseGrid grid = build_noise_grid(k, gs, 1.0 / 64, 64, 60284);
    require(grid.discarded_tail_fraction < 1e-3,
            "discarded tail fraction " + num(grid.discarded_tail_fraction) + " >= 1e-3");
    const Probe probes[1] = {{1.0, 0.0, 0.0, 0.0}};
    const VarianceReport rep = variance_2d(1.0, 0.0, 0.0, N, p, spec);
    const double oracle[1] = {rep.value};
    const FieldEnsemble ens = sample_field(k, grid, probes, 2500, 0, oracle);
    const double budget = std::fabs(ens.grid_oracle[0] - oracle[0]) + rep.quad_error;
    const double gap = std::fabs(ens.variance[0] - oracle[0]);
    const double tol = 4.0 * ens.stderr_of_var[0] + budget;
    require(gap <= tol, "2-d: |emp-oracle| " + num(gap) + " > 4 stderr + budget " + num(tol));
    detail += "; 2-d gap=" + num(gap) + " <= " + num(tol);
  }
  return detail;
}

std::string c9_continuity() {
  {  // S1 along h = 2^-k
    std::vector<double> s;
    for (int k = 0; k <= 10; ++k)
      s.push_back(continuity_modulus_1d(1.0, 0.5, std::pow(2.0, -k), 64));
    for (int k = 0; k < 10; ++k)
      require(s[static_cast<size_t>(k + 1)] < s[static_cast<size_t>(k)],
              "S1 not monotone at rung " + std::to_string(k));
    require(s[10] < 1e-3 * s[0], "S1(2^-10)/S1(1) = " + num(s[10] / s[0]) + " >= 1e-3");
  }
  const ModelParams p{3, 1.0, 1.0, 0.0};
  const SpectralMeasureSpec spec = radial_power_measure(0.75);
  IsometryOptions opts;
  opts.theta_cells = 64;
  opts.radial_cells_per_octave = 24;
  std::vector<double> j1s, j2s;
  for (int k = 0; k <= 10; ++k) {
    const double h = std::pow(2.0, -k);
    const IncrementMoments m = increment_moments_3d(1.0, h, 0.0, 0.5, 0.0, 0.0, 16, p, spec, opts);
    j1s.push_back(m.j1);
    j2s.push_back(m.j2);
  }
  for (int k = 0; k < 10; ++k) {
    require(j1s[static_cast<size_t>(k + 1)] < j1s[static_cast<size_t>(k)],
            "J1 not monotone at rung " + std::to_string(k));
    require(j2s[static_cast<size_t>(k + 1)] < j2s[static_cast<size_t>(k)],
            "J2 not monotone at rung " + std::to_string(k));
  }
  require(j1s[10] < 1e-3 * j1s[0], "J1 ratio " + num(j1s[10] / j1s[0]) + " >= 1e-3");
  require(j2s[10] < 1e-3 * j2s[0], "J2 ratio " + num(j2s[10] / j2s[0]) + " >= 1e-3");
  return "S1, J1, J2 monotone over k=0..10; end ratios " + num(j1s[10] / j1s[0]) + ", " +
         num(j2s[10] / j2s[0]);
}

std::string c10_determinism(const CliCtx& ctx) {
  const std::string cfg =
      "command = simulate\n"
      "model.dim = 1\n"
      "numerics.n = 4\n"
      "numerics.dt = 0.03125\n"
      "numerics.replicas = 300\n"
      "numerics.seed = 97\n"
      "grid.lambda_cells = 32\n"
      "probes = 1,0 ; 0.5,0.3\n";
  write_file(ctx.workdir / "det.cfg", cfg);
  const std::string out1 = (ctx.workdir / "det_run1").string();
  const std::string out2 = (ctx.workdir / "det_run2").string();
  const std::string base = "simulate --config " + (ctx.workdir / "det.cfg").string();
  require(run_cli(ctx, base + " --out " + out1 + " --threads 1", "det1") == 0, "run 1 failed");
  require(run_cli(ctx, base + " --out " + out2 + " --threads 4", "det2") == 0, "run 2 failed");
  for (const char* suffix : {"_simulate.csv", "_samples.csv"}) {
    const std::string a = read_file(out1 + suffix);
    const std::string b = read_file(out2 + suffix);
    require(!a.empty() && a == b, std::string(suffix) + " differs between thread counts");
  }
  // variance outputs are byte-identical across reruns as well
  const std::string vcfg = "command = variance\nmodel.dim = 1\nnumerics.n = 16\nprobes = 1,0.7\n";
  write_file(ctx.workdir / "detv.cfg", vcfg);
  const std::string vbase = "variance --config " + (ctx.workdir / "detv.cfg").string();
  require(run_cli(ctx, vbase + " --out " + out1 + "v", "det3") == 0, "variance run 1 failed");
  require(run_cli(ctx, vbase + " --out " + out2 + "v", "det4") == 0, "variance run 2 failed");
  require(read_file(out1 + "v_variance.csv") == read_file(out2 + "v_variance.csv"),
          "variance CSV differs between reruns");
  return "simulate byte-identical for --threads 1 vs 4; variance byte-identical across reruns";
}

}  // namespace

int main(int argc, char** argv) {
  CliCtx ctx;
  ctx.cli = "./oscwave";
  ctx.workdir = "acceptance_work";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") ctx.cli = argv[i + 1];
    if (flag == "--workdir") ctx.workdir = argv[i + 1];
  }
  std::filesystem::create_directories(ctx.workdir);

  criterion(1, "Parseval identity, 1-d", 5.0, c1_parseval);
  criterion(2, "mode ODE second-order residuals", 1.0, c2_mode_ode);
  criterion(3, "isometry finiteness constants", 1.0, c3_isometry_constants);
  criterion(4, "admissibility classifier", 30.0, c4_admissibility);
  criterion(5, "Levi condition gate, exit code 2", 0.0, [&] { return c5_levi_gate(ctx); });
  criterion(6, "tail-certificate soundness", 10.0, c6_tail_soundness);
  criterion(7, "q_n decay exponent", 60.0, c7_qn_decay);
  criterion(8, "Monte Carlo vs oracle", 600.0, c8_monte_carlo);
  criterion(9, "L2-continuity moduli", 60.0, c9_continuity);
  criterion(10, "determinism across thread counts", 0.0, [&] { return c10_determinism(ctx); });

  if (g_failures != 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
