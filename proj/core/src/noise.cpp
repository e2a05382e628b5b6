#include "oscwave/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "oscwave/hermite.hpp"
#include "oscwave/quadrature.hpp"
#include "oscwave/rng.hpp"

namespace oscwave {

namespace {

bool measure_is_even(const SpectralMeasureSpec& spec) {
  switch (spec.kind) {
    case MeasureKind::lebesgue:
    case MeasureKind::power_law:
    case MeasureKind::radial_power:
      return true;
    case MeasureKind::compact:
      return spec.dim_hat == 2 || spec.lo == -spec.hi;
    case MeasureKind::table: {
      if (spec.dim_hat == 2) return true;
      if (spec.lo != -spec.hi) return false;
      const size_t n = spec.weights.size();
      for (size_t i = 0; i < n / 2; ++i) {
        if (spec.weights[i] != spec.weights[n - 1 - i]) return false;
      }
      return true;
    }
  }
  return false;
}

double support_max(const SpectralMeasureSpec& spec) {
  if (spec.kind == MeasureKind::compact || spec.kind == MeasureKind::table)
    return std::max(std::fabs(spec.lo), std::fabs(spec.hi));
  return std::numeric_limits<double>::infinity();
}

// majorant-weighted mass fraction outside the frequency cutoff (advisory)
double discarded_fraction(const TruncatedKernel& kernel, double cutoff) {
  const SpectralMeasureSpec& spec = kernel.measure;
  switch (kernel.params.dim) {
    case 1: {
      const double gap = cutoff - std::sqrt(2.0 * kernel.N + 1.0);
      return std::exp(-0.5 * gap * gap);
    }
    case 2: {
      if (spec.kind != MeasureKind::power_law) return 0.0;  // bounded support inside cutoff
      const double expo = 2.0 * spec.beta - 0.5;
      const MomentEstimate m = nu2_abs_moment(spec, -0.5);
      const double tail = 2.0 * std::pow(cutoff, -expo) / expo;
      return tail / (m.value + tail);
    }
    default: {
      if (spec.kind != MeasureKind::radial_power) return 0.0;
      const double expo = 2.0 * spec.gamma - 1.25;
      const MomentEstimate m = nu3_radial_moment(spec, 0.25);
      const double tail = std::pow(cutoff, -expo) / expo;
      return tail / (m.value + tail);
    }
  }
}

}  // namespace

NoiseGrid build_noise_grid(const TruncatedKernel& kernel, const NoiseGridSpec& gspec, double dt,
                           int steps, uint64_t seed) {
  if (!(dt > 0.0) || steps <= 0) throw std::invalid_argument("build_noise_grid: dt > 0, steps > 0");
  if (gspec.lambda_cells < 2 || gspec.eta_cells < 1 || gspec.radial_cells < 1 ||
      gspec.theta_cells < 2 || gspec.theta_cells % 2 != 0)
    throw std::invalid_argument("build_noise_grid: malformed grid spec");
  const ModelParams& params = kernel.params;
  const SpectralMeasureSpec& spec = kernel.measure;
  if (params.dim >= 2) {
    if (!measure_is_even(spec))
      throw std::invalid_argument("build_noise_grid: real-field synthesis needs an even measure");
    const double cutoff = params.dim == 2 ? gspec.eta_cutoff : gspec.radial_cutoff;
    const double reach = support_max(spec);
    if (std::isfinite(reach) && reach > cutoff)
      throw std::invalid_argument("build_noise_grid: cutoff below the measure support");
    if (params.dim == 2) {
      if (admissibility_nu2(spec).verdict != Admissibility::admissible)
        throw InadmissibleMeasure("build_noise_grid: inadmissible nu2 measure");
    } else {
      if (admissibility_nu3(spec).verdict != Admissibility::admissible)
        throw InadmissibleMeasure("build_noise_grid: inadmissible nu3 measure");
    }
  }

  NoiseGrid grid;
  grid.dim = params.dim;
  grid.dt = dt;
  grid.steps = steps;
  grid.seed = seed;

  const double lambda_max = std::sqrt(2.0 * kernel.N + 1.0) + gspec.lambda_pad;

  if (params.dim == 1) {
    // Lebesgue cells on [-R0, R0], paired (+xi, -xi)
    const int half = gspec.lambda_cells / 2;
    const double width = lambda_max / half;
    grid.cells.reserve(static_cast<size_t>(2 * half));
    for (int k = 0; k < half; ++k) {
      const double xi = (k + 0.5) * width;
      grid.cells.push_back({xi, 0.0, 0.0, width});
      grid.cells.push_back({-xi, 0.0, 0.0, width});
    }
  } else if (params.dim == 2) {
    const double lu0 = std::log(gspec.eta_min);
    const double du = (std::log(gspec.eta_cutoff) - lu0) / gspec.eta_cells;
    const double dl = 2.0 * lambda_max / gspec.lambda_cells;
    grid.cells.reserve(static_cast<size_t>(2 * gspec.eta_cells * gspec.lambda_cells));
    for (int k = 0; k < gspec.eta_cells; ++k) {
      const double elo = std::exp(lu0 + k * du);
      const double ehi = std::exp(lu0 + (k + 1) * du);
      const double eta = 0.5 * (elo + ehi);
      const double root = std::sqrt(eta);
      const double deta = ehi - elo;
      for (int j = 0; j < gspec.lambda_cells; ++j) {
        const double lambda = -lambda_max + (j + 0.5) * dl;
        const double xi = root * lambda;
        // rectangle [xi +- root dl/2] x [elo, ehi], midpoint masses
        const double mp = spec.density(eta) * deta * root * dl;
        const double mm = spec.density(-eta) * deta * root * dl;
        // even measure: mp == mm; keep both evaluations for clarity
        grid.cells.push_back({xi, eta, 0.0, mp});
        grid.cells.push_back({-xi, -eta, 0.0, mm});
      }
    }
  } else {
    const double lu0 = std::log(gspec.eta_min);
    const double du = (std::log(gspec.radial_cutoff) - lu0) / gspec.radial_cells;
    const double dtheta = 2.0 * M_PI / gspec.theta_cells;
    const double dl = 2.0 * lambda_max / gspec.lambda_cells;
    grid.cells.reserve(static_cast<size_t>(gspec.radial_cells) * gspec.theta_cells *
                       gspec.lambda_cells);
    for (int k = 0; k < gspec.radial_cells; ++k) {
      const double rlo = std::exp(lu0 + k * du);
      const double rhi = std::exp(lu0 + (k + 1) * du);
      const double r = 0.5 * (rlo + rhi);
      const double dr = rhi - rlo;
      const double wr = spec.radial_density(r) * r * dr * dtheta;
      for (int m = 0; m < gspec.theta_cells / 2; ++m) {  // theta in [0, pi); partner at +pi
        const double theta = (m + 0.5) * dtheta;
        const double ct = std::cos(theta);
        if (std::fabs(ct) < 1e-12) continue;  // eta_hat = 0 excluded
        const double eta = r * ct;
        const double zeta = r * std::sin(theta);
        const double root = std::sqrt(std::fabs(eta));
        for (int j = 0; j < gspec.lambda_cells; ++j) {
          const double lambda = -lambda_max + (j + 0.5) * dl;
          const double xi = root * lambda;
          const double mass = wr * root * dl;
          grid.cells.push_back({xi, eta, zeta, mass});
          grid.cells.push_back({-xi, -eta, -zeta, mass});
        }
      }
    }
  }

  std::vector<double> masses;
  masses.reserve(grid.cells.size());
  for (const NoiseCell& c : grid.cells) masses.push_back(c.mass);
  grid.total_mass = quad::pairwise_sum(masses);
  grid.discarded_tail_fraction = discarded_fraction(
      kernel, params.dim == 1 ? lambda_max : (params.dim == 2 ? gspec.eta_cutoff : gspec.radial_cutoff));
  return grid;
}

namespace {

struct StepGrid {
  std::vector<double> mid;    // t - s_mid per step
  std::vector<double> width;  // step widths (last may be partial)
};

StepGrid make_steps(double t, double dt) {
  StepGrid sg;
  const int full = static_cast<int>(std::floor(t / dt + 1e-12));
  for (int j = 0; j < full; ++j) {
    sg.mid.push_back(t - (j + 0.5) * dt);
    sg.width.push_back(dt);
  }
  const double rem = t - full * dt;
  if (rem > 1e-12 * std::max(1.0, t)) {
    sg.mid.push_back(t - (full * dt + 0.5 * rem));
    sg.width.push_back(rem);
  }
  return sg;
}

// K[step*cells + cell] = F_dim(t - s_mid, probe; cell frequencies)
std::vector<std::complex<double>> kernel_table(const TruncatedKernel& kernel,
                                               const NoiseGrid& grid, const Probe& probe,
                                               const StepGrid& sg) {
  const int N = kernel.N;
  const size_t ncells = grid.cells.size();
  const size_t nsteps = sg.mid.size();
  static const std::complex<double> phase_i[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};

  std::vector<std::complex<double>> K(nsteps * ncells);
  std::vector<double> pxi, px;
  std::vector<std::complex<double>> coeff(static_cast<size_t>(N) + 1);
  std::vector<double> rhos(static_cast<size_t>(N) + 1);

  for (size_t c = 0; c < ncells; ++c) {
    const NoiseCell& cell = grid.cells[c];
    if (kernel.params.dim == 1) {
      hermite::psi_batch(N, cell.xi0, pxi);
      hermite::psi_batch(N, probe.x, px);
      for (int n = 0; n <= N; ++n) {
        coeff[static_cast<size_t>(n)] =
            phase_i[n & 3] * (pxi[static_cast<size_t>(n)] * px[static_cast<size_t>(n)]);
        rhos[static_cast<size_t>(n)] = 2.0 * n + 1.0;
      }
      for (size_t s = 0; s < nsteps; ++s) {
        std::complex<double> sum = 0.0;
        for (int n = 0; n <= N; ++n)
          sum += coeff[static_cast<size_t>(n)] * mode_amplitude(rhos[static_cast<size_t>(n)], sg.mid[s]);
        K[s * ncells + c] = -sum;
      }
    } else {
      const double abs_eta = std::fabs(cell.eta);
      const double root = std::sqrt(abs_eta);
      hermite::psi_batch(N, cell.xi0 / root, pxi);
      hermite::psi_batch(N, root * probe.x, px);
      const double phase_arg = probe.y * cell.eta + probe.z * cell.zeta;
      const std::complex<double> ph = std::polar(1.0 / (2.0 * M_PI), phase_arg);
      for (int n = 0; n <= N; ++n) {
        // rho_n(-eta_hat, zeta_hat)
        rhos[static_cast<size_t>(n)] = kernel.params.mu * abs_eta * (2.0 * n + 1.0) +
                                       kernel.params.a * cell.zeta * cell.zeta +
                                       kernel.params.b * cell.eta;
        coeff[static_cast<size_t>(n)] =
            ph * phase_i[n & 3] * (pxi[static_cast<size_t>(n)] * px[static_cast<size_t>(n)]);
      }
      for (size_t s = 0; s < nsteps; ++s) {
        std::complex<double> sum = 0.0;
        for (int n = 0; n <= N; ++n)
          sum += coeff[static_cast<size_t>(n)] * mode_amplitude(rhos[static_cast<size_t>(n)], sg.mid[s]);
        K[s * ncells + c] = -sum;
      }
    }
  }
  return K;
}

void check_probe(const NoiseGrid& grid, const Probe& probe) {
  if (probe.t < 0.0 || probe.t > grid.steps * grid.dt * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "sample_field: probe t = " << probe.t << " beyond horizon " << grid.steps * grid.dt;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double grid_second_moment(const TruncatedKernel& kernel, const NoiseGrid& grid,
                          const Probe& probe) {
  check_probe(grid, probe);
  const StepGrid sg = make_steps(probe.t, grid.dt);
  const auto K = kernel_table(kernel, grid, probe, sg);
  const size_t ncells = grid.cells.size();
  std::vector<double> acc;
  acc.reserve(sg.mid.size());
  for (size_t s = 0; s < sg.mid.size(); ++s) {
    double sum = 0.0;
    for (size_t c = 0; c < ncells; ++c) {
      sum += std::norm(K[s * ncells + c]) * grid.cells[c].mass;
    }
    acc.push_back(sum * sg.width[s]);
  }
  return quad::pairwise_sum(acc);
}

FieldEnsemble sample_field(const TruncatedKernel& kernel, const NoiseGrid& grid,
                           std::span<const Probe> probes, int replicas, int threads,
                           std::span<const double> oracle) {
  if (replicas < 2) throw std::invalid_argument("sample_field: need at least 2 replicas");
  if (probes.empty()) throw std::invalid_argument("sample_field: no probes");
  if (kernel.params.dim >= 2 && kernel.params.b != 0.0)
    throw std::invalid_argument(
        "sample_field: b != 0 breaks Hermitian symmetry of the kernel (no real field); "
        "second moments remain available through the isometry oracle");
  if (!oracle.empty() && oracle.size() != probes.size())
    throw std::invalid_argument("sample_field: oracle size mismatch");
  for (const Probe& p : probes) check_probe(grid, p);

  const size_t ncells = grid.cells.size();
  const size_t npairs = ncells / 2;
  FieldEnsemble ens;
  ens.probes.assign(probes.begin(), probes.end());
  ens.samples.assign(probes.size(), std::vector<double>(static_cast<size_t>(replicas)));
  ens.replica_seeds.resize(static_cast<size_t>(replicas));
  for (int r = 0; r < replicas; ++r)
    ens.replica_seeds[static_cast<size_t>(r)] = rng::splitmix64(grid.seed ^ static_cast<uint64_t>(r));

  std::vector<double> imag_peak(probes.size(), 0.0);
  std::vector<double> scale_peak(probes.size(), 0.0);
  ens.grid_oracle.resize(probes.size());

  for (size_t pi = 0; pi < probes.size(); ++pi) {
    const StepGrid sg = make_steps(probes[pi].t, grid.dt);
    const auto K = kernel_table(kernel, grid, probes[pi], sg);
    const size_t nsteps = sg.mid.size();

    {  // exact second moment of the discrete scheme
      std::vector<double> acc;
      acc.reserve(nsteps);
      for (size_t s = 0; s < nsteps; ++s) {
        double sum = 0.0;
        for (size_t c = 0; c < ncells; ++c) sum += std::norm(K[s * ncells + c]) * grid.cells[c].mass;
        acc.push_back(sum * sg.width[s]);
      }
      ens.grid_oracle[pi] = quad::pairwise_sum(acc);
    }

    // per-pair noise scale sqrt(mass * width / 2), per step
    std::vector<double> pair_scale(nsteps * npairs);
    for (size_t s = 0; s < nsteps; ++s) {
      for (size_t k = 0; k < npairs; ++k) {
        pair_scale[s * npairs + k] = std::sqrt(0.5 * grid.cells[2 * k].mass * sg.width[s]);
      }
    }

    const int nworkers =
        std::max(1, threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()));
    std::vector<double> imag_w(static_cast<size_t>(nworkers), 0.0);
    std::vector<double> scale_w(static_cast<size_t>(nworkers), 0.0);

    auto worker = [&](int w, int r_lo, int r_hi) {
      double im_peak = 0.0, sc_peak = 0.0;
      for (int r = r_lo; r < r_hi; ++r) {
        double ure = 0.0, uim = 0.0;
        for (size_t s = 0; s < nsteps; ++s) {
          const std::complex<double>* Ks = &K[s * ncells];
          const double* scl = &pair_scale[s * npairs];
          for (size_t k = 0; k < npairs; ++k) {
            const rng::NormalPair z = rng::counter_normals(
                grid.seed, static_cast<uint64_t>(r), static_cast<uint64_t>(s), static_cast<uint64_t>(k));
            const double wre = scl[k] * z.z0;
            const double wim = scl[k] * z.z1;
            const std::complex<double>& a = Ks[2 * k];
            const std::complex<double>& b = Ks[2 * k + 1];
            // a*W + b*conj(W)
            ure += a.real() * wre - a.imag() * wim + b.real() * wre + b.imag() * wim;
            uim += a.real() * wim + a.imag() * wre - b.real() * wim + b.imag() * wre;
          }
        }
        ens.samples[pi][static_cast<size_t>(r)] = ure;
        im_peak = std::max(im_peak, std::fabs(uim));
        sc_peak = std::max(sc_peak, std::fabs(ure));
      }
      imag_w[static_cast<size_t>(w)] = std::max(imag_w[static_cast<size_t>(w)], im_peak);
      scale_w[static_cast<size_t>(w)] = std::max(scale_w[static_cast<size_t>(w)], sc_peak);
    };

    if (nworkers == 1) {
      worker(0, 0, replicas);
    } else {
      std::vector<std::thread> pool;
      const int chunk = (replicas + nworkers - 1) / nworkers;
      for (int w = 0; w < nworkers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(replicas, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, w, lo, hi);
      }
      for (auto& th : pool) th.join();
    }
    for (int w = 0; w < nworkers; ++w) {
      imag_peak[pi] = std::max(imag_peak[pi], imag_w[static_cast<size_t>(w)]);
      scale_peak[pi] = std::max(scale_peak[pi], scale_w[static_cast<size_t>(w)]);
    }
  }

  // fixed-order (pairwise tree) statistics, independent of the thread split
  for (size_t pi = 0; pi < probes.size(); ++pi) {
    const std::vector<double>& xs = ens.samples[pi];
    const double mean = quad::pairwise_sum(xs) / replicas;
    std::vector<double> sq(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);
    const double var = quad::pairwise_sum(sq) / (replicas - 1);
    ens.mean.push_back(mean);
    ens.variance.push_back(var);
    ens.stderr_of_var.push_back(var * std::sqrt(2.0 / (replicas - 1)));
    ens.mean_stderr.push_back(std::sqrt(var / replicas));
    const double residue =
        imag_peak[pi] / std::max({scale_peak[pi], std::sqrt(ens.grid_oracle[pi]), 1e-300});
    ens.imag_residue.push_back(residue);
    if (residue >= 1e-10) {
      std::ostringstream os;
      os << "sample_field: imaginary residue " << residue << " at probe " << pi
         << " exceeds 1e-10 (non-Hermitian kernel?)";
      throw std::runtime_error(os.str());
    }
    if (!oracle.empty() && oracle[pi] > 0.0 && var > 10.0 * oracle[pi]) {
      std::ostringstream os;
      os << "sample_field: variance blow-up at probe " << pi << ": empirical " << var
         << " > 10x oracle " << oracle[pi] << " (grid oracle " << ens.grid_oracle[pi] << ")";
      throw std::runtime_error(os.str());
    }
  }
  return ens;
}

std::vector<SweepRung> convergence_sweep(const TruncatedKernel& kernel, const Probe& probe,
                                         double oracle_value,
                                         std::span<const std::pair<double, int>> ladder,
                                         int replicas, uint64_t seed, int threads) {
  if (ladder.size() < 2) throw std::invalid_argument("convergence_sweep: need >= 2 rungs");
  for (size_t i = 1; i < ladder.size(); ++i) {
    const bool finer = ladder[i].first <= ladder[i - 1].first && ladder[i].second >= ladder[i - 1].second;
    const bool strict = ladder[i].first < ladder[i - 1].first || ladder[i].second > ladder[i - 1].second;
    if (!finer || !strict)
      throw std::invalid_argument("convergence_sweep: ladder must be strictly refining");
  }
  std::vector<SweepRung> out;
  const Probe probes[1] = {probe};
  for (const auto& [dt, cells] : ladder) {
    NoiseGridSpec gs;
    gs.lambda_cells = cells;
    if (kernel.params.dim == 2) gs.eta_cells = cells;
    if (kernel.params.dim == 3) gs.radial_cells = cells;
    const int steps = static_cast<int>(std::ceil(probe.t / dt - 1e-12));
    const NoiseGrid grid = build_noise_grid(kernel, gs, dt, steps, seed);
    const double orc[1] = {oracle_value};
    const FieldEnsemble ens = sample_field(kernel, grid, probes, replicas, threads, orc);
    SweepRung rung;
    rung.dt = dt;
    rung.cells = cells;
    rung.empirical_var = ens.variance[0];
    rung.stderr_of_var = ens.stderr_of_var[0];
    rung.grid_oracle = ens.grid_oracle[0];
    rung.oracle = oracle_value;
    rung.discretization_gap = std::fabs(rung.grid_oracle - oracle_value);
    rung.empirical_gap = std::fabs(rung.empirical_var - oracle_value);
    out.push_back(rung);
  }
  return out;
}

}  // namespace oscwave
