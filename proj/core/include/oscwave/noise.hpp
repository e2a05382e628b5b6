// White-in-time, spatially colored Gaussian noise on a frequency grid, and
// Monte Carlo sampling of the random field solutions by discretized
// stochastic convolution in Fourier space.
//
// Cells come in +-frequency pairs carrying conjugate noise increments (the
// real-field constraint); the eta_hat = 0 line is excluded. In dims 2-3 the
// xi_0 direction is partitioned per frequency cell at the kernel's natural
// scale: xi_0 = |eta_hat|^{1/2} lambda with lambda uniform on [-L, L],
// L = sqrt(2N+1) + lambda_pad, outside of which Psi_n(xi_0/|eta_hat|^{1/2})
// is super-exponentially small.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "oscwave/kernels.hpp"

namespace oscwave {

struct NoiseCell {
  double xi0 = 0.0;
  double eta = 0.0;
  double zeta = 0.0;
  double mass = 0.0;  // nu(cell) >= 0
};

struct NoiseGridSpec {
  int lambda_cells = 64;     // xi0 cells: per eta-cell (dims 2-3) or on [-R0, R0] (dim 1)
  double lambda_pad = 10.0;  // L (or R0) = sqrt(2N+1) + lambda_pad
  double eta_min = 1e-6;     // excluded central band |eta| < eta_min
  double eta_cutoff = 1e30;  // dim 2 frequency cutoff (majorant discard < 1e-3)
  int eta_cells = 192;       // geometric eta cells per side (dim 2)
  double radial_cutoff = 1e14;  // dim 3
  int radial_cells = 128;       // geometric r cells (dim 3)
  int theta_cells = 32;        // full circle (dim 3); even
};

struct NoiseGrid {
  int dim = 1;
  std::vector<NoiseCell> cells;  // cells[2k], cells[2k+1] are conjugate partners
  double dt = 0.0;
  int steps = 0;
  uint64_t seed = 0;
  double total_mass = 0.0;
  double discarded_tail_fraction = 0.0;  // majorant-weighted mass beyond the cutoffs
};

struct Probe {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct FieldEnsemble {
  std::vector<Probe> probes;
  std::vector<std::vector<double>> samples;  // [probe][replica]
  std::vector<uint64_t> replica_seeds;
  std::vector<double> mean, variance, stderr_of_var, mean_stderr, imag_residue;
  std::vector<double> grid_oracle;  // exact second moment of the discrete scheme
};

// Masses integrate the nu density over each cell (midpoint rule). The
// measure must pass its admissibility check and, for real-field synthesis,
// must be even; bounded supports must lie inside the cutoff.
NoiseGrid build_noise_grid(const TruncatedKernel& kernel, const NoiseGridSpec& gspec, double dt,
                           int steps, uint64_t seed);

// Exact second moment of the discretized stochastic convolution at a probe:
// sum_steps sum_cells |F(t - s_mid, probe; cell)|^2 mass dt. Deterministic;
// |continuum oracle - grid_second_moment| is the discretization budget.
double grid_second_moment(const TruncatedKernel& kernel, const NoiseGrid& grid, const Probe& probe);

// Monte Carlo sampling. Replica r accumulates
//   u = sum_s sum_cells F(t - s_mid, probe; cell) dW(r, s, cell)
// with dW complex Gaussian of variance mass*dt, Hermitian-paired across
// +-cells, streams keyed (seed, replica, step, pair). Fails fast when a
// probe lies beyond the horizon steps*dt, when dims 2-3 are requested with
// b != 0 (the kernel loses Hermitian symmetry and no real field exists), or
// when the empirical variance exceeds 10x the supplied oracle.
FieldEnsemble sample_field(const TruncatedKernel& kernel, const NoiseGrid& grid,
                           std::span<const Probe> probes, int replicas, int threads = 0,
                           std::span<const double> oracle = {});

struct SweepRung {
  double dt = 0.0;
  int cells = 0;
  double empirical_var = 0.0;
  double stderr_of_var = 0.0;
  double grid_oracle = 0.0;
  double oracle = 0.0;
  double discretization_gap = 0.0;  // |grid_oracle - oracle|
  double empirical_gap = 0.0;       // |empirical_var - oracle|
};

// Refinement study over a strictly refining (dt, cells) ladder at one probe;
// the oracle column is discretization-free and stays constant across rungs.
std::vector<SweepRung> convergence_sweep(const TruncatedKernel& kernel, const Probe& probe,
                                         double oracle_value,
                                         std::span<const std::pair<double, int>> ladder,
                                         int replicas, uint64_t seed, int threads = 0);

}  // namespace oscwave
