// Semi-analytic Dalang-isometry second moments: the time integral is always
// closed-form per mode (int_0^t sin^2 = t/2 - sin(2wt)/(4w)); only frequency
// integrals are numeric, on symmetric geometric grids (1-d in eta_hat) or
// polar product grids (r geometric, theta uniform) that exclude eta_hat = 0.
// These reports are the exact oracle the Monte Carlo sampler is validated
// against.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "oscwave/kernels.hpp"
#include "oscwave/model.hpp"

namespace oscwave {

struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IsometryOptions {
  int cells_per_octave = 64;        // eta grid (2-d model)
  int radial_cells_per_octave = 32; // r grid (3-d model)
  int theta_cells = 256;
  int qn_theta_cells = 1024;
  int max_octaves = 900;            // cap keeps exp(u) inside double range
  double increment_tol = 1e-12;     // relative octave-increment stopping rule
  double center_eps = 1e-6;
};

struct VarianceReport {
  ModelParams params;
  SpectralMeasureSpec measure;
  double t = 0.0, x = 0.0, y = 0.0, z = 0.0;
  int N = 0;
  double value = 0.0;              // pairwise sum of per_mode
  std::vector<double> per_mode;    // contributions n = 0..N, all >= 0
  double t0 = 0.0;                 // n = 0 contribution, reported separately
  double quad_error = 0.0;         // frequency-quadrature error estimate
  double tail_error = 0.0;         // certified truncation tail at N
  double d_cal = 0.0;
};

// I(t, x) = sum_n Psi_n^2(x) (2n+1)^{-1} [t/2 - sin(2 sqrt(2n+1) t)/(4 sqrt(2n+1))].
VarianceReport variance_1d(double t, double x, int N);

// I2 / I3; the measure must pass its admissibility check (construction
// precondition - InadmissibleMeasure otherwise). Quadrature non-convergence
// raises QuadratureFailure with a partial trace summary.
VarianceReport variance_2d(double t, double x, double y, int N, const ModelParams& params,
                           const SpectralMeasureSpec& spec, const IsometryOptions& opts = {});
VarianceReport variance_3d(double t, double x, double y, double z, int N,
                           const ModelParams& params, const SpectralMeasureSpec& spec,
                           const IsometryOptions& opts = {});

// q_n = int |eta|^{1/2} / ((2n+1) mu |eta| + a zeta^2 + b eta) nu3(d eta, d zeta).
double qn_integral(int n, const ModelParams& params, const SpectralMeasureSpec& spec,
                   const IsometryOptions& opts = {});

// Space modulus S1(t, x, h) and time modulus S1'(t, x, h), truncated at N.
double continuity_modulus_1d(double t, double x, double h, int N);
double continuity_modulus_1d_time(double t, double x, double h, int N);

// S3 / S3' at a fixed frequency pair (eta_hat, zeta_hat). The time modulus
// uses the first-power rho_n denominator.
double continuity_modulus_3d(double t, double eta_hat, double zeta_hat, double x, double h, int N,
                             const ModelParams& params);
double continuity_modulus_3d_time(double t, double eta_hat, double zeta_hat, double x, double h,
                                  int N, const ModelParams& params);

struct IncrementMoments {
  double j1 = 0.0;     // time increment over [0, t] via the sine-increment modulus
  double j2 = 0.0;     // time increment over [t, t+h] = variance at horizon h
  double space = 0.0;  // spatial increment E|u(x+h)-u(x)|^2
};

IncrementMoments increment_moments_1d(double t, double h_time, double h_space, double x, int N);
IncrementMoments increment_moments_2d(double t, double h_time, double h_space, double x, double y,
                                      int N, const ModelParams& params,
                                      const SpectralMeasureSpec& spec,
                                      const IsometryOptions& opts = {});
IncrementMoments increment_moments_3d(double t, double h_time, double h_space, double x, double y,
                                      double z, int N, const ModelParams& params,
                                      const SpectralMeasureSpec& spec,
                                      const IsometryOptions& opts = {});

// Per-mode CSV: header (n, contribution, cumulative, tail_bound), one row per
// mode, deterministic order. Provenance comments are the caller's business.
void write_mode_csv(std::ostream& os, const VarianceReport& report);

}  // namespace oscwave
