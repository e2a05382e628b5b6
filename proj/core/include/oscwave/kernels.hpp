// Truncated Hermite-series evaluation of the fundamental solutions E1, E2^,
// E3^ and their Fourier-space forms F1, F2, F3, plus the per-mode amplitude
// sin(sqrt(rho) t)/sqrt(rho) and the truncation-tail machinery.
//
// Heavyside convention H(0) = 1; every kernel vanishes identically for t < 0.
#pragma once

#include <complex>

#include "oscwave/model.hpp"

namespace oscwave {

// sin(sqrt(rho) t)/sqrt(rho); Taylor branch below rho = 1e-12 covers the
// removable rho -> 0 singularity. Rejects rho < 0 (Levi violation upstream).
double mode_amplitude(double rho, double t);

// T(rho, t) = int_0^t sin^2(sqrt(rho) u) du = t/2 - sin(2 sqrt(rho) t)/(4 sqrt(rho)),
// and T(rho, t)/rho; series branches remove the small-rho cancellation.
double sin2_time_integral(double rho, double t);
double sin2_time_integral_over_rho(double rho, double t);

// (sin(w(t+h)) - sin(w t))^2 for w = sqrt(rho), evaluated cancellation-free.
double sin_increment_sq(double rho, double t, double h);

// int_0^t (sin(w(u+h)) - sin(w u))^2 du, closed form per mode, and the same
// divided by rho (stable as rho -> 0).
double sin_increment_time_integral(double rho, double t, double h);
double sin_increment_time_integral_over_rho(double rho, double t, double h);

// E_1(t, x; x_0), modes 0..N.
double kernel_e1(double t, double x, double x0, int N);

// F_1(t, x; xi_0) = F E_1(t, x; .)(xi_0) under the unitary eigenrelation
// F Psi_n = (-i)^n Psi_n.
std::complex<double> kernel_f1(double t, double x, double xi0, int N);

// F_2 / F_3; eta_hat = 0 is rejected (the xi_0/|eta_hat|^{1/2} argument is
// undefined there; the set is measure-zero and excluded by quadrature design).
std::complex<double> kernel_f2(double t, double x, double y, double xi0, double eta_hat, int N,
                               const ModelParams& params);
std::complex<double> kernel_f3(double t, double x, double y, double z, double xi0, double eta_hat,
                               double zeta_hat, int N, const ModelParams& params);

// Partially Fourier-transformed kernels E2^ / E3^ (zeta = 0 for dim 2).
double kernel_e_hat(double t, double x, double eta, double zeta, double x0, int N,
                    const ModelParams& params);

// Integral-comparison majorant of the tail series
// sum_{n>=N} (2n+1)^{-1} n^{-1/6} <= 3 (N-1)^{-1/6}, in ||.||_0 units:
// tail_bound = d_cal * t * 3 * (N-1)^{-1/6}. Requires N >= 2.
double tail_bound(int N, double t, double d_cal);

// Smallest N >= 2 with tail_bound(N, t, d_cal) <= tol; refuses N > 1e8.
int choose_truncation(double tol, double t, double d_cal);

struct TruncatedKernel {
  ModelParams params;
  SpectralMeasureSpec measure;
  int N = 0;
  double horizon = 0.0;
  double d_cal = 0.0;            // calibrated sup-bound constant (n_max = 4N)
  double tail_certificate = 0.0; // ||.||_0-units truncation bound at N
};

// Construction gate: throws LeviError on |b| >= mu and InadmissibleMeasure
// when the measure fails its admissibility check (dims 2 and 3).
TruncatedKernel make_kernel(const ModelParams& params, const SpectralMeasureSpec& measure, int N,
                            double horizon);
TruncatedKernel make_kernel_tol(const ModelParams& params, const SpectralMeasureSpec& measure,
                                double tol, double horizon);

// Model-specific closed-form tail majorant behind tail_certificate:
//   dim 1: d_cal t 3 (N-1)^{-1/6}
//   dim 2: (d_cal t C_nu / (8 pi^2 mu)) 6 (N-1)^{-1/6},  C_nu = int |eta|^{-1/2} nu2
//   dim 3: (d_cal t C^ / (4 pi^2)) (N-1)^{-(p-5/6)} / (p-5/6)  via the
//          Young-inequality constants of the q_n bound.
double norm_tail_bound(const ModelParams& params, const SpectralMeasureSpec& measure, int N,
                       double t, double d_cal);

// The same majorant as coeff * (N-1)^{-exponent}, plus the n = 1 single-mode
// majorant (used when reporting tails for truncations below N = 2).
struct TailMajorant {
  double coeff = 0.0;
  double exponent = 1.0 / 6.0;
  double mode1 = 0.0;
  double at(int N) const;
};
TailMajorant tail_majorant(const ModelParams& params, const SpectralMeasureSpec& measure, double t,
                           double d_cal);

}  // namespace oscwave
