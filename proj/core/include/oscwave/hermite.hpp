// Normalized Hermite functions Psi_n (harmonic-oscillator eigenfunctions) and
// the analytic facts the kernel series rely on: orthonormal three-term
// recurrence, sup-norm calibration, delta partial sums, mode-ODE residuals.
//
// Psi_0(x) = pi^{-1/4} e^{-x^2/2}
// Psi_{n+1}(x) = x sqrt(2/(n+1)) Psi_n(x) - sqrt(n/(n+1)) Psi_{n-1}(x)
//
// The recurrence is carried on Gaussian-free scaled values with a shared
// power-of-two exponent, so evaluation stays accurate far outside the
// oscillatory region where e^{-x^2/2} alone would underflow (|x| up to ~60
// is needed for n ~ 2000 turning points). Values below ~1e-300 flush to 0.
#pragma once

#include <vector>

namespace oscwave::hermite {

// Psi_n(x). Throws std::invalid_argument for n < 0 or non-finite x.
double psi(int n, double x);

// Psi_0(x)..Psi_{n_max}(x) in one recurrence pass. Element n is bitwise
// identical to psi(n, x).
std::vector<double> psi_batch(int n_max, double x);
void psi_batch(int n_max, double x, std::vector<double>& out);

// sum_{n=0}^{N} Psi_n(x) Psi_n(x0): partial sum of the delta expansion.
double delta_partial_sum(int N, double x, double x0);

// Central-difference residual |Psi_n''(x) - x^2 Psi_n(x) + (2n+1) Psi_n(x)|,
// O(h^2) for smooth h ranges.
double mode_ode_residual(int n, double x, double h);

// Empirical constants C, D with C n^{-1/6} < max_x Psi_n^2(x) < D n^{-1/6}
// for 1 <= n <= n_max. max_psi2[n] holds the located per-mode maximum
// (max_psi2[0] = pi^{-1/2}).
struct SupBoundCalibration {
  int n_max = 0;
  double c = 0.0;
  double d = 0.0;
  std::vector<double> max_psi2;
};

// Calibrates on a dense grid over the oscillatory region |x| <= sqrt(2n+1)+5
// with parabolic peak refinement. Requires n_max >= 10. Results are cached;
// the cache is published once per n_max and safe to read concurrently.
// Throws std::runtime_error if the fitted D exceeds a sanity cap (signals
// recurrence instability).
const SupBoundCalibration& calibrate_sup_bound(int n_max);

}  // namespace oscwave::hermite
