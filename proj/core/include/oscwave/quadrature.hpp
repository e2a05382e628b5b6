// Quadrature utilities shared by the measure classifiers and the isometry
// integrals: an improper-integral convergence classifier on geometric
// (cutoff-doubling) grids, a tanh-sinh rule for endpoint-singular finite
// integrals, and deterministic pairwise summation.
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace oscwave::quad {

enum class IntegralVerdict { converged, diverged, undecided };

struct OctaveSample {
  double u_end;       // log upper cutoff of this octave
  double increment;   // integral contribution of the octave
  double partial;     // accumulated integral up to u_end
};

struct DoublingResult {
  IntegralVerdict verdict = IntegralVerdict::undecided;
  double value = 0.0;  // accumulated integral at the last cutoff
  int octaves = 0;
  std::vector<OctaveSample> trace;
};

struct DoublingOptions {
  int cells_per_octave = 32;
  double rel_tol = 1e-9;   // convergent: 3 successive increments below rel_tol * total
  int diverge_window = 4;  // divergent: increments non-decreasing over this many octaves
  int max_octaves = 20000;
  int min_octaves = 4;
};

// Classifies int_{exp(u0)}^{inf} g(r) dr by midpoint sums over octaves
// [2^k R0, 2^{k+1} R0]. The integrand is supplied in log coordinates:
// f_log(u) = g(e^u) * e^u, which must be evaluable for arbitrarily large u
// (cutoffs can exceed the double range as plain reals). The convergence rule
// fires before the divergence rule, so integrands that are exactly zero past
// some point classify as converged.
DoublingResult classify_improper(const std::function<double(double)>& f_log, double u0,
                                 const DoublingOptions& opts = {});

// Tanh-sinh (double-exponential) quadrature on [a, b]; tolerates integrable
// endpoint singularities. levels = number of dyadic refinements.
double tanh_sinh(const std::function<double(double)>& f, double a, double b, int levels = 10);

// Sum in a fixed pairwise-tree order (bit-reproducible regardless of how the
// values were produced).
double pairwise_sum(std::span<const double> v);

}  // namespace oscwave::quad
