// Operator parameters, the strict Levi gate |b| < mu, mode weights
// rho_n(eta, zeta) = mu |eta| (2n+1) + a zeta^2 - b eta, and the spectral
// measure catalogue with its admissibility classifiers.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "oscwave/quadrature.hpp"

namespace oscwave {

struct ModelParams {
  int dim = 1;      // 1, 2 or 3
  double mu = 1.0;  // harmonic-oscillator trace coefficient, > 0
  double a = 0.0;   // zeta^2 coefficient, > 0 when dim == 3
  double b = 0.0;   // first-order coefficient, |b| < mu when dim >= 2
};

struct LeviError : std::runtime_error {
  double margin;  // mu - |b| (<= 0 on violation)
  LeviError(const std::string& msg, double m) : std::runtime_error(msg), margin(m) {}
};

struct InadmissibleMeasure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LeviReport {
  bool pass = false;
  double margin = 0.0;  // mu - |b|
  std::string message;
};

// Strict Levi condition |b| < mu. dim == 1 always passes (no free
// coefficients). Reports, never throws.
LeviReport levi_check(const ModelParams& params);

// Validates ranges (mu > 0, a > 0 for dim 3) and the Levi condition.
// Throws std::invalid_argument / LeviError.
void validate_params(const ModelParams& params);

// rho_n(eta, zeta). dims 2 and 3 only; dim == 2 requires zeta == 0.
// Throws LeviError when the Levi gate fails.
double rho(const ModelParams& params, int n, double eta, double zeta);

// ---------------------------------------------------------------------------
// Spectral measures.  dim_hat is the dimension of the non-Lebesgue marginal:
// 0 for the 1-d model (nu_1 = Lebesgue in xi_0 only), 1 for nu_hat_2, 2 for
// the radial nu_hat_3. Catalogue is closed so every quadrature carries an
// analytic tail majorant.
// ---------------------------------------------------------------------------

enum class MeasureKind { lebesgue, power_law, radial_power, compact, table };

struct SpectralMeasureSpec {
  MeasureKind kind = MeasureKind::lebesgue;
  int dim_hat = 0;
  double beta = 0.0;    // power_law: density (1 + eta^2)^{-beta}
  double gamma = 0.0;   // radial_power: w(s) = (1 + s)^{-gamma}, s = |eta|^2 + |zeta|^2
  double lo = 0.0;      // compact/table support (dim_hat 1) or 0 (radial)
  double hi = 0.0;      // upper support bound / disc radius
  double level = 1.0;   // compact: constant density value
  std::vector<double> weights;  // table: stepwise density over [lo, hi] (or [0, hi] radial)

  // dim_hat == 1 marginal density at eta, and log of it at eta = sign*e^u
  // (stable for u far beyond the double range of e^u).
  double density(double eta) const;
  double log_density(double u, int sign) const;

  // dim_hat == 2 radial profile w(r^2) at r, and log of it at r = e^u.
  double radial_density(double r) const;
  double log_radial_density(double u) const;

  // nu mass of a cell: int_{lo..hi} rho(sign*eta) d eta (0 < lo < hi).
  // Exact for bounded kinds (support edges land inside cells), midpoint rule
  // for the smooth unbounded kinds.
  double mass(double lo_abs, double hi_abs, int sign) const;
  // int_{rlo..rhi} w(r^2) r dr, same convention.
  double radial_mass(double rlo, double rhi) const;
};

SpectralMeasureSpec lebesgue_measure();
SpectralMeasureSpec power_law_measure(double beta);
SpectralMeasureSpec radial_power_measure(double gamma);
SpectralMeasureSpec compact_measure(double lo, double hi, double level);
SpectralMeasureSpec compact_radial_measure(double radius, double level);
SpectralMeasureSpec table_measure(double lo, double hi, std::vector<double> weights);
SpectralMeasureSpec radial_table_measure(double radius, std::vector<double> weights);

// Throws std::invalid_argument on malformed specs (negative weights, empty
// support, wrong dim_hat for the kind).
void validate_spec(const SpectralMeasureSpec& spec);

enum class Admissibility { admissible, inadmissible, undecided };

struct Nu2Report {
  Admissibility verdict = Admissibility::undecided;
  // stated hypothesis: int (1 + |eta|^{1/2})^{-1} nu2(d eta)
  quad::DoublingResult hypothesis;
  // proof-level requirement int |eta|^{-1/2} nu2(d eta), reported separately
  quad::DoublingResult proof_level;
  double proof_level_value = 0.0;  // classifier value + analytic near-zero cell
  Admissibility proof_level_verdict = Admissibility::undecided;
};

struct Nu3Report {
  Admissibility verdict = Admissibility::undecided;
  double witness_alpha = 0.0;  // smallest grid alpha with a convergent verdict
  double delta = 0.0;          // implied 0 < delta < 1/6 for the moment check
  quad::DoublingResult at_witness;
  bool moment_ok = false;      // int_0^inf rho^{1/3+delta} w(rho^2) d rho < inf
  double moment_value = 0.0;
};

Nu2Report admissibility_nu2(const SpectralMeasureSpec& spec, const quad::DoublingOptions& opts = {});
Nu3Report admissibility_nu3(const SpectralMeasureSpec& spec, const quad::DoublingOptions& opts = {});

// Certified one-sided moments used by tail certificates. value is a midpoint
// estimate, error an upper bound on |truth - value| (analytic catalogue
// tails + grid refinement), finite the analytic convergence verdict.
struct MomentEstimate {
  double value = 0.0;
  double error = 0.0;
  bool finite = false;
};

// int |eta|^s nu2(d eta) over R (dim_hat == 1).
MomentEstimate nu2_abs_moment(const SpectralMeasureSpec& spec, double s);
// int_0^inf r^s w(r^2) dr (dim_hat == 2).
MomentEstimate nu3_radial_moment(const SpectralMeasureSpec& spec, double s);

}  // namespace oscwave
