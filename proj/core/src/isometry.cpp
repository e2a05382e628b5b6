#include "oscwave/isometry.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "oscwave/hermite.hpp"
#include "oscwave/quadrature.hpp"

namespace oscwave {

namespace {

// Deterministic finish: value = pairwise sum of per-mode contributions.
void finish_report(VarianceReport& rep) {
  rep.value = quad::pairwise_sum(rep.per_mode);
  rep.t0 = rep.per_mode.empty() ? 0.0 : rep.per_mode[0];
}

double tail_for_report(const ModelParams& params, const SpectralMeasureSpec& spec, int N, double t,
                       double d_cal) {
  const TailMajorant m = tail_majorant(params, spec, t, d_cal);
  if (N >= 2) return m.at(N);
  // truncations below N = 2: cover mode 1 explicitly
  return m.at(2) + m.mode1;
}

int support_octaves(const SpectralMeasureSpec& spec, double u0) {
  // octaves needed before a bounded support can be declared exhausted
  double reach = 1.0;
  if (spec.kind == MeasureKind::compact || spec.kind == MeasureKind::table) {
    reach = std::max({1.0, std::fabs(spec.lo), std::fabs(spec.hi)});
  }
  return static_cast<int>(std::ceil((std::log(reach) - u0) / std::log(2.0))) + 2;
}

[[noreturn]] void throw_quadrature_failure(const char* where, int octaves, double total,
                                           double last_inc) {
  std::ostringstream os;
  os << where << ": frequency quadrature did not meet the increment rule within " << octaves
     << " octaves (partial integral " << total << ", last octave increment " << last_inc << ")";
  throw QuadratureFailure(os.str());
}

}  // namespace

VarianceReport variance_1d(double t, double x, int N) {
  if (t < 0.0) throw std::invalid_argument("variance_1d: t must be >= 0");
  if (N < 0) throw std::invalid_argument("variance_1d: N must be >= 0");
  VarianceReport rep;
  rep.params = ModelParams{1, 1.0, 0.0, 0.0};
  rep.measure = lebesgue_measure();
  rep.t = t;
  rep.x = x;
  rep.N = N;
  rep.d_cal = hermite::calibrate_sup_bound(std::max(4 * N, 16)).d;

  const std::vector<double> psi = hermite::psi_batch(N, x);
  rep.per_mode.resize(static_cast<size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    const double rho_n = 2.0 * n + 1.0;
    rep.per_mode[static_cast<size_t>(n)] =
        psi[static_cast<size_t>(n)] * psi[static_cast<size_t>(n)] *
        sin2_time_integral_over_rho(rho_n, t);
  }
  finish_report(rep);
  rep.quad_error = 0.0;  // closed form in both time and frequency (Parseval)
  rep.tail_error = tail_for_report(rep.params, rep.measure, N, t, rep.d_cal);
  return rep;
}

// ---------------------------------------------------------------------------
// 2-d model: symmetric geometric eta grid in log coordinates
// ---------------------------------------------------------------------------

namespace {

struct ChannelRequest {
  double t = 0.0;
  double h_time = 0.0;
  double h_space = 0.0;
  bool want_j1 = false;
  bool want_space = false;
};

struct Accumulated {
  std::vector<double> per_mode;
  double j1 = 0.0;
  double space = 0.0;
  double last_increment = 0.0;
  bool converged = false;
  int octaves = 0;
  double total = 0.0;
};

Accumulated accumulate_2d(double x, int N, const ModelParams& params,
                          const SpectralMeasureSpec& spec, const IsometryOptions& opts,
                          int cells_per_octave, const ChannelRequest& req) {
  Accumulated acc;
  acc.per_mode.assign(static_cast<size_t>(N) + 1, 0.0);
  const double ln2 = std::log(2.0);
  const double du = ln2 / cells_per_octave;
  const double u0 = std::log(opts.center_eps);
  const int min_octaves = support_octaves(spec, u0);

  std::vector<double> psi, psi_h;
  int below = 0;
  for (int k = 0; k < opts.max_octaves; ++k) {
    double inc = 0.0;
    for (int j = 0; j < cells_per_octave; ++j) {
      const double u = u0 + k * ln2 + (j + 0.5) * du;
      const double eta = std::exp(u);
      const double elo = std::exp(u - 0.5 * du);
      const double ehi = std::exp(u + 0.5 * du);
      const double root = std::sqrt(eta);
      if (!std::isfinite(root * x)) continue;  // psi underflowed to 0 long before
      hermite::psi_batch(N, root * x, psi);
      if (req.want_space) hermite::psi_batch(N, root * (x + req.h_space), psi_h);
      for (int sign = 0; sign < 2; ++sign) {
        const double sgn = sign == 0 ? 1.0 : -1.0;
        const double w = spec.mass(elo, ehi, sign == 0 ? 1 : -1);  // nu2 cell mass
        if (w == 0.0) continue;
        // rho_n(-eta_hat, 0) at eta_hat = sgn * eta
        for (int n = 0; n <= N; ++n) {
          const double rho_n = params.mu * eta * (2.0 * n + 1.0) + params.b * sgn * eta;
          const double p = psi[static_cast<size_t>(n)];
          const double base = root * w;
          const double term = base * p * p * sin2_time_integral_over_rho(rho_n, req.t);
          acc.per_mode[static_cast<size_t>(n)] += term;
          inc += term;
          if (req.want_j1) {
            acc.j1 += base * p * p * sin_increment_time_integral_over_rho(rho_n, req.t, req.h_time);
          }
          if (req.want_space) {
            const double d = psi_h[static_cast<size_t>(n)] - p;
            acc.space += base * d * d * sin2_time_integral_over_rho(rho_n, req.t);
          }
        }
      }
    }
    acc.total += inc;
    acc.last_increment = inc;
    acc.octaves = k + 1;
    if (k + 1 >= min_octaves && acc.total > 0.0 && inc <= opts.increment_tol * acc.total) {
      if (++below >= 3) {
        acc.converged = true;
        break;
      }
    } else {
      below = 0;
    }
  }
  return acc;
}

// Remainder of the eta integral past the last cutoff when the increment rule
// was not met (power_law only; bounded supports are exhausted by then):
// integrand_n <= D n^{-1/6} (t/2) |eta|^{-1/2} density / ((2n+1) mu - |b|).
double analytic_remainder_2d(double t, int N, const ModelParams& params,
                             const SpectralMeasureSpec& spec, double u_end, double d_cal) {
  if (spec.kind != MeasureKind::power_law) return 0.0;
  const double expo = 0.5 - 2.0 * spec.beta;  // < 0 for admissible measures
  if (expo >= 0.0) return 0.0;
  const double tail = 2.0 * std::exp(expo * u_end) / (-expo);
  double modes = 1.0 / std::sqrt(M_PI);  // n = 0 envelope
  for (int n = 1; n <= N; ++n) modes += d_cal * std::pow(n, -1.0 / 6.0);
  const double margin = params.mu - std::fabs(params.b);
  return modes * 0.5 * t * tail / margin / (4.0 * M_PI * M_PI);
}

}  // namespace

VarianceReport variance_2d(double t, double x, double y, int N, const ModelParams& params,
                           const SpectralMeasureSpec& spec, const IsometryOptions& opts) {
  if (t < 0.0) throw std::invalid_argument("variance_2d: t must be >= 0");
  if (N < 0) throw std::invalid_argument("variance_2d: N must be >= 0");
  if (params.dim != 2) throw std::invalid_argument("variance_2d: params.dim must be 2");
  validate_params(params);
  const Nu2Report adm = admissibility_nu2(spec);
  if (adm.verdict != Admissibility::admissible)
    throw InadmissibleMeasure("variance_2d: measure failed the nu2 admissibility check");

  VarianceReport rep;
  rep.params = params;
  rep.measure = spec;
  rep.t = t;
  rep.x = x;
  rep.y = y;
  rep.N = N;
  rep.d_cal = hermite::calibrate_sup_bound(std::max(4 * N, 16)).d;
  if (t == 0.0) {
    rep.per_mode.assign(static_cast<size_t>(N) + 1, 0.0);
    finish_report(rep);
    return rep;
  }

  ChannelRequest req;
  req.t = t;
  const Accumulated full = accumulate_2d(x, N, params, spec, opts, opts.cells_per_octave, req);
  const Accumulated half =
      accumulate_2d(x, N, params, spec, opts, std::max(opts.cells_per_octave / 2, 1), req);

  const double inv4pi2 = 1.0 / (4.0 * M_PI * M_PI);
  rep.per_mode.resize(full.per_mode.size());
  for (size_t i = 0; i < full.per_mode.size(); ++i) rep.per_mode[i] = inv4pi2 * full.per_mode[i];
  finish_report(rep);

  rep.quad_error = std::fabs(full.total - half.total) * inv4pi2 / 3.0;
  // excluded central cell: |eta|^{1/2} psi^2 (t^3/3) density, |eta| < eps
  {
    double modes = 1.0 / std::sqrt(M_PI);
    for (int n = 1; n <= N; ++n) modes += rep.d_cal * std::pow(n, -1.0 / 6.0);
    const double dens = spec.density(0.5 * opts.center_eps) + spec.density(-0.5 * opts.center_eps);
    rep.quad_error += inv4pi2 * modes * (t * t * t / 3.0) * dens * (2.0 / 3.0) *
                      std::pow(opts.center_eps, 1.5);
  }
  if (full.converged) {
    rep.quad_error += 200.0 * full.last_increment * inv4pi2;
  } else {
    const double u_end = std::log(opts.center_eps) + full.octaves * std::log(2.0);
    const double rem = analytic_remainder_2d(t, N, params, spec, u_end, rep.d_cal);
    if (rem <= 0.0)
      throw_quadrature_failure("variance_2d", full.octaves, full.total * inv4pi2,
                               full.last_increment * inv4pi2);
    rep.quad_error += rem;
  }
  rep.tail_error = tail_for_report(params, spec, N, t, rep.d_cal);
  return rep;
}

// ---------------------------------------------------------------------------
// 3-d model: polar product grid (r geometric, theta uniform)
// ---------------------------------------------------------------------------

namespace {

// channels: 0 = variance, 1 = time-increment modulus (J1), 2 = space increment
struct Polar3Request {
  double t = 0.0;
  double h_time = 0.0;
  double h_space = 0.0;
  bool want_j1 = false;
  bool want_space = false;
};

struct Polar3Result {
  std::vector<double> variance_per_mode;
  double j1 = 0.0;
  double space = 0.0;
  double total = 0.0;  // variance channel accumulation (stopping rule)
  double last_increment = 0.0;
  bool converged = false;
  int octaves = 0;
};

Polar3Result accumulate_3d(double x, int N, const ModelParams& params,
                           const SpectralMeasureSpec& spec, const IsometryOptions& opts,
                           int r_cells, const Polar3Request& req) {
  Polar3Result acc;
  acc.variance_per_mode.assign(static_cast<size_t>(N) + 1, 0.0);
  const double ln2 = std::log(2.0);
  const double du = ln2 / r_cells;
  const double u0 = std::log(opts.center_eps);
  const int min_octaves = support_octaves(spec, u0);
  const double dtheta = 2.0 * M_PI / opts.theta_cells;

  std::vector<double> psi, psi_h;
  int below = 0;
  for (int k = 0; k < opts.max_octaves; ++k) {
    double inc = 0.0;
    for (int j = 0; j < r_cells; ++j) {
      const double u = u0 + k * ln2 + (j + 0.5) * du;
      const double r = std::exp(u);
      const double cellw =
          spec.radial_mass(std::exp(u - 0.5 * du), std::exp(u + 0.5 * du)) * dtheta;
      if (cellw == 0.0) continue;
      for (int m = 0; m < opts.theta_cells; ++m) {
        const double theta = (m + 0.5) * dtheta;
        const double ct = std::cos(theta);
        if (std::fabs(ct) < 1e-14) continue;  // eta_hat = 0 excluded
        const double st = std::sin(theta);
        const double eta = r * ct;
        const double zeta = r * st;
        const double abs_eta = std::fabs(eta);
        const double root = std::sqrt(abs_eta);
        if (!std::isfinite(root * x)) continue;
        hermite::psi_batch(N, root * x, psi);
        if (req.want_space) hermite::psi_batch(N, root * (x + req.h_space), psi_h);
        for (int n = 0; n <= N; ++n) {
          // rho_n(-eta_hat, zeta_hat)
          const double rho_n =
              params.mu * abs_eta * (2.0 * n + 1.0) + params.a * zeta * zeta + params.b * eta;
          const double p = psi[static_cast<size_t>(n)];
          const double base = root * cellw;
          const double var_term = base * p * p * sin2_time_integral_over_rho(rho_n, req.t);
          acc.variance_per_mode[static_cast<size_t>(n)] += var_term;
          inc += var_term;
          if (req.want_j1) {
            acc.j1 += base * p * p *
                      sin_increment_time_integral_over_rho(rho_n, req.t, req.h_time);
          }
          if (req.want_space) {
            const double d = psi_h[static_cast<size_t>(n)] - p;
            acc.space += base * d * d * sin2_time_integral_over_rho(rho_n, req.t);
          }
        }
      }
    }
    acc.total += inc;
    acc.last_increment = inc;
    acc.octaves = k + 1;
    if (k + 1 >= min_octaves && acc.total > 0.0 && inc <= opts.increment_tol * acc.total) {
      if (++below >= 3) {
        acc.converged = true;
        break;
      }
    } else {
      below = 0;
    }
  }
  return acc;
}

// Past-cutoff remainder for radial_power when the increment rule was not met:
// 1/rho <= ((2n mu)|eta|)^{-3/4} (a zeta^2)^{-1/4} and the theta integral of
// |cos|^{-1/4} |sin|^{-1/2} is a Beta factor.
double analytic_remainder_3d(double t, int N, const ModelParams& params,
                             const SpectralMeasureSpec& spec, double u_end, double d_cal) {
  if (spec.kind != MeasureKind::radial_power) return 0.0;
  const double expo = 1.25 - 2.0 * spec.gamma;
  if (expo >= 0.0) return 0.0;
  const double rtail = std::exp(expo * u_end) / (-expo);
  const double theta_int = 4.0 * 0.5 *
                           std::exp(std::lgamma(3.0 / 8.0) + std::lgamma(0.25) - std::lgamma(5.0 / 8.0));
  const double margin = params.mu - std::fabs(params.b);
  double modes = std::pow(margin, -0.75) / std::sqrt(M_PI);
  for (int n = 1; n <= N; ++n)
    modes += d_cal * std::pow(n, -1.0 / 6.0) * std::pow(2.0 * n * params.mu, -0.75);
  return modes * 0.5 * t * std::pow(params.a, -0.25) * theta_int * rtail / (4.0 * M_PI * M_PI);
}

void require_admissible_nu3(const SpectralMeasureSpec& spec, const char* who) {
  const Nu3Report adm = admissibility_nu3(spec);
  if (adm.verdict != Admissibility::admissible)
    throw InadmissibleMeasure(std::string(who) + ": measure failed the nu3 admissibility check");
}

}  // namespace

VarianceReport variance_3d(double t, double x, double y, double z, int N,
                           const ModelParams& params, const SpectralMeasureSpec& spec,
                           const IsometryOptions& opts) {
  if (t < 0.0) throw std::invalid_argument("variance_3d: t must be >= 0");
  if (N < 0) throw std::invalid_argument("variance_3d: N must be >= 0");
  if (params.dim != 3) throw std::invalid_argument("variance_3d: params.dim must be 3");
  validate_params(params);
  require_admissible_nu3(spec, "variance_3d");

  VarianceReport rep;
  rep.params = params;
  rep.measure = spec;
  rep.t = t;
  rep.x = x;
  rep.y = y;
  rep.z = z;
  rep.N = N;
  rep.d_cal = hermite::calibrate_sup_bound(std::max(4 * N, 16)).d;
  if (t == 0.0) {
    rep.per_mode.assign(static_cast<size_t>(N) + 1, 0.0);
    finish_report(rep);
    return rep;
  }

  Polar3Request req;
  req.t = t;
  const Polar3Result full =
      accumulate_3d(x, N, params, spec, opts, opts.radial_cells_per_octave, req);
  const Polar3Result half =
      accumulate_3d(x, N, params, spec, opts, std::max(opts.radial_cells_per_octave / 2, 1), req);

  const double inv4pi2 = 1.0 / (4.0 * M_PI * M_PI);
  rep.per_mode.resize(full.variance_per_mode.size());
  for (size_t i = 0; i < rep.per_mode.size(); ++i)
    rep.per_mode[i] = inv4pi2 * full.variance_per_mode[i];
  finish_report(rep);

  rep.quad_error = std::fabs(full.total - half.total) * inv4pi2 / 3.0;
  {
    // excluded central disc r < eps: integrand <= sqrt(r) psi^2 (t^3/3) w
    double modes = 1.0 / std::sqrt(M_PI);
    for (int n = 1; n <= N; ++n) modes += rep.d_cal * std::pow(n, -1.0 / 6.0);
    rep.quad_error += inv4pi2 * modes * (t * t * t / 3.0) * spec.radial_density(0.5 * opts.center_eps) *
                      2.0 * M_PI * std::pow(opts.center_eps, 2.5) / 2.5;
  }
  if (full.converged) {
    rep.quad_error += 200.0 * full.last_increment * inv4pi2;
  } else {
    const double u_end = std::log(opts.center_eps) + full.octaves * std::log(2.0);
    const double rem = analytic_remainder_3d(t, N, params, spec, u_end, rep.d_cal);
    if (rem <= 0.0)
      throw_quadrature_failure("variance_3d", full.octaves, full.total * inv4pi2,
                               full.last_increment * inv4pi2);
    rep.quad_error += rem;
  }
  rep.tail_error = tail_for_report(params, spec, N, t, rep.d_cal);
  return rep;
}

double qn_integral(int n, const ModelParams& params, const SpectralMeasureSpec& spec,
                   const IsometryOptions& opts) {
  if (n < 0) throw std::invalid_argument("qn_integral: n must be >= 0");
  if (params.dim != 3) throw std::invalid_argument("qn_integral: dim 3 only");
  validate_params(params);
  require_admissible_nu3(spec, "qn_integral");

  const double ln2 = std::log(2.0);
  const int r_cells = opts.radial_cells_per_octave;
  const double du = ln2 / r_cells;
  const double u0 = std::log(opts.center_eps);
  const int min_octaves = support_octaves(spec, u0);
  const double dtheta = 2.0 * M_PI / opts.qn_theta_cells;
  const double nu_n = params.mu * (2.0 * n + 1.0);

  double total = 0.0;
  int below = 0;
  bool converged = false;
  double inc = 0.0;
  int octaves = 0;
  for (int k = 0; k < opts.max_octaves; ++k) {
    inc = 0.0;
    for (int j = 0; j < r_cells; ++j) {
      const double u = u0 + k * ln2 + (j + 0.5) * du;
      const double r = std::exp(u);
      // integrand dr dtheta = r^{1/2} |cos|^{1/2} w(r^2) / (nu_n |cos| + a r sin^2 + b cos)
      const double cellw =
          std::sqrt(r) / r * spec.radial_mass(std::exp(u - 0.5 * du), std::exp(u + 0.5 * du)) *
          dtheta;
      if (cellw == 0.0) continue;
      for (int m = 0; m < opts.qn_theta_cells; ++m) {
        const double theta = (m + 0.5) * dtheta;
        const double ct = std::cos(theta);
        if (std::fabs(ct) < 1e-14) continue;
        const double st = std::sin(theta);
        const double den = nu_n * std::fabs(ct) + params.a * r * st * st + params.b * ct;
        inc += std::sqrt(std::fabs(ct)) / den * cellw;
      }
    }
    total += inc;
    octaves = k + 1;
    if (k + 1 >= min_octaves && total > 0.0 && inc <= opts.increment_tol * total) {
      if (++below >= 3) {
        converged = true;
        break;
      }
    } else {
      below = 0;
    }
  }
  if (!converged) throw_quadrature_failure("qn_integral", octaves, total, inc);
  return total;
}

double continuity_modulus_1d(double t, double x, double h, int N) {
  if (!std::isfinite(h)) throw std::invalid_argument("continuity_modulus: h must be finite");
  const std::vector<double> p = hermite::psi_batch(N, x);
  const std::vector<double> ph = hermite::psi_batch(N, x + h);
  double s = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double rho_n = 2.0 * n + 1.0;
    const double amp = mode_amplitude(rho_n, t);  // sin(wt)/w; sin^2/rho = amp^2
    const double d = ph[static_cast<size_t>(n)] - p[static_cast<size_t>(n)];
    s += amp * amp * d * d;
  }
  return s;
}

double continuity_modulus_1d_time(double t, double x, double h, int N) {
  if (!std::isfinite(h) || h < 0.0)
    throw std::invalid_argument("continuity_modulus_time: h must be finite and >= 0");
  const std::vector<double> p = hermite::psi_batch(N, x);
  double s = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double rho_n = 2.0 * n + 1.0;
    const double w = std::sqrt(rho_n);
    const double amp_h = mode_amplitude(rho_n, 0.5 * h);
    const double c = std::cos(w * (t + 0.5 * h));
    const double pn = p[static_cast<size_t>(n)];
    s += 4.0 * c * c * amp_h * amp_h * pn * pn;
  }
  return s;
}

double continuity_modulus_3d(double t, double eta_hat, double zeta_hat, double x, double h, int N,
                             const ModelParams& params) {
  if (!std::isfinite(h)) throw std::invalid_argument("continuity_modulus: h must be finite");
  if (eta_hat == 0.0) throw std::invalid_argument("continuity_modulus_3d: eta_hat = 0 excluded");
  validate_params(params);
  const double root = std::sqrt(std::fabs(eta_hat));
  const std::vector<double> p = hermite::psi_batch(N, root * x);
  const std::vector<double> ph = hermite::psi_batch(N, root * (x + h));
  double s = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double rho_n = params.mu * std::fabs(eta_hat) * (2.0 * n + 1.0) +
                         params.a * zeta_hat * zeta_hat + params.b * eta_hat;
    const double amp = mode_amplitude(rho_n, t);
    const double d = ph[static_cast<size_t>(n)] - p[static_cast<size_t>(n)];
    s += amp * amp * d * d;
  }
  return s;
}

double continuity_modulus_3d_time(double t, double eta_hat, double zeta_hat, double x, double h,
                                  int N, const ModelParams& params) {
  if (!std::isfinite(h) || h < 0.0)
    throw std::invalid_argument("continuity_modulus_time: h must be finite and >= 0");
  if (eta_hat == 0.0) throw std::invalid_argument("continuity_modulus_3d: eta_hat = 0 excluded");
  validate_params(params);
  const double root = std::sqrt(std::fabs(eta_hat));
  const std::vector<double> p = hermite::psi_batch(N, root * x);
  double s = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double rho_n = params.mu * std::fabs(eta_hat) * (2.0 * n + 1.0) +
                         params.a * zeta_hat * zeta_hat + params.b * eta_hat;
    const double w = std::sqrt(rho_n);
    const double amp_h = mode_amplitude(rho_n, 0.5 * h);
    const double c = std::cos(w * (t + 0.5 * h));
    const double pn = p[static_cast<size_t>(n)];
    s += 4.0 * c * c * amp_h * amp_h * pn * pn;
  }
  return s;
}

IncrementMoments increment_moments_1d(double t, double h_time, double h_space, double x, int N) {
  if (t < 0.0 || h_time < 0.0) throw std::invalid_argument("increment_moments: t, h_time >= 0");
  IncrementMoments out;
  const std::vector<double> p = hermite::psi_batch(N, x);
  const std::vector<double> ph = hermite::psi_batch(N, x + h_space);
  double j1 = 0.0, space = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double rho_n = 2.0 * n + 1.0;
    const double pn = p[static_cast<size_t>(n)];
    j1 += pn * pn * sin_increment_time_integral_over_rho(rho_n, t, h_time);
    const double d = ph[static_cast<size_t>(n)] - pn;
    space += d * d * sin2_time_integral_over_rho(rho_n, t);
  }
  out.j1 = j1;
  out.space = space;
  out.j2 = variance_1d(h_time, x, N).value;
  return out;
}

IncrementMoments increment_moments_2d(double t, double h_time, double h_space, double x, double y,
                                      int N, const ModelParams& params,
                                      const SpectralMeasureSpec& spec,
                                      const IsometryOptions& opts) {
  if (t < 0.0 || h_time < 0.0) throw std::invalid_argument("increment_moments: t, h_time >= 0");
  if (params.dim != 2) throw std::invalid_argument("increment_moments_2d: dim 2 only");
  validate_params(params);
  if (admissibility_nu2(spec).verdict != Admissibility::admissible)
    throw InadmissibleMeasure("increment_moments_2d: measure failed the nu2 admissibility check");

  ChannelRequest req;
  req.t = t;
  req.h_time = h_time;
  req.h_space = h_space;
  req.want_j1 = true;
  req.want_space = true;
  const Accumulated full = accumulate_2d(x, N, params, spec, opts, opts.cells_per_octave, req);
  if (!full.converged)
    throw_quadrature_failure("increment_moments_2d", full.octaves, full.total, full.last_increment);

  const double inv4pi2 = 1.0 / (4.0 * M_PI * M_PI);
  IncrementMoments out;
  out.j1 = inv4pi2 * full.j1;
  out.space = inv4pi2 * full.space;
  out.j2 = variance_2d(h_time, x, y, N, params, spec, opts).value;
  return out;
}

IncrementMoments increment_moments_3d(double t, double h_time, double h_space, double x, double y,
                                      double z, int N, const ModelParams& params,
                                      const SpectralMeasureSpec& spec,
                                      const IsometryOptions& opts) {
  if (t < 0.0 || h_time < 0.0) throw std::invalid_argument("increment_moments: t, h_time >= 0");
  if (params.dim != 3) throw std::invalid_argument("increment_moments_3d: dim 3 only");
  validate_params(params);
  require_admissible_nu3(spec, "increment_moments_3d");

  Polar3Request req;
  req.t = t;
  req.h_time = h_time;
  req.h_space = h_space;
  req.want_j1 = true;
  req.want_space = true;
  const Polar3Result full =
      accumulate_3d(x, N, params, spec, opts, opts.radial_cells_per_octave, req);
  if (!full.converged)
    throw_quadrature_failure("increment_moments_3d", full.octaves, full.total, full.last_increment);

  const double inv4pi2 = 1.0 / (4.0 * M_PI * M_PI);
  IncrementMoments out;
  out.j1 = inv4pi2 * full.j1;
  out.space = inv4pi2 * full.space;
  out.j2 = variance_3d(h_time, x, y, z, N, params, spec, opts).value;
  return out;
}

void write_mode_csv(std::ostream& os, const VarianceReport& rep) {
  const TailMajorant m = tail_majorant(rep.params, rep.measure, rep.t, rep.d_cal);
  os << "n,contribution,cumulative,tail_bound\n";
  char buf[96];
  double cum = 0.0;
  for (size_t n = 0; n < rep.per_mode.size(); ++n) {
    cum += rep.per_mode[n];
    const double tb = n >= 2 ? m.at(static_cast<int>(n)) : m.at(2) + m.mode1;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", n, rep.per_mode[n], cum, tb);
    os << buf;
  }
}

}  // namespace oscwave
