#include "oscwave/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oscwave/hermite.hpp"

namespace oscwave {

namespace {

const std::complex<double> kPhase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};  // (-i)^n

void check_amplitude_args(double rho, double t) {
  if (rho < 0.0)
    throw std::invalid_argument("mode_amplitude: negative rho (Levi violation upstream?)");
  if (t < 0.0) throw std::invalid_argument("mode_amplitude: t must be >= 0");
}

}  // namespace

double mode_amplitude(double rho, double t) {
  check_amplitude_args(rho, t);
  if (rho <= 1e-12) {
    const double z = rho * t * t;
    return t * (1.0 - z / 6.0 + z * z / 120.0);
  }
  const double w = std::sqrt(rho);
  return std::sin(w * t) / w;
}

double sin2_time_integral(double rho, double t) {
  check_amplitude_args(rho, t);
  const double z = rho * t * t;
  if (z <= 1e-3) {
    // t/2 - sin(2wt)/(4w) cancels to rho t^3/3; expand instead
    return t * t * t * rho * (1.0 / 3.0 - z / 15.0 + 2.0 * z * z / 315.0 - z * z * z / 2835.0);
  }
  const double w = std::sqrt(rho);
  return 0.5 * t - std::sin(2.0 * w * t) / (4.0 * w);
}

double sin2_time_integral_over_rho(double rho, double t) {
  check_amplitude_args(rho, t);
  const double z = rho * t * t;
  if (z <= 1e-3) {
    return t * t * t * (1.0 / 3.0 - z / 15.0 + 2.0 * z * z / 315.0 - z * z * z / 2835.0);
  }
  return sin2_time_integral(rho, t) / rho;
}

double sin_increment_sq(double rho, double t, double h) {
  check_amplitude_args(rho, t);
  // sin(w(t+h)) - sin(wt) = 2 cos(w(t + h/2)) sin(w h/2)
  const double w = std::sqrt(rho);
  const double d = 2.0 * std::cos(w * (t + 0.5 * h)) * std::sin(0.5 * w * h);
  return d * d;
}

double sin_increment_time_integral(double rho, double t, double h) {
  check_amplitude_args(rho, t);
  if (h < 0.0) throw std::invalid_argument("sin_increment_time_integral: h must be >= 0");
  // integrand = 4 sin^2(w h/2) cos^2(w(u + h/2));
  // int_0^t cos^2(w(u+h/2)) du = t/2 + cos(w(t+h)) sin(wt)/(2w)
  const double w = std::sqrt(rho);
  const double s = std::sin(0.5 * w * h);
  return 4.0 * s * s * (0.5 * t + 0.5 * std::cos(w * (t + h)) * mode_amplitude(rho, t));
}

double sin_increment_time_integral_over_rho(double rho, double t, double h) {
  check_amplitude_args(rho, t);
  if (h < 0.0) throw std::invalid_argument("sin_increment_time_integral_over_rho: h must be >= 0");
  // sin^2(w h/2)/rho = mode_amplitude(rho, h/2)^2 / ... actually (sin(wh/2)/w)^2
  const double w = std::sqrt(rho);
  const double amp_h = mode_amplitude(rho, 0.5 * h);
  return 4.0 * amp_h * amp_h * (0.5 * t + 0.5 * std::cos(w * (t + h)) * mode_amplitude(rho, t));
}

double kernel_e1(double t, double x, double x0, int N) {
  if (N < 0) throw std::invalid_argument("kernel_e1: N must be >= 0");
  if (t < 0.0) return 0.0;
  const std::vector<double> px = hermite::psi_batch(N, x);
  const std::vector<double> p0 = hermite::psi_batch(N, x0);
  double sum = 0.0;
  for (int n = 0; n <= N; ++n) {
    sum += mode_amplitude(2.0 * n + 1.0, t) * p0[static_cast<size_t>(n)] * px[static_cast<size_t>(n)];
  }
  return -sum;
}

std::complex<double> kernel_f1(double t, double x, double xi0, int N) {
  if (N < 0) throw std::invalid_argument("kernel_f1: N must be >= 0");
  if (t < 0.0) return {};
  const std::vector<double> px = hermite::psi_batch(N, x);
  const std::vector<double> pxi = hermite::psi_batch(N, xi0);
  std::complex<double> sum = 0.0;
  for (int n = 0; n <= N; ++n) {
    sum += kPhase[n & 3] * (mode_amplitude(2.0 * n + 1.0, t) * pxi[static_cast<size_t>(n)] *
                            px[static_cast<size_t>(n)]);
  }
  return -sum;
}

namespace {

std::complex<double> kernel_f23(double t, double x, double phase_arg, double xi0, double eta_hat,
                                double zeta_hat, int N, const ModelParams& params) {
  if (N < 0) throw std::invalid_argument("kernel_f: N must be >= 0");
  if (eta_hat == 0.0)
    throw std::invalid_argument("kernel_f: eta_hat = 0 excluded (xi0/|eta_hat|^{1/2} undefined)");
  validate_params(params);
  if (t < 0.0) return {};
  const double root = std::sqrt(std::fabs(eta_hat));
  const std::vector<double> pxi = hermite::psi_batch(N, xi0 / root);
  const std::vector<double> px = hermite::psi_batch(N, root * x);
  std::complex<double> sum = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double r = rho(params, n, -eta_hat, zeta_hat);
    sum += kPhase[n & 3] *
           (mode_amplitude(r, t) * pxi[static_cast<size_t>(n)] * px[static_cast<size_t>(n)]);
  }
  return -(std::polar(1.0, phase_arg) * sum) / (2.0 * M_PI);
}

}  // namespace

std::complex<double> kernel_f2(double t, double x, double y, double xi0, double eta_hat, int N,
                               const ModelParams& params) {
  if (params.dim != 2) throw std::invalid_argument("kernel_f2: params.dim must be 2");
  return kernel_f23(t, x, y * eta_hat, xi0, eta_hat, 0.0, N, params);
}

std::complex<double> kernel_f3(double t, double x, double y, double z, double xi0, double eta_hat,
                               double zeta_hat, int N, const ModelParams& params) {
  if (params.dim != 3) throw std::invalid_argument("kernel_f3: params.dim must be 3");
  return kernel_f23(t, x, y * eta_hat + z * zeta_hat, xi0, eta_hat, zeta_hat, N, params);
}

double kernel_e_hat(double t, double x, double eta, double zeta, double x0, int N,
                    const ModelParams& params) {
  if (N < 0) throw std::invalid_argument("kernel_e_hat: N must be >= 0");
  if (eta == 0.0) throw std::invalid_argument("kernel_e_hat: eta = 0 excluded");
  validate_params(params);
  if (params.dim < 2) throw std::invalid_argument("kernel_e_hat: dims 2 and 3 only");
  if (t < 0.0) return 0.0;
  const double root = std::sqrt(std::fabs(eta));
  const std::vector<double> p0 = hermite::psi_batch(N, x0 * root);
  const std::vector<double> px = hermite::psi_batch(N, root * x);
  double sum = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double r = rho(params, n, eta, zeta);
    sum += mode_amplitude(r, t) * p0[static_cast<size_t>(n)] * px[static_cast<size_t>(n)];
  }
  return -root * sum;
}

double tail_bound(int N, double t, double d_cal) {
  if (N < 2) throw std::invalid_argument("tail_bound: N must be >= 2");
  if (t < 0.0) throw std::invalid_argument("tail_bound: t must be >= 0");
  return d_cal * t * 3.0 * std::pow(N - 1.0, -1.0 / 6.0);
}

int choose_truncation(double tol, double t, double d_cal) {
  if (!(tol > 0.0)) throw std::invalid_argument("choose_truncation: tol must be > 0");
  const double q = 3.0 * d_cal * t / tol;
  if (q <= 1.0) return 2;
  if (6.0 * std::log(q) > std::log(1e8))
    throw std::invalid_argument("choose_truncation: tol demands N > 1e8");
  // N = ceil(1 + q^6), then settle float-boundary cases exactly
  int n = std::max(2, static_cast<int>(std::ceil(1.0 + std::pow(q, 6.0) - 1e-9)));
  while (n > 2 && tail_bound(n - 1, t, d_cal) <= tol) --n;
  while (tail_bound(n, t, d_cal) > tol) ++n;
  return n;
}

TruncatedKernel make_kernel(const ModelParams& params, const SpectralMeasureSpec& measure, int N,
                            double horizon) {
  validate_params(params);
  validate_spec(measure);
  if (N < 2) throw std::invalid_argument("make_kernel: N must be >= 2");
  if (!(horizon >= 0.0)) throw std::invalid_argument("make_kernel: horizon must be >= 0");
  if (params.dim == 2) {
    const Nu2Report rep = admissibility_nu2(measure);
    if (rep.verdict != Admissibility::admissible)
      throw InadmissibleMeasure("make_kernel: nu2 measure not admissible");
  } else if (params.dim == 3) {
    const Nu3Report rep = admissibility_nu3(measure);
    if (rep.verdict != Admissibility::admissible)
      throw InadmissibleMeasure("make_kernel: nu3 measure not admissible");
  }
  TruncatedKernel k;
  k.params = params;
  k.measure = measure;
  k.N = N;
  k.horizon = horizon;
  k.d_cal = hermite::calibrate_sup_bound(std::max(4 * N, 16)).d;
  k.tail_certificate = norm_tail_bound(params, measure, N, horizon, k.d_cal);
  return k;
}

TruncatedKernel make_kernel_tol(const ModelParams& params, const SpectralMeasureSpec& measure,
                                double tol, double horizon) {
  const double d0 = hermite::calibrate_sup_bound(64).d;
  return make_kernel(params, measure, choose_truncation(tol, horizon, d0), horizon);
}

double TailMajorant::at(int N) const {
  if (N < 2) throw std::invalid_argument("TailMajorant::at: N must be >= 2");
  return coeff * std::pow(N - 1.0, -exponent);
}

TailMajorant tail_majorant(const ModelParams& params, const SpectralMeasureSpec& measure, double t,
                           double d_cal) {
  TailMajorant m;
  switch (params.dim) {
    case 1:
      // sum_{n>=N} (2n+1)^{-1} n^{-1/6} <= (1/2) int_{N-1} x^{-7/6} = 3 (N-1)^{-1/6}
      m.coeff = 3.0 * d_cal * t;
      m.exponent = 1.0 / 6.0;
      m.mode1 = d_cal * t / 3.0;
      return m;
    case 2: {
      // per-mode <= (D t / 4pi^2) n^{-1/6} q_n^{(2)}, q_n^{(2)} <= C_nu/(2 n mu)
      const MomentEstimate c = nu2_abs_moment(measure, -0.5);
      if (!c.finite) throw InadmissibleMeasure("tail_majorant: int |eta|^{-1/2} nu2 diverges");
      const double c_nu = c.value + c.error;
      const double per_mode = d_cal * t * c_nu / (8.0 * M_PI * M_PI * params.mu);
      m.coeff = 6.0 * per_mode;
      m.exponent = 1.0 / 6.0;
      m.mode1 = per_mode;
      return m;
    }
    case 3: {
      const Nu3Report rep = admissibility_nu3(measure);
      if (rep.verdict != Admissibility::admissible)
        throw InadmissibleMeasure("tail_majorant: nu3 measure not admissible");
      const double p = 5.0 / 6.0 + 0.5 * rep.delta;
      const double q = 1.0 - p;
      const MomentEstimate mom = nu3_radial_moment(measure, 0.5 - q);
      if (!mom.finite) throw InadmissibleMeasure("tail_majorant: q_n moment diverges");
      const double theta = 0.5 * std::exp(std::lgamma(0.75 - 0.5 * p) + std::lgamma(0.5 - q) -
                                          std::lgamma(1.25 - 0.5 * p - q));
      const double c_hat = 4.0 * std::pow(p, p) * std::pow(q, q) * std::pow(params.mu, -p) *
                           std::pow(params.a, -q) * (mom.value + mom.error) * theta;
      const double per_mode = d_cal * t * c_hat / (4.0 * M_PI * M_PI);
      m.coeff = per_mode / (p - 5.0 / 6.0);
      m.exponent = p - 5.0 / 6.0;
      m.mode1 = per_mode;
      return m;
    }
    default:
      throw std::invalid_argument("tail_majorant: dim must be 1, 2 or 3");
  }
}

double norm_tail_bound(const ModelParams& params, const SpectralMeasureSpec& measure, int N,
                       double t, double d_cal) {
  if (N < 2) throw std::invalid_argument("norm_tail_bound: N must be >= 2");
  return tail_majorant(params, measure, t, d_cal).at(N);
}

}  // namespace oscwave
