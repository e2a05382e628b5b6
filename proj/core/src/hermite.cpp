#include "oscwave/hermite.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace oscwave::hermite {

namespace {

constexpr double kPiQuarterInv = 0.75112554446494248;  // pi^{-1/4}
constexpr double kLn2 = 0.69314718055994531;
constexpr double kRescaleLimit = 0x1p500;
constexpr int kRescaleShift = 512;
constexpr double kSanityCapD = 2.0;

void check_args(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite: mode index must be >= 0");
  if (!std::isfinite(x)) throw std::invalid_argument("hermite: non-finite evaluation point");
}

// Scaled recurrence pass: q_n = Psi_n(x) * 2^{-e2}, with e2 starting at the
// Gaussian exponent and growing whenever the pair is rescaled. sink(n, value)
// receives the materialized Psi_n(x).
template <typename Sink>
void recurrence(int n_max, double x, Sink&& sink) {
  const double g = -0.5 * x * x;
  long e2 = std::lround(std::floor(g / kLn2));
  const double r = g - static_cast<double>(e2) * kLn2;
  double q0 = kPiQuarterInv * std::exp(r);
  sink(0, std::ldexp(q0, static_cast<int>(e2)));
  if (n_max == 0) return;
  double q1 = std::sqrt(2.0) * x * q0;
  sink(1, std::ldexp(q1, static_cast<int>(e2)));
  for (int n = 1; n < n_max; ++n) {
    double q2 = x * std::sqrt(2.0 / (n + 1)) * q1 - std::sqrt(static_cast<double>(n) / (n + 1)) * q0;
    if (std::fabs(q2) > kRescaleLimit) {
      q1 = std::ldexp(q1, -kRescaleShift);
      q2 = std::ldexp(q2, -kRescaleShift);
      e2 += kRescaleShift;
    }
    sink(n + 1, std::ldexp(q2, static_cast<int>(e2)));
    q0 = q1;
    q1 = q2;
  }
}

}  // namespace

double psi(int n, double x) {
  check_args(n, x);
  double value = 0.0;
  recurrence(n, x, [&](int k, double v) {
    if (k == n) value = v;
  });
  return value;
}

void psi_batch(int n_max, double x, std::vector<double>& out) {
  check_args(n_max, x);
  out.resize(static_cast<size_t>(n_max) + 1);
  recurrence(n_max, x, [&](int k, double v) { out[static_cast<size_t>(k)] = v; });
}

std::vector<double> psi_batch(int n_max, double x) {
  std::vector<double> out;
  psi_batch(n_max, x, out);
  return out;
}

double delta_partial_sum(int N, double x, double x0) {
  check_args(N, x);
  check_args(N, x0);
  const std::vector<double> a = psi_batch(N, x);
  const std::vector<double> b = psi_batch(N, x0);
  double s = 0.0;
  for (int n = 0; n <= N; ++n) s += a[static_cast<size_t>(n)] * b[static_cast<size_t>(n)];
  return s;
}

double mode_ode_residual(int n, double x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("mode_ode_residual: h must be > 0");
  const double pm = psi(n, x - h);
  const double p0 = psi(n, x);
  const double pp = psi(n, x + h);
  const double second = (pp - 2.0 * p0 + pm) / (h * h);
  return std::fabs(second - x * x * p0 + (2.0 * n + 1.0) * p0);
}

namespace {

SupBoundCalibration run_calibration(int n_max) {
  SupBoundCalibration cal;
  cal.n_max = n_max;
  cal.max_psi2.assign(static_cast<size_t>(n_max) + 1, 0.0);
  cal.max_psi2[0] = 1.0 / std::sqrt(M_PI);

  const double x_hi = std::sqrt(2.0 * n_max + 1.0) + 5.0;
  const double step = 0.02;
  const int cols = static_cast<int>(x_hi / step) + 2;

  // Track, for each n, the best grid value and its neighbors for parabolic
  // refinement of the peak. Psi_n^2 is even, so x >= 0 suffices.
  std::vector<double> prev2(static_cast<size_t>(n_max) + 1, 0.0);
  std::vector<double> prev1(static_cast<size_t>(n_max) + 1, 0.0);
  std::vector<double> cur(static_cast<size_t>(n_max) + 1, 0.0);
  std::vector<double> best(static_cast<size_t>(n_max) + 1, -1.0);
  std::vector<double> best_lo(static_cast<size_t>(n_max) + 1, 0.0);
  std::vector<double> best_hi(static_cast<size_t>(n_max) + 1, 0.0);

  std::vector<double> col;
  for (int j = 0; j < cols; ++j) {
    psi_batch(n_max, j * step, col);
    for (int n = 1; n <= n_max; ++n) {
      cur[static_cast<size_t>(n)] = col[static_cast<size_t>(n)] * col[static_cast<size_t>(n)];
    }
    if (j >= 2) {
      for (int n = 1; n <= n_max; ++n) {
        const size_t k = static_cast<size_t>(n);
        if (prev1[k] > best[k]) {
          best[k] = prev1[k];
          best_lo[k] = prev2[k];
          best_hi[k] = cur[k];
        }
      }
    }
    std::swap(prev2, prev1);
    std::swap(prev1, cur);
  }

  for (int n = 1; n <= n_max; ++n) {
    const size_t k = static_cast<size_t>(n);
    double m = best[k];
    const double a = 0.5 * (best_hi[k] + best_lo[k]) - m;
    const double b = 0.5 * (best_hi[k] - best_lo[k]);
    if (a < 0.0) m -= b * b / (4.0 * a);
    cal.max_psi2[k] = m;
  }

  double lo = 1e300, hi = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double ratio = std::pow(n, 1.0 / 6.0) * cal.max_psi2[static_cast<size_t>(n)];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  cal.c = 0.999 * lo;
  cal.d = 1.02 * hi;
  if (!(cal.d < kSanityCapD)) {
    throw std::runtime_error("calibrate_sup_bound: D=" + std::to_string(cal.d) +
                             " exceeds sanity cap (recurrence instability)");
  }
  return cal;
}

}  // namespace

const SupBoundCalibration& calibrate_sup_bound(int n_max) {
  if (n_max < 10) throw std::invalid_argument("calibrate_sup_bound: n_max must be >= 10");
  static std::mutex mu;
  static std::map<int, SupBoundCalibration> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n_max);
  if (it == cache.end()) it = cache.emplace(n_max, run_calibration(n_max)).first;
  return it->second;
}

}  // namespace oscwave::hermite
