#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "oscwave/hermite.hpp"
#include "oscwave/kernels.hpp"

using namespace oscwave;

TEST_CASE("mode amplitude") {
  CHECK(mode_amplitude(1.0, M_PI_2) == doctest::Approx(1.0).epsilon(1e-14));
  for (double rho : {0.5, 3.0, 100.0}) CHECK(mode_amplitude(rho, 0.0) == 0.0);
  // removable singularity: Taylor branch within 1e-14 of the limit t
  CHECK(mode_amplitude(1e-14, 2.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS(mode_amplitude(-0.5, 1.0), std::invalid_argument);
  // |value| <= min(t, 1/sqrt(rho))
  for (double rho : {1e-13, 1e-6, 0.3, 7.0, 4000.0}) {
    for (double t : {0.1, 1.0, 11.0}) {
      CHECK(std::fabs(mode_amplitude(rho, t)) <= std::min(t, 1.0 / std::sqrt(rho)) + 1e-15);
    }
  }
}

TEST_CASE("mode amplitude branch continuity across rho = 1e-12") {
  const double t = 3.7;
  const double below = mode_amplitude(1e-12 * (1.0 - 1e-9), t);
  const double above = mode_amplitude(1e-12 * (1.0 + 1e-9), t);
  CHECK(std::fabs(below - above) <= 1e-12 * std::fabs(above));
}

TEST_CASE("sin2 time integral against midpoint quadrature") {
  for (double rho : {1e-14, 1e-8, 0.5, 9.0}) {
    for (double t : {0.3, 1.0, M_PI}) {
      double acc = 0.0;
      const int m = 20000;
      for (int j = 0; j < m; ++j) {
        const double u = (j + 0.5) * t / m;
        const double s = std::sin(std::sqrt(rho) * u);
        acc += s * s * t / m;
      }
      CHECK(sin2_time_integral(rho, t) == doctest::Approx(acc).epsilon(1e-7));
      CHECK(sin2_time_integral_over_rho(rho, t) * rho == doctest::Approx(acc).epsilon(1e-7));
    }
  }
  // limit T/rho -> t^3/3
  CHECK(sin2_time_integral_over_rho(0.0, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("sin increment time integral against quadrature") {
  for (double rho : {1e-13, 0.7, 23.0}) {
    for (double h : {0.0, 0.25, 2.0}) {
      const double t = 1.3;
      double acc = 0.0;
      const int m = 20000;
      const double w = std::sqrt(rho);
      for (int j = 0; j < m; ++j) {
        const double u = (j + 0.5) * t / m;
        const double d = std::sin(w * (u + h)) - std::sin(w * u);
        acc += d * d * t / m;
      }
      CHECK(sin_increment_time_integral(rho, t, h) == doctest::Approx(acc).epsilon(1e-6));
      CHECK(sin_increment_time_integral_over_rho(rho, t, h) * std::max(rho, 1e-300) ==
            doctest::Approx(acc * (rho > 0 ? 1.0 : 0.0)).epsilon(1e-6));
    }
  }
  CHECK(sin_increment_time_integral(5.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("E1 values") {
  CHECK(kernel_e1(-0.5, 0.3, 0.1, 8) == 0.0);
  CHECK(kernel_e1(0.0, 0.3, 0.1, 8) == 0.0);
  CHECK(kernel_e1(1.0, 0.0, 0.0, 0) ==
        doctest::Approx(-std::sin(1.0) / std::sqrt(M_PI)).epsilon(1e-14));
}

TEST_CASE("F1 values and parity") {
  const std::complex<double> v = kernel_f1(1.0, 0.0, 0.0, 1);
  CHECK(v.real() == doctest::Approx(-std::sin(1.0) / std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(0.0));
  CHECK(std::abs(kernel_f1(-1.0, 0.3, 0.2, 5)) == 0.0);
  // |F1| invariant under (xi0, x) -> (-xi0, -x)
  for (double t : {0.4, 2.0}) {
    const double a = std::abs(kernel_f1(t, 0.7, 1.3, 12));
    const double b = std::abs(kernel_f1(t, -0.7, -1.3, 12));
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("F1 Parseval identity against trapezoid quadrature") {
  const int N = 16;
  const double R = std::sqrt(2.0 * N + 1.0) + 10.0;
  const double h = 0.01;
  for (double t : {0.5, M_PI}) {
    for (double x : {0.0, 0.7}) {
      double quad = 0.0;
      for (double xi = -R; xi <= R; xi += h) {
        const double w = (xi == -R || xi + h > R) ? 0.5 * h : h;
        quad += std::norm(kernel_f1(t, x, xi, N)) * w;
      }
      const std::vector<double> px = hermite::psi_batch(N, x);
      double mode_sum = 0.0;
      for (int n = 0; n <= N; ++n) {
        const double s = std::sin(std::sqrt(2.0 * n + 1.0) * t);
        mode_sum += s * s / (2.0 * n + 1.0) * px[static_cast<size_t>(n)] * px[static_cast<size_t>(n)];
      }
      CHECK(quad == doctest::Approx(mode_sum).epsilon(1e-8));
    }
  }
}

TEST_CASE("F2 basics") {
  const ModelParams p{2, 1.0, 0.0, 0.3};
  // |F2| independent of y
  const double a = std::abs(kernel_f2(0.8, 0.4, 0.0, 0.2, 1.5, 10, p));
  const double b = std::abs(kernel_f2(0.8, 0.4, 17.3, 0.2, 1.5, 10, p));
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_f2(0.8, 0.4, 0.0, 0.2, 0.0, 10, p), std::invalid_argument);
  CHECK(std::abs(kernel_f2(-0.3, 0.4, 0.0, 0.2, 1.5, 10, p)) == 0.0);
  CHECK_THROWS_AS(kernel_f2(0.8, 0.4, 0.0, 0.2, 1.5, 10, ModelParams{2, 1.0, 0.0, 1.5}), LeviError);
  // b = 0: |F2| even in eta_hat
  const ModelParams p0{2, 1.3, 0.0, 0.0};
  for (double eta : {0.3, 2.2}) {
    CHECK(std::abs(kernel_f2(0.8, 0.4, 0.3, 0.2, eta, 10, p0)) ==
          doctest::Approx(std::abs(kernel_f2(0.8, 0.4, 0.3, 0.2, -eta, 10, p0))).epsilon(1e-13));
  }
}

TEST_CASE("F2 Parseval: int |F2|^2 dxi0 = |eta|^{1/2} sum g_n^2") {
  const ModelParams p{2, 1.0, 0.0, 0.25};
  const int N = 12;
  const double t = 0.9, x = 0.5, eta = 1.7;
  const double root = std::sqrt(eta);
  const double R = root * (std::sqrt(2.0 * N + 1.0) + 10.0);
  const double h = 0.005 * root;
  double quad = 0.0;
  for (double xi = -R; xi <= R; xi += h) {
    quad += std::norm(kernel_f2(t, x, 0.0, xi, eta, N, p)) * h;
  }
  const std::vector<double> px = hermite::psi_batch(N, root * x);
  double gsum = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double r = rho(p, n, -eta, 0.0);
    const double g = mode_amplitude(r, t) * px[static_cast<size_t>(n)] / (2.0 * M_PI);
    gsum += g * g;
  }
  CHECK(quad == doctest::Approx(root * gsum).epsilon(1e-8));
}

TEST_CASE("F3 basics and reduction to F2") {
  const ModelParams p3{3, 1.0, 1.0, 0.25};
  // |F3| independent of (y, z)
  const double a = std::abs(kernel_f3(0.8, 0.4, 0.0, 0.0, 0.2, 1.5, 0.6, 10, p3));
  const double b = std::abs(kernel_f3(0.8, 0.4, 3.0, -2.0, 0.2, 1.5, 0.6, 10, p3));
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK(std::abs(kernel_f3(-0.3, 0.4, 0.0, 0.0, 0.2, 1.5, 0.6, 10, p3)) == 0.0);
  // zeta -> -zeta leaves |F3| unchanged (rho even in zeta)
  const double c = std::abs(kernel_f3(0.8, 0.4, 0.0, 0.0, 0.2, 1.5, -0.6, 10, p3));
  CHECK(a == doctest::Approx(c).epsilon(1e-14));
  // zeta_hat = 0 recovers F2 modulo the z phase
  const ModelParams p2{2, 1.0, 0.0, 0.25};
  const std::complex<double> f3 = kernel_f3(0.8, 0.4, 1.1, 2.2, 0.2, 1.5, 0.0, 10, p3);
  const std::complex<double> f2 = kernel_f2(0.8, 0.4, 1.1, 0.2, 1.5, 10, p2);
  CHECK(f3.real() == doctest::Approx(f2.real()).epsilon(1e-13));
  CHECK(f3.imag() == doctest::Approx(f2.imag()).epsilon(1e-13));
}

TEST_CASE("E_hat summands satisfy the mode ODE in time") {
  const ModelParams p{3, 1.0, 0.7, 0.2};
  const int n = 4;
  const double eta = 1.3, zeta = 0.8, x0 = 0.2, x = 0.5;
  const double r = rho(p, n, eta, zeta);
  auto w_n = [&](double t) {
    // single-mode summand of E_hat
    const double root = std::sqrt(std::fabs(eta));
    return -root * mode_amplitude(r, t) * hermite::psi(n, x0 * root) * hermite::psi(n, root * x);
  };
  const double t = 0.9, h = 1e-4;
  const double second = (w_n(t + h) - 2.0 * w_n(t) + w_n(t - h)) / (h * h);
  CHECK(std::fabs(second + r * w_n(t)) < 1e-5);
  // t < 0 vanishes; scaling substitution consistency with the 1-d mode weight
  CHECK(kernel_e_hat(-1.0, x, eta, zeta, x0, 8, p) == 0.0);
}

TEST_CASE("E_hat scaling consistency") {
  // at mu = 1, b = 0, zeta = 0, eta = 1 the scaled mode weights reduce to 2n+1
  const ModelParams p{2, 1.0, 0.0, 0.0};
  const double t = 0.75, x = 0.4, x0 = -0.3;
  const int N = 10;
  CHECK(kernel_e_hat(t, x, 1.0, 0.0, x0, N, p) ==
        doctest::Approx(kernel_e1(t, x, x0, N)).epsilon(1e-13));
}

TEST_CASE("tail bound and truncation selection") {
  const double d = 0.43;
  CHECK_THROWS_AS(tail_bound(1, 1.0, d), std::invalid_argument);
  // brute-force partial tails below the majorant
  for (int N : {2, 10, 100}) {
    double tail = 0.0;
    for (long n = N; n <= 1000000; ++n)
      tail += 1.0 / (2.0 * n + 1.0) * std::pow(static_cast<double>(n), -1.0 / 6.0);
    CHECK(tail <= 3.0 * std::pow(N - 1.0, -1.0 / 6.0));
    CHECK(tail_bound(N, 2.0, d) == doctest::Approx(d * 2.0 * 3.0 * std::pow(N - 1.0, -1.0 / 6.0)));
  }
  // power-law ratio and linearity in t
  CHECK(tail_bound(200, 1.0, d) / tail_bound(100, 1.0, d) ==
        doctest::Approx(std::pow(199.0 / 99.0, -1.0 / 6.0)).epsilon(1e-12));
  CHECK(tail_bound(10, 3.0, d) == doctest::Approx(3.0 * tail_bound(10, 1.0, d)).epsilon(1e-14));

  // inverse consistency
  const double tol = tail_bound(50, 1.0, d);
  CHECK(choose_truncation(tol, 1.0, d) <= 50);
  CHECK(tail_bound(choose_truncation(tol, 1.0, d), 1.0, d) <= tol * (1.0 + 1e-12));
  // halving tol multiplies N by ~2^6
  const int n1 = choose_truncation(0.6, 1.0, d);
  const int n2 = choose_truncation(0.3, 1.0, d);
  CHECK(n2 >= 32 * n1);
  CHECK(n2 <= 128 * n1);
  CHECK(choose_truncation(1e9, 1.0, d) == 2);
  CHECK_THROWS_AS(choose_truncation(1e-12, 10.0, d), std::invalid_argument);
}

TEST_CASE("kernel construction gates") {
  CHECK_THROWS_AS(make_kernel(ModelParams{2, 1.0, 0.0, 1.0}, power_law_measure(0.3), 8, 1.0),
                  LeviError);
  CHECK_THROWS_AS(make_kernel(ModelParams{2, 1.0, 0.0, 0.2}, power_law_measure(0.2), 8, 1.0),
                  InadmissibleMeasure);
  const TruncatedKernel k = make_kernel(ModelParams{2, 1.0, 0.0, 0.2}, power_law_measure(0.3), 8, 1.0);
  CHECK(k.tail_certificate > 0.0);
  // certificate non-increasing in N
  const TruncatedKernel k2 = make_kernel(ModelParams{2, 1.0, 0.0, 0.2}, power_law_measure(0.3), 16, 1.0);
  CHECK(k2.tail_certificate < k.tail_certificate);
  // 1-d and 2-d certificates below the closed-form 1-d majorant (C_nu <= 4 pi^2 mu here)
  const TruncatedKernel k1 = make_kernel(ModelParams{1, 1.0, 0.0, 0.0}, lebesgue_measure(), 8, 1.0);
  CHECK(k1.tail_certificate == doctest::Approx(tail_bound(8, 1.0, k1.d_cal)));
  CHECK(k.tail_certificate <= tail_bound(8, 1.0, k.d_cal) * (1.0 + 1e-12));
}

TEST_CASE("truncation convergence in the isometry metric (1-d)") {
  // ||kernel(N) - kernel(2N)||_0^2 = sum_{N<n<=2N} contributions <= tail_bound(N)
  const double d = hermite::calibrate_sup_bound(64).d;
  for (double t : {0.5, 2.0}) {
    for (double x : {0.0, 0.7}) {
      const std::vector<double> px = hermite::psi_batch(32, x);
      double diff = 0.0;
      for (int n = 17; n <= 32; ++n) {
        diff += px[static_cast<size_t>(n)] * px[static_cast<size_t>(n)] *
                sin2_time_integral_over_rho(2.0 * n + 1.0, t);
      }
      CHECK(diff <= tail_bound(16, t, d));
    }
  }
}
