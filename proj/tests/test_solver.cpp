#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "pbessel/potential.hpp"
#include "pbessel/solver.hpp"

using namespace pbessel;

namespace {

double real_value(const SolutionSample& s, std::size_t i) {
  return s.value_at(i).real();
}

// First positive root of tan z = z via bisection on the entire function
// g(z) = sin z - z cos z, whose positive zeros are exactly those roots.
double tan_z_equals_z_root(int n) {
  auto g = [](double z) { return std::sin(z) - z * std::cos(z); };
  double lo = n * M_PI, hi = n * M_PI + M_PI / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(lo) * g(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normalization constants") {
  CHECK(c_ell(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c_ell(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(c_ell(2.0) == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
  // sqrt(pi)/(Gamma(1) 2^(1/2)) at ell = -1/2.
  CHECK(c_ell(-0.5) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-14));
}

TEST_CASE("free regular solutions") {
  auto q0 = Potential::zero();

  // ell = 0: phi = sin(sqrt(lambda) x)/sqrt(lambda).
  auto s = phi(0.0, q0, {M_PI * M_PI, 0.0}, {0.5, 1.0});
  CHECK(real_value(s, 0) == doctest::Approx(std::sin(M_PI / 2) / M_PI).epsilon(1e-9));
  CHECK(std::abs(real_value(s, 1)) <= 1e-9);

  // ell = 1: phi = x j_1(z x)/z with j_1(u) = sin u/u^2 - cos u/u.
  const double lam = 7.3, x = 0.77, z = std::sqrt(lam);
  auto s1 = phi(1.0, q0, {lam, 0.0}, {x});
  const double j1 = std::sin(z * x) / ((z * x) * (z * x)) - std::cos(z * x) / (z * x);
  CHECK(real_value(s1, 0) == doctest::Approx(x * j1 / z).epsilon(1e-9));

  // Negative lambda: sin(i x)/i = sinh x.
  auto sm = phi(0.0, q0, {-1.0, 0.0}, {1.0});
  CHECK(real_value(sm, 0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-9));
}

TEST_CASE("regular solution matches x^(ell+1) normalization near zero") {
  auto q = Potential::piecewise({0.5}, {1.0, -0.5});
  for (double ell : {0.0, 0.5, 1.0, 2.0}) {
    auto s = phi(ell, q, {11.0, 0.0}, {1e-4, 1e-3});
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double ratio = s.value_at(i).real() / std::pow(s.x[i], ell + 1.0);
      CHECK(ratio == doctest::Approx(c_ell(ell)).epsilon(5e-5));
    }
  }
}

TEST_CASE("terminal solutions") {
  auto q0 = Potential::zero();

  // Free Dirichlet at an eigenvalue: psi = sin(n pi (1-x))/(n pi).
  for (int n : {1, 3}) {
    auto s = psi(0.0, q0, {n * n * M_PI * M_PI, 0.0}, kBetaInfinity,
                 {0.25, 0.5, 0.9});
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      CHECK(s.value_at(i).real() ==
            doctest::Approx(std::sin(n * M_PI * (1.0 - s.x[i])) / (n * M_PI))
                .epsilon(1e-8));
    }
  }

  // beta = 0 initial data: psi(1) = 1, psi'(1) = 0.
  auto sN = psi(0.0, q0, {5.0, 0.0}, 0.0, {1.0});
  CHECK(sN.value_at(0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(sN.derivative_at(0).real()) <= 1e-12);

  // Eigenfunction vanishes toward the singular endpoint at an eigenvalue.
  auto s0 = psi(0.0, q0, {M_PI * M_PI, 0.0}, kBetaInfinity, {1e-3});
  CHECK(std::abs(s0.value_at(0).real()) <= 1e-5);
}

TEST_CASE("Wronskian of phi and psi is x-independent and equals Delta") {
  auto q = Potential::piecewise({0.5}, {1.0, -0.5});
  const double ell = 1.0, lam = 17.0;
  for (double beta : {kBetaInfinity, 0.0, -2.0}) {
    std::vector<double> grid = {0.2, 0.4, 0.6, 0.8, 1.0};
    auto f = phi(ell, q, {lam, 0.0}, grid);
    auto g = psi(ell, q, {lam, 0.0}, beta, grid);
    const double delta = characteristic(ell, q, {lam, 0.0}, beta).real();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double w = g.value_at(i).real() * f.derivative_at(i).real() -
                       g.derivative_at(i).real() * f.value_at(i).real();
      CHECK(w == doctest::Approx(delta).epsilon(1e-7));
    }
  }
}

TEST_CASE("characteristic function closed forms") {
  auto q0 = Potential::zero();
  CHECK(std::abs(characteristic(0.0, q0, {M_PI * M_PI, 0.0}, kBetaInfinity).real()) <=
        1e-10);
  CHECK(characteristic(0.0, q0, {M_PI * M_PI / 4.0, 0.0}, kBetaInfinity).real() ==
        doctest::Approx(2.0 / M_PI).epsilon(1e-9));

  // ell = 1 Dirichlet zeros are the roots of tan z = z.
  const double z1 = tan_z_equals_z_root(1);
  CHECK(z1 == doctest::Approx(4.4934094579).epsilon(1e-9));
  CHECK(std::abs(characteristic(1.0, q0, {z1 * z1, 0.0}, kBetaInfinity).real()) <=
        1e-8);

  // Finite beta: Delta = phi'(1) + beta phi(1) = cos z + beta sin z / z.
  const double lam = 13.0, z = std::sqrt(lam), beta = 1.5;
  CHECK(characteristic(0.0, q0, {lam, 0.0}, beta).real() ==
        doctest::Approx(std::cos(z) + beta * std::sin(z) / z).epsilon(1e-9));
}

TEST_CASE("characteristic derivative") {
  auto q0 = Potential::zero();
  for (int n : {1, 2, 3}) {
    const double lam = n * n * M_PI * M_PI;
    const double want = (n % 2 == 0 ? 1.0 : -1.0) / (2.0 * lam);
    CHECK(characteristic_derivative(0.0, q0, lam, kBetaInfinity) ==
          doctest::Approx(want).epsilon(1e-9));
  }
  // Complex-step and central-difference routes agree on a perturbed problem.
  auto q = Potential::cosine_basis({0.9, -0.4, 0.25}, 1.0);
  for (double beta : {kBetaInfinity, 0.0}) {
    const double cs = characteristic_derivative(0.5, q, 19.0, beta);
    const double fd = characteristic_derivative_fd(0.5, q, 19.0, beta);
    CHECK(std::abs(cs - fd) <= 1e-6 * std::abs(cs));
  }
}

TEST_CASE("tau integral on the free problem") {
  auto q0 = Potential::zero();
  // int_0^1 sin^2(pi x)/pi^2 dx = 1/(2 pi^2).
  CHECK(tau_integral(0.0, q0, M_PI * M_PI) ==
        doctest::Approx(1.0 / (2.0 * M_PI * M_PI)).epsilon(1e-8));
  // Off-eigenvalue closed form: int sin^2(z x)/z^2 = (1 - sin(2z)/(2z))/(2z^2).
  const double lam = 10.0, z = std::sqrt(lam);
  CHECK(tau_integral(0.0, q0, lam) ==
        doctest::Approx((1.0 - std::sin(2 * z) / (2 * z)) / (2 * lam)).epsilon(1e-8));
}

TEST_CASE("oscillation count on the free problem") {
  auto q0 = Potential::zero();
  CHECK(oscillation_count(0.0, q0, 0.25 * M_PI * M_PI) == 0);
  CHECK(oscillation_count(0.0, q0, 2.25 * M_PI * M_PI) == 1);
  CHECK(oscillation_count(0.0, q0, 12.25 * M_PI * M_PI) == 3);
}

TEST_CASE("argument guards") {
  auto q0 = Potential::zero();
  CHECK_THROWS_AS(phi(0.0, q0, {1.0, 0.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(phi(0.0, q0, {1.0, 0.0}, {1.5}), std::invalid_argument);
  CHECK_THROWS_AS(phi(-0.8, q0, {1.0, 0.0}, {0.5}), std::domain_error);
}
