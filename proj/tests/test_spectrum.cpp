#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "pbessel/potential.hpp"
#include "pbessel/solver.hpp"
#include "pbessel/spectrum.hpp"

using namespace pbessel;

namespace {

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

SpectrumOptions fast_opts() {
  SpectrumOptions opt;
  opt.jobs = 4;
  return opt;
}

}  // namespace

TEST_CASE("free Dirichlet spectrum, ell = 0") {
  auto spec = locate_eigenvalues(0.0, Potential::zero(), kBetaInfinity, 3,
                                 fast_opts());
  REQUIRE(spec.points.size() == 3);
  for (int n = 1; n <= 3; ++n) {
    const auto& p = spec.points[n - 1];
    CHECK(p.index == n);
    CHECK(p.lambda ==
          doctest::Approx(n * n * M_PI * M_PI).epsilon(1e-8));
    CHECK(std::abs(p.residual) <= 1e-10);
  }
  CHECK(spec.center_offset == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("free Dirichlet spectrum, ell = 1, against the tan z = z oracle") {
  auto spec = locate_eigenvalues(1.0, Potential::zero(), kBetaInfinity, 2,
                                 fast_opts());
  REQUIRE(spec.points.size() == 2);
  for (int n = 1; n <= 2; ++n) {
    const double z = tan_z_equals_z_root(n);
    CHECK(spec.points[n - 1].lambda == doctest::Approx(z * z).epsilon(1e-8));
  }
}

TEST_CASE("constant shift moves the spectrum onto the negative axis") {
  auto spec = locate_eigenvalues(0.0, Potential::constant(-30.0), kBetaInfinity,
                                 2, fast_opts());
  REQUIRE(spec.points.size() == 2);
  CHECK(spec.points[0].lambda ==
        doctest::Approx(M_PI * M_PI - 30.0).epsilon(1e-9));
  CHECK(spec.points[0].lambda < 0.0);
  CHECK(spec.points[1].lambda ==
        doctest::Approx(4.0 * M_PI * M_PI - 30.0).epsilon(1e-9));
}

TEST_CASE("strongly negative Robin parameter has its low eigenvalue") {
  // Free ell = 0, beta = -10: the bottom eigenvalue solves
  // s cosh s + beta sinh s = 0 with lambda = -s^2.
  const double beta = -10.0;
  auto g = [&](double s) { return s * std::cosh(s) + beta * std::sinh(s); };
  double lo = 1.0, hi = 15.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(lo) * g(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double s = 0.5 * (lo + hi);
  auto spec =
      locate_eigenvalues(0.0, Potential::zero(), beta, 2, fast_opts());
  CHECK(spec.points[0].lambda == doctest::Approx(-s * s).epsilon(1e-8));
}

TEST_CASE("free Neumann-type centers") {
  // beta = 0, ell = 0: Delta = cos z, so sqrt(lambda_n) = (n - 1/2) pi.
  auto spec =
      locate_eigenvalues(0.0, Potential::zero(), 0.0, 3, fast_opts());
  for (int n = 1; n <= 3; ++n) {
    const double z = (n - 0.5) * M_PI;
    CHECK(spec.points[n - 1].lambda == doctest::Approx(z * z).epsilon(1e-8));
  }
  CHECK(spec.center_offset == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("norming constants and multipliers on the free problem") {
  auto q0 = Potential::zero();
  auto spec = locate_eigenvalues(0.0, q0, kBetaInfinity, 3, fast_opts());
  for (const auto& p : spec.points) {
    const int n = p.index;
    CHECK(norming_constant(p, 0.0, q0) ==
          doctest::Approx(1.0 / (2.0 * n * n * M_PI * M_PI)).epsilon(1e-8));
    const double kap = multiplier_kappa(p, 0.0, q0);
    CHECK(kap == doctest::Approx(n % 2 == 1 ? 1.0 : -1.0).epsilon(1e-8));
  }
}

TEST_CASE("zeta = kappa^2 tau on a perturbed problem") {
  auto q = Potential::from_function([](double x) { return x; });
  for (double ell : {0.0, 2.0}) {
    auto spec = locate_eigenvalues(ell, q, kBetaInfinity, 3, fast_opts());
    for (const auto& p : spec.points) {
      const double zeta = norming_constant(p, ell, q);
      const double kap = multiplier_kappa(p, ell, q);
      const double tau = tau_integral(ell, q, p.lambda);
      CHECK(zeta > 0.0);
      CHECK(zeta == doctest::Approx(kap * kap * tau).epsilon(1e-6));
    }
  }
}

TEST_CASE("attach_norming_data fills every point") {
  auto q = Potential::piecewise({0.5}, {1.0, -0.5});
  auto spec = locate_eigenvalues(0.5, q, 0.0, 4, fast_opts());
  attach_norming_data(spec, 0.5, q, fast_opts());
  for (const auto& p : spec.points) {
    CHECK(p.zeta > 0.0);
    CHECK(p.kappa != 0.0);
    CHECK(p.zeta ==
          doctest::Approx(p.kappa * p.kappa * tau_integral(0.5, q, p.lambda))
              .epsilon(1e-6));
  }
}

TEST_CASE("indices come from oscillation counts and stay contiguous") {
  auto q = Potential::cosine_basis({0.9, -0.4, 0.25}, 1.0);
  auto spec = locate_eigenvalues(1.0, q, kBetaInfinity, 6, fast_opts());
  REQUIRE(spec.points.size() == 6);
  for (int n = 1; n <= 6; ++n) {
    CHECK(spec.points[n - 1].index == n);
    CHECK(oscillation_count(1.0, q, spec.points[n - 1].lambda) == n - 1);
  }
  for (std::size_t i = 1; i < spec.points.size(); ++i) {
    CHECK(spec.points[i].lambda > spec.points[i - 1].lambda);
  }
}

TEST_CASE("eigenvalue asymptotic centers for a perturbed ell = 2 problem") {
  auto q = Potential::from_function([](double x) { return x; });
  auto spec = locate_eigenvalues(2.0, q, kBetaInfinity, 12, fast_opts());
  // sqrt(lambda_n) = (n + offset) pi + O(1/n): the scaled deviation n * gap
  // must not grow.
  double worst = 0.0;
  for (const auto& p : spec.points) {
    const double center = (p.index + spec.center_offset) * M_PI;
    worst = std::max(worst,
                     p.index * std::abs(std::sqrt(p.lambda) - center));
  }
  CHECK(worst <= 1.0);
}

TEST_CASE("serialization shapes") {
  auto spec = locate_eigenvalues(0.0, Potential::zero(), kBetaInfinity, 2,
                                 fast_opts());
  const std::string csv = spec.to_csv();
  CHECK(csv.find("n,lambda,zeta,kappa,residual") != std::string::npos);
  CHECK(csv.find("# ell = 0") != std::string::npos);
  const std::string json = spec.to_json();
  CHECK(json.find("\"beta\":\"inf\"") != std::string::npos);
  CHECK(json.find("\"points\"") != std::string::npos);
}

TEST_CASE("norming operations reject non-eigenvalues") {
  auto q0 = Potential::zero();
  SpectralPoint fake;
  fake.lambda = 12.0;  // not an eigenvalue of the free Dirichlet problem
  fake.index = 1;
  fake.beta = kBetaInfinity;
  CHECK_THROWS(multiplier_kappa(fake, 0.0, q0));
}
