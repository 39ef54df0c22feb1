#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pbessel/errors.hpp"
#include "pbessel/quadrature.hpp"

using namespace pbessel;

TEST_CASE("polynomial and trigonometric integrals") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // Oscillatory integrand forces subdivision.
  CHECK(integrate([](double x) { return std::cos(40.0 * x); }, 0.0, 1.0) ==
        doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-9));
}

TEST_CASE("empty and reversed intervals") {
  CHECK(integrate([](double) { return 5.0; }, 2.0, 2.0) == 0.0);
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0) ==
        doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("subdivision budget is enforced") {
  QuadratureOptions opt;
  opt.max_subdivisions = 2;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-14;
  CHECK_THROWS_AS(
      integrate([](double x) { return std::cos(400.0 * x * x); }, 0.0, 4.0, opt),
      AccuracyError);
}

TEST_CASE("logarithmic endpoint integrals") {
  // int_0^1 (1 - ln x) dx = 2.
  CHECK(integrate_log_endpoint([](double x) { return 1.0 - std::log(x); }, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-9));
  // int_0^1 ln(x)^2 dx = 2.
  CHECK(integrate_log_endpoint(
            [](double x) { return std::log(x) * std::log(x); }, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-9));
  // Plain smooth integrand agrees with the adaptive rule.
  CHECK(integrate_log_endpoint([](double x) { return x * x; }, 0.7) ==
        doctest::Approx(0.7 * 0.7 * 0.7 / 3.0).epsilon(1e-9));
}

TEST_CASE("fixed-panel rule is deterministic and symmetric in its input") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  const double a = integrate_fixed(f, 0.0, 1.0, 16);
  const double b = integrate_fixed(f, 0.0, 1.0, 16);
  CHECK(a == b);
  const double want =
      integrate([](double x) { return std::exp(-x) * std::cos(3.0 * x); }, 0.0,
                1.0);
  CHECK(a == doctest::Approx(want).epsilon(1e-10));
}
