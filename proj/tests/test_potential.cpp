#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "pbessel/potential.hpp"

using namespace pbessel;

TEST_CASE("evaluation per representation") {
  CHECK(Potential::zero()(0.5) == 0.0);

  auto step = Potential::piecewise({0.5}, {1.0, -1.0});
  CHECK(step(0.25) == 1.0);
  CHECK(step(0.75) == -1.0);

  // Dense table of q(x) = x: interpolation error well under 1e-10.
  std::vector<double> tx, ty;
  const int n = 100000;
  for (int i = 0; i <= n; ++i) {
    tx.push_back(static_cast<double>(i) / n);
    ty.push_back(tx.back());
  }
  auto ramp = Potential::table(tx, ty);
  CHECK(std::abs(ramp(0.3) - 0.3) <= 1e-10);
  CHECK(std::abs(ramp(1.0 / 3.0) - 1.0 / 3.0) <= 1e-10);

  auto cosq = Potential::cosine_basis({0.8, -0.3}, 0.5);
  CHECK(cosq(0.2) ==
        doctest::Approx(0.8 - 0.3 * std::cos(M_PI * 0.2 / 0.5)).epsilon(1e-14));
  CHECK(cosq(0.9) == 0.0);

  auto poly = Potential::polynomial_basis({-0.5, 1.0}, 0.5);
  CHECK(poly(0.2) == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK(poly(0.8) == 0.0);

  auto fn = Potential::from_function([](double x) { return x * (1.0 - x); });
  CHECK(fn(0.4) == doctest::Approx(0.24).epsilon(1e-6));
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(Potential::piecewise({0.5, 0.5}, {1.0, 2.0, 3.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Potential::piecewise({0.7, 0.2}, {1.0, 2.0, 3.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Potential::piecewise({0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Potential::piecewise({1.5}, {1.0, 2.0}),
                  std::invalid_argument);
  const double bad = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Potential::constant(bad), std::invalid_argument);
  CHECK_THROWS_AS(Potential::table({0.0}, {1.0}), std::invalid_argument);
  auto q = Potential::zero();
  CHECK_THROWS_AS(q(0.0), std::domain_error);
  CHECK_THROWS_AS(q(1.5), std::domain_error);
}

TEST_CASE("class norms") {
  CHECK(weighted_norm(Potential::zero(), 0.0) == doctest::Approx(0.0));
  CHECK(weighted_norm(Potential::constant(1.0), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-10));
  // int_0^1 (1 - ln x) dx = 2 in the ell = -1/2 weighted class.
  CHECK(weighted_norm(Potential::constant(1.0), -0.5) ==
        doctest::Approx(2.0).epsilon(1e-8));
  CHECK(Potential::piecewise({0.5}, {1.0, -1.0}).l1_norm() ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("remainder functional") {
  auto q1 = Potential::constant(1.0);
  CHECK(remainder_R(q1, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
  // int_0^1 y/(1+2y) dy = 1/2 - ln(3)/4.
  CHECK(remainder_R(q1, 0.0, 4.0) ==
        doctest::Approx(0.5 - std::log(3.0) / 4.0).epsilon(1e-10));
  CHECK(remainder_R(Potential::zero(), 0.0, 7.0) == doctest::Approx(0.0));
  // Nonincreasing in lambda.
  double prev = remainder_R(q1, 0.5, 0.0);
  for (double lam : {1.0, 10.0, 100.0, 1e4}) {
    const double cur = remainder_R(q1, 0.5, lam);
    CHECK(cur <= prev + 1e-14);
    prev = cur;
  }
}

TEST_CASE("metadata and mandatory points") {
  auto q = Potential::piecewise({0.25, 0.5}, {1.0, 0.0, -2.0});
  REQUIRE(q.mandatory_points().size() == 2);
  CHECK(q.mandatory_points()[0] == 0.25);
  CHECK(q.mandatory_points()[1] == 0.5);

  q.set_split_point(0.5);
  CHECK(q.split_point() == 0.5);
  CHECK_THROWS_AS(q.set_split_point(0.0), std::invalid_argument);

  SmoothnessTag tag{1, 2.0, 0.1, 0, true};
  q.set_smoothness(tag);
  CHECK(q.smoothness().k == 1);
  SmoothnessTag bad{0, 0.5, 0.0, 0, true};
  CHECK_THROWS_AS(bad.validate(1.0), std::invalid_argument);
  SmoothnessTag bad2{0, 2.0, 0.9, 0, true};
  CHECK_THROWS_AS(bad2.validate(0.5), std::invalid_argument);
}

TEST_CASE("shifted potentials") {
  auto q = Potential::piecewise({0.5}, {1.0, -1.0}).shifted(2.0);
  CHECK(q(0.25) == 3.0);
  CHECK(q(0.75) == 1.0);
  auto c = Potential::cosine_basis({0.5, 0.5}, 0.4).shifted(-1.0);
  CHECK(c(0.9) == -1.0);
  CHECK(c(0.2) == doctest::Approx(0.5 + 0.5 * std::cos(M_PI * 0.5) - 1.0));
}

TEST_CASE("describe, parse, and hashing round trip") {
  auto q = Potential::piecewise({0.25, 0.5}, {1.7, -0.9, 0.4});
  q.set_split_point(0.5);
  SmoothnessTag tag{1, 2.0, 0.1, 1, true};
  q.set_smoothness(tag);

  auto back = Potential::parse(q.describe());
  CHECK(back.kind() == q.kind());
  CHECK(back.split_point() == q.split_point());
  CHECK(back.smoothness().k == 1);
  CHECK(back.smoothness().vanishing == 1);
  for (double x : {0.1, 0.3, 0.45, 0.8}) CHECK(back(x) == q(x));
  CHECK(back.hash_hex() == q.hash_hex());

  auto cosq = Potential::cosine_basis({0.9, -0.4, 0.25}, 1.0);
  auto cback = Potential::parse(cosq.describe());
  for (double x : {0.1, 0.5, 0.95}) {
    CHECK(cback(x) == doctest::Approx(cosq(x)).epsilon(1e-15));
  }

  CHECK(Potential::zero().hash_hex() != Potential::constant(1.0).hash_hex());
  CHECK_THROWS_AS(Potential::parse("kind = banana\n"), std::invalid_argument);
}

TEST_CASE("save and load") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "pbessel_test_q.toml";
  auto q = Potential::cosine_basis({0.8, -0.3}, 0.5);
  q.save(path.string());
  auto back = Potential::load(path.string());
  CHECK(back.hash_hex() == q.hash_hex());
  CHECK(back(0.3) == doctest::Approx(q(0.3)).epsilon(1e-15));
  fs::remove(path);
  CHECK_THROWS(Potential::load("/nonexistent/pbessel/file.toml"));
}

TEST_CASE("table representation handles non-uniform grids") {
  auto q = Potential::table({0.0, 0.1, 0.6, 1.0}, {0.0, 1.0, 1.0, 0.0});
  CHECK(q(0.05) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q(0.35) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q(0.8) == doctest::Approx(0.5).epsilon(1e-12));
}
