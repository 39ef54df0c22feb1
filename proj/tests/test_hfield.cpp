#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "pbessel/hfield.hpp"
#include "pbessel/potential.hpp"
#include "pbessel/solver.hpp"
#include "pbessel/spectrum.hpp"

using namespace pbessel;

namespace {

using complexd = std::complex<double>;

// Bisect a sign change of H between two real lambdas.
double bisect_h_zero(double ell, const Potential& q, const Potential& qhat,
                     double lo, double hi) {
  auto sgn = [&](double lam) {
    return h_value(ell, q, qhat, {lam, 0.0}).mantissa.real();
  };
  double flo = sgn(lo);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = sgn(mid);
    if (flo * fm <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("constant-shift closed form, both evaluation routes") {
  auto q0 = Potential::zero();
  auto qc = Potential::constant(2.5);
  auto sc = [](complexd w) { return std::sin(w) / w; };
  for (double lam : {7.0, 30.0, -4.0}) {
    const complexd u = std::sqrt(complexd(lam, 0.0));
    const complexd v = std::sqrt(complexd(lam - 2.5, 0.0));
    const double want = (sc(u) * std::cos(v) - sc(v) * std::cos(u)).real();
    CHECK(h_value(0.0, q0, qc, {lam, 0.0}).real() ==
          doctest::Approx(want).epsilon(1e-6));
    CHECK(h_value_integral(0.0, q0, qc, 1.0, {lam, 0.0}).real() ==
          doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("antisymmetry and self-annihilation") {
  auto q0 = Potential::zero();
  auto qc = Potential::constant(2.5);
  const Scaled a = h_value(0.0, q0, qc, {7.0, 0.0});
  const Scaled b = h_value(0.0, qc, q0, {7.0, 0.0});
  CHECK(a.mantissa == -b.mantissa);
  CHECK(a.log_scale == b.log_scale);

  auto q = Potential::piecewise({0.5}, {1.0, -0.5});
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> re(-50.0, 400.0), im(-30.0, 30.0);
  for (int i = 0; i < 10; ++i) {
    const Scaled h = h_value(0.0, q, q, {re(rng), im(rng)});
    CHECK(h.is_zero());
  }
}

TEST_CASE("H is real on the real axis and conjugate-symmetric") {
  auto q = Potential::piecewise({0.25, 0.5}, {1.2, -0.7, 0.3});
  auto qhat = Potential::piecewise({0.35, 0.5}, {-0.4, 0.9, 0.3});
  for (double lam : {3.0, 47.0, 151.0}) {
    const Scaled h = h_value(0.0, q, qhat, {lam, 0.0});
    CHECK(std::abs(h.mantissa.imag()) <= 1e-8 * std::abs(h.mantissa.real()));
  }
  const complexd z(19.0, 7.0);
  const Scaled hp = h_value(0.0, q, qhat, z);
  const Scaled hm = h_value(0.0, q, qhat, std::conj(z));
  CHECK(hm.mantissa.real() ==
        doctest::Approx(hp.mantissa.real()).epsilon(1e-8));
  CHECK(hm.mantissa.imag() ==
        doctest::Approx(-hp.mantissa.imag()).epsilon(1e-8));
  CHECK(hm.log_scale == doctest::Approx(hp.log_scale).epsilon(1e-12));
}

TEST_CASE("determinant and integral routes agree off the full interval") {
  auto q = Potential::piecewise({0.25, 0.5}, {1.2, -0.7, 0.3});
  auto qhat = Potential::piecewise({0.35, 0.5}, {-0.4, 0.9, 0.3});
  for (double lam : {5.0, 60.0}) {
    const double det = h_value(0.0, q, qhat, {lam, 0.0}).real();
    const double integral =
        h_value_integral(0.0, q, qhat, 0.5, {lam, 0.0}).real();
    CHECK(integral == doctest::Approx(det).epsilon(1e-6));
  }
  // Differing tails violate the integral representation's precondition.
  auto bad = Potential::piecewise({0.5}, {1.0, 0.7});
  CHECK_THROWS_AS(h_value_integral(0.0, q, bad, 0.5, {5.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("derivative routes agree") {
  auto q0 = Potential::zero();
  auto qc = Potential::constant(2.5);
  for (double lam : {7.0, 88.9}) {
    const double cs = h_derivative(0.0, q0, qc, lam);
    const double fd = h_derivative_fd(0.0, q0, qc, lam);
    CHECK(std::abs(cs - fd) <= 1e-6 * std::abs(cs));
  }
}

TEST_CASE("a zero of H is a shared eigenvalue for its Robin parameter") {
  auto q = Potential::piecewise({0.25, 0.5}, {1.2, -0.7, 0.3});
  auto qhat = Potential::piecewise({0.35, 0.5}, {-0.4, 0.9, 0.3});
  const double ell = 0.0;

  // Locate the first sign change on a coarse real scan.
  double prev = h_value(ell, q, qhat, {2.0, 0.0}).mantissa.real();
  double lam_star = 0.0;
  for (double lam = 3.0; lam < 150.0; lam += 1.0) {
    const double cur = h_value(ell, q, qhat, {lam, 0.0}).mantissa.real();
    if (prev * cur < 0.0) {
      lam_star = bisect_h_zero(ell, q, qhat, lam - 1.0, lam);
      break;
    }
    prev = cur;
  }
  REQUIRE(lam_star != 0.0);

  // The columns are proportional there: both problems share the Robin
  // parameter beta* = -phi'(1)/phi(1).
  const Endpoint eq = phi_endpoint(ell, q, {lam_star, 0.0});
  const Endpoint eh = phi_endpoint(ell, qhat, {lam_star, 0.0});
  const double beta_q = -eq.derivative.real() / eq.value.real();
  const double beta_h = -eh.derivative.real() / eh.value.real();
  CHECK(beta_q == doctest::Approx(beta_h).epsilon(1e-6));

  SpectrumOptions sopt;
  sopt.jobs = 4;
  bool in_q = false, in_qhat = false;
  SpectralPoint pq{}, ph{};
  for (const auto& p : locate_eigenvalues(ell, q, beta_q, 8, sopt).points) {
    if (std::abs(p.lambda - lam_star) <= 1e-7 * (1.0 + std::abs(lam_star))) {
      in_q = true;
      pq = p;
    }
  }
  for (const auto& p : locate_eigenvalues(ell, qhat, beta_q, 8, sopt).points) {
    if (std::abs(p.lambda - lam_star) <= 1e-7 * (1.0 + std::abs(lam_star))) {
      in_qhat = true;
      ph = p;
    }
  }
  CHECK(in_q);
  CHECK(in_qhat);

  // dH/dlambda at the shared eigenvalue carries the norming-constant gap.
  if (in_q && in_qhat) {
    const double zeta = norming_constant(pq, ell, q);
    const double kap = multiplier_kappa(pq, ell, q);
    const double zeta_hat = norming_constant(ph, ell, qhat);
    const double kap_hat = multiplier_kappa(ph, ell, qhat);
    const double want = (zeta_hat - zeta) / (kap * kap_hat);
    const double got = h_derivative(ell, q, qhat, lam_star);
    CHECK(got == doctest::Approx(want).epsilon(1e-5));
  }
}

TEST_CASE("mean perturbation limit") {
  auto q0 = Potential::zero();
  std::vector<double> grid;
  const double lmax = 4e6;
  const int per = 48;
  for (int i = 0; i <= 3 * per; ++i) {
    grid.push_back(lmax * std::pow(2.0, static_cast<double>(i) / per - 3.0));
  }

  auto qstep = Potential::piecewise({0.5}, {1.0, 0.0});
  auto mp = mean_perturbation_limit(0, qstep, q0, grid, {}, 8);
  CHECK(mp.converged);
  CHECK(mp.value == doctest::Approx(0.25).epsilon(4e-4));

  auto qsgn = Potential::piecewise({0.25, 0.5}, {-1.0, 1.0, 0.0});
  auto mp0 = mean_perturbation_limit(0, qsgn, q0, grid, {}, 8);
  CHECK(mp0.converged);
  CHECK(std::abs(mp0.value) <= 1e-4);

  auto same = mean_perturbation_limit(0, qstep, qstep, grid, {}, 8);
  CHECK(same.converged);
  CHECK(same.value == 0.0);

  CHECK_THROWS_AS(mean_perturbation_limit(0, qstep, q0, {2.0, 1.0}),
                  std::invalid_argument);
  // A grid too sparse for the octave averages reports non-convergence
  // instead of guessing.
  CHECK_FALSE(mean_perturbation_limit(0, qstep, q0, {1.0, 4.0, 16.0}).converged);
}

TEST_CASE("envelope bound") {
  auto q0 = Potential::zero();
  std::vector<complexd> zs;
  for (int i = 0; i < 12; ++i) {
    const double t = std::pow(10.0, std::log10(1.0) +
                                        i * (std::log10(20.0) / 11.0));
    zs.push_back({0.0, t});
    zs.push_back({3.0, t});
  }

  SmoothnessTag tag{0, std::numeric_limits<double>::infinity(), 0.2, 0, true};

  // Equal potentials: every sample is zero and the bound holds trivially.
  auto rep0 = envelope_check(0.0, q0, q0, 0.6, tag, zs, {}, 8);
  CHECK(rep0.holds);

  // Smooth bump vanishing at the split point, supported delta0 inside it:
  // the fit recovers an exponential margin of at least delta0/2.
  auto bump = Potential::cosine_basis({0.5, 0.5}, 0.4);
  auto rep = envelope_check(0.0, bump, q0, 0.6, tag, zs, {}, 8);
  CHECK(rep.holds);
  CHECK(rep.delta >= 0.1);

  CHECK_THROWS_AS(
      envelope_check(0.0, bump, q0, 0.6, tag, {complexd(3.0, 0.0)}),
      std::invalid_argument);
}

TEST_CASE("one more vanishing derivative steepens the decay slope by one") {
  auto q0 = Potential::zero();
  // Nonzero value at the split point: slope near -(0+1).
  auto k0 = Potential::cosine_basis({0.8, -0.3}, 0.5);
  // Zero value, nonzero first derivative: slope near -(1+1).
  auto k1 = Potential::polynomial_basis({-0.5, 1.0}, 0.5);
  const double s0 = imaginary_axis_decay_slope(0.0, k0, q0, 0.5, 4.0, 20.0, 16, {}, 8);
  const double s1 = imaginary_axis_decay_slope(0.0, k1, q0, 0.5, 4.0, 20.0, 16, {}, 8);
  CHECK(s0 - s1 == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("cosine transform of Lemma-type data") {
  auto one = [](double) { return 1.0; };
  CHECK(std::abs(cosine_transform_F(one, 1.0, M_PI * M_PI / 4.0)) <= 1e-9);
  CHECK(cosine_transform_F_kth0(one, 1.0, 1) ==
        doctest::Approx(-2.0 / 3.0).epsilon(1e-9));
  const double fp = cosine_transform_F_prime(one, 1.0, 3.0);
  const double fd = (cosine_transform_F(one, 1.0, 3.0 + 1e-6) -
                     cosine_transform_F(one, 1.0, 3.0 - 1e-6)) /
                    2e-6;
  CHECK(std::abs(fp - fd) <= 1e-6 * std::abs(fp));
  // Hyperbolic branch: F(-1) = int cosh(2x) = sinh(2)/2 for f = 1, a = 1.
  CHECK(cosine_transform_F(one, 1.0, -1.0) ==
        doctest::Approx(std::sinh(2.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("profile sampling") {
  auto q = Potential::piecewise({0.5}, {1.0, 0.3});
  auto qhat = Potential::piecewise({0.5}, {-0.2, 0.3});
  std::vector<complexd> lams = {{5.0, 0.0}, {20.0, 0.0}, {11.0, 4.0}};
  auto prof = sample_h_profile(0.0, q, qhat, 0.5, lams, true, {}, 4);
  REQUIRE(prof.samples.size() == 3);
  CHECK(prof.q_hash == q.hash_hex());
  CHECK(prof.qhat_hash == qhat.hash_hex());
  CHECK(std::isfinite(prof.samples[0].h_dot));
  CHECK(std::isfinite(prof.samples[1].h_dot));
  // Derivative only attaches on the real axis.
  CHECK(!std::isfinite(prof.samples[2].h_dot));
  const std::string json = prof.to_json();
  CHECK(json.find("\"samples\"") != std::string::npos);
}
