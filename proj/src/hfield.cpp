#include "pbessel/hfield.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "pbessel/errors.hpp"
#include "pbessel/format.hpp"
#include "pbessel/ode.hpp"
#include "pbessel/parallel.hpp"
#include "pbessel/quadrature.hpp"

namespace pbessel {

namespace {

void check_split(double a) {
  if (!(a > 0.0) || !(a <= 1.0)) {
    throw std::invalid_argument("hfield: split point must lie in (0,1], got " +
                                g17(a));
  }
}

// q and qhat must agree past the split point for the integral representation
// and the asymptotic operations to apply.
void check_agreement_past(const Potential& q, const Potential& qhat, double a) {
  if (a == 1.0) return;
  const int n = 33;
  for (int i = 0; i < n; ++i) {
    const double x = a + (i + 0.5) / n * (1.0 - a);
    const double u = q(x), v = qhat(x);
    if (std::abs(u - v) > 1e-10 * (1.0 + std::abs(u) + std::abs(v))) {
      throw std::invalid_argument(
          "hfield: potentials differ past the split point at x = " + g17(x));
    }
  }
}

struct PairRhs {
  double centrifugal;
  const Potential* q;
  const Potential* qhat;
  std::complex<double> lambda;

  // y = (phi, phi', phihat, phihat', K) with K' = (q - qhat) phi phihat.
  void operator()(double x, const OdeState<5>& y, OdeState<5>& dy) const {
    const double u = q->value_unchecked(x);
    const double v = qhat->value_unchecked(x);
    const double cf = centrifugal / (x * x);
    dy[0] = y[1];
    dy[1] = (cf + u - lambda) * y[0];
    dy[2] = y[3];
    dy[3] = (cf + v - lambda) * y[2];
    dy[4] = (u - v) * y[0] * y[2];
  }
};

double slope_of(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("hfield: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace

Scaled h_value(double ell, const Potential& q, const Potential& qhat,
               std::complex<double> lambda, const SolverOptions& opt) {
  const Endpoint e = phi_endpoint(ell, q, lambda, opt);
  const Endpoint ehat = phi_endpoint(ell, qhat, lambda, opt);
  return ehat.value * e.derivative - e.value * ehat.derivative;
}

Scaled h_value_integral(double ell, const Potential& q, const Potential& qhat,
                        double a, std::complex<double> lambda,
                        const SolverOptions& opt) {
  check_split(a);
  check_agreement_past(q, qhat, a);

  const double x0 = regular_start_x(ell, lambda, opt);
  OdeState<5> y;
  regular_start_data(ell, q, lambda, x0, y[0], y[1]);
  regular_start_data(ell, qhat, lambda, x0, y[2], y[3]);
  const double c = c_ell(ell);
  y[4] = (q.value_unchecked(x0) - qhat.value_unchecked(x0)) * c * c *
         std::pow(x0, 2.0 * ell + 3.0) / (2.0 * ell + 3.0);

  std::vector<double> cps;
  for (const Potential* p : {&q, &qhat}) {
    for (double b : p->mandatory_points()) {
      if (b > x0 && b < a) cps.push_back(b);
    }
  }
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  cps.push_back(a);

  OdeOptions oopt;
  oopt.abs_tol = opt.abs_tol;
  oopt.rel_tol = opt.rel_tol;
  oopt.max_step = opt.max_step;
  oopt.rescale = false;  // the K component is quadratic in the pair
  oopt.initial_step = 0.05 * x0;
  PairRhs rhs{ell * (ell + 1.0), &q, &qhat, lambda};
  std::complex<double> k_end = 0.0;
  integrate_ode<5>(rhs, x0, y, cps, oopt,
                   [&](std::size_t k, double, const OdeState<5>& yk, double) {
                     if (k + 1 == cps.size()) k_end = yk[4];
                   });
  return Scaled::from(k_end);
}

double h_derivative(double ell, const Potential& q, const Potential& qhat,
                    double lambda, const SolverOptions& opt) {
  const double h = 1e-12 * std::max(1.0, std::abs(lambda));
  const Scaled d = h_value(ell, q, qhat, {lambda, h}, opt);
  return d.mantissa.imag() * std::exp(d.log_scale) / h;
}

double h_derivative_fd(double ell, const Potential& q, const Potential& qhat,
                       double lambda, const SolverOptions& opt) {
  const double h = 6e-6 * std::max(1.0, std::abs(lambda));
  const double hi = h_value(ell, q, qhat, {lambda + h, 0.0}, opt).real();
  const double lo = h_value(ell, q, qhat, {lambda - h, 0.0}, opt).real();
  return (hi - lo) / (2.0 * h);
}

MeanPerturbationResult mean_perturbation_limit(
    int ell, const Potential& q, const Potential& qhat,
    const std::vector<double>& lambda_grid, const SolverOptions& opt,
    int jobs) {
  if (ell < 0) {
    throw std::invalid_argument("mean_perturbation_limit: ell must be >= 0");
  }
  if (lambda_grid.size() < 2 || !(lambda_grid.front() > 0.0)) {
    throw std::invalid_argument(
        "mean_perturbation_limit: grid must be positive with >= 2 points");
  }
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) {
      throw std::invalid_argument("mean_perturbation_limit: grid not ascending");
    }
  }

  // s(lambda) = lambda^(ell+1) H(lambda); bounded as lambda grows, with an
  // oscillatory tail around the limit.
  std::vector<double> s(lambda_grid.size());
  parallel_for(lambda_grid.size(), jobs, [&](std::size_t i) {
    const Scaled h = h_value(ell, q, qhat, {lambda_grid[i], 0.0}, opt);
    s[i] = h.mantissa.real() *
           std::exp(h.log_scale + (ell + 1.0) * std::log(lambda_grid[i]));
  });

  // Hann-weighted averages over the last three octaves in ln(lambda).
  const double lmax = lambda_grid.back();
  double means[3] = {0.0, 0.0, 0.0};
  bool sparse = false;
  for (int o = 0; o < 3; ++o) {
    const double lo = lmax * std::pow(2.0, o - 3);
    const double hi = lmax * std::pow(2.0, o - 2);
    const double lln = std::log(lo), hln = std::log(hi);
    double num = 0.0, den = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      if (lambda_grid[i] < lo || lambda_grid[i] > hi) continue;
      const double t = (std::log(lambda_grid[i]) - lln) / (hln - lln);
      const double w = std::sin(M_PI * t) * std::sin(M_PI * t);
      num += w * s[i];
      den += w;
      ++used;
    }
    if (used < 6 || den <= 0.0) {
      sparse = true;
      break;
    }
    means[o] = num / den;
  }

  MeanPerturbationResult out;
  if (sparse) {
    // Not enough resolution for the extrapolation; report the plain tail mean.
    double acc = 0.0;
    std::size_t tail = lambda_grid.size() / 2;
    for (std::size_t i = tail; i < lambda_grid.size(); ++i) acc += s[i];
    out.value = acc / (lambda_grid.size() - tail);
    out.converged = false;
    out.err_estimate = std::abs(out.value - s.back());
    return out;
  }

  const double d1 = means[1] - means[0];
  const double d2 = means[2] - means[1];
  const double dd = d2 - d1;
  double limit = means[2];
  if (std::abs(dd) > 1e-300) limit = means[2] - d2 * d2 / dd;
  out.value = limit;
  out.err_estimate = std::abs(limit - means[2]) + 0.3 * std::abs(d2);
  out.converged = out.err_estimate <= 1e-4 ||
                  out.err_estimate <= 1e-3 * std::abs(limit);
  return out;
}

EnvelopeReport envelope_check(double ell, const Potential& q,
                              const Potential& qhat, double a,
                              const SmoothnessTag& tag,
                              const std::vector<std::complex<double>>& z_samples,
                              const SolverOptions& opt, int jobs) {
  check_split(a);
  tag.validate(a);
  if (z_samples.empty()) {
    throw std::invalid_argument("envelope_check: no samples");
  }
  for (const auto& z : z_samples) {
    if (z.imag() == 0.0) {
      throw std::invalid_argument("envelope_check: samples must have Im z != 0");
    }
  }
  // 1/p' = 1 - 1/p (conjugate exponent); p = inf gives 1.
  const double inv_pp = std::isinf(tag.p) ? 1.0 : 1.0 - 1.0 / tag.p;
  const double im_exp = tag.k + inv_pp;

  EnvelopeReport rep;
  rep.samples.resize(z_samples.size());
  parallel_for(z_samples.size(), jobs, [&](std::size_t i) {
    const std::complex<double> z = z_samples[i];
    const Scaled h = h_value(ell, q, qhat, z * z, opt);
    const double im = std::abs(z.imag());
    const double ln_s = h.log_abs() + (2.0 * ell + 2.0) * std::log(std::abs(z)) +
                        im_exp * std::log(im) - 2.0 * a * im;
    rep.samples[i] = EnvelopeSample{z, std::exp(ln_s)};
  });

  double im_max = 0.0, s_max = 0.0;
  for (const auto& smp : rep.samples) {
    im_max = std::max(im_max, std::abs(smp.z.imag()));
    s_max = std::max(s_max, smp.scaled_h);
  }
  if (s_max == 0.0) {
    rep.holds = true;
    rep.worst = rep.samples.front();
    return rep;
  }

  // Far-field floor of the scaled magnitude serves as eps.
  double eps = 0.0;
  for (const auto& smp : rep.samples) {
    if (std::abs(smp.z.imag()) >= 0.8 * im_max) {
      eps = std::max(eps, smp.scaled_h);
    }
  }
  rep.eps = eps;

  // Grid over (gamma, delta) with the amplitude fitted in the log domain.
  double best_sse = std::numeric_limits<double>::infinity();
  for (int gi = 1; gi <= 19; ++gi) {
    const double gamma = 0.05 * gi;
    for (int di = 0; di < 25; ++di) {
      const double delta = 2.0 * a * std::pow(10.0, -3.0 * di / 24.0);
      double acc = 0.0;
      int used = 0;
      std::vector<double> lnu(rep.samples.size()), lnt(rep.samples.size());
      for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const auto& smp = rep.samples[i];
        if (smp.scaled_h <= 1.5 * eps || smp.scaled_h == 0.0) continue;
        const double im = std::abs(smp.z.imag());
        const double u = std::pow(std::abs(smp.z), gamma) * std::exp(-delta * im) +
                         std::pow(im, im_exp) * std::exp(-2.0 * delta * im);
        lnu[used] = std::log(u);
        lnt[used] = std::log(smp.scaled_h - eps);
        acc += lnt[used] - lnu[used];
        ++used;
      }
      if (used == 0) continue;
      const double lnC = acc / used;
      double sse = 0.0;
      for (int i = 0; i < used; ++i) {
        const double r = lnt[i] - lnu[i] - lnC;
        sse += r * r;
      }
      if (sse < best_sse) {
        best_sse = sse;
        rep.gamma = gamma;
        rep.delta = delta;
        rep.C = std::exp(lnC);
      }
    }
  }

  rep.ratio_max = 0.0;
  for (const auto& smp : rep.samples) {
    const double im = std::abs(smp.z.imag());
    const double env =
        eps +
        rep.C * (std::pow(std::abs(smp.z), rep.gamma) * std::exp(-rep.delta * im) +
                 std::pow(im, im_exp) * std::exp(-2.0 * rep.delta * im));
    const double ratio = (env > 0.0)
                             ? smp.scaled_h / env
                             : std::numeric_limits<double>::infinity();
    if (ratio > rep.ratio_max) {
      rep.ratio_max = ratio;
      rep.worst = smp;
    }
  }
  rep.holds = rep.ratio_max <= 10.0;
  return rep;
}

double imaginary_axis_decay_slope(double ell, const Potential& q,
                                  const Potential& qhat, double a, double t_lo,
                                  double t_hi, int count,
                                  const SolverOptions& opt, int jobs) {
  check_split(a);
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || count < 2) {
    throw std::invalid_argument("imaginary_axis_decay_slope: bad grid");
  }
  std::vector<double> lnt(count), lng(count);
  parallel_for(static_cast<std::size_t>(count), jobs, [&](std::size_t i) {
    const double t =
        t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (count - 1));
    const Scaled h = h_value(ell, q, qhat, {-t * t, 0.0}, opt);
    lnt[i] = std::log(t);
    lng[i] = h.log_abs() + (2.0 * ell + 2.0) * std::log(t) - 2.0 * a * t;
  });
  std::vector<double> xs, ys;
  for (int i = 0; i < count; ++i) {
    if (std::isfinite(lng[i])) {
      xs.push_back(lnt[i]);
      ys.push_back(lng[i]);
    }
  }
  if (xs.size() < 2) {
    throw AccuracyError("imaginary_axis_decay_slope: H vanished on the grid");
  }
  return slope_of(xs, ys);
}

double cosine_transform_F(const std::function<double(double)>& f, double a,
                          double lambda, const QuadratureOptions& opt) {
  check_split(a);
  if (lambda >= 0.0) {
    const double z = std::sqrt(lambda);
    return integrate([&](double x) { return std::cos(2.0 * z * x) * f(x); },
                     0.0, a, opt);
  }
  const double s = std::sqrt(-lambda);
  return integrate([&](double x) { return std::cosh(2.0 * s * x) * f(x); }, 0.0,
                   a, opt);
}

double cosine_transform_F_prime(const std::function<double(double)>& f,
                                double a, double lambda,
                                const QuadratureOptions& opt) {
  check_split(a);
  if (lambda == 0.0) {
    return -integrate([&](double x) { return 2.0 * x * x * f(x); }, 0.0, a, opt);
  }
  if (lambda > 0.0) {
    const double z = std::sqrt(lambda);
    return -integrate(
        [&](double x) { return std::sin(2.0 * z * x) * (x / z) * f(x); }, 0.0, a,
        opt);
  }
  const double s = std::sqrt(-lambda);
  return -integrate(
      [&](double x) { return std::sinh(2.0 * s * x) * (x / s) * f(x); }, 0.0, a,
      opt);
}

double cosine_transform_F_kth0(const std::function<double(double)>& f, double a,
                               int k, const QuadratureOptions& opt) {
  check_split(a);
  if (k < 0) throw std::invalid_argument("cosine_transform_F_kth0: k < 0");
  // (-1)^k 4^k k! / (2k)!
  double factor = (k % 2 == 0) ? 1.0 : -1.0;
  for (int j = 1; j <= k; ++j) factor *= 4.0 * j / ((2.0 * j - 1) * 2.0 * j);
  const double moment = integrate(
      [&](double x) { return std::pow(x, 2.0 * k) * f(x); }, 0.0, a, opt);
  return factor * moment;
}

HProfile sample_h_profile(double ell, const Potential& q, const Potential& qhat,
                          double a,
                          const std::vector<std::complex<double>>& lambdas,
                          bool with_derivative, const SolverOptions& opt,
                          int jobs) {
  check_split(a);
  HProfile prof;
  prof.ell = ell;
  prof.a = a;
  prof.q_hash = q.hash_hex();
  prof.qhat_hash = qhat.hash_hex();
  prof.samples.resize(lambdas.size());
  parallel_for(lambdas.size(), jobs, [&](std::size_t i) {
    HSample& smp = prof.samples[i];
    smp.lambda = lambdas[i];
    smp.h = h_value(ell, q, qhat, lambdas[i], opt);
    if (with_derivative && lambdas[i].imag() == 0.0) {
      smp.h_dot = h_derivative(ell, q, qhat, lambdas[i].real(), opt);
    }
  });
  return prof;
}

std::string HProfile::to_json() const {
  nlohmann::json j;
  j["ell"] = ell;
  j["a"] = a;
  j["q"] = q_hash;
  j["qhat"] = qhat_hash;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& smp : samples) {
    nlohmann::json e;
    e["lambda"] = {smp.lambda.real(), smp.lambda.imag()};
    e["h_mantissa"] = {smp.h.mantissa.real(), smp.h.mantissa.imag()};
    e["h_exponent"] = smp.h.log_scale;
    if (!std::isnan(smp.h_dot)) e["h_dot"] = smp.h_dot;
    arr.push_back(std::move(e));
  }
  j["samples"] = std::move(arr);
  return j.dump(2);
}

}  // namespace pbessel
