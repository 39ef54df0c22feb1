#include "pbessel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pbessel/errors.hpp"
#include "pbessel/format.hpp"
#include "pbessel/ode.hpp"

namespace pbessel {

namespace {

struct RadialRhs {
  double centrifugal;  // ell*(ell+1)
  const Potential* q;
  std::complex<double> lambda;

  void operator()(double x, const OdeState<2>& y, OdeState<2>& dy) const {
    dy[0] = y[1];
    dy[1] = (centrifugal / (x * x) + q->value_unchecked(x) - lambda) * y[0];
  }
};

OdeOptions ode_options(const SolverOptions& opt) {
  OdeOptions o;
  o.abs_tol = opt.abs_tol;
  o.rel_tol = opt.rel_tol;
  o.max_step = opt.max_step;
  o.rescale = opt.rescale;
  return o;
}

void check_ell(double ell) {
  if (!(ell >= -0.5)) {
    throw std::domain_error("solver: ell must be >= -1/2, got " + g17(ell));
  }
}

std::vector<double> clean_grid(std::vector<double> grid) {
  if (grid.empty()) throw std::invalid_argument("solver: empty output grid");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (!(grid.front() > 0.0) || !(grid.back() <= 1.0)) {
    throw std::invalid_argument("solver: grid points must lie in (0,1]");
  }
  return grid;
}

// Travel plan: checkpoint positions in integration order, with the output
// index at each checkpoint or -1 for a plain breakpoint.
struct Plan {
  std::vector<double> pos;
  std::vector<int> out;
};

Plan plan_path(const std::vector<double>& outputs_in_order,
               std::vector<double> mandatory, bool rightward, double from,
               double to) {
  Plan plan;
  std::sort(mandatory.begin(), mandatory.end());
  if (!rightward) std::reverse(mandatory.begin(), mandatory.end());
  auto inside = [&](double m) {
    return rightward ? (m > from && m < to) : (m < from && m > to);
  };
  std::size_t mi = 0;
  auto push_mandatory_before = [&](double limit) {
    while (mi < mandatory.size() && inside(mandatory[mi]) &&
           (rightward ? mandatory[mi] < limit : mandatory[mi] > limit)) {
      plan.pos.push_back(mandatory[mi]);
      plan.out.push_back(-1);
      ++mi;
    }
  };
  for (std::size_t i = 0; i < outputs_in_order.size(); ++i) {
    push_mandatory_before(outputs_in_order[i]);
    plan.pos.push_back(outputs_in_order[i]);
    plan.out.push_back(static_cast<int>(i));
  }
  return plan;
}

}  // namespace

std::complex<double> sqrt_lambda(std::complex<double> lambda) {
  std::complex<double> z = std::sqrt(lambda);
  if (z.imag() < 0.0 || (z.imag() == 0.0 && z.real() < 0.0)) z = -z;
  return z;
}

double c_ell(double ell) {
  return std::sqrt(M_PI) / (std::tgamma(ell + 1.5) * std::pow(2.0, ell + 1.0));
}

double regular_start_x(double ell, std::complex<double> lambda,
                       const SolverOptions& opt) {
  check_ell(ell);
  const double zmag = std::abs(sqrt_lambda(lambda));
  double x0 = opt.start_x;
  if (zmag * x0 > 0.02) x0 = 0.02 / zmag;
  return std::max(x0, 1e-12);
}

void regular_start_data(double ell, const Potential& q,
                        std::complex<double> lambda, double x0,
                        std::complex<double>& value,
                        std::complex<double>& derivative) {
  const double c = c_ell(ell);
  const std::complex<double> a2 =
      (q.value_unchecked(x0) - lambda) / (4.0 * ell + 6.0);
  const double xp = std::pow(x0, ell);
  value = c * (xp * x0 + a2 * xp * x0 * x0 * x0);
  derivative = c * ((ell + 1.0) * xp + a2 * (ell + 3.0) * xp * x0 * x0);
}

SolutionSample phi(double ell, const Potential& q, std::complex<double> lambda,
                   std::vector<double> grid, const SolverOptions& opt) {
  check_ell(ell);
  grid = clean_grid(grid);
  const double x0 = regular_start_x(ell, lambda, opt);

  SolutionSample out;
  out.lambda = lambda;
  out.regular = true;
  out.x = grid;
  out.value.resize(grid.size());
  out.derivative.resize(grid.size());
  out.log_scale.assign(grid.size(), 0.0);

  std::vector<double> above;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= x0) {
      regular_start_data(ell, q, lambda, grid[i], out.value[i], out.derivative[i]);
    } else {
      above.push_back(grid[i]);
    }
  }
  if (above.empty()) return out;

  Plan plan = plan_path(above, q.mandatory_points(), true, x0, above.back());
  const std::size_t first_above = grid.size() - above.size();

  OdeState<2> y;
  regular_start_data(ell, q, lambda, x0, y[0], y[1]);
  OdeOptions oopt = ode_options(opt);
  oopt.initial_step = 0.05 * x0;
  RadialRhs rhs{ell * (ell + 1.0), &q, lambda};
  integrate_ode<2>(rhs, x0, y, plan.pos, oopt,
                   [&](std::size_t k, double, const OdeState<2>& yk, double ls) {
                     if (plan.out[k] < 0) return;
                     const std::size_t i = first_above + plan.out[k];
                     out.value[i] = yk[0];
                     out.derivative[i] = yk[1];
                     out.log_scale[i] = ls;
                   });
  return out;
}

SolutionSample psi(double ell, const Potential& q, std::complex<double> lambda,
                   double beta, std::vector<double> grid,
                   const SolverOptions& opt) {
  check_ell(ell);
  grid = clean_grid(grid);

  SolutionSample out;
  out.lambda = lambda;
  out.regular = false;
  out.x = grid;
  out.value.resize(grid.size());
  out.derivative.resize(grid.size());
  out.log_scale.assign(grid.size(), 0.0);

  OdeState<2> y;
  if (std::isinf(beta)) {
    y[0] = 0.0;
    y[1] = -1.0;
  } else {
    y[0] = 1.0;
    y[1] = -beta;
  }

  std::vector<double> below;  // descending travel order
  for (std::size_t i = grid.size(); i-- > 0;) {
    if (grid[i] == 1.0) {
      out.value[i] = y[0];
      out.derivative[i] = y[1];
    } else {
      below.push_back(grid[i]);
    }
  }
  if (below.empty()) return out;

  Plan plan = plan_path(below, q.mandatory_points(), false, 1.0, below.back());
  RadialRhs rhs{ell * (ell + 1.0), &q, lambda};
  integrate_ode<2>(rhs, 1.0, y, plan.pos, ode_options(opt),
                   [&](std::size_t k, double, const OdeState<2>& yk, double ls) {
                     if (plan.out[k] < 0) return;
                     // below[j] corresponds to grid index found by value
                     const double xk = plan.pos[k];
                     const auto it =
                         std::lower_bound(out.x.begin(), out.x.end(), xk);
                     const std::size_t i =
                         static_cast<std::size_t>(it - out.x.begin());
                     out.value[i] = yk[0];
                     out.derivative[i] = yk[1];
                     out.log_scale[i] = ls;
                   });
  return out;
}

Endpoint phi_endpoint(double ell, const Potential& q,
                      std::complex<double> lambda, const SolverOptions& opt) {
  SolutionSample s = phi(ell, q, lambda, {1.0}, opt);
  return Endpoint{s.value_at(0), s.derivative_at(0)};
}

Scaled characteristic(double ell, const Potential& q,
                      std::complex<double> lambda, double beta,
                      const SolverOptions& opt) {
  Endpoint e = phi_endpoint(ell, q, lambda, opt);
  if (std::isinf(beta)) return e.value;
  return e.derivative + e.value * std::complex<double>(beta, 0.0);
}

double characteristic_derivative(double ell, const Potential& q, double lambda,
                                 double beta, const SolverOptions& opt) {
  const double h = 1e-20 * std::max(1.0, std::abs(lambda));
  if (h == 0.0) throw AccuracyError("characteristic_derivative: step underflow");
  Scaled d = characteristic(ell, q, {lambda, h}, beta, opt);
  return d.mantissa.imag() * std::exp(d.log_scale) / h;
}

double characteristic_derivative_fd(double ell, const Potential& q,
                                    double lambda, double beta,
                                    const SolverOptions& opt) {
  const double h = 6e-6 * std::max(1.0, std::abs(lambda));
  const double hi = characteristic(ell, q, {lambda + h, 0.0}, beta, opt).real();
  const double lo = characteristic(ell, q, {lambda - h, 0.0}, beta, opt).real();
  return (hi - lo) / (2.0 * h);
}

namespace {

struct RadialNormRhs {
  double centrifugal;
  const Potential* q;
  std::complex<double> lambda;

  void operator()(double x, const OdeState<3>& y, OdeState<3>& dy) const {
    dy[0] = y[1];
    dy[1] = (centrifugal / (x * x) + q->value_unchecked(x) - lambda) * y[0];
    dy[2] = y[0] * y[0];
  }
};

std::vector<double> mandatory_between(const Potential& q, double lo, double hi,
                                      bool rightward) {
  std::vector<double> m;
  for (double b : q.mandatory_points()) {
    if (b > lo && b < hi) m.push_back(b);
  }
  std::sort(m.begin(), m.end());
  if (!rightward) std::reverse(m.begin(), m.end());
  return m;
}

}  // namespace

double tau_integral(double ell, const Potential& q, double lambda,
                    const SolverOptions& opt) {
  check_ell(ell);
  const double x0 = regular_start_x(ell, {lambda, 0.0}, opt);
  OdeState<3> y;
  std::complex<double> f, fp;
  regular_start_data(ell, q, {lambda, 0.0}, x0, f, fp);
  y[0] = f;
  y[1] = fp;
  // analytic head integral of (c x^(l+1))^2 over (0, x0)
  const double c = c_ell(ell);
  y[2] = c * c * std::pow(x0, 2.0 * ell + 3.0) / (2.0 * ell + 3.0);

  std::vector<double> cps = mandatory_between(q, x0, 1.0, true);
  cps.push_back(1.0);
  OdeOptions oopt = ode_options(opt);
  oopt.rescale = false;  // quadratic auxiliary state
  oopt.initial_step = 0.05 * x0;
  RadialNormRhs rhs{ell * (ell + 1.0), &q, {lambda, 0.0}};
  double tau = 0.0;
  integrate_ode<3>(rhs, x0, y, cps, oopt,
                   [&](std::size_t k, double, const OdeState<3>& yk, double) {
                     if (k + 1 == cps.size()) tau = yk[2].real();
                   });
  return tau;
}

double zeta_integral(double ell, const Potential& q, double lambda, double beta,
                     const SolverOptions& opt) {
  check_ell(ell);
  const double x0 = regular_start_x(ell, {lambda, 0.0}, opt);
  // Truncate before the singular endpoint: below x_min the computed terminal
  // solution is dominated by the admixed growing branch, while the true
  // eigenfunction head contributes only the analytic power tail.
  const double x_min =
      std::min(0.2, std::max(x0, std::pow(1e-11, 1.0 / (2.0 * ell + 3.0))));

  OdeState<3> y;
  if (std::isinf(beta)) {
    y[0] = 0.0;
    y[1] = -1.0;
  } else {
    y[0] = 1.0;
    y[1] = -beta;
  }
  y[2] = 0.0;

  std::vector<double> cps = mandatory_between(q, x_min, 1.0, false);
  cps.push_back(x_min);
  OdeOptions oopt = ode_options(opt);
  oopt.rescale = false;
  RadialNormRhs rhs{ell * (ell + 1.0), &q, {lambda, 0.0}};
  double body = 0.0, head = 0.0;
  integrate_ode<3>(rhs, 1.0, y, cps, oopt,
                   [&](std::size_t k, double, const OdeState<3>& yk, double) {
                     if (k + 1 == cps.size()) {
                       body = -yk[2].real();
                       const double v = yk[0].real();
                       head = v * v * x_min / (2.0 * ell + 3.0);
                     }
                   });
  return body + head;
}

int oscillation_count(double ell, const Potential& q, double lambda,
                      const SolverOptions& opt) {
  check_ell(ell);
  const double zmag = std::abs(sqrt_lambda({lambda, 0.0}));
  double cap = std::min(0.05, M_PI / (6.0 * std::max(1.0, zmag)));

  auto count_with_cap = [&](double max_step) {
    const double x0 = regular_start_x(ell, {lambda, 0.0}, opt);
    OdeState<2> y;
    regular_start_data(ell, q, {lambda, 0.0}, x0, y[0], y[1]);
    std::vector<double> cps = mandatory_between(q, x0, 1.0, true);
    cps.push_back(1.0);
    OdeOptions oopt = ode_options(opt);
    oopt.max_step = max_step;
    oopt.initial_step = 0.05 * x0;
    RadialRhs rhs{ell * (ell + 1.0), &q, {lambda, 0.0}};
    int flips = 0;
    int last_sign = (c_ell(ell) > 0.0) ? 1 : -1;
    double amp = 0.0;
    auto feed = [&](double x, double v) {
      amp = std::max(amp, std::abs(v));
      if (x > 1.0 - 1e-9) return;          // endpoint zero is not interior
      if (std::abs(v) < 1e-9 * amp) return;  // ambiguous near-zero sample
      const int s = (v > 0.0) ? 1 : -1;
      if (s != last_sign) ++flips;
      last_sign = s;
    };
    integrate_ode<2>(
        rhs, x0, y, cps, oopt,
        [&](std::size_t, double x, const OdeState<2>& yk, double) {
          feed(x, yk[0].real());
        },
        [&](double x, const OdeState<2>& yk, double) { feed(x, yk[0].real()); });
    return flips;
  };

  int count = count_with_cap(cap);
  for (int refine = 0; refine < 6; ++refine) {
    cap *= 0.5;
    const int again = count_with_cap(cap);
    if (again == count) return count;
    count = again;
  }
  throw AccuracyError("oscillation_count: count did not stabilize at lambda = " +
                      g17(lambda));
}

std::string SolutionSample::to_csv() const {
  std::ostringstream out;
  out << "x,value_re,value_im,derivative_re,derivative_im,log_scale\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << g17(x[i]) << ',' << g17(value[i].real()) << ',' << g17(value[i].imag())
        << ',' << g17(derivative[i].real()) << ',' << g17(derivative[i].imag())
        << ',' << g17(log_scale[i]) << "\n";
  }
  return out.str();
}

}  // namespace pbessel
