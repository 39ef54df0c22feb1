#include "pbessel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "pbessel/errors.hpp"

namespace pbessel {
namespace {

// Kronrod-15 abscissae on [0,1] side of [-1,1] and weights; the odd-index
// nodes form the embedded Gauss-7 rule.
constexpr double kKX[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kKW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kGW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double fc = f(c);
  double kron = kKW[7] * fc;
  double gauss = kGW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kKX[i];
    const double s = f(c - x) + f(c + x);
    kron += kKW[i] * s;
    if (i % 2 == 1) gauss += kGW[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  return Panel{lo, hi, kron, std::abs(kron - gauss)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opt) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (lo > hi) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  std::priority_queue<Panel> panels;
  panels.push(gk15(f, lo, hi));
  double total = panels.top().value;
  double total_err = panels.top().error;
  int used = 1;
  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (used >= opt.max_subdivisions) {
      throw AccuracyError("quadrature: subdivision budget exhausted, error " +
                          std::to_string(total_err));
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      throw AccuracyError("quadrature: interval collapsed before tolerance met");
    }
    Panel left = gk15(f, worst.lo, mid);
    Panel right = gk15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++used;
  }
  return sign * total;
}

double integrate_fixed(const std::function<double(double)>& f, double lo,
                       double hi, int panels) {
  if (panels < 1) throw std::invalid_argument("integrate_fixed: panels must be positive");
  if (lo == hi) return 0.0;
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    total += gk15(f, lo + p * h, lo + (p + 1) * h).value;
  }
  return total;
}

double integrate_log_endpoint(const std::function<double(double)>& f,
                              double hi, const QuadratureOptions& opt) {
  if (hi <= 0.0) throw std::invalid_argument("integrate_log_endpoint: hi must be positive");
  // x = exp(-u) maps (0, hi] to [u0, infinity); the tail beyond u = 64 is
  // below 1e-26 for integrands with logarithmic growth and is dropped.
  const double u0 = -std::log(hi);
  const double u1 = std::max(u0 + 1.0, 64.0);
  auto g = [&f](double u) {
    const double x = std::exp(-u);
    return f(x) * x;
  };
  return integrate(g, u0, u1, opt);
}

}  // namespace pbessel
