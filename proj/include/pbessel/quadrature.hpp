#pragma once

#include <functional>

namespace pbessel {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 4000;
};

// Adaptive Gauss-Kronrod (G7/K15) integration of f over [lo, hi].
// Throws AccuracyError if the subdivision budget is exhausted before the
// tolerance is met.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opt = {});

// Integral over (0, hi) of a function with at worst a logarithmic
// singularity at 0, computed through the substitution x = exp(-u).
double integrate_log_endpoint(const std::function<double(double)>& f,
                              double hi, const QuadratureOptions& opt = {});

// Composite K15 rule on a fixed panel subdivision, with no adaptivity or
// error estimate.  Every call with the same (lo, hi, panels) evaluates the
// integrand at the same nodes, which keeps Gram matrices built from it
// exactly symmetric.
double integrate_fixed(const std::function<double(double)>& f, double lo,
                       double hi, int panels);

}  // namespace pbessel
