#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace pbessel {

// Value stored as mantissa * exp(log_scale).  Solutions of the radial
// equation grow like exp(|Im sqrt(lambda)| x) and overflow double for large
// imaginary parts, so characteristic-function and two-potential values are
// passed around in this form.
struct Scaled {
  std::complex<double> mantissa{0.0, 0.0};
  double log_scale = 0.0;

  static Scaled from(std::complex<double> v) { return Scaled{v, 0.0}.normalized(); }
  static Scaled from(double v) { return from(std::complex<double>(v, 0.0)); }

  // ln |value|; -inf for zero mantissa.
  double log_abs() const {
    double m = std::abs(mantissa);
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(m) + log_scale;
  }

  // Collapse to a plain double/complex; may overflow to inf for large scales.
  std::complex<double> value() const { return mantissa * std::exp(log_scale); }
  double real() const { return mantissa.real() * std::exp(log_scale); }

  bool is_zero() const { return mantissa == std::complex<double>(0.0, 0.0); }

  Scaled normalized() const {
    double m = std::abs(mantissa);
    if (m == 0.0 || !std::isfinite(m)) return *this;
    double k = std::log(m);
    return Scaled{mantissa * std::exp(-k), log_scale + k};
  }

  Scaled operator-() const { return Scaled{-mantissa, log_scale}; }

  friend Scaled operator*(const Scaled& a, const Scaled& b) {
    return Scaled{a.mantissa * b.mantissa, a.log_scale + b.log_scale}.normalized();
  }
  friend Scaled operator*(const Scaled& a, std::complex<double> c) {
    return Scaled{a.mantissa * c, a.log_scale}.normalized();
  }
  friend Scaled operator+(const Scaled& a, const Scaled& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    // Align to the larger scale so the addition cannot overflow.
    if (a.log_scale >= b.log_scale) {
      double d = b.log_scale - a.log_scale;
      std::complex<double> m = a.mantissa;
      if (d > -745.0) m += b.mantissa * std::exp(d);
      return Scaled{m, a.log_scale}.normalized();
    }
    return b + a;
  }
  friend Scaled operator-(const Scaled& a, const Scaled& b) { return a + (-b); }
};

}  // namespace pbessel
