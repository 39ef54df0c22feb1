#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pbessel/potential.hpp"
#include "pbessel/quadrature.hpp"
#include "pbessel/scaled.hpp"
#include "pbessel/solver.hpp"

namespace pbessel {

// Two-potential function
//   H(lambda) = phi(lambda,1,qhat) phi'(lambda,1,q)
//             - phi(lambda,1,q) phi'(lambda,1,qhat),
// entire in lambda and antisymmetric under swapping q and qhat.  The
// orientation is the one matching the integral of (q - qhat) phi phihat, so
// lambda^(ell+1) H tends to half the mean of q - qhat and, at a shared
// eigenvalue, dH/dlambda = (zetahat - zeta)/(kappa kappahat).
Scaled h_value(double ell, const Potential& q, const Potential& qhat,
               std::complex<double> lambda, const SolverOptions& opt = {});

// The same quantity as the integral of (q - qhat) phi(.,q) phi(.,qhat) over
// (0, a).  Valid only when q = qhat on (a, 1); that precondition is checked
// by sampling and violations raise std::invalid_argument.
Scaled h_value_integral(double ell, const Potential& q, const Potential& qhat,
                        double a, std::complex<double> lambda,
                        const SolverOptions& opt = {});

// dH/dlambda at real lambda by a complex step, with a central-difference
// fallback for cross-checks.
double h_derivative(double ell, const Potential& q, const Potential& qhat,
                    double lambda, const SolverOptions& opt = {});
double h_derivative_fd(double ell, const Potential& q, const Potential& qhat,
                       double lambda, const SolverOptions& opt = {});

struct MeanPerturbationResult {
  double value = 0.0;
  bool converged = false;
  // Disagreement between the stage averages feeding the extrapolation; the
  // convergence flag is err_estimate measured against value.
  double err_estimate = 0.0;
};

// Extrapolated limit of lambda^(ell+1) H(lambda) along the ascending positive
// grid.  When q = qhat on (a, 1) this recovers half the integral of q - qhat
// over (0, a).  The grid must span at least three octaves; the oscillatory
// tail is suppressed by Hann-weighted octave averages before extrapolation.
MeanPerturbationResult mean_perturbation_limit(
    int ell, const Potential& q, const Potential& qhat,
    const std::vector<double>& lambda_grid, const SolverOptions& opt = {},
    int jobs = 1);

struct EnvelopeSample {
  std::complex<double> z;
  // |H(z^2)| |z|^(2 ell + 2) |Im z|^(k + 1/p') exp(-2 a |Im z|)
  double scaled_h = 0.0;
};

struct EnvelopeReport {
  bool holds = false;
  double eps = 0.0;
  double C = 0.0;
  double gamma = 0.5;
  double delta = 0.0;
  // Worst ratio sample / fitted envelope; the bound is accepted when the fit
  // explains every sample within one order of magnitude.
  double ratio_max = 0.0;
  EnvelopeSample worst{};
  std::vector<EnvelopeSample> samples;
};

// Fits eps + C |z|^gamma exp(-delta |Im z|) + C |Im z|^(k+1/p') exp(-2 delta |Im z|)
// to the scaled magnitudes of H(z^2) over the samples (all with Im z != 0)
// and reports whether the fitted envelope dominates them.
EnvelopeReport envelope_check(double ell, const Potential& q,
                              const Potential& qhat, double a,
                              const SmoothnessTag& tag,
                              const std::vector<std::complex<double>>& z_samples,
                              const SolverOptions& opt = {}, int jobs = 1);

// Least-squares slope of ln(|H(-t^2)| t^(2 ell + 2) exp(-2 a t)) against ln t
// on a geometric grid of `count` points in [t_lo, t_hi].  One extra vanishing
// derivative of q - qhat at the split point steepens this slope by about one.
double imaginary_axis_decay_slope(double ell, const Potential& q,
                                  const Potential& qhat, double a, double t_lo,
                                  double t_hi, int count,
                                  const SolverOptions& opt = {}, int jobs = 1);

// F(lambda) = integral of cos(2 sqrt(lambda) x) f(x) over (0, a), entire in
// lambda (hyperbolic branch for lambda < 0), and its lambda-derivative.
double cosine_transform_F(const std::function<double(double)>& f, double a,
                          double lambda, const QuadratureOptions& opt = {});
double cosine_transform_F_prime(const std::function<double(double)>& f,
                                double a, double lambda,
                                const QuadratureOptions& opt = {});
// k-th lambda-derivative at 0: (-1)^k 4^k k!/(2k)! integral of x^(2k) f.
double cosine_transform_F_kth0(const std::function<double(double)>& f, double a,
                               int k, const QuadratureOptions& opt = {});

struct HSample {
  std::complex<double> lambda;
  Scaled h;
  double h_dot = std::numeric_limits<double>::quiet_NaN();
};

struct HProfile {
  double ell = 0.0;
  double a = 1.0;
  std::string q_hash;
  std::string qhat_hash;
  std::vector<HSample> samples;

  std::string to_json() const;
};

// Evaluates H over the sample set (in parallel, merged by sample index).
// Derivatives are attached only at real lambda when requested.
HProfile sample_h_profile(double ell, const Potential& q, const Potential& qhat,
                          double a,
                          const std::vector<std::complex<double>>& lambdas,
                          bool with_derivative = false,
                          const SolverOptions& opt = {}, int jobs = 1);

}  // namespace pbessel
