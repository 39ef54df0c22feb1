#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "pbessel/potential.hpp"
#include "pbessel/scaled.hpp"

namespace pbessel {

// beta = infinity selects the Dirichlet condition f(1) = 0.
inline constexpr double kBetaInfinity = std::numeric_limits<double>::infinity();

struct SolverOptions {
  // Pure relative control by default: near the left endpoint the regular
  // solution scales like x^(l+1) and any fixed absolute floor would swamp it.
  double abs_tol = 0.0;
  double rel_tol = 1e-9;
  // Start abscissa for the regular solution; shifted left automatically when
  // |sqrt(lambda)| * start_x is too large for the series start.
  double start_x = 1e-6;
  double max_step = 0.0;
  bool rescale = true;
};

// sqrt with the branch Im >= 0.
std::complex<double> sqrt_lambda(std::complex<double> lambda);

// Normalization constant of the regular solution: sqrt(pi)/(Gamma(l+3/2) 2^(l+1)).
double c_ell(double ell);

struct SolutionSample {
  std::vector<double> x;
  std::vector<std::complex<double>> value;
  std::vector<std::complex<double>> derivative;
  // true value at x[i] is value[i] * exp(log_scale[i])
  std::vector<double> log_scale;
  std::complex<double> lambda;
  bool regular = true;

  Scaled value_at(std::size_t i) const { return Scaled{value[i], log_scale[i]}; }
  Scaled derivative_at(std::size_t i) const {
    return Scaled{derivative[i], log_scale[i]};
  }
  std::string to_csv() const;
};

// Regular solution, normalized by lim x^(-l-1) phi = c_ell, sampled on grid
// (points sorted and deduplicated; all must lie in (0,1]).
SolutionSample phi(double ell, const Potential& q, std::complex<double> lambda,
                   std::vector<double> grid, const SolverOptions& opt = {});

// Terminal solution from x = 1: psi(1)=1, psi'(1)=-beta for real beta, or
// psi(1)=0, psi'(1)=-1 for beta = infinity.
SolutionSample psi(double ell, const Potential& q, std::complex<double> lambda,
                   double beta, std::vector<double> grid,
                   const SolverOptions& opt = {});

struct Endpoint {
  Scaled value;
  Scaled derivative;
};

// phi and phi' at x = 1 without storing the path.
Endpoint phi_endpoint(double ell, const Potential& q,
                      std::complex<double> lambda,
                      const SolverOptions& opt = {});

// Characteristic function: phi'(1) + beta*phi(1), or phi(1) for beta = inf.
Scaled characteristic(double ell, const Potential& q,
                      std::complex<double> lambda, double beta,
                      const SolverOptions& opt = {});

// d/dlambda of the characteristic function at real lambda (complex step).
double characteristic_derivative(double ell, const Potential& q, double lambda,
                                 double beta, const SolverOptions& opt = {});
// Central-difference fallback, used for cross-checks.
double characteristic_derivative_fd(double ell, const Potential& q,
                                    double lambda, double beta,
                                    const SolverOptions& opt = {});

// Integral of phi^2 over (0,1) (power-law head handled analytically).
double tau_integral(double ell, const Potential& q, double lambda,
                    const SolverOptions& opt = {});

// Integral of psi^2 over (0,1) at a (refined) eigenvalue; the truncated head
// near 0 is completed with the regular power tail.
double zeta_integral(double ell, const Potential& q, double lambda, double beta,
                     const SolverOptions& opt = {});

// Number of zeros of phi(lambda, .) in (0,1), by sign changes on a refining
// step grid.
int oscillation_count(double ell, const Potential& q, double lambda,
                      const SolverOptions& opt = {});

// Start abscissa and two-term series data for the regular solution; exposed
// for modules that integrate coupled systems themselves.
double regular_start_x(double ell, std::complex<double> lambda,
                       const SolverOptions& opt = {});
void regular_start_data(double ell, const Potential& q,
                        std::complex<double> lambda, double x0,
                        std::complex<double>& value,
                        std::complex<double>& derivative);

}  // namespace pbessel
