#pragma once

#include <string>
#include <vector>

#include "pbessel/potential.hpp"
#include "pbessel/solver.hpp"

namespace pbessel {

struct SpectralPoint {
  double lambda = 0.0;
  int index = 0;       // 1 + number of interior zeros of the eigenfunction
  double beta = kBetaInfinity;
  double zeta = 0.0;   // 0 means not computed
  double kappa = 0.0;  // 0 means not computed
  double residual = 0.0;
};

struct Spectrum {
  double ell = 0.0;
  double beta = kBetaInfinity;
  std::vector<SpectralPoint> points;
  // sqrt(lambda_n) ~ (n + center_offset) * pi
  double center_offset = 0.0;
  std::string potential_hash;

  std::string to_csv() const;
  std::string to_json() const;
};

struct SpectrumOptions {
  // Tighter than the plain solver defaults so the characteristic-function
  // noise floor sits safely under the root residual tolerance.
  SolverOptions solver{0.0, 1e-11};
  int jobs = 1;
  // Acceptable |characteristic| at a refined root, relative to the bracket scale.
  double residual_tol = 1e-10;
  int max_bracket_doublings = 3;
  // Extra margin added to the negative-axis search window (1 + ||q||_1 + slack)^2.
  double window_slack = 0.0;
};

// The count smallest eigenvalues of the problem (ell, q, beta), indexed by
// oscillation count (consecutive from 1).
Spectrum locate_eigenvalues(double ell, const Potential& q, double beta,
                            int count, const SpectrumOptions& opt = {});

// zeta = integral of psi^2 at a verified eigenvalue.
double norming_constant(const SpectralPoint& point, double ell,
                        const Potential& q, const SolverOptions& opt = {});

// kappa with psi = kappa * phi at the eigenvalue; ratio constancy verified.
double multiplier_kappa(const SpectralPoint& point, double ell,
                        const Potential& q, const SolverOptions& opt = {});

// Fill zeta and kappa for every point (concurrently with opt.jobs).
void attach_norming_data(Spectrum& spectrum, double ell, const Potential& q,
                         const SpectrumOptions& opt = {});

}  // namespace pbessel
