#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbessel/potential.hpp"
#include "pbessel/spectrum.hpp"
#include "pbessel/uniqueness.hpp"

namespace pbessel {

// How the unknown coefficient vector maps to a potential on (0, a).
enum class BasisKind { Piecewise, Cosine, Polynomial };

std::string basis_name(BasisKind kind);
BasisKind basis_from_name(const std::string& name);

// Least-squares recovery of q on (0, data.a) from the dataset's eigenvalues
// and norming constants.  On (data.a, 1) the potential is held fixed at the
// declared piecewise tail (empty tail means zero there).
struct ReconstructionProblem {
  MixedDataset data;
  BasisKind basis = BasisKind::Piecewise;
  int dimension = 8;
  std::vector<double> tail_breakpoints;  // interior to (data.a, 1)
  std::vector<double> tail_values;
  double regularization = 1e-8;
  int max_iterations = 60;
  std::uint64_t seed = 1;
  std::vector<double> initial_guess;     // empty starts from zero
  std::optional<Potential> ground_truth;
  SpectrumOptions spectrum;

  // The potential induced by a coefficient vector, tail included.
  Potential materialize(const std::vector<double>& theta) const;
  void validate() const;
  std::string to_json() const;
  static ReconstructionProblem from_json(const std::string& text);
};

struct ReconstructionResult {
  std::vector<double> coefficients;
  // Aligned with data.lambda: eigenvalue misfit in units of the local
  // spectral gap, and relative norming-constant misfit (zero for records
  // without a norming constant).
  std::vector<double> eigenvalue_residuals;
  std::vector<double> zeta_residuals;
  double worst_residual = 0.0;
  double l2_distance_to_truth = -1.0;  // -1 without ground truth
  std::vector<double> trace;           // objective after each accepted step
  bool converged = false;
  int iterations = 0;
  std::string status;
  std::optional<Potential> recovered;

  std::string to_json() const;
};

// Damped Gauss-Newton on the spectral map: minimizes the gap-scaled
// eigenvalue misfits, the log norming-constant misfits, and the ridge term
// regularization * |theta|^2, with finite-difference Jacobians and
// index-tracked eigenvalues.
ReconstructionResult reconstruct(const ReconstructionProblem& problem);

struct ProbeResult {
  bool found = false;
  double distance = 0.0;        // L2(0, a) distance to the ground truth
  double worst_residual = 0.0;  // max data misfit of the candidate
  std::vector<double> coefficients;
  std::optional<Potential> candidate;
  int starts_used = 0;
  std::string status;

  std::string to_json() const;
};

// Searches for a potential at L2(0, a) distance >= rho from the ground truth
// that still matches every datum to 1e-7, by adding a hinge reward on the
// distance to the least-squares objective over several seeded starts.
// FOUND / NOT-FOUND is an empirical outcome, not a uniqueness claim.
ProbeResult nonuniqueness_probe(const ReconstructionProblem& problem,
                                double rho);

// sqrt of the integral of (p1 - p2)^2 over (lo, hi), split at the
// discontinuities of both potentials.
double l2_distance(const Potential& p1, const Potential& p2, double lo,
                   double hi);

}  // namespace pbessel
