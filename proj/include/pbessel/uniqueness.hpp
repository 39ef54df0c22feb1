#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pbessel/hfield.hpp"
#include "pbessel/potential.hpp"
#include "pbessel/solver.hpp"

namespace pbessel {

// One eigenvalue of a mixed dataset.  beta records which boundary condition
// produced it; zeta is the norming constant when the dataset supplies one
// (has_zeta false otherwise).
struct EigenRecord {
  double value = 0.0;
  double beta = kBetaInfinity;
  bool has_zeta = false;
  double zeta = 0.0;
};

// Mixed spectral data on (0, a]: the eigenvalue list Lambda, with the subset
// S marked by attached norming constants, plus the smoothness class claimed
// for the potential difference near a.
struct MixedDataset {
  double ell = 0.0;
  double a = 1.0;
  std::vector<EigenRecord> lambda;
  SmoothnessTag smoothness;

  // Eigenvalues in S carry norming constants.
  std::vector<double> values() const;
  std::vector<double> s_values() const;

  void validate() const;
  std::string to_json() const;
  static MixedDataset from_json(const std::string& text);
};

// Member of the completeness system: x^(2k), cos(2 sqrt(lambda) x) or
// x sin(2 sqrt(lambda) x), evaluated with the hyperbolic branch when
// lambda < 0.
struct SystemFunction {
  enum class Type { Monomial, Cosine, XSine };
  Type type = Type::Monomial;
  int power = 0;        // Monomial exponent 2k
  double lambda = 0.0;  // Cosine / XSine frequency parameter

  double operator()(double x) const;
  std::string describe() const;
};

// The system {x^(2k)} k=0..K joined with {cos(2 sqrt(lambda_n) x)} over
// Lambda and {x sin(2 sqrt(lambda_n) x)} over S.  K depends on whether 0 is
// an eigenvalue and whether its norming constant is attached; the zero
// eigenvalue itself contributes no oscillatory member (its cosine would
// duplicate x^0 and its x sin term vanishes) and is carried entirely by the
// monomial count.  Requires integer ell >= 0.
std::vector<SystemFunction> build_system(const MixedDataset& data);

// Smallest eigenvalue of the normalized Gram matrix of the system on
// (0, a), plus worst L^2 projection residual of low Fourier modes onto the
// system span.  A heuristic necessary-condition probe, not a proof of
// closedness: values near zero flag redundancy, healthy floors only fail to
// reject.
struct ClosednessDiagnostic {
  double sigma_min = 0.0;          // smallest normalized Gram eigenvalue
  double worst_residual = 0.0;     // max over probes of relative L^2 residual
  int worst_probe = 0;             // Fourier index attaining it
  int system_size = 0;
  std::string label;               // fixed heuristic disclaimer
};
ClosednessDiagnostic closedness_diagnostic(const std::vector<SystemFunction>& system,
                                           double a, int probe_count);

// Exact counting integral of a step set: sum over the list of
// max(0, ln r - 0.5 ln |lambda|).  Throws std::domain_error when an entry is
// zero (the integral diverges at the origin).
double counting_integral(const std::vector<double>& lambdas, double r);

// Growth audit of the mixed data against the completeness threshold: the
// margin  integral of m(t)/t over (0, r]  -  4 a r / pi  +  c ln r  with
// m(t) = 2 n_Lambda(t^2) + 2 n_S(t^2) and c = k + 2 ell + 2 + 1/p'.  The
// dataset decides (k, p); p = 1 is rejected.  The verdict reports SATISFIED
// when the margin trend over the trusted top half of the grid is
// non-decreasing (slope >= -0.05 per ln r), UNDECIDED otherwise; finite data
// can never certify failure of a limsup condition.
struct CountingReport {
  std::vector<double> r_grid;
  std::vector<double> integral;   // exact counting integrals at r_grid
  std::vector<double> margin;
  double coefficient = 0.0;       // the ln r coefficient actually used
  double tail_slope = 0.0;        // fitted margin slope against ln r, top half
  std::string verdict;            // "SATISFIED" or "UNDECIDED"

  std::string to_csv() const;
  std::string to_json() const;
};
CountingReport criterion_margin(const MixedDataset& data,
                                const std::vector<double>& r_grid);

// Jensen inequality audit: at each radius the exact counting integral of the
// dataset must not exceed the circle average of ln |H(r^2 e^(2 i phi))| plus
// |ln |H(0)||.  When H vanishes at the origin the expansion point is shifted
// to a small positive lambda0 (which moves the zero pattern to
// |lambda_n - lambda0|); a vanishing node on a circle retries with the
// radius nudged by a fixed irrational factor.  status is INDETERMINATE when
// H is identically zero along the probes (equal potentials).
struct JensenRow {
  double r = 0.0;            // requested radius
  double radius_used = 0.0;  // after nudge retries
  double counting = 0.0;     // integral of m(t)/t over (0, r]
  double circle_average = 0.0;
  double discrepancy = 0.0;  // circle_average + c0 - counting, >= 0 expected
  bool holds = false;
};
struct JensenAudit {
  std::vector<JensenRow> rows;
  double lambda0 = 0.0;  // expansion shift actually used
  double c0 = 0.0;       // |ln |H(lambda0)||
  std::string status;    // "OK" or "INDETERMINATE"

  std::string to_csv() const;
  std::string to_json() const;
};
JensenAudit jensen_audit(const Potential& q, const Potential& qhat,
                         const MixedDataset& data,
                         const std::vector<double>& radii, int nodes = 256,
                         const SolverOptions& opt = {}, int jobs = 1);

// Jensen identity for a rational function with the given real zeros and
// poles: returns |counting difference - (circle average - ln |G(0)|)| at
// z-plane radius r.  Exercises the audit arithmetic against a case where
// both sides are known in closed form.
double jensen_rational_discrepancy(const std::vector<double>& zeros,
                                   const std::vector<double>& poles, double r,
                                   int nodes = 512);

// ---------------------------------------------------------------------------
// Counting-function lemma checks
// ---------------------------------------------------------------------------

// Lower bound for the counting integral of a sequence with
// sqrt(mu_k) <= alpha1 k + alpha2 + O(1/k):  the gap
//   integral over (1, R] of 2 m(t^2)/t  -  (2/alpha1) R
//     - (1 - 2 alpha2/alpha1) ln R
// must stay bounded below.  holds reports that the tail of the gap series
// makes no new lows.
struct SequenceGapReport {
  std::vector<double> r_grid;
  std::vector<double> gap;
  double gap_min = 0.0;
  double gap_max = 0.0;
  bool holds = false;
};
SequenceGapReport counting_lower_bound_check(const std::vector<double>& mu,
                                             double alpha1, double alpha2,
                                             const std::vector<double>& r_grid);

// Perturbed-sequence comparison: with a_n = b_n (1 + t_n), the counting
// integrals of A and B differ by at most  sum of 0.5 |ln(1 + t_n)|  plus the
// declared tail bound for the truncated part.  An infinite declared tail is
// rejected.
struct CountingDifferenceReport {
  std::vector<double> r_grid;
  std::vector<double> difference;  // |integral_A - integral_B|
  double bound = 0.0;
  double worst = 0.0;
  bool holds = false;
};
CountingDifferenceReport counting_difference_check(
    const std::vector<double>& b, const std::vector<double>& t,
    const std::vector<double>& r_grid, double declared_tail = 0.0);

// Meromorphic comparison function  a2 z^2 + a1 z + a0 +
// sum A_n (1/(z - a_n) + 1/a_n)  with real simple poles.
struct PartialFractionG {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
  std::vector<double> poles;
  std::vector<double> weights;

  std::complex<double> operator()(std::complex<double> z) const;
};

// Zero-minus-pole counting check: locates the real zeros of g, forms
//   excess(r) = integral (n_zeros(t^2) - n_poles(t^2))/t dt - 0.5 ln r
// and reports its ceiling.  holds means the tail of the excess makes no new
// highs, the numerical signature of the 0.5 ln r + C bound.
struct MeromorphicCountingReport {
  std::vector<double> zeros;
  std::vector<double> r_grid;
  std::vector<double> excess;
  double c_estimate = 0.0;
  bool holds = false;
};
MeromorphicCountingReport meromorphic_counting_check(
    const PartialFractionG& g, const std::vector<double>& r_grid);

// sup_n (|b_n| |b_n - a_k|)^(-1) <= C / |a_k|: returns the smallest C that
// works for every k.  Infinite when some b_n collides with an a_k.
struct PairSeparationReport {
  double c_estimate = 0.0;
  bool holds = false;
};
PairSeparationReport pair_separation_check(const std::vector<double>& a,
                                           const std::vector<double>& b);

// Interpolation weights A_(n,m) = (a_n/b_n)(a_n - b_n) product over j != n,
// j <= m of (a_j/b_j)(a_n - b_j)/(a_n - a_j), their limits A_n at the full
// truncation, and the weight sum  sum |A_n| / a_n^2.  The drift entries are
// the Cauchy increments  sum over n <= N/2 of |A_(n,m) - A_(n,m-1)| / a_n^2
// along the deep half of the truncation sweep; they must decay for the
// double limit to commute.
struct WeightConvergenceReport {
  std::vector<double> limits;       // A_n at the deepest truncation
  std::vector<double> drift;        // indexed by truncation depth m
  double weight_sum = 0.0;
  bool summable = false;
};
WeightConvergenceReport interpolation_weight_check(const std::vector<double>& a,
                                                   const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Data-budget corollary checks
// ---------------------------------------------------------------------------

struct CorollaryVerdict {
  bool satisfied = false;
  double margin = 0.0;  // meaning documented per check
  std::string detail;
};

// Density of a norming-constant subset against a full spectrum on (0, a],
// a <= 1:  n_S(t) >= a n_sigma(t) + (a - 1) ell / 2, minus a/2 more when
// beta is finite.  S members must carry norming constants.  margin is the
// worst slack over the trusted top half of the jump grid; with the weighted
// class flag off at ell = -1/2 the boundary case a = 1 requires strictly
// positive slack.
CorollaryVerdict subset_density_check(const std::vector<double>& sigma,
                                      const std::vector<EigenRecord>& s,
                                      double a, double ell, double beta,
                                      bool weighted_class = true);

// Same for a plain eigenvalue subset (no norming constants) on a <= 1/2:
// n_S(t) >= 2 a n_sigma(t) + (a - 1) ell, minus 2a more when beta is
// finite; the ell = -1/2 plain-L1 boundary case is a = 1/2.
CorollaryVerdict eigenvalue_density_check(const std::vector<double>& sigma,
                                          const std::vector<double>& s,
                                          double a, double ell, double beta,
                                          bool weighted_class = true);

// How many eigenvalues may be dropped from a full spectrum-plus-norming
// dataset on (1/2, 1] when q - qhat has k vanishing derivatives at 1:
// floor(ell/2) + k + 1 for the Dirichlet endpoint condition,
// floor((ell+1)/2) + k + 1 for a finite beta, one fewer at ell = -1/2
// outside the weighted class.
int omission_budget(double ell, int k, double beta, bool weighted_class = true);

// Verifies a proposed omission set against the budget and reports the
// resulting margin trend (coefficient 2k + 2 ell + 3).
CorollaryVerdict omission_budget_check(const std::vector<double>& sigma,
                                       const std::vector<double>& kept,
                                       double ell, int k, double beta,
                                       const std::vector<double>& r_grid,
                                       bool weighted_class = true);

// Two-spectra exchange: full sigma1 with norming constants on the index set
// m_indices, sigma2 with indices outside m_indices (plus one more dropped
// index when both endpoint conditions are finite).  Validates interlacing
// and reports the margin trend with coefficient 2 ell + 2.  Indices are
// zero-based positions into the ascending spectra.
CorollaryVerdict two_spectra_exchange_check(
    const std::vector<double>& sigma1, const std::vector<double>& sigma2,
    const std::vector<int>& m_indices, int extra_drop_index, double ell,
    double beta1, double beta2, const std::vector<double>& r_grid,
    bool weighted_class = true);

// Paired replacement under the product condition: a_n from sigma1 (with
// norming constants), b_n from sigma2, product of a_n/b_n absolutely
// convergent.  Uses the counting-difference bound for the swapped subset and
// reports the margin trend.
CorollaryVerdict paired_replacement_check(
    const std::vector<double>& sigma1, const std::vector<double>& sigma2,
    const std::vector<EigenRecord>& a_subset, const std::vector<double>& b_subset,
    int extra_drop_index, double ell, double beta1, double beta2,
    const std::vector<double>& r_grid, bool weighted_class = true);

// Paired replacement under the interpolation-weight condition instead of
// the product condition; no exception element is available here.
CorollaryVerdict weighted_replacement_check(
    const std::vector<double>& sigma1, const std::vector<double>& sigma2,
    const std::vector<EigenRecord>& a_subset, const std::vector<double>& b_subset,
    double ell, double beta1, double beta2, const std::vector<double>& r_grid,
    bool weighted_class = true);

}  // namespace pbessel
