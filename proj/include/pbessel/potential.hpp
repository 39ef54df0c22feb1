#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace pbessel {

// Declared regularity of q - q_hat near the split point: q - q_hat lies in
// W^{k,p} on (a - delta0, a) with `vanishing` derivatives equal to 0 at a.
// For ell = -1/2, weighted_class declares membership in the (1 - ln x)
// weighted integrability class.
struct SmoothnessTag {
  int k = 0;
  double p = std::numeric_limits<double>::infinity();
  double delta0 = 0.0;
  int vanishing = 0;
  bool weighted_class = true;

  void validate(double a) const;
};

// Real potential on (0,1).  Three interchangeable representations:
//   piecewise   constant cells on an explicit breakpoint grid
//   basis       cosine or polynomial coefficients on (0,a), piecewise tail on (a,1)
//   table       dense samples with linear interpolation
// Immutable after construction except for metadata setters.
class Potential {
public:
  enum class Kind { Piecewise, CosineBasis, PolynomialBasis, Table };

  static Potential zero();
  static Potential constant(double value);
  static Potential piecewise(std::vector<double> breakpoints,
                             std::vector<double> values);
  static Potential cosine_basis(std::vector<double> coefficients, double a,
                                std::vector<double> tail_breakpoints = {},
                                std::vector<double> tail_values = {});
  static Potential polynomial_basis(std::vector<double> coefficients, double a,
                                    std::vector<double> tail_breakpoints = {},
                                    std::vector<double> tail_values = {});
  static Potential table(std::vector<double> x, std::vector<double> y);
  static Potential from_function(const std::function<double(double)>& f,
                                 int samples = 4096);

  // Checked evaluation; x must lie in (0,1).
  double operator()(double x) const;
  // Total extension used by the integrators (cells are extended to the
  // nearest one, tables clamp); never throws.
  double value_unchecked(double x) const noexcept;

  Kind kind() const { return kind_; }
  double split_point() const { return a_; }
  void set_split_point(double a);
  const SmoothnessTag& smoothness() const { return tag_; }
  void set_smoothness(const SmoothnessTag& tag);
  // Interior discontinuity locations; integrators must place step
  // boundaries here.
  const std::vector<double>& mandatory_points() const { return mandatory_; }

  Potential shifted(double c) const;

  const std::vector<double>& piecewise_breakpoints() const;
  const std::vector<double>& piecewise_values() const;

  double l1_norm() const;

  // Canonical description (the on-disk format); hash is FNV-1a over it.
  std::string describe() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;
  static Potential parse(const std::string& text);
  static Potential load(const std::string& path);
  void save(const std::string& path) const;

private:
  Potential() = default;

  Kind kind_ = Kind::Piecewise;
  double a_ = 1.0;
  SmoothnessTag tag_;
  std::vector<double> breaks_;   // piecewise cells, or tail cells for basis kinds
  std::vector<double> values_;
  std::vector<double> coeffs_;   // basis kinds
  std::vector<double> tx_, ty_;  // table
  std::vector<double> mandatory_;

  void rebuild_mandatory();
};

// Class norm: integral of |q| for ell > -1/2, of |(1 - ln x) q| for
// ell = -1/2 (logarithmic endpoint via substitution).
double weighted_norm(const Potential& q, double ell);

// Remainder functional: integral over (0,1) of y * qt(y) / (1 + sqrt(lambda) y)
// with qt the class weight of weighted_norm.  Nonincreasing in lambda.
double remainder_R(const Potential& q, double ell, double lambda);

}  // namespace pbessel
