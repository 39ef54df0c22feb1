#include "pbessel/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "json.hpp"
#include "pbessel/errors.hpp"
#include "pbessel/format.hpp"
#include "pbessel/parallel.hpp"
#include "pbessel/quadrature.hpp"

namespace pbessel {
namespace {

constexpr double kMarginSlopeFloor = -0.05;

double fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                 std::size_t from) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = from; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  const double count = static_cast<double>(n - from);
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = from; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return 0.0;
  return sxy / sxx;
}

void require_ascending_positive(const std::vector<double>& grid,
                                const char* ctx) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && grid[i] <= grid[i - 1])) {
      throw std::invalid_argument(std::string(ctx) +
                                  ": grid must be ascending and positive");
    }
  }
}

// Radii beyond sqrt(max |lambda|) see no further jumps of the truncated data
// and would flatter the margin, so they are dropped.
std::vector<double> usable_radii(const std::vector<double>& r_grid,
                                 double max_abs_lambda, const char* ctx) {
  if (r_grid.size() < 4) {
    throw std::invalid_argument(std::string(ctx) + ": need at least 4 radii");
  }
  require_ascending_positive(r_grid, ctx);
  const double cap = std::sqrt(max_abs_lambda) * (1.0 + 1e-12);
  std::vector<double> out;
  for (double r : r_grid) {
    if (r <= cap) out.push_back(r);
  }
  if (out.size() < 4) {
    throw std::invalid_argument(
        std::string(ctx) +
        ": radius grid must keep at least 4 points at or below sqrt(max |lambda|)");
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Tolerant membership of every element of `part` in `whole`.
void require_subset(const std::vector<double>& whole,
                    const std::vector<double>& part, const char* ctx) {
  for (double p : part) {
    bool found = false;
    for (double w : whole) {
      if (std::abs(p - w) <= 1e-9 * std::max(1.0, std::abs(w))) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument(std::string(ctx) + ": value " + g17(p) +
                                  " is not an element of the parent spectrum");
    }
  }
}

void require_zeta(const std::vector<EigenRecord>& records, const char* ctx) {
  for (const auto& rec : records) {
    if (!rec.has_zeta || !(rec.zeta > 0.0)) {
      throw std::invalid_argument(std::string(ctx) +
                                  ": every paired eigenvalue needs a positive "
                                  "norming constant");
    }
  }
}

std::vector<double> record_values(const std::vector<EigenRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records) out.push_back(rec.value);
  return out;
}

// Merged strict alternation up to the shorter truncation.
void require_interlaced(const std::vector<double>& s1,
                        const std::vector<double>& s2, const char* ctx) {
  if (s1.empty() || s2.empty()) {
    throw std::invalid_argument(std::string(ctx) +
                                ": both spectra must be non-empty");
  }
  for (std::size_t i = 1; i < s1.size(); ++i) {
    if (s1[i] <= s1[i - 1]) {
      throw std::invalid_argument(std::string(ctx) +
                                  ": spectra must be ascending");
    }
  }
  for (std::size_t i = 1; i < s2.size(); ++i) {
    if (s2[i] <= s2[i - 1]) {
      throw std::invalid_argument(std::string(ctx) +
                                  ": spectra must be ascending");
    }
  }
  const double vmax = std::min(s1.back(), s2.back());
  std::vector<std::pair<double, int>> merged;
  for (double v : s1) {
    if (v <= vmax) merged.emplace_back(v, 0);
  }
  for (double v : s2) {
    if (v <= vmax) merged.emplace_back(v, 1);
  }
  std::sort(merged.begin(), merged.end());
  for (std::size_t i = 1; i < merged.size(); ++i) {
    const double gap = merged[i].first - merged[i - 1].first;
    if (gap <= 1e-12 * std::max(1.0, std::abs(merged[i].first))) {
      throw std::invalid_argument(std::string(ctx) +
                                  ": the spectra share an eigenvalue near " +
                                  g17(merged[i].first));
    }
    if (merged[i].second == merged[i - 1].second) {
      throw std::invalid_argument(std::string(ctx) +
                                  ": the spectra do not interleave near " +
                                  g17(merged[i].first));
    }
  }
}

struct MarginSeries {
  std::vector<double> r;
  std::vector<double> margin;
  double slope = 0.0;
};

// margin(r) = 2 sum_groups counting(group, r) - linear r + log_coeff ln r,
// slope fitted against ln r over the top half of the grid.
MarginSeries margin_trend(const std::vector<const std::vector<double>*>& groups,
                          double linear, double log_coeff,
                          const std::vector<double>& grid) {
  MarginSeries out;
  out.r = grid;
  std::vector<double> lnr;
  lnr.reserve(grid.size());
  for (double r : grid) {
    double total = 0.0;
    for (const auto* g : groups) total += 2.0 * counting_integral(*g, r);
    out.margin.push_back(total - linear * r + log_coeff * std::log(r));
    lnr.push_back(std::log(r));
  }
  out.slope = fit_slope(lnr, out.margin, grid.size() / 2);
  return out;
}

std::string describe_slope(const MarginSeries& series) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "margin slope %.4f per ln r on r in [%.6g, %.6g]",
                series.slope, series.r.front(), series.r.back());
  return buf;
}

// Worst slack of n_S(t) >= coeff n_sigma(t) + constant over the jump grid,
// restricted to the trusted top half (the bound is asymptotic).
CorollaryVerdict density_verdict(const std::vector<double>& sigma,
                                 const std::vector<double>& s, double coeff,
                                 double constant, bool strict,
                                 const char* ctx) {
  if (sigma.empty()) {
    throw std::invalid_argument(std::string(ctx) + ": empty spectrum");
  }
  std::vector<double> sa;
  sa.reserve(sigma.size());
  for (double v : sigma) sa.push_back(std::abs(v));
  std::sort(sa.begin(), sa.end());
  std::vector<double> ss;
  ss.reserve(s.size());
  for (double v : s) ss.push_back(std::abs(v));
  std::sort(ss.begin(), ss.end());

  const std::size_t start = sa.size() / 2;
  double worst = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (std::size_t i = start; i < sa.size(); ++i) {
    const double t = sa[i];
    // inclusive counting with a relative cushion so exact subset copies of
    // sigma values land on the closed side
    const double t_eval = t + 1e-12 * std::max(1.0, t);
    const auto n_sigma = static_cast<double>(
        std::upper_bound(sa.begin(), sa.end(), t_eval) - sa.begin());
    const auto n_s = static_cast<double>(
        std::upper_bound(ss.begin(), ss.end(), t_eval) - ss.begin());
    const double slack = n_s - (coeff * n_sigma + constant);
    if (slack < worst) {
      worst = slack;
      worst_t = t;
    }
  }
  CorollaryVerdict verdict;
  verdict.margin = worst;
  verdict.satisfied = strict ? (worst > 1e-12) : (worst >= -1e-12);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "worst tail slack %.6g at t = %.6g over the top half of %zu jumps%s",
                worst, worst_t, sa.size() - start,
                strict ? " (boundary case needs strictly positive slack)" : "");
  verdict.detail = buf;
  return verdict;
}

nlohmann::json beta_json(double beta) {
  if (std::isinf(beta)) return nlohmann::json("inf");
  return nlohmann::json(beta);
}

double beta_from_json(const nlohmann::json& j, const char* ctx) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw std::invalid_argument(std::string(ctx) +
                              ": beta must be a number or \"inf\"");
}

}  // namespace

// ---------------------------------------------------------------------------
// MixedDataset
// ---------------------------------------------------------------------------

std::vector<double> MixedDataset::values() const {
  return record_values(lambda);
}

std::vector<double> MixedDataset::s_values() const {
  std::vector<double> out;
  for (const auto& rec : lambda) {
    if (rec.has_zeta) out.push_back(rec.value);
  }
  return out;
}

void MixedDataset::validate() const {
  if (ell < -0.5) {
    throw std::invalid_argument("dataset: ell must be >= -1/2");
  }
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::invalid_argument("dataset: a must lie in (0, 1]");
  }
  smoothness.validate(a);
  std::vector<double> sorted;
  sorted.reserve(lambda.size());
  for (const auto& rec : lambda) {
    if (rec.has_zeta && !(rec.zeta > 0.0)) {
      throw std::invalid_argument("dataset: norming constants must be positive");
    }
    sorted.push_back(rec.value);
  }
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double gap = sorted[i] - sorted[i - 1];
    if (gap <= 1e-12 * std::max(1.0, std::abs(sorted[i]))) {
      throw std::invalid_argument("dataset: eigenvalues must be distinct (near " +
                                  g17(sorted[i]) + ")");
    }
  }
}

std::string MixedDataset::to_json() const {
  nlohmann::json j;
  j["ell"] = ell;
  j["a"] = a;
  auto arr = nlohmann::json::array();
  for (const auto& rec : lambda) {
    nlohmann::json e;
    e["value"] = rec.value;
    e["beta"] = beta_json(rec.beta);
    if (rec.has_zeta) e["zeta"] = rec.zeta;
    arr.push_back(e);
  }
  j["lambda"] = arr;
  nlohmann::json sm;
  sm["k"] = smoothness.k;
  sm["p"] = std::isinf(smoothness.p) ? nlohmann::json("inf")
                                     : nlohmann::json(smoothness.p);
  sm["delta0"] = smoothness.delta0;
  if (smoothness.vanishing != 0) sm["vanishing"] = smoothness.vanishing;
  if (!smoothness.weighted_class) sm["weighted_class"] = false;
  j["smoothness"] = sm;
  return j.dump(2);
}

MixedDataset MixedDataset::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MixedDataset data;
  data.ell = j.at("ell").get<double>();
  data.a = j.at("a").get<double>();
  for (const auto& e : j.at("lambda")) {
    EigenRecord rec;
    rec.value = e.at("value").get<double>();
    if (e.contains("beta")) rec.beta = beta_from_json(e.at("beta"), "dataset");
    if (e.contains("zeta")) {
      rec.has_zeta = true;
      rec.zeta = e.at("zeta").get<double>();
    }
    data.lambda.push_back(rec);
  }
  if (j.contains("smoothness")) {
    const auto& sm = j.at("smoothness");
    if (sm.contains("k")) data.smoothness.k = sm.at("k").get<int>();
    if (sm.contains("p")) {
      data.smoothness.p = sm.at("p").is_string()
                              ? parse_double(sm.at("p").get<std::string>())
                              : sm.at("p").get<double>();
    }
    if (sm.contains("delta0")) data.smoothness.delta0 = sm.at("delta0").get<double>();
    if (sm.contains("vanishing")) data.smoothness.vanishing = sm.at("vanishing").get<int>();
    if (sm.contains("weighted_class")) data.smoothness.weighted_class = sm.at("weighted_class").get<bool>();
  }
  data.validate();
  return data;
}

// ---------------------------------------------------------------------------
// Completeness system
// ---------------------------------------------------------------------------

double SystemFunction::operator()(double x) const {
  switch (type) {
    case Type::Monomial:
      return power == 0 ? 1.0 : std::pow(x, power);
    case Type::Cosine: {
      const double s = 2.0 * std::sqrt(std::abs(lambda)) * x;
      return lambda >= 0.0 ? std::cos(s) : std::cosh(s);
    }
    case Type::XSine: {
      const double s = 2.0 * std::sqrt(std::abs(lambda)) * x;
      return lambda >= 0.0 ? x * std::sin(s) : x * std::sinh(s);
    }
  }
  return 0.0;
}

std::string SystemFunction::describe() const {
  char buf[64];
  switch (type) {
    case Type::Monomial:
      std::snprintf(buf, sizeof(buf), "x^%d", power);
      break;
    case Type::Cosine:
      std::snprintf(buf, sizeof(buf), "%s(2 sqrt(%.12g) x)",
                    lambda >= 0.0 ? "cos" : "cosh", std::abs(lambda));
      break;
    case Type::XSine:
      std::snprintf(buf, sizeof(buf), "x %s(2 sqrt(%.12g) x)",
                    lambda >= 0.0 ? "sin" : "sinh", std::abs(lambda));
      break;
  }
  return buf;
}

std::vector<SystemFunction> build_system(const MixedDataset& data) {
  data.validate();
  const double ell = data.ell;
  if (ell < 0.0 || ell != std::floor(ell)) {
    throw std::invalid_argument(
        "build_system: the completeness system needs integer ell >= 0");
  }
  double scale = 1.0;
  for (const auto& rec : data.lambda) scale = std::max(scale, std::abs(rec.value));
  const double zero_tol = 1e-9 * scale;

  // A zero eigenvalue contributes no oscillatory member (its cosine would
  // duplicate x^0 and its x sine vanishes identically); the monomial count
  // grows instead, once for the eigenvalue and once more for its norming
  // constant.
  bool zero_eigenvalue = false;
  bool zero_with_zeta = false;
  for (const auto& rec : data.lambda) {
    if (std::abs(rec.value) <= zero_tol) {
      zero_eigenvalue = true;
      if (rec.has_zeta) zero_with_zeta = true;
    }
  }
  int top = static_cast<int>(ell);
  if (zero_with_zeta) {
    top += 2;
  } else if (zero_eigenvalue) {
    top += 1;
  }

  std::vector<SystemFunction> system;
  for (int k = 0; k <= top; ++k) {
    system.push_back({SystemFunction::Type::Monomial, 2 * k, 0.0});
  }
  for (const auto& rec : data.lambda) {
    if (std::abs(rec.value) > zero_tol) {
      system.push_back({SystemFunction::Type::Cosine, 0, rec.value});
    }
  }
  for (const auto& rec : data.lambda) {
    if (rec.has_zeta && std::abs(rec.value) > zero_tol) {
      system.push_back({SystemFunction::Type::XSine, 0, rec.value});
    }
  }
  return system;
}

ClosednessDiagnostic closedness_diagnostic(const std::vector<SystemFunction>& system,
                                           double a, int probe_count) {
  if (system.empty()) {
    throw std::invalid_argument("closedness_diagnostic: empty system");
  }
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::invalid_argument("closedness_diagnostic: a must lie in (0, 1]");
  }
  if (probe_count < 1) {
    throw std::invalid_argument("closedness_diagnostic: need at least one probe");
  }
  const int n = static_cast<int>(system.size());

  double max_freq = 2.0 * M_PI * (probe_count - 1) / a;
  for (const auto& f : system) {
    if (f.type == SystemFunction::Type::Monomial) continue;
    if (f.lambda > 0.0) {
      max_freq = std::max(max_freq, 2.0 * std::sqrt(f.lambda));
    } else if (2.0 * std::sqrt(-f.lambda) * a > 600.0) {
      throw std::invalid_argument(
          "closedness_diagnostic: eigenvalue too negative, the hyperbolic "
          "member overflows");
    }
  }
  const int panels = std::clamp(static_cast<int>(std::ceil(a * max_freq / 3.0)) + 8,
                                32, 4096);

  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const auto& fi = system[i];
      const auto& fj = system[j];
      const double v = integrate_fixed(
          [&](double x) { return fi(x) * fj(x); }, 0.0, a, panels);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }

  Eigen::VectorXd norms = gram.diagonal().array().sqrt();
  Eigen::MatrixXd normalized(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      normalized(i, j) = gram(i, j) / (norms(i) * norms(j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> norm_eig(normalized);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram);
  const Eigen::VectorXd w = gram_eig.eigenvalues();
  const Eigen::MatrixXd v = gram_eig.eigenvectors();
  const double cutoff = 1e-12 * w.maxCoeff();

  ClosednessDiagnostic diag;
  diag.sigma_min = norm_eig.eigenvalues().minCoeff();
  diag.system_size = n;
  diag.label =
      "heuristic: small residuals are non-rejection evidence, not a "
      "closedness proof";
  for (int probe = 0; probe < probe_count; ++probe) {
    const double freq = 2.0 * M_PI * probe / a;
    auto p = [freq](double x) { return std::cos(freq * x); };
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      const auto& fi = system[i];
      b(i) = integrate_fixed([&](double x) { return fi(x) * p(x); }, 0.0, a,
                             panels);
    }
    const double p_norm2 =
        integrate_fixed([&](double x) { return p(x) * p(x); }, 0.0, a, panels);
    Eigen::VectorXd y = v.transpose() * b;
    for (int i = 0; i < n; ++i) y(i) = w(i) > cutoff ? y(i) / w(i) : 0.0;
    const Eigen::VectorXd coeff = v * y;
    // The leftover is integrated as a square, so a probe inside the span
    // yields a genuinely tiny value instead of a cancellation artifact.
    const double leftover = integrate_fixed(
        [&](double x) {
          double combo = 0.0;
          for (int i = 0; i < n; ++i) combo += coeff(i) * system[i](x);
          const double d = p(x) - combo;
          return d * d;
        },
        0.0, a, panels);
    const double residual = std::sqrt(leftover / p_norm2);
    if (residual > diag.worst_residual) {
      diag.worst_residual = residual;
      diag.worst_probe = probe;
    }
  }
  return diag;
}

// ---------------------------------------------------------------------------
// Counting integrals and the growth criterion
// ---------------------------------------------------------------------------

double counting_integral(const std::vector<double>& lambdas, double r) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("counting_integral: r must be positive");
  }
  const double lr = std::log(r);
  double total = 0.0;
  for (double v : lambdas) {
    if (v == 0.0) {
      throw std::domain_error(
          "counting_integral: a zero eigenvalue makes the integral divergent");
    }
    total += std::max(0.0, lr - 0.5 * std::log(std::abs(v)));
  }
  return total;
}

CountingReport criterion_margin(const MixedDataset& data,
                                const std::vector<double>& r_grid) {
  data.validate();
  const SmoothnessTag& tag = data.smoothness;
  if (tag.p == 1.0) {
    throw std::invalid_argument(
        "criterion_margin: p = 1 is outside the admissible class (need p in "
        "(1, inf])");
  }
  const bool p_inf = std::isinf(tag.p);
  const int needed = p_inf ? tag.k + 1 : tag.k;
  if (tag.vanishing < needed) {
    throw std::invalid_argument(
        "criterion_margin: order k = " + std::to_string(tag.k) + " at p = " +
        g17(tag.p) + " needs " + std::to_string(needed) +
        " vanishing derivatives at the split point, tag declares " +
        std::to_string(tag.vanishing));
  }
  const std::vector<double> vals = data.values();
  if (vals.empty()) {
    throw std::invalid_argument("criterion_margin: dataset has no eigenvalues");
  }
  const std::vector<double> svals = data.s_values();
  const std::vector<double> grid =
      usable_radii(r_grid, max_abs(vals), "criterion_margin");

  const double inv_pp = p_inf ? 1.0 : 1.0 - 1.0 / tag.p;
  CountingReport report;
  report.coefficient = tag.k + 2.0 * data.ell + 2.0 + inv_pp;
  report.r_grid = grid;
  std::vector<double> lnr;
  for (double r : grid) {
    const double integral =
        2.0 * counting_integral(vals, r) + 2.0 * counting_integral(svals, r);
    report.integral.push_back(integral);
    report.margin.push_back(integral - 4.0 * data.a * r / M_PI +
                            report.coefficient * std::log(r));
    lnr.push_back(std::log(r));
  }
  report.tail_slope = fit_slope(lnr, report.margin, grid.size() / 2);
  report.verdict =
      report.tail_slope >= kMarginSlopeFloor ? "SATISFIED" : "UNDECIDED";
  return report;
}

std::string CountingReport::to_csv() const {
  std::ostringstream out;
  out << "# coefficient = " << g17(coefficient)
      << ", tail_slope = " << g17(tail_slope) << ", verdict = " << verdict
      << "\n";
  out << "r,integral,margin\n";
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    out << g17(r_grid[i]) << ',' << g17(integral[i]) << ',' << g17(margin[i])
        << "\n";
  }
  return out.str();
}

std::string CountingReport::to_json() const {
  nlohmann::json j;
  j["coefficient"] = coefficient;
  j["tail_slope"] = tail_slope;
  j["verdict"] = verdict;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    nlohmann::json row;
    row["r"] = r_grid[i];
    row["integral"] = integral[i];
    row["margin"] = margin[i];
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Jensen audits
// ---------------------------------------------------------------------------

JensenAudit jensen_audit(const Potential& q, const Potential& qhat,
                         const MixedDataset& data,
                         const std::vector<double>& radii, int nodes,
                         const SolverOptions& opt, int jobs) {
  data.validate();
  if (radii.empty()) {
    throw std::invalid_argument("jensen_audit: need at least one radius");
  }
  require_ascending_positive(radii, "jensen_audit");
  nodes = std::max(nodes, 256);
  nodes += (4 - nodes % 4) % 4;

  const double ell = data.ell;
  std::vector<double> zero_set = data.values();
  for (double s : data.s_values()) zero_set.push_back(s);

  JensenAudit audit;
  const double r_min = radii.front();
  // The expansion point must avoid both a vanishing H and the dataset zeros
  // (they would blow up the counting side); origin first, then small shifts.
  auto healthy = [&](double l0) {
    for (double v : zero_set) {
      if (std::abs(v - l0) <= 1e-9 * std::max(1.0, std::abs(v))) return false;
    }
    const Scaled h = h_value(ell, q, qhat, {l0, 0.0}, opt);
    return std::isfinite(h.log_abs());
  };
  double lambda0 = 0.0;
  bool found = healthy(0.0);
  for (int probe = 1; !found && probe <= 5; ++probe) {
    lambda0 = probe * 1e-3 * r_min * r_min;
    found = healthy(lambda0);
  }
  if (!found) {
    audit.status = "INDETERMINATE";
    audit.lambda0 = lambda0;
    return audit;
  }
  audit.status = "OK";
  audit.lambda0 = lambda0;
  audit.c0 = std::abs(h_value(ell, q, qhat, {lambda0, 0.0}, opt).log_abs());

  // ln |H(r^2 e^(2 i phi) + lambda0)| has period pi in phi and is symmetric
  // about pi/2 by conjugation, so only m/2 + 1 of the m = nodes/2 distinct
  // angles are evaluated.
  const int m = nodes / 2;
  const int half = m / 2;
  for (double r : radii) {
    JensenRow row;
    row.r = r;
    bool done = false;
    for (int attempt = 0; attempt < 5 && !done; ++attempt) {
      const double ru = r * std::pow(1.000611, attempt);
      std::vector<double> ln_h(half + 1);
      parallel_for(static_cast<std::size_t>(half + 1), jobs,
                   [&](std::size_t k) {
                     const double phi = M_PI * static_cast<double>(k) / m;
                     const std::complex<double> z =
                         ru * ru * std::exp(std::complex<double>(0.0, 2.0 * phi)) +
                         lambda0;
                     ln_h[k] = h_value(ell, q, qhat, z, opt).log_abs();
                   });
      bool finite = true;
      for (double v : ln_h) finite = finite && std::isfinite(v);
      row.radius_used = ru;
      if (!finite) continue;
      double average = 0.0;
      for (int k = 0; k < m; ++k) average += ln_h[std::min(k, m - k)];
      average /= m;
      double counting = 0.0;
      const double lru = std::log(ru);
      for (double v : zero_set) {
        counting += 2.0 * std::max(0.0, lru - 0.5 * std::log(std::abs(v - lambda0)));
      }
      row.counting = counting;
      row.circle_average = average;
      row.discrepancy = average + audit.c0 - counting;
      row.holds = row.discrepancy >= -1e-6 * std::max(1.0, std::abs(counting));
      done = true;
    }
    if (!done) {
      row.circle_average = -std::numeric_limits<double>::infinity();
      row.discrepancy = -std::numeric_limits<double>::infinity();
      row.holds = false;
    }
    audit.rows.push_back(row);
  }
  return audit;
}

std::string JensenAudit::to_csv() const {
  std::ostringstream out;
  out << "# lambda0 = " << g17(lambda0) << ", c0 = " << g17(c0)
      << ", status = " << status << "\n";
  out << "r,radius_used,counting,circle_average,discrepancy,holds\n";
  for (const auto& row : rows) {
    out << g17(row.r) << ',' << g17(row.radius_used) << ',' << g17(row.counting)
        << ',' << g17(row.circle_average) << ',' << g17(row.discrepancy) << ','
        << (row.holds ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string JensenAudit::to_json() const {
  nlohmann::json j;
  j["status"] = status;
  j["lambda0"] = lambda0;
  j["c0"] = c0;
  auto arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json e;
    e["r"] = row.r;
    e["radius_used"] = row.radius_used;
    e["counting"] = row.counting;
    e["circle_average"] = row.circle_average;
    e["discrepancy"] = row.discrepancy;
    e["holds"] = row.holds;
    arr.push_back(e);
  }
  j["rows"] = arr;
  return j.dump(2);
}

double jensen_rational_discrepancy(const std::vector<double>& zeros,
                                   const std::vector<double>& poles, double r,
                                   int nodes) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("jensen_rational_discrepancy: r must be positive");
  }
  nodes = std::max(nodes, 16);
  for (double z : zeros) {
    if (z == 0.0) {
      throw std::invalid_argument("jensen_rational_discrepancy: zero at the origin");
    }
  }
  for (double p : poles) {
    if (p == 0.0) {
      throw std::invalid_argument("jensen_rational_discrepancy: pole at the origin");
    }
  }
  auto ln_g = [&](std::complex<double> z) {
    double total = 0.0;
    for (double zk : zeros) total += std::log(std::abs(z - zk));
    for (double pk : poles) total -= std::log(std::abs(z - pk));
    return total;
  };
  double lhs = 0.0;
  for (double z : zeros) lhs += std::max(0.0, std::log(r / std::abs(z)));
  for (double p : poles) lhs -= std::max(0.0, std::log(r / std::abs(p)));
  double average = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double phi = 2.0 * M_PI * k / nodes;
    const double v = ln_g(std::polar(r, phi));
    if (!std::isfinite(v)) {
      throw std::invalid_argument(
          "jensen_rational_discrepancy: the circle passes through a zero or pole");
    }
    average += v;
  }
  average /= nodes;
  const double rhs = average - ln_g({0.0, 0.0});
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Counting-function lemma checks
// ---------------------------------------------------------------------------

SequenceGapReport counting_lower_bound_check(const std::vector<double>& mu,
                                             double alpha1, double alpha2,
                                             const std::vector<double>& r_grid) {
  if (!(alpha1 > 0.0)) {
    throw std::invalid_argument("counting_lower_bound_check: alpha1 must be positive");
  }
  if (mu.empty()) {
    throw std::invalid_argument("counting_lower_bound_check: empty sequence");
  }
  if (r_grid.size() < 2) {
    throw std::invalid_argument("counting_lower_bound_check: need at least 2 radii");
  }
  require_ascending_positive(r_grid, "counting_lower_bound_check");
  if (r_grid.front() < 1.0) {
    throw std::invalid_argument(
        "counting_lower_bound_check: the integral starts at 1, the grid must too");
  }
  SequenceGapReport report;
  report.r_grid = r_grid;
  for (double r : r_grid) {
    const double lr = std::log(r);
    double integral = 0.0;
    for (double m : mu) {
      const double base = m > 1.0 ? 0.5 * std::log(m) : 0.0;
      integral += 2.0 * std::max(0.0, lr - base);
    }
    report.gap.push_back(integral - (2.0 / alpha1) * r -
                         (1.0 - 2.0 * alpha2 / alpha1) * lr);
  }
  report.gap_min = *std::min_element(report.gap.begin(), report.gap.end());
  report.gap_max = *std::max_element(report.gap.begin(), report.gap.end());
  // Boundedness below shows up as the tail never undercutting the lows seen
  // over the first half of the grid.
  const double head_min = *std::min_element(
      report.gap.begin(), report.gap.begin() + report.gap.size() / 2);
  const double tail_min = *std::min_element(
      report.gap.begin() + report.gap.size() / 2, report.gap.end());
  report.holds = tail_min >= head_min - 1e-9;
  return report;
}

CountingDifferenceReport counting_difference_check(
    const std::vector<double>& b, const std::vector<double>& t,
    const std::vector<double>& r_grid, double declared_tail) {
  if (b.size() != t.size() || b.empty()) {
    throw std::invalid_argument(
        "counting_difference_check: sequences must be non-empty and equally long");
  }
  if (!(declared_tail >= 0.0) || std::isinf(declared_tail)) {
    throw std::invalid_argument(
        "counting_difference_check: the declared tail bound must be finite and "
        "non-negative");
  }
  if (r_grid.empty()) {
    throw std::invalid_argument("counting_difference_check: empty radius grid");
  }
  require_ascending_positive(r_grid, "counting_difference_check");
  std::vector<double> a(b.size());
  double bound = declared_tail;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == 0.0 || 1.0 + t[i] == 0.0) {
      throw std::invalid_argument(
          "counting_difference_check: b_n and 1 + t_n must be nonzero");
    }
    a[i] = b[i] * (1.0 + t[i]);
    bound += 0.5 * std::abs(std::log(std::abs(1.0 + t[i])));
  }
  CountingDifferenceReport report;
  report.r_grid = r_grid;
  report.bound = bound;
  for (double r : r_grid) {
    report.difference.push_back(
        std::abs(counting_integral(a, r) - counting_integral(b, r)));
  }
  report.worst =
      *std::max_element(report.difference.begin(), report.difference.end());
  report.holds = report.worst <= bound + 1e-9;
  return report;
}

std::complex<double> PartialFractionG::operator()(std::complex<double> z) const {
  std::complex<double> total = a2 * z * z + a1 * z + a0;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    total += weights[i] * (1.0 / (z - poles[i]) + 1.0 / poles[i]);
  }
  return total;
}

MeromorphicCountingReport meromorphic_counting_check(
    const PartialFractionG& g, const std::vector<double>& r_grid) {
  if (g.poles.empty() || g.poles.size() != g.weights.size()) {
    throw std::invalid_argument(
        "meromorphic_counting_check: poles and weights must be non-empty and "
        "equally long");
  }
  for (double p : g.poles) {
    if (p == 0.0) {
      throw std::invalid_argument("meromorphic_counting_check: pole at the origin");
    }
  }
  if (r_grid.size() < 4) {
    throw std::invalid_argument("meromorphic_counting_check: need at least 4 radii");
  }
  require_ascending_positive(r_grid, "meromorphic_counting_check");
  // The partial-fraction terms cancel pairwise at z = 0, so g(0) equals the
  // constant coefficient; a vanishing value puts a zero at the origin and
  // the counting integral diverges.
  if (g.a0 == 0.0) {
    throw std::domain_error(
        "meromorphic_counting_check: the comparison function vanishes at the "
        "origin");
  }

  std::vector<double> poles = g.poles;
  std::sort(poles.begin(), poles.end());
  auto real_g = [&g](double x) { return g(std::complex<double>(x, 0.0)).real(); };

  // Bracket scan: between consecutive poles plus outer stretches wide enough
  // to cover every zero the radius grid can see.
  const double r_max = r_grid.back();
  const double reach = r_max * r_max + 1.0;
  std::vector<std::pair<double, double>> intervals;
  auto eps_for = [](double p) { return 1e-9 * (1.0 + std::abs(p)); };
  intervals.emplace_back(std::min(poles.front(), -reach) - 1.0,
                         poles.front() - eps_for(poles.front()));
  for (std::size_t i = 0; i + 1 < poles.size(); ++i) {
    intervals.emplace_back(poles[i] + eps_for(poles[i]),
                           poles[i + 1] - eps_for(poles[i + 1]));
  }
  intervals.emplace_back(poles.back() + eps_for(poles.back()),
                         std::max(poles.back(), reach) + 1.0);

  std::vector<double> zeros;
  for (const auto& [lo, hi] : intervals) {
    if (!(hi > lo)) continue;
    // Outer intervals stretch to r_max^2, yet the zeros cluster at the scale
    // of the poles and polynomial coefficients; uniform samples alone would
    // step right over them, so thicken the grid geometrically at both ends.
    const double width = hi - lo;
    std::vector<double> xs;
    const int samples = 512;
    xs.reserve(samples + 130);
    for (int i = 0; i <= samples; ++i) {
      xs.push_back(lo + width * i / samples);
    }
    for (int j = 1; j <= 64; ++j) {
      const double off = width * std::pow(2.0, -j);
      xs.push_back(lo + off);
      xs.push_back(hi - off);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double x_prev = xs.front();
    double f_prev = real_g(x_prev);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double x = xs[i];
      const double f = real_g(x);
      if (f_prev == 0.0) {
        zeros.push_back(x_prev);
      } else if (f_prev * f < 0.0) {
        double xa = x_prev, xb = x, fa = f_prev;
        for (int it = 0; it < 100; ++it) {
          const double xm = 0.5 * (xa + xb);
          const double fm = real_g(xm);
          if (fm == 0.0) {
            xa = xb = xm;
            break;
          }
          if (fa * fm < 0.0) {
            xb = xm;
          } else {
            xa = xm;
            fa = fm;
          }
          if (xb - xa <= 1e-13 * (1.0 + std::abs(xm))) break;
        }
        zeros.push_back(0.5 * (xa + xb));
      }
      x_prev = x;
      f_prev = f;
    }
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end(),
                          [](double u, double v) {
                            return std::abs(u - v) <= 1e-10 * (1.0 + std::abs(u));
                          }),
              zeros.end());
  for (double z : zeros) {
    if (std::abs(z) <= 1e-12 * (1.0 + max_abs(poles))) {
      throw std::domain_error(
          "meromorphic_counting_check: found a zero at the origin");
    }
  }

  MeromorphicCountingReport report;
  report.zeros = zeros;
  report.r_grid = r_grid;
  for (double r : r_grid) {
    const double diff =
        counting_integral(zeros, r) - counting_integral(g.poles, r);
    report.excess.push_back(diff - 0.5 * std::log(r));
  }
  report.c_estimate =
      *std::max_element(report.excess.begin(), report.excess.end());
  const double head_max = *std::max_element(
      report.excess.begin(), report.excess.begin() + report.excess.size() / 2);
  const double tail_max = *std::max_element(
      report.excess.begin() + report.excess.size() / 2, report.excess.end());
  report.holds = tail_max <= head_max + 1e-9;
  return report;
}

PairSeparationReport pair_separation_check(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("pair_separation_check: empty sequence");
  }
  for (double bn : b) {
    if (bn == 0.0) {
      throw std::invalid_argument("pair_separation_check: b_n must be nonzero");
    }
  }
  PairSeparationReport report;
  for (double ak : a) {
    double sup = 0.0;
    for (double bn : b) {
      const double gap = std::abs(bn) * std::abs(bn - ak);
      sup = std::max(sup, gap == 0.0 ? std::numeric_limits<double>::infinity()
                                     : 1.0 / gap);
    }
    report.c_estimate = std::max(report.c_estimate, std::abs(ak) * sup);
  }
  report.holds = std::isfinite(report.c_estimate);
  return report;
}

WeightConvergenceReport interpolation_weight_check(const std::vector<double>& a,
                                                   const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 4) {
    throw std::invalid_argument(
        "interpolation_weight_check: need at least 4 pairs of equal length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0 || b[i] == 0.0) {
      throw std::invalid_argument(
          "interpolation_weight_check: sequence entries must be nonzero");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a[i] == a[j]) {
        throw std::invalid_argument(
            "interpolation_weight_check: a_n must be distinct");
      }
    }
  }

  // A(n, m) in signed-log form along the truncation sweep; the deepest
  // truncation stands in for the limit A_n.
  std::vector<std::vector<double>> partial(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double head = (a[i] / b[i]) * (a[i] - b[i]);
    double lg = 0.0;
    double sign = head == 0.0 ? 0.0 : (head > 0.0 ? 1.0 : -1.0);
    const double head_lg = head == 0.0 ? 0.0 : std::log(std::abs(head));
    lg = head_lg;
    for (std::size_t m = 0; m < n; ++m) {
      if (m != i) {
        const double term = (a[m] / b[m]) * (a[i] - b[m]) / (a[i] - a[m]);
        if (term == 0.0) {
          sign = 0.0;
        } else {
          lg += std::log(std::abs(term));
          if (term < 0.0) sign = -sign;
        }
      }
      partial[i][m] = sign == 0.0 ? 0.0 : sign * std::exp(lg);
    }
  }

  WeightConvergenceReport report;
  report.limits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.limits[i] = partial[i][n - 1];
    report.weight_sum += std::abs(report.limits[i]) / (a[i] * a[i]);
  }
  const std::size_t m0 = n / 2;
  for (std::size_t m = m0 + 1; m < n; ++m) {
    double inc = 0.0;
    for (std::size_t i = 0; i <= m0; ++i) {
      inc += std::abs(partial[i][m] - partial[i][m - 1]) / (a[i] * a[i]);
    }
    report.drift.push_back(inc);
  }
  double total = 0.0;
  for (double d : report.drift) total += d;
  bool decaying;
  if (report.drift.size() >= 8) {
    const std::size_t quarter = (report.drift.size() + 3) / 4;
    double tail = 0.0;
    for (std::size_t i = report.drift.size() - quarter; i < report.drift.size(); ++i) {
      tail += report.drift[i];
    }
    decaying = tail <= 0.25 * total + 1e-300;
  } else {
    decaying = report.drift.empty() ||
               report.drift.back() <= 0.05 * (1.0 + report.weight_sum);
  }
  report.summable = std::isfinite(report.weight_sum) && decaying;
  return report;
}

// ---------------------------------------------------------------------------
// Data-budget corollary checks
// ---------------------------------------------------------------------------

CorollaryVerdict subset_density_check(const std::vector<double>& sigma,
                                      const std::vector<EigenRecord>& s,
                                      double a, double ell, double beta,
                                      bool weighted_class) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::invalid_argument("subset_density_check: a must lie in (0, 1]");
  }
  require_zeta(s, "subset_density_check");
  const std::vector<double> s_vals = record_values(s);
  require_subset(sigma, s_vals, "subset_density_check");
  const double constant =
      (a - 1.0) * ell / 2.0 - (std::isinf(beta) ? 0.0 : a / 2.0);
  const bool strict = !weighted_class && ell == -0.5 && a == 1.0;
  return density_verdict(sigma, s_vals, a, constant, strict,
                         "subset_density_check");
}

CorollaryVerdict eigenvalue_density_check(const std::vector<double>& sigma,
                                          const std::vector<double>& s,
                                          double a, double ell, double beta,
                                          bool weighted_class) {
  if (!(a > 0.0 && a <= 0.5)) {
    throw std::invalid_argument(
        "eigenvalue_density_check: a must lie in (0, 1/2]");
  }
  require_subset(sigma, s, "eigenvalue_density_check");
  const double constant =
      (a - 1.0) * ell - (std::isinf(beta) ? 0.0 : 2.0 * a);
  const bool strict = !weighted_class && ell == -0.5 && a == 0.5;
  return density_verdict(sigma, s, 2.0 * a, constant, strict,
                         "eigenvalue_density_check");
}

int omission_budget(double ell, int k, double beta, bool weighted_class) {
  if (ell < -0.5) {
    throw std::invalid_argument("omission_budget: ell must be >= -1/2");
  }
  if (k < 0) {
    throw std::invalid_argument("omission_budget: k must be >= 0");
  }
  const double half = std::isinf(beta) ? ell / 2.0 : (ell + 1.0) / 2.0;
  int budget = static_cast<int>(std::floor(half)) + k + 1;
  if (ell == -0.5 && !weighted_class) budget -= 1;
  return budget;
}

CorollaryVerdict omission_budget_check(const std::vector<double>& sigma,
                                       const std::vector<double>& kept,
                                       double ell, int k, double beta,
                                       const std::vector<double>& r_grid,
                                       bool weighted_class) {
  require_subset(sigma, kept, "omission_budget_check");
  if (kept.empty()) {
    throw std::invalid_argument("omission_budget_check: kept set is empty");
  }
  const int omitted = static_cast<int>(sigma.size() - kept.size());
  const int budget = omission_budget(ell, k, beta, weighted_class);
  const std::vector<double> grid =
      usable_radii(r_grid, max_abs(kept), "omission_budget_check");
  // The split point sits at 1/2, and the kept eigenvalues enter without
  // norming constants.
  const MarginSeries series =
      margin_trend({&kept}, 2.0 / M_PI, 2.0 * k + 2.0 * ell + 3.0, grid);

  CorollaryVerdict verdict;
  verdict.margin = series.slope;
  verdict.satisfied = omitted <= budget && series.slope >= kMarginSlopeFloor;
  char buf[220];
  std::snprintf(buf, sizeof(buf), "omitted %d of budget %d; %s", omitted,
                budget, describe_slope(series).c_str());
  verdict.detail = buf;
  return verdict;
}

namespace {

// Shared scaffolding for the two-spectra corollaries: validates the beta
// pair, assembles the second-spectrum remainder after the dropped indices,
// and runs the margin trend with coefficient 2 ell + 2 at full recovery.
struct ExchangeAssembly {
  int chi = 0;
  std::vector<double> remainder2;
  int remark_drops = 0;
};

ExchangeAssembly assemble_remainder(const std::vector<double>& sigma2,
                                    std::vector<std::size_t> dropped,
                                    double beta1, double beta2,
                                    bool drop_one_more, const char* ctx) {
  if (beta1 == beta2) {
    throw std::invalid_argument(std::string(ctx) +
                                ": the boundary conditions must differ");
  }
  ExchangeAssembly out;
  out.chi = (std::isinf(beta1) || std::isinf(beta2)) ? 0 : 1;
  std::sort(dropped.begin(), dropped.end());
  std::vector<bool> keep(sigma2.size(), true);
  for (std::size_t idx : dropped) {
    if (idx >= sigma2.size()) {
      throw std::invalid_argument(std::string(ctx) +
                                  ": dropped index outside the second spectrum");
    }
    if (!keep[idx]) {
      throw std::invalid_argument(std::string(ctx) + ": index dropped twice");
    }
    keep[idx] = false;
  }
  if (drop_one_more) {
    // One further eigenvalue of data is surrendered for the plain-L1
    // ell = -1/2 case; the highest kept index is the cheapest to spend.
    for (std::size_t i = sigma2.size(); i-- > 0;) {
      if (keep[i]) {
        keep[i] = false;
        out.remark_drops = 1;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < sigma2.size(); ++i) {
    if (keep[i]) out.remainder2.push_back(sigma2[i]);
  }
  return out;
}

}  // namespace

CorollaryVerdict two_spectra_exchange_check(
    const std::vector<double>& sigma1, const std::vector<double>& sigma2,
    const std::vector<int>& m_indices, int extra_drop_index, double ell,
    double beta1, double beta2, const std::vector<double>& r_grid,
    bool weighted_class) {
  require_interlaced(sigma1, sigma2, "two_spectra_exchange_check");
  const std::size_t shared = std::min(sigma1.size(), sigma2.size());
  std::vector<std::size_t> dropped;
  std::vector<double> with_zeta;
  for (int idx : m_indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= shared) {
      throw std::invalid_argument(
          "two_spectra_exchange_check: norming index outside both spectra");
    }
    with_zeta.push_back(sigma1[idx]);
    dropped.push_back(static_cast<std::size_t>(idx));
  }
  const int chi = (std::isinf(beta1) || std::isinf(beta2)) ? 0 : 1;
  if (chi == 1) {
    if (extra_drop_index < 0 ||
        static_cast<std::size_t>(extra_drop_index) >= sigma2.size() ||
        std::count(m_indices.begin(), m_indices.end(), extra_drop_index) > 0) {
      throw std::invalid_argument(
          "two_spectra_exchange_check: two finite conditions need one extra "
          "dropped index outside the norming set");
    }
    dropped.push_back(static_cast<std::size_t>(extra_drop_index));
  } else if (extra_drop_index != -1) {
    throw std::invalid_argument(
        "two_spectra_exchange_check: the extra dropped index only applies "
        "when both conditions are finite");
  }
  const bool remark = !weighted_class && ell == -0.5;
  const ExchangeAssembly assembly = assemble_remainder(
      sigma2, dropped, beta1, beta2, remark && chi == 1,
      "two_spectra_exchange_check");

  double cap = std::max(max_abs(sigma1), max_abs(with_zeta));
  cap = std::max(cap, max_abs(assembly.remainder2));
  const std::vector<double> grid =
      usable_radii(r_grid, cap, "two_spectra_exchange_check");
  const MarginSeries series =
      margin_trend({&sigma1, &with_zeta, &assembly.remainder2}, 4.0 / M_PI,
                   2.0 * ell + 2.0, grid);

  CorollaryVerdict verdict;
  verdict.margin = series.slope;
  verdict.satisfied = series.slope >= kMarginSlopeFloor;
  std::string note = describe_slope(series);
  if (assembly.remark_drops > 0) {
    note += "; one extra eigenvalue surrendered for the plain-L1 ell = -1/2 case";
  }
  if (remark && chi == 0) {
    // The plain-L1 ell = -1/2 case with a Dirichlet member needs the index
    // gaps between the two spectra to carry a c ln r sum of their own.
    const std::vector<double>& inf_side = std::isinf(beta1) ? sigma1 : sigma2;
    const std::vector<double>& fin_side = std::isinf(beta1) ? sigma2 : sigma1;
    std::vector<double> lnr, gap_sum;
    for (double r : grid) {
      double g = 0.0;
      for (std::size_t i = 0; i < shared; ++i) {
        if (std::count(m_indices.begin(), m_indices.end(), static_cast<int>(i)) > 0)
          continue;
        if (std::abs(inf_side[i]) > r * r) continue;
        g += 0.5 * (std::log(std::abs(inf_side[i])) -
                    std::log(std::abs(fin_side[i])));
      }
      gap_sum.push_back(g);
      lnr.push_back(std::log(r));
    }
    const double c_slope = fit_slope(lnr, gap_sum, grid.size() / 2);
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "; index-gap sum grows %.4f per ln r (needs a positive rate)",
                  c_slope);
    note += buf;
    verdict.satisfied = verdict.satisfied && c_slope >= 0.02;
  }
  verdict.detail = note;
  return verdict;
}

CorollaryVerdict paired_replacement_check(
    const std::vector<double>& sigma1, const std::vector<double>& sigma2,
    const std::vector<EigenRecord>& a_subset, const std::vector<double>& b_subset,
    int extra_drop_index, double ell, double beta1, double beta2,
    const std::vector<double>& r_grid, bool weighted_class) {
  if (a_subset.size() != b_subset.size() || a_subset.empty()) {
    throw std::invalid_argument(
        "paired_replacement_check: the paired subsets must be non-empty and "
        "equally long");
  }
  require_zeta(a_subset, "paired_replacement_check");
  const std::vector<double> a_vals = record_values(a_subset);
  require_subset(sigma1, a_vals, "paired_replacement_check");
  require_subset(sigma2, b_subset, "paired_replacement_check");

  double half_log_sum = 0.0;
  for (std::size_t i = 0; i < a_vals.size(); ++i) {
    if (b_subset[i] == 0.0) {
      throw std::invalid_argument("paired_replacement_check: b_n must be nonzero");
    }
    const double ratio = a_vals[i] / b_subset[i];
    if (ratio == 0.0) {
      throw std::invalid_argument("paired_replacement_check: a_n must be nonzero");
    }
    half_log_sum += 0.5 * std::abs(std::log(std::abs(ratio)));
  }

  // Map the replaced values onto second-spectrum indices.
  std::vector<std::size_t> dropped;
  for (double bv : b_subset) {
    bool found = false;
    for (std::size_t i = 0; i < sigma2.size(); ++i) {
      if (std::abs(bv - sigma2[i]) <= 1e-9 * std::max(1.0, std::abs(sigma2[i]))) {
        dropped.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument(
          "paired_replacement_check: replaced value not found in the second "
          "spectrum");
    }
  }
  const int chi = (std::isinf(beta1) || std::isinf(beta2)) ? 0 : 1;
  if (chi == 1) {
    if (extra_drop_index < 0 ||
        static_cast<std::size_t>(extra_drop_index) >= sigma2.size() ||
        std::count(dropped.begin(), dropped.end(),
                   static_cast<std::size_t>(extra_drop_index)) > 0) {
      throw std::invalid_argument(
          "paired_replacement_check: two finite conditions need one extra "
          "dropped index outside the replaced set");
    }
    dropped.push_back(static_cast<std::size_t>(extra_drop_index));
  } else if (extra_drop_index != -1) {
    throw std::invalid_argument(
        "paired_replacement_check: the extra dropped index only applies when "
        "both conditions are finite");
  }
  const bool remark = !weighted_class && ell == -0.5;
  const ExchangeAssembly assembly = assemble_remainder(
      sigma2, dropped, beta1, beta2, remark && chi == 1,
      "paired_replacement_check");

  double cap = std::max(max_abs(sigma1), max_abs(a_vals));
  cap = std::max(cap, max_abs(assembly.remainder2));
  const std::vector<double> grid =
      usable_radii(r_grid, cap, "paired_replacement_check");
  const MarginSeries series =
      margin_trend({&sigma1, &a_vals, &assembly.remainder2}, 4.0 / M_PI,
                   2.0 * ell + 2.0, grid);

  CorollaryVerdict verdict;
  verdict.margin = series.slope;
  verdict.satisfied = series.slope >= kMarginSlopeFloor;
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "%s; replacement counting bound %.6g%s",
                describe_slope(series).c_str(), half_log_sum,
                assembly.remark_drops > 0
                    ? "; one extra eigenvalue surrendered for the plain-L1 "
                      "ell = -1/2 case"
                    : "");
  verdict.detail = buf;
  return verdict;
}

CorollaryVerdict weighted_replacement_check(
    const std::vector<double>& sigma1, const std::vector<double>& sigma2,
    const std::vector<EigenRecord>& a_subset, const std::vector<double>& b_subset,
    double ell, double beta1, double beta2, const std::vector<double>& r_grid,
    bool weighted_class) {
  if (a_subset.size() != b_subset.size() || a_subset.size() < 4) {
    throw std::invalid_argument(
        "weighted_replacement_check: need at least 4 pairs of equal length");
  }
  require_zeta(a_subset, "weighted_replacement_check");
  const std::vector<double> a_vals = record_values(a_subset);
  require_subset(sigma1, a_vals, "weighted_replacement_check");
  require_subset(sigma2, b_subset, "weighted_replacement_check");

  const WeightConvergenceReport weights =
      interpolation_weight_check(a_vals, b_subset);
  const PairSeparationReport separation =
      pair_separation_check(a_vals, b_subset);

  std::vector<std::size_t> dropped;
  for (double bv : b_subset) {
    for (std::size_t i = 0; i < sigma2.size(); ++i) {
      if (std::abs(bv - sigma2[i]) <= 1e-9 * std::max(1.0, std::abs(sigma2[i]))) {
        dropped.push_back(i);
        break;
      }
    }
  }
  if (dropped.size() != b_subset.size()) {
    throw std::invalid_argument(
        "weighted_replacement_check: replaced value not found in the second "
        "spectrum");
  }
  const bool remark = !weighted_class && ell == -0.5;
  const bool some_infinite = std::isinf(beta1) || std::isinf(beta2);
  const ExchangeAssembly assembly = assemble_remainder(
      sigma2, dropped, beta1, beta2, remark && some_infinite,
      "weighted_replacement_check");

  double cap = std::max(max_abs(sigma1), max_abs(a_vals));
  cap = std::max(cap, max_abs(assembly.remainder2));
  const std::vector<double> grid =
      usable_radii(r_grid, cap, "weighted_replacement_check");
  const MarginSeries series =
      margin_trend({&sigma1, &a_vals, &assembly.remainder2}, 4.0 / M_PI,
                   2.0 * ell + 2.0, grid);

  CorollaryVerdict verdict;
  verdict.margin = series.slope;
  verdict.satisfied =
      weights.summable && separation.holds && series.slope >= kMarginSlopeFloor;
  char buf[260];
  std::snprintf(buf, sizeof(buf),
                "%s; weight sum %.6g (%s), separation constant %.6g%s",
                describe_slope(series).c_str(), weights.weight_sum,
                weights.summable ? "summable" : "not summable",
                separation.c_estimate,
                assembly.remark_drops > 0
                    ? "; one extra eigenvalue surrendered for the plain-L1 "
                      "ell = -1/2 case"
                    : "");
  verdict.detail = buf;
  return verdict;
}

}  // namespace pbessel
