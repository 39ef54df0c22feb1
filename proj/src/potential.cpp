#include "pbessel/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "pbessel/errors.hpp"
#include "pbessel/format.hpp"
#include "pbessel/quadrature.hpp"

namespace pbessel {

namespace {

void require_strictly_increasing(const std::vector<double>& v, double lo,
                                 double hi, const char* what) {
  double prev = lo;
  for (double x : v) {
    if (!(x > prev) || !(x < hi)) {
      throw std::invalid_argument(std::string(what) +
                                  ": entries must be strictly increasing inside (" +
                                  g17(lo) + ", " + g17(hi) + ")");
    }
    prev = x;
  }
}

double eval_cells(const std::vector<double>& breaks,
                  const std::vector<double>& values, double x) {
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  return values[static_cast<std::size_t>(it - breaks.begin())];
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void SmoothnessTag::validate(double a) const {
  if (k < 0) throw std::invalid_argument("smoothness: k must be >= 0");
  if (!(p >= 1.0)) throw std::invalid_argument("smoothness: p must be in [1, inf]");
  if (delta0 != 0.0 && !(delta0 > 0.0 && delta0 < a)) {
    throw std::invalid_argument("smoothness: delta0 must lie in (0, a)");
  }
  if (vanishing < 0) throw std::invalid_argument("smoothness: vanishing must be >= 0");
}

Potential Potential::zero() { return constant(0.0); }

Potential Potential::constant(double value) {
  return piecewise({}, {value});
}

Potential Potential::piecewise(std::vector<double> breakpoints,
                               std::vector<double> values) {
  require_strictly_increasing(breakpoints, 0.0, 1.0, "piecewise breakpoints");
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("piecewise: need one value per cell");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("piecewise: values must be finite");
  }
  Potential q;
  q.kind_ = Kind::Piecewise;
  q.breaks_ = std::move(breakpoints);
  q.values_ = std::move(values);
  q.rebuild_mandatory();
  return q;
}

static void validate_basis_args(double a, const std::vector<double>& coefficients,
                                const std::vector<double>& tail_breakpoints,
                                std::vector<double>& tail_values) {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("basis: a must lie in (0,1]");
  if (coefficients.empty()) throw std::invalid_argument("basis: empty coefficient list");
  if (tail_values.empty()) tail_values = {0.0};
  require_strictly_increasing(tail_breakpoints, a, 1.0, "tail breakpoints");
  if (tail_values.size() != tail_breakpoints.size() + 1) {
    throw std::invalid_argument("tail: need one value per cell");
  }
  for (double v : coefficients) {
    if (!std::isfinite(v)) throw std::invalid_argument("basis: coefficients must be finite");
  }
  for (double v : tail_values) {
    if (!std::isfinite(v)) throw std::invalid_argument("tail: values must be finite");
  }
}

Potential Potential::cosine_basis(std::vector<double> coefficients, double a,
                                  std::vector<double> tail_breakpoints,
                                  std::vector<double> tail_values) {
  validate_basis_args(a, coefficients, tail_breakpoints, tail_values);
  Potential q;
  q.kind_ = Kind::CosineBasis;
  q.a_ = a;
  q.coeffs_ = std::move(coefficients);
  q.breaks_ = std::move(tail_breakpoints);
  q.values_ = std::move(tail_values);
  q.rebuild_mandatory();
  return q;
}

Potential Potential::polynomial_basis(std::vector<double> coefficients, double a,
                                      std::vector<double> tail_breakpoints,
                                      std::vector<double> tail_values) {
  validate_basis_args(a, coefficients, tail_breakpoints, tail_values);
  Potential q;
  q.kind_ = Kind::PolynomialBasis;
  q.a_ = a;
  q.coeffs_ = std::move(coefficients);
  q.breaks_ = std::move(tail_breakpoints);
  q.values_ = std::move(tail_values);
  q.rebuild_mandatory();
  return q;
}

Potential Potential::table(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("table: need matching x/y with >= 2 samples");
  }
  require_strictly_increasing(x, 0.0, 1.0, "table x grid");
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("table: values must be finite");
  }
  Potential q;
  q.kind_ = Kind::Table;
  q.tx_ = std::move(x);
  q.ty_ = std::move(y);
  q.rebuild_mandatory();
  return q;
}

Potential Potential::from_function(const std::function<double(double)>& f,
                                   int samples) {
  if (samples < 2) throw std::invalid_argument("from_function: samples >= 2");
  std::vector<double> x(samples), y(samples);
  for (int i = 0; i < samples; ++i) {
    x[i] = (i + 1.0) / (samples + 1.0);
    y[i] = f(x[i]);
  }
  return table(std::move(x), std::move(y));
}

double Potential::operator()(double x) const {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::domain_error("potential: x must lie in (0,1), got " + g17(x));
  }
  return value_unchecked(x);
}

double Potential::value_unchecked(double x) const noexcept {
  switch (kind_) {
    case Kind::Piecewise:
      return eval_cells(breaks_, values_, x);
    case Kind::CosineBasis: {
      if (x >= a_) return eval_cells(breaks_, values_, x);
      double s = 0.0;
      for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        s += coeffs_[j] * std::cos(j * M_PI * x / a_);
      }
      return s;
    }
    case Kind::PolynomialBasis: {
      if (x >= a_) return eval_cells(breaks_, values_, x);
      double s = 0.0;
      for (std::size_t j = coeffs_.size(); j-- > 0;) s = s * x + coeffs_[j];
      return s;
    }
    case Kind::Table: {
      if (x <= tx_.front()) return ty_.front();
      if (x >= tx_.back()) return ty_.back();
      const auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - tx_.begin());
      const double w = (x - tx_[i - 1]) / (tx_[i] - tx_[i - 1]);
      return ty_[i - 1] + w * (ty_[i] - ty_[i - 1]);
    }
  }
  return 0.0;
}

void Potential::set_split_point(double a) {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("split point must lie in (0,1]");
  if (kind_ == Kind::CosineBasis || kind_ == Kind::PolynomialBasis) {
    throw std::invalid_argument("split point is structural for basis potentials");
  }
  a_ = a;
  tag_.validate(a_);
}

void Potential::set_smoothness(const SmoothnessTag& tag) {
  tag.validate(a_);
  tag_ = tag;
}

Potential Potential::shifted(double c) const {
  Potential q = *this;
  switch (kind_) {
    case Kind::Piecewise:
      for (double& v : q.values_) v += c;
      break;
    case Kind::CosineBasis:
      q.coeffs_[0] += c;
      for (double& v : q.values_) v += c;
      break;
    case Kind::PolynomialBasis:
      q.coeffs_[0] += c;
      for (double& v : q.values_) v += c;
      break;
    case Kind::Table:
      for (double& v : q.ty_) v += c;
      break;
  }
  return q;
}

const std::vector<double>& Potential::piecewise_breakpoints() const {
  if (kind_ != Kind::Piecewise) {
    throw std::invalid_argument("not a piecewise potential");
  }
  return breaks_;
}

const std::vector<double>& Potential::piecewise_values() const {
  if (kind_ != Kind::Piecewise) {
    throw std::invalid_argument("not a piecewise potential");
  }
  return values_;
}

void Potential::rebuild_mandatory() {
  mandatory_.clear();
  switch (kind_) {
    case Kind::Piecewise:
      mandatory_ = breaks_;
      break;
    case Kind::CosineBasis:
    case Kind::PolynomialBasis:
      if (a_ < 1.0) mandatory_.push_back(a_);
      mandatory_.insert(mandatory_.end(), breaks_.begin(), breaks_.end());
      break;
    case Kind::Table:
      break;
  }
}

double Potential::l1_norm() const {
  if (kind_ == Kind::Piecewise) {
    double s = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double next = (i < breaks_.size()) ? breaks_[i] : 1.0;
      s += std::abs(values_[i]) * (next - prev);
      prev = next;
    }
    return s;
  }
  return weighted_norm(*this, 0.0);
}

double weighted_norm(const Potential& q, double ell) {
  if (!(ell >= -0.5)) throw std::invalid_argument("weighted_norm: ell must be >= -1/2");
  const bool weighted = (ell == -0.5);
  std::vector<double> cuts = q.mandatory_points();
  cuts.push_back(1.0);
  try {
    double total = 0.0;
    double lo = 0.0;
    for (double hi : cuts) {
      if (hi <= lo) continue;
      if (weighted) {
        auto f = [&q](double x) {
          return std::abs((1.0 - std::log(x)) * q.value_unchecked(x));
        };
        if (lo == 0.0) {
          total += integrate_log_endpoint(f, hi);
        } else {
          total += integrate(f, lo, hi);
        }
      } else {
        total += integrate([&q](double x) { return std::abs(q.value_unchecked(x)); },
                           lo, hi);
      }
      lo = hi;
    }
    return total;
  } catch (const AccuracyError& e) {
    throw UnboundedNormError(std::string("weighted_norm: ") + e.what());
  }
}

double remainder_R(const Potential& q, double ell, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("remainder_R: lambda must be >= 0");
  if (!(ell >= -0.5)) throw std::invalid_argument("remainder_R: ell must be >= -1/2");
  const bool weighted = (ell == -0.5);
  const double root = std::sqrt(lambda);
  auto integrand = [&](double y) {
    const double qt = weighted ? std::abs((1.0 - std::log(y)) * q.value_unchecked(y))
                               : std::abs(q.value_unchecked(y));
    return y * qt / (1.0 + root * y);
  };
  std::vector<double> cuts = q.mandatory_points();
  cuts.push_back(1.0);
  try {
    double total = 0.0;
    double lo = 0.0;
    for (double hi : cuts) {
      if (hi <= lo) continue;
      if (weighted && lo == 0.0) {
        total += integrate_log_endpoint(integrand, hi);
      } else {
        total += integrate(integrand, lo, hi);
      }
      lo = hi;
    }
    return total;
  } catch (const AccuracyError& e) {
    throw UnboundedNormError(std::string("remainder_R: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Description format

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += g17(v[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    if (tok.empty()) continue;
    out.push_back(parse_double(tok));
  }
  return out;
}

}  // namespace

std::string Potential::describe() const {
  std::ostringstream out;
  const char* kind_name = "";
  switch (kind_) {
    case Kind::Piecewise: kind_name = "piecewise"; break;
    case Kind::CosineBasis: kind_name = "cosine"; break;
    case Kind::PolynomialBasis: kind_name = "polynomial"; break;
    case Kind::Table: kind_name = "table"; break;
  }
  out << "kind = " << kind_name << "\n";
  out << "a = " << g17(a_) << "\n";
  out << "\n[smoothness]\n";
  out << "k = " << tag_.k << "\n";
  out << "p = " << g17(tag_.p) << "\n";
  out << "delta0 = " << g17(tag_.delta0) << "\n";
  out << "vanishing = " << tag_.vanishing << "\n";
  out << "weighted_class = " << (tag_.weighted_class ? 1 : 0) << "\n";
  switch (kind_) {
    case Kind::Piecewise:
      out << "\n[piecewise]\n";
      out << "breakpoints = " << join(breaks_) << "\n";
      out << "values = " << join(values_) << "\n";
      break;
    case Kind::CosineBasis:
    case Kind::PolynomialBasis:
      out << "\n[basis]\n";
      out << "coefficients = " << join(coeffs_) << "\n";
      out << "\n[tail]\n";
      out << "breakpoints = " << join(breaks_) << "\n";
      out << "values = " << join(values_) << "\n";
      break;
    case Kind::Table:
      out << "\n[table]\n";
      out << "x = " << join(tx_) << "\n";
      out << "y = " << join(ty_) << "\n";
      break;
  }
  return out.str();
}

std::uint64_t Potential::hash() const { return fnv1a(describe()); }

std::string Potential::hash_hex() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash()));
  return buf;
}

Potential Potential::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::string section;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("potential description: bad line '" + line + "'");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    kv[section.empty() ? key : section + "." + key] = value;
  }

  auto get = [&kv](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return (it == kv.end()) ? fallback : it->second;
  };

  const std::string kind = get("kind", "piecewise");
  const double a = parse_double(get("a", "1"));

  Potential q;
  if (kind == "piecewise") {
    q = piecewise(split_doubles(get("piecewise.breakpoints", "")),
                  split_doubles(get("piecewise.values", "0")));
    if (a != 1.0) q.set_split_point(a);
  } else if (kind == "cosine" || kind == "polynomial") {
    auto coeffs = split_doubles(get("basis.coefficients", ""));
    auto tb = split_doubles(get("tail.breakpoints", ""));
    auto tv = split_doubles(get("tail.values", ""));
    q = (kind == "cosine") ? cosine_basis(coeffs, a, tb, tv)
                           : polynomial_basis(coeffs, a, tb, tv);
  } else if (kind == "table") {
    q = table(split_doubles(get("table.x", "")), split_doubles(get("table.y", "")));
    if (a != 1.0) q.set_split_point(a);
  } else {
    throw std::invalid_argument("potential description: unknown kind '" + kind + "'");
  }

  SmoothnessTag tag;
  tag.k = static_cast<int>(parse_double(get("smoothness.k", "0")));
  tag.p = parse_double(get("smoothness.p", "inf"));
  tag.delta0 = parse_double(get("smoothness.delta0", "0"));
  tag.vanishing = static_cast<int>(parse_double(get("smoothness.vanishing", "0")));
  tag.weighted_class = parse_double(get("smoothness.weighted_class", "1")) != 0.0;
  q.set_smoothness(tag);
  return q;
}

Potential Potential::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open potential file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Potential::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write potential file: " + path);
  out << describe();
}

}  // namespace pbessel
